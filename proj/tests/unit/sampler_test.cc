// Copyright 2026 The povm-shadows Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "povmshadow/sampler.h"

#include <cmath>
#include <random>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>
#include <gtest/gtest.h>

#include "test_util.h"

namespace povmshadow {
namespace {

// Joint outcome law tr(E(rho) M_{a_0} (x) ... ) evaluated on the full matrix.
std::vector<double> exact_law(const Eigen::MatrixXcd& rho, int n, const Povm& povm,
                              const std::optional<NoiseModel>& noise) {
  Eigen::MatrixXcd r = rho;
  if (noise) {
    for (int q = 0; q < n; ++q) {
      Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(r.rows(), r.cols());
      for (const Mat2& k : noise->kraus()) {
        std::vector<Eigen::MatrixXcd> f(n, Eigen::MatrixXcd::Identity(2, 2));
        f[q] = k;
        const Eigen::MatrixXcd kk = oracle::kron_all(f);
        next += kk * r * kk.adjoint();
      }
      r = next;
    }
  }
  const std::size_t k = povm.size();
  std::size_t cells = 1;
  for (int i = 0; i < n; ++i) cells *= k;
  std::vector<double> p(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    std::vector<Eigen::MatrixXcd> f(n);
    std::size_t rest = c;
    for (int i = n - 1; i >= 0; --i) {
      f[i] = povm.element(rest % k).matrix;
      rest /= k;
    }
    p[c] = (r * oracle::kron_all(f)).trace().real();
  }
  return p;
}

std::vector<double> counts(const ShadowEnsemble& e) {
  const std::size_t k = e.num_outcomes();
  std::size_t cells = 1;
  for (std::size_t i = 0; i < e.num_qubits(); ++i) cells *= k;
  std::vector<double> c(cells, 0.0);
  for (std::size_t j = 0; j < e.size(); ++j) {
    std::size_t idx = 0;
    for (auto a : e.record(j)) idx = idx * k + a;
    c[idx] += 1;
  }
  return c;
}

// Pearson goodness-of-fit p-value; outcomes of zero probability must not occur.
double gof_pvalue(const std::vector<double>& observed, const std::vector<double>& p) {
  double n = 0, stat = 0;
  for (double o : observed) n += o;
  int df = -1;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 1e-14) {
      EXPECT_EQ(observed[i], 0.0) << "impossible outcome " << i;
      continue;
    }
    const double e = n * p[i];
    stat += (observed[i] - e) * (observed[i] - e) / e;
    ++df;
  }
  if (df <= 0) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(df), stat));
}

constexpr double kMinPValue = 1e-5;

TEST(Sampler, KetZeroPauli6Frequencies) {
  Eigen::VectorXcd zero(2);
  zero << 1, 0;
  const auto e = sample_dense(DenseState::from_vector(zero), builtin_povm("pauli6"), 60000, 1);
  EXPECT_EQ(e.size(), 60000u);
  EXPECT_GT(gof_pvalue(counts(e), {1.0 / 3, 0, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6}), kMinPValue);
}

TEST(Sampler, MaximallyMixedPauli4Frequencies) {
  const auto mixed = DenseState::from_density_matrix(0.5 * Eigen::MatrixXcd::Identity(2, 2));
  const auto e = sample_dense(mixed, builtin_povm("pauli4"), 60000, 2);
  EXPECT_GT(gof_pvalue(counts(e), {1.0 / 6, 1.0 / 6, 1.0 / 6, 0.5}), kMinPValue);
}

TEST(Sampler, EmptyEnsemble) {
  const auto e = sample(QuantumState(ghz(4)), builtin_povm("tetra"), std::nullopt, 0, 3);
  EXPECT_TRUE(e.empty());
  EXPECT_EQ(e.size(), 0u);
  EXPECT_EQ(e.num_qubits(), 4u);
  EXPECT_EQ(e.num_outcomes(), 4u);
}

TEST(Sampler, JointLawThreeQubits) {
  std::mt19937_64 rng(31);
  const Eigen::VectorXcd psi = oracle::random_pure(3, rng);
  const Eigen::MatrixXcd mixed = oracle::random_density(3, rng);
  const std::vector<std::optional<NoiseModel>> noises = {
      std::nullopt, NoiseModel::depolarizing(0.2), NoiseModel::amplitude_damping(0.3)};
  std::uint64_t seed = 100;
  for (const auto& name : builtin_povm_names()) {
    const Povm povm = builtin_povm(name);
    for (const auto& noise : noises) {
      const auto law_pure = exact_law(psi * psi.adjoint(), 3, povm, noise);
      const auto law_mixed = exact_law(mixed, 3, povm, noise);
      const QuantumState pure_state = DenseState::from_vector(psi);
      const QuantumState mixed_state = DenseState::from_density_matrix(mixed);
      const auto ep = sample(pure_state, povm, noise, 40000, ++seed);
      const auto em = sample(mixed_state, povm, noise, 40000, ++seed);
      EXPECT_GT(gof_pvalue(counts(ep), law_pure), kMinPValue) << name << " pure";
      EXPECT_GT(gof_pvalue(counts(em), law_mixed), kMinPValue) << name << " mixed";
      EXPECT_EQ(ep.noise_id(), noise_descriptor(noise));
      EXPECT_EQ(ep.povm_id(), name);
    }
  }
}

TEST(Sampler, MpsJointLaw) {
  const Eigen::VectorXcd g3 = oracle::ghz_vector(3);
  for (const auto& name : builtin_povm_names()) {
    const Povm povm = builtin_povm(name);
    const auto e = sample_mps(ghz(3), povm, 40000, 7);
    EXPECT_GT(gof_pvalue(counts(e), exact_law(g3 * g3.adjoint(), 3, povm, std::nullopt)),
              kMinPValue)
        << name;
  }
}

TEST(Sampler, BellMpsVersusDense) {
  const Povm p6 = builtin_povm("pauli6");
  const auto em = sample_mps(ghz(2), p6, 100000, 11);
  const auto ed = sample_dense(DenseState::from_vector(oracle::ghz_vector(2)), p6, 100000, 12);
  const auto cm = counts(em), cd = counts(ed);
  double tv = 0;
  for (std::size_t i = 0; i < cm.size(); ++i) tv += std::abs(cm[i] - cd[i]) / 100000.0;
  EXPECT_LT(0.5 * tv, 0.02);
}

TEST(Sampler, LargeGhzMarginals) {
  const auto e = sample_mps(ghz(30), builtin_povm("pauli6"), 6000, 13);
  for (std::size_t site : {0u, 14u, 29u}) {
    std::vector<double> c(6, 0.0);
    for (std::size_t j = 0; j < e.size(); ++j) c[e.outcome(j, site)] += 1;
    EXPECT_GT(gof_pvalue(c, std::vector<double>(6, 1.0 / 6)), kMinPValue) << site;
  }
  // parity of z outcomes: records measuring Z on every site have equal bits
  for (std::size_t j = 0; j < e.size(); ++j) {
    int zeros = 0, ones = 0;
    for (auto a : e.record(j)) {
      zeros += a == 0;
      ones += a == 1;
    }
    EXPECT_FALSE(zeros > 0 && ones > 0) << "record " << j;
  }
}

TEST(Sampler, AllDownMarginal) {
  const auto e = sample_mps(uniform_product_state(30, {0, 0, -1}), builtin_povm("pauli6"), 6000, 17);
  std::vector<double> c(6, 0.0);
  for (std::size_t j = 0; j < e.size(); ++j) c[e.outcome(j, 5)] += 1;
  EXPECT_GT(gof_pvalue(c, {0, 1.0 / 3, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6}), kMinPValue);
}

TEST(Sampler, FullDampingOnKetOne) {
  Eigen::VectorXcd one(2);
  one << 0, 1;
  const auto e = sample_noisy(DenseState::from_vector(one), builtin_povm("pauli6"),
                              NoiseModel::amplitude_damping(1.0), 60000, 19);
  EXPECT_GT(gof_pvalue(counts(e), {1.0 / 3, 0, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6}), kMinPValue);
}

TEST(Sampler, ZeroDampingMatchesNoiseless) {
  const auto clean = sample_mps(ghz(5), builtin_povm("pauli6"), 2000, 21);
  const auto damped = sample_noisy(ghz(5), builtin_povm("pauli6"),
                                   NoiseModel::amplitude_damping(0.0), 2000, 21);
  EXPECT_EQ(clean.raw(), damped.raw());
  EXPECT_EQ(damped.noise_id(), NoiseModel::amplitude_damping(0.0).descriptor());
}

TEST(Sampler, DeterministicAcrossWorkersAndSplits) {
  const Povm p = builtin_povm("tetra");
  const QuantumState g = ghz(12);
  const auto one = sample(g, p, std::nullopt, 3000, 99, {.workers = 1});
  const auto four = sample(g, p, std::nullopt, 3000, 99, {.workers = 4});
  EXPECT_EQ(one, four);
  auto head = sample(g, p, std::nullopt, 1234, 99, {.workers = 2});
  const auto tail = sample(g, p, std::nullopt, 3000 - 1234, 99, {.workers = 3, .first_record = 1234});
  head.append(tail);
  EXPECT_EQ(head.raw(), one.raw());
  const auto other = sample(g, p, std::nullopt, 3000, 100, {.workers = 1});
  EXPECT_NE(other.raw(), one.raw());
  EXPECT_NE(record_seed(1, 0), record_seed(1, 1));
  EXPECT_NE(record_seed(1, 0), record_seed(2, 0));
}

TEST(Sampler, RejectsOversizedBond) {
  std::vector<SiteTensor> sites(3);
  sites[0].matrices = {Eigen::MatrixXcd::Zero(1, 65), Eigen::MatrixXcd::Zero(1, 65)};
  sites[1].matrices = {Eigen::MatrixXcd::Zero(65, 65), Eigen::MatrixXcd::Zero(65, 65)};
  sites[2].matrices = {Eigen::MatrixXcd::Zero(65, 1), Eigen::MatrixXcd::Zero(65, 1)};
  sites[0].matrices[0](0, 0) = 1;
  sites[1].matrices[0](0, 0) = 1;
  sites[2].matrices[0](0, 0) = 1;
  const MpsState big = MpsState::create(sites);
  EXPECT_THROW(sample_mps(big, builtin_povm("pauli6"), 10, 1), std::invalid_argument);
}

TEST(Ensemble, RecordsAndAppend) {
  ShadowEnsemble e(3, 4, "tetra", "none", 5);
  const std::uint8_t r[3] = {0, 3, 2};
  e.add_record(r);
  EXPECT_EQ(e.size(), 1u);
  EXPECT_EQ(e.outcome(0, 1), 3);
  const std::uint8_t bad[3] = {0, 4, 2};
  EXPECT_THROW(e.add_record(bad), std::invalid_argument);
  const std::uint8_t short_rec[2] = {0, 1};
  EXPECT_THROW(e.add_record(short_rec), std::invalid_argument);
  ShadowEnsemble other(3, 4, "pauli4", "none", 5);
  EXPECT_FALSE(e.compatible_with(other));
  EXPECT_THROW(e.append(other), std::invalid_argument);
  ShadowEnsemble noisy(3, 4, "tetra", "depolarizing:0.2", 5);
  EXPECT_THROW(e.append(noisy), std::invalid_argument);
}

TEST(Ensemble, BinaryRoundTrip) {
  const auto e = sample(QuantumState(ghz(7)), builtin_povm("pauli4"),
                        NoiseModel::depolarizing(0.1), 500, 42);
  std::stringstream buf;
  write_ensemble(e, buf);
  const std::string bytes = buf.str();
  EXPECT_EQ(bytes.substr(0, 8), "POVMSHD1");
  std::stringstream in(bytes);
  EXPECT_EQ(read_ensemble(in), e);

  std::string corrupt = bytes;
  corrupt[0] = 'X';
  std::stringstream bad(corrupt);
  EXPECT_THROW(read_ensemble(bad), std::invalid_argument);
  std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(read_ensemble(truncated), std::invalid_argument);
}

TEST(Ensemble, CsvLayout) {
  ShadowEnsemble e(2, 6, "pauli6", "none", 9);
  const std::uint8_t r0[2] = {1, 5}, r1[2] = {0, 2};
  e.add_record(r0);
  e.add_record(r1);
  std::ostringstream out;
  write_ensemble_csv(e, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "# schema: ensemble/1");
  std::getline(in, line);
  EXPECT_EQ(line.rfind("# ", 0), 0u);
  std::getline(in, line);
  EXPECT_EQ(line, "record,q0,q1");
  std::getline(in, line);
  EXPECT_EQ(line, "0,1,5");
  std::getline(in, line);
  EXPECT_EQ(line, "1,0,2");
}

}  // namespace
}  // namespace povmshadow
