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

#include "povmshadow/estimator.h"

#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "test_util.h"

namespace povmshadow {
namespace {

// ceil(B ln(2L/delta) / (2 eps^2)) in long double.
std::size_t reference_samples(long double b, long double l, long double eps, long double delta) {
  return static_cast<std::size_t>(std::ceil(b * std::log(2 * l / delta) / (2 * eps * eps)));
}

const FactorTable& pauli6_table() {
  static const FactorTable t = factor_table(measurement_channel(builtin_povm("pauli6")));
  return t;
}

const FactorTable& pauli4_table() {
  static const FactorTable t = factor_table(measurement_channel(builtin_povm("pauli4")));
  return t;
}

ShadowEnsemble one_qubit_records(std::initializer_list<std::uint8_t> outcomes) {
  ShadowEnsemble e(1, 6, "pauli6", "none", 0);
  for (std::uint8_t a : outcomes) e.add_record(std::span<const std::uint8_t>(&a, 1));
  return e;
}

TEST(EstimatorMethod, ParseAndDescribe) {
  EXPECT_EQ(EstimatorMethod::parse("mean").kind, EstimatorMethod::Kind::kMean);
  const auto m = EstimatorMethod::parse("mom:7");
  EXPECT_EQ(m.kind, EstimatorMethod::Kind::kMedianOfMeans);
  EXPECT_EQ(m.batches, 7u);
  EXPECT_EQ(m.describe(), "mom:7");
  EXPECT_EQ(EstimatorMethod::mean().describe(), "mean");
  EXPECT_THROW(EstimatorMethod::parse("mom:0"), std::invalid_argument);
  EXPECT_THROW(EstimatorMethod::parse("median"), std::invalid_argument);
  // ceil(2 ln(2 * 435 / 0.05)) = ceil(19.53...) = 20
  EXPECT_EQ(EstimatorMethod::default_median_of_means(435, 0.05).batches,
            static_cast<std::size_t>(std::ceil(2 * std::log(2 * 435 / 0.05L))));
}

TEST(RunningMoments, MatchesTwoPass) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(3.0, 2.0);
  std::vector<double> xs(1001);
  for (auto& x : xs) x = g(rng);
  RunningMoments all, a, b;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    all.add(xs[i]);
    (i < 400 ? a : b).add(xs[i]);
  }
  a.merge(b);
  double mean = 0;
  for (double x : xs) mean += x;
  mean /= xs.size();
  double var = 0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= xs.size() - 1;
  EXPECT_NEAR(all.mean(), mean, 1e-12);
  EXPECT_NEAR(all.variance(), var, 1e-11);
  EXPECT_NEAR(a.mean(), mean, 1e-12);
  EXPECT_NEAR(a.variance(), var, 1e-11);
  EXPECT_EQ(a.count(), xs.size());
  RunningMoments single;
  single.add(1.0);
  EXPECT_EQ(single.variance(), 0.0);
}

TEST(Estimate, SingleRecord) {
  const auto e = one_qubit_records({0});
  const auto est = estimate(e, PauliObservable::parse("Z0"), pauli6_table());
  EXPECT_NEAR(est.value, 3.0, 1e-12);
  EXPECT_EQ(est.samples, 1u);
  EXPECT_EQ(est.std_dev, 0.0);
}

TEST(Estimate, MedianOfMeansUsesContiguousBatches) {
  // per-record Z values: 3 3 3 | 3 3 3 | -3 -3 -3
  const auto e = one_qubit_records({0, 0, 0, 0, 0, 0, 1, 1, 1});
  const auto z = PauliObservable::parse("Z0");
  EXPECT_NEAR(estimate(e, z, pauli6_table()).value, 1.0, 1e-12);
  EXPECT_NEAR(estimate(e, z, pauli6_table(), EstimatorMethod::median_of_means(3)).value, 3.0, 1e-12);
  EXPECT_NEAR(estimate(e, z, pauli6_table(), EstimatorMethod::median_of_means(1)).value, 1.0, 1e-12);
  EXPECT_THROW(estimate(e, z, pauli6_table(), EstimatorMethod::median_of_means(10)),
               std::invalid_argument);
}

TEST(Estimate, CoefficientAndRecordValues) {
  const auto e = one_qubit_records({0, 1, 2, 3, 4, 5});
  const auto v = record_estimates(e, PauliObservable::parse("0.5*X0"), pauli6_table());
  const double expected[6] = {0, 0, 1.5, -1.5, 0, 0};
  ASSERT_EQ(v.size(), 6u);
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(v[i], expected[i], 1e-12);
}

TEST(Estimate, RejectsMismatches) {
  const auto e = one_qubit_records({0, 1});
  EXPECT_THROW(record_estimates(e, PauliObservable::parse("Z0"), pauli4_table()),
               std::invalid_argument);
  EXPECT_THROW(record_estimates(e, PauliObservable::parse("Z1"), pauli6_table()),
               std::invalid_argument);
  const auto noisy = factor_table(measurement_channel(builtin_povm("pauli6"), SnapshotRule::limit(),
                                                      NoiseModel::depolarizing(0.1)));
  EXPECT_THROW(record_estimates(e, PauliObservable::parse("Z0"), noisy), std::invalid_argument);
  const ShadowEnsemble empty(1, 6, "pauli6", "none", 0);
  EXPECT_THROW(estimate(empty, PauliObservable::parse("Z0"), pauli6_table()), std::invalid_argument);
}

TEST(Estimate, ExhaustiveUnbiasedness) {
  // sum over every outcome tuple of p(a) * estimate(a) equals tr(rho O)
  std::mt19937_64 rng(6);
  const Eigen::MatrixXcd rho = oracle::random_density(2, rng);
  for (const auto& name : builtin_povm_names()) {
    const Povm p = builtin_povm(name);
    const auto t = factor_table(measurement_channel(p));
    for (const char* text : {"Z0Z1", "X0Y1", "Y0", "X1"}) {
      const auto obs = PauliObservable::parse(text);
      ShadowEnsemble all(2, p.size(), name, "none", 0);
      std::vector<double> probs;
      for (std::uint8_t a = 0; a < p.size(); ++a) {
        for (std::uint8_t b = 0; b < p.size(); ++b) {
          const std::uint8_t r[2] = {a, b};
          all.add_record(r);
          probs.push_back(
              (rho * oracle::kron(p.element(a).matrix, p.element(b).matrix)).trace().real());
        }
      }
      const auto v = record_estimates(all, obs, t);
      double mean = 0;
      for (std::size_t i = 0; i < v.size(); ++i) mean += probs[i] * v[i];
      std::vector<int> axes(2, 0);
      for (const auto& f : obs.support()) axes[f.site] = bloch_index(f.axis);
      EXPECT_NEAR(mean, (rho * oracle::pauli_string(axes)).trace().real(), 1e-10) << name << text;
    }
  }
}

TEST(Estimate, GhzCorrelators) {
  const Povm p6 = builtin_povm("pauli6");
  const auto clean = sample(QuantumState(ghz(30)), p6, std::nullopt, 5000, 1);
  const auto noisy = sample(QuantumState(ghz(30)), p6, NoiseModel::depolarizing_from_error_rate(0.3),
                            5000, 2);
  const auto noisy_table = factor_table(measurement_channel(p6, SnapshotRule::limit(),
                                                            NoiseModel::depolarizing_from_error_rate(0.3)));
  for (std::size_t j : {1u, 10u, 29u}) {
    EXPECT_NEAR(estimate(clean, PauliObservable::zz(0, j), pauli6_table()).value, 1.0, 0.15);
    // the noise-aware table removes the noise; the noiseless table sees (1 - 4p/3)^2
    const ShadowEnsemble relabeled = [&] {
      ShadowEnsemble e(30, 6, "pauli6", "none", 2);
      for (std::size_t r = 0; r < noisy.size(); ++r) e.add_record(noisy.record(r));
      return e;
    }();
    EXPECT_NEAR(estimate(relabeled, PauliObservable::zz(0, j), pauli6_table()).value, 0.36, 0.15);
    EXPECT_NEAR(estimate(noisy, PauliObservable::zz(0, j), noisy_table).value, 1.0, 0.4);
  }
}

TEST(BoundConstant, KnownValues) {
  EXPECT_NEAR(bound_constant(pauli6_table(), 2), 324.0, 1e-9);
  EXPECT_NEAR(bound_constant(pauli6_table(), 1), 36.0, 1e-9);
  EXPECT_NEAR(bound_constant(pauli4_table(), 1), 100.0, 1e-9);
  EXPECT_EQ(bound_constant(pauli6_table(), 0), 0.0);
}

TEST(RequiredSamples, ArithmeticOracle) {
  EXPECT_EQ(required_samples(36, 1, 0.1, 0.05), reference_samples(36, 1, 0.1L, 0.05L));
  EXPECT_EQ(required_samples(36, 1, 0.1, 0.05), 6640u);
  EXPECT_EQ(required_samples(324, 435, 0.3, 0.05), reference_samples(324, 435, 0.3L, 0.05L));
  EXPECT_EQ(required_samples(324, 15, 0.4, 0.1), reference_samples(324, 15, 0.4L, 0.1L));
  EXPECT_EQ(required_samples(36, 1, 1e6, 0.05), 1u);
  EXPECT_EQ(required_samples(0, 1, 0.1, 0.05), 1u);
  EXPECT_THROW(required_samples(36, 1, 0.1, 1.0), std::invalid_argument);
  EXPECT_THROW(required_samples(36, 1, 0.1, 0.0), std::invalid_argument);
  EXPECT_THROW(required_samples(36, 1, 0.0, 0.05), std::invalid_argument);
  EXPECT_THROW(required_samples(36, 0, 0.1, 0.05), std::invalid_argument);

  const auto budget = plan_samples(pauli6_table(), 2, 435, 0.3, 0.05);
  EXPECT_NEAR(budget.bound, 324.0, 1e-9);
  EXPECT_EQ(budget.samples, reference_samples(324, 435, 0.3L, 0.05L));
  EXPECT_THROW(plan_samples(pauli6_table(), 0, 1, 0.1, 0.05), std::invalid_argument);
}

TEST(ChebyshevSamples, ArithmeticAndScaling) {
  EXPECT_EQ(chebyshev_samples(8, 0.1, 0.05), 16000u);
  EXPECT_EQ(chebyshev_samples(0, 0.1, 0.05), 1u);
  const double h1 = static_cast<double>(required_samples(36, 1, 0.1, 0.05));
  const double h100 = static_cast<double>(required_samples(36, 100, 0.1, 0.05));
  const double c1 = static_cast<double>(chebyshev_samples(9, 0.1, 0.05, 1));
  const double c100 = static_cast<double>(chebyshev_samples(9, 0.1, 0.05, 100));
  EXPECT_NEAR(c100 / c1, 100.0, 1e-9);
  EXPECT_NEAR(h100 / h1, std::log(2 * 100 / 0.05) / std::log(2 / 0.05), 1e-3);
  EXPECT_LT(h100 / h1, 3.0);
}

TEST(VarianceBound, KnownValues) {
  EXPECT_NEAR(variance_bound(pauli6_table(), PauliObservable::zz(0, 1)), 9.0, 1e-10);
  EXPECT_NEAR(variance_bound(pauli6_table(), PauliObservable::parse("X0Y1Z2")), 27.0, 1e-10);
  const QuantumState down = uniform_product_state(4, {0, 0, -1});
  const QuantumState up = uniform_product_state(4, {0, 0, 1});
  EXPECT_NEAR(variance_bound(pauli4_table(), PauliObservable::zz(0, 1), &down), 1.0, 1e-10);
  EXPECT_NEAR(variance_bound(pauli4_table(), PauliObservable::zz(1, 3), &up), 81.0, 1e-10);
  EXPECT_THROW(variance_bound(pauli4_table(), PauliObservable::zz(0, 1)), std::invalid_argument);
}

TEST(VarianceBound, BoundsEmpiricalVariance) {
  const QuantumState g = ghz(8);
  for (const auto& name : builtin_povm_names()) {
    const auto t = factor_table(measurement_channel(builtin_povm(name)));
    const auto e = sample(g, builtin_povm(name), std::nullopt, 20000, 3);
    for (std::size_t j : {1u, 5u}) {
      const auto obs = PauliObservable::zz(0, j);
      const double var = std::pow(estimate(e, obs, t).std_dev, 2);
      EXPECT_LE(var, 1.05 * variance_bound(t, obs, &g)) << name;
    }
  }
}

TEST(MaxError, Arithmetic) {
  const std::vector<double> a = {1.0, 0.2}, b = {0.9, 0.5};
  EXPECT_NEAR(max_error(a, b), 0.3, 1e-15);
  EXPECT_EQ(max_error(a, a), 0.0);
  EXPECT_THROW(max_error(a, std::vector<double>{1.0}), std::invalid_argument);
}

TEST(MaxError, GhzPrefersPauli6) {
  const QuantumState g = ghz(30);
  const auto pairs = all_zz_pairs(30);
  std::vector<double> truths(pairs.size(), 1.0);
  auto worst = [&](const std::string& name) {
    const auto t = factor_table(measurement_channel(builtin_povm(name)));
    const auto e = sample(g, builtin_povm(name), std::nullopt, 5000, 77);
    std::vector<double> est;
    for (const auto& ee : estimate_all(e, pairs, t)) est.push_back(ee.value);
    return max_error(est, truths);
  };
  EXPECT_LT(worst("pauli6"), worst("pauli4"));
}

TEST(EstimatesOutput, CsvAndJson) {
  const auto obs = PauliObservable::parse("0.5*Z0Z1");
  Estimate est;
  est.value = 0.25;
  est.std_error = 0.01;
  est.samples = 100;
  const std::vector<EstimateRow> rows = {make_row(obs, EstimatorMethod::mean(), est, 0.5),
                                         make_row(PauliObservable::parse("X2"),
                                                  EstimatorMethod::median_of_means(5), est)};
  EXPECT_EQ(rows[0].support, "0:z;1:z");
  std::ostringstream out;
  write_estimates_csv(rows, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "# schema: estimates/1");
  std::getline(in, line);
  EXPECT_EQ(line, "observable,support,method,N,estimate,std_error,truth,abs_error");
  std::getline(in, line);
  EXPECT_EQ(line.rfind("0.5*Z0Z1,0:z;1:z,mean,100,", 0), 0u) << line;

  const auto j = nlohmann::json::parse(estimates_json(rows, plan_samples(pauli6_table(), 2, 1, 0.1, 0.05)));
  EXPECT_EQ(j["schema"], "estimates/1");
  EXPECT_EQ(j["results"].size(), 2u);
  EXPECT_TRUE(j["budget"].is_object());
}

}  // namespace
}  // namespace povmshadow
