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

#include "povmshadow/states.h"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "test_util.h"

namespace povmshadow {
namespace {

using oracle::pauli;

// Normalised random MPS with the given internal bond dimensions.
MpsState random_mps(std::size_t n, std::size_t chi, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<SiteTensor> sites(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Index l = i == 0 ? 1 : static_cast<Eigen::Index>(chi);
    const Eigen::Index r = i + 1 == n ? 1 : static_cast<Eigen::Index>(chi);
    for (auto& m : sites[i].matrices) {
      m.resize(l, r);
      for (Eigen::Index a = 0; a < l; ++a)
        for (Eigen::Index b = 0; b < r; ++b) m(a, b) = Complex(g(rng), g(rng));
    }
  }
  // norm by explicit summation over all bitstrings
  double norm2 = 0;
  for (std::size_t b = 0; b < (std::size_t{1} << n); ++b) {
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(1, 1);
    for (std::size_t i = 0; i < n; ++i) p = p * sites[i].matrices[(b >> (n - 1 - i)) & 1];
    norm2 += std::norm(p(0, 0));
  }
  for (auto& m : sites[0].matrices) m /= std::sqrt(norm2);
  return MpsState::create(std::move(sites));
}

Eigen::MatrixXcd dense_heisenberg(int n, const std::vector<double>& jx, const std::vector<double>& jy,
                                  const std::vector<double>& jz, double h) {
  const int d = 1 << n;
  Eigen::MatrixXcd hm = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 0; i + 1 < n; ++i) {
    for (int a = 1; a <= 3; ++a) {
      std::vector<int> axes(n, 0);
      axes[i] = axes[i + 1] = a;
      const double j = a == 1 ? jx[i] : a == 2 ? jy[i] : jz[i];
      hm -= 0.5 * j * oracle::pauli_string(axes);
    }
  }
  for (int i = 0; i < n; ++i) {
    std::vector<int> axes(n, 0);
    axes[i] = 3;
    hm -= 0.5 * h * oracle::pauli_string(axes);
  }
  return hm;
}

Eigen::MatrixXcd dense_tfim(int n, double j, double h) {
  const int d = 1 << n;
  Eigen::MatrixXcd hm = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 0; i < n; ++i) {
    std::vector<int> axes(n, 0);
    axes[i] = 1;
    hm += h * oracle::pauli_string(axes);
    if (i + 1 < n) {
      std::vector<int> zz(n, 0);
      zz[i] = zz[i + 1] = 3;
      hm += j * oracle::pauli_string(zz);
    }
  }
  return hm;
}

double zz(const Eigen::VectorXcd& v, int n, int i, int j) {
  std::vector<int> axes(n, 0);
  axes[i] = axes[j] = 3;
  return v.dot(oracle::pauli_string(axes) * v).real();
}

TEST(DenseState, Validation) {
  EXPECT_NO_THROW(DenseState::from_vector(oracle::ghz_vector(3)));
  EXPECT_THROW(DenseState::from_vector(Eigen::VectorXcd::Ones(4)), std::invalid_argument);
  EXPECT_THROW(DenseState::from_vector(Eigen::VectorXcd::Ones(3) / std::sqrt(3.0)),
               std::invalid_argument);
  std::mt19937_64 rng(1);
  EXPECT_NO_THROW(DenseState::from_density_matrix(oracle::random_density(2, rng)));
  Eigen::MatrixXcd bad = Eigen::MatrixXcd::Identity(2, 2);
  EXPECT_THROW(DenseState::from_density_matrix(bad), std::invalid_argument);  // trace 2
  bad << 1.5, 0, 0, -0.5;
  EXPECT_THROW(DenseState::from_density_matrix(bad), std::invalid_argument);  // negative
  bad << 0.5, 0.1, 0.2, 0.5;
  EXPECT_THROW(DenseState::from_density_matrix(bad), std::invalid_argument);  // not Hermitian
}

TEST(Mps, GhzContraction) {
  const Eigen::VectorXcd bell = ghz(2).to_vector();
  EXPECT_LT((bell - oracle::ghz_vector(2)).norm(), 1e-15);
  for (int n : {3, 6, 10}) {
    EXPECT_LT((ghz(n).to_vector() - oracle::ghz_vector(n)).norm(), 1e-14);
  }
  EXPECT_EQ(ghz(30).max_bond(), 2u);
  EXPECT_NEAR(ghz(30).norm_squared(), 1.0, 1e-14);
  EXPECT_THROW(ghz(1), std::invalid_argument);
}

TEST(Mps, GhzExpectations) {
  const QuantumState g3 = ghz(3);
  EXPECT_NEAR(exact_expectation(g3, PauliObservable::zz(0, 1)), 1.0, 1e-14);
  EXPECT_NEAR(exact_expectation(g3, PauliObservable::parse("Z0")), 0.0, 1e-14);
  const QuantumState g5 = ghz(5);
  EXPECT_NEAR(exact_expectation(g5, PauliObservable::zz(1, 3)), 1.0, 1e-14);
  EXPECT_NEAR(exact_expectation(g5, PauliObservable::parse("Z1")), 0.0, 1e-14);
  EXPECT_NEAR(exact_expectation(g5, PauliObservable::parse("X0X1X2X3X4")), 1.0, 1e-14);
}

TEST(Mps, ProductStates) {
  const auto down = uniform_product_state(5, {0, 0, -1});
  for (int i = 0; i < 5; ++i) {
    EXPECT_NEAR(exact_expectation(down, PauliObservable({{static_cast<std::size_t>(i), Axis::kZ}})),
                -1.0, 1e-15);
  }
  Eigen::VectorXcd all_one = Eigen::VectorXcd::Zero(32);
  all_one[31] = 1;
  EXPECT_LT((down.to_vector() - all_one).norm(), 1e-15);
  const auto up = uniform_product_state(4, {0, 0, 1});
  EXPECT_NEAR(exact_expectation(up, PauliObservable::zz(0, 3)), 1.0, 1e-15);
  const Eigen::Vector3d plus_dir(1, 0, 0);
  const auto plus = product_state(std::span(&plus_dir, 1));
  EXPECT_LT((plus.to_vector() - Eigen::Vector2cd(1, 1) / std::sqrt(2.0)).norm(), 1e-15);
  EXPECT_THROW(uniform_product_state(3, {0, 0, 0.5}), std::invalid_argument);
}

TEST(Mps, RandomMpsMatchesDense) {
  std::mt19937_64 rng(41);
  for (std::size_t n : {2u, 4u, 7u}) {
    const MpsState mps = random_mps(n, 3, rng);
    EXPECT_NEAR(mps.norm_squared(), 1.0, 1e-12);
    const Eigen::VectorXcd v = mps.to_vector();
    EXPECT_NEAR(v.norm(), 1.0, 1e-12);
    const DenseState dense = DenseState::from_vector(v);
    const int ni = static_cast<int>(n);
    for (int t = 0; t < 10; ++t) {
      std::vector<PauliFactor> f;
      std::vector<int> axes(n, 0);
      for (std::size_t i = 0; i < n; ++i) {
        const int a = std::uniform_int_distribution<int>(0, 3)(rng);
        axes[i] = a;
        if (a) f.push_back({i, static_cast<Axis>(a)});
      }
      const double truth = v.dot(oracle::pauli_string(axes) * v).real();
      EXPECT_NEAR(pauli_string_expectation(mps, f), truth, 1e-12);
      EXPECT_NEAR(pauli_string_expectation(dense, f), truth, 1e-12);
    }
    // general product operators
    std::vector<SiteOperator> ops;
    std::vector<Eigen::MatrixXcd> full;
    for (int i = 0; i < ni; ++i) {
      const Mat2 q = oracle::random_hermitian(rng);
      ops.push_back({static_cast<std::size_t>(i), q});
      full.push_back(q);
    }
    const double truth = v.dot(oracle::kron_all(full) * v).real();
    EXPECT_NEAR(product_operator_expectation(mps, ops), truth, 1e-10 * std::max(1.0, std::abs(truth)));
    EXPECT_NEAR(product_operator_expectation(dense, ops), truth, 1e-10 * std::max(1.0, std::abs(truth)));
  }
}

TEST(Mps, CreateRejectsBadShapes) {
  std::mt19937_64 rng(1);
  auto sites = ghz(3).sites();
  sites[1].matrices[0] = Eigen::MatrixXcd::Zero(3, 2);
  EXPECT_THROW(MpsState::create(sites), std::invalid_argument);
  auto unnormalised = ghz(3).sites();
  for (auto& m : unnormalised[0].matrices) m *= 2.0;
  EXPECT_THROW(MpsState::create(unnormalised), std::invalid_argument);
}

TEST(Mps, JsonRoundTrip) {
  std::mt19937_64 rng(8);
  const MpsState mps = random_mps(5, 4, rng);
  const MpsState back = mps_from_json(mps_to_json(mps));
  ASSERT_EQ(back.num_qubits(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    for (int s = 0; s < 2; ++s) EXPECT_EQ(back.site(i).matrices[s], mps.site(i).matrices[s]);
  }
  EXPECT_THROW(mps_from_json(R"({"format": "other", "version": 1})"), std::invalid_argument);
}

TEST(Noise, DepolarizingScale) {
  EXPECT_DOUBLE_EQ(depolarizing_correlator_scale(0.0, 2), 1.0);
  EXPECT_NEAR(depolarizing_correlator_scale(0.3, 2), 0.36, 1e-15);
  EXPECT_NEAR(depolarizing_correlator_scale(0.75, 2), 0.0, 1e-15);
  EXPECT_THROW(depolarizing_correlator_scale(0.8, 2), std::invalid_argument);
}

TEST(Noise, NoisyExpectationMatchesDenseChannel) {
  // Local noise applied qubit by qubit to the full density matrix.
  const int n = 3;
  std::mt19937_64 rng(9);
  const Eigen::VectorXcd psi = oracle::random_pure(n, rng);
  const DenseState state = DenseState::from_vector(psi);
  for (const auto& noise : {NoiseModel::depolarizing_from_error_rate(0.3),
                            NoiseModel::amplitude_damping(0.4)}) {
    Eigen::MatrixXcd rho = psi * psi.adjoint();
    for (int q = 0; q < n; ++q) {
      Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(8, 8);
      for (const Mat2& k : noise.kraus()) {
        std::vector<Eigen::MatrixXcd> f(n, Eigen::MatrixXcd::Identity(2, 2));
        f[q] = k;
        const Eigen::MatrixXcd kk = oracle::kron_all(f);
        next += kk * rho * kk.adjoint();
      }
      rho = next;
    }
    for (const char* text : {"Z0Z1", "X0Y2", "Z2", "X0X1X2"}) {
      const auto obs = PauliObservable::parse(text);
      std::vector<int> axes(n, 0);
      for (const auto& f : obs.support()) axes[f.site] = bloch_index(f.axis);
      const double truth = (rho * oracle::pauli_string(axes)).trace().real();
      EXPECT_NEAR(exact_expectation(state, obs, noise), truth, 1e-13) << text;
    }
  }
  // noisy GHZ correlator
  const QuantumState g = ghz(6);
  for (double p : {0.0, 0.1, 0.3, 0.5}) {
    const double s = 1 - 4 * p / 3;
    EXPECT_NEAR(exact_expectation(g, PauliObservable::zz(0, 4),
                                  NoiseModel::depolarizing_from_error_rate(p)),
                s * s, 1e-14);
  }
}

TEST(SpinHamiltonian, MatchesDenseOracle) {
  std::mt19937_64 rng(12);
  const auto dis = random_heisenberg_disorder(5, 3);
  const auto h = SpinHamiltonian::heisenberg(5, dis.jx, dis.jy, dis.jz, 0.4);
  const Eigen::MatrixXcd oracle_h = dense_heisenberg(5, dis.jx, dis.jy, dis.jz, 0.4);
  EXPECT_LT((h.dense_matrix() - oracle_h).cwiseAbs().maxCoeff(), 1e-14);
  const Eigen::VectorXcd v = oracle::random_pure(5, rng);
  EXPECT_LT((h.apply(v) - oracle_h * v).norm(), 1e-13);
  EXPECT_TRUE(h.is_real());
  const auto t = SpinHamiltonian::transverse_field_ising(4, 0.7, 1.3);
  EXPECT_LT((t.dense_matrix() - dense_tfim(4, 0.7, 1.3)).cwiseAbs().maxCoeff(), 1e-14);
  SpinHamiltonian y(2);
  y.add_term(1.0, {{0, Axis::kY}});
  EXPECT_FALSE(y.is_real());
  EXPECT_THROW(y.add_term(1.0, {{2, Axis::kX}}), std::invalid_argument);
}

TEST(Disorder, SeededCouplings) {
  const auto a = random_heisenberg_disorder(10, 1), b = random_heisenberg_disorder(10, 1);
  const auto c = random_heisenberg_disorder(10, 2);
  ASSERT_EQ(a.jx.size(), 9u);
  EXPECT_EQ(a.jx, b.jx);
  EXPECT_NE(a.jx, c.jx);
  for (std::size_t i = 0; i < 9; ++i) {
    EXPECT_EQ(a.jx[i], a.jy[i]);
    EXPECT_EQ(a.jx[i], 2 * a.jz[i]);
    EXPECT_LE(a.jx[i], 0.0);
    EXPECT_GT(a.jx[i], -2.0);
  }
}

TEST(GroundState, DecoupledTransverseField) {
  const auto gs = ground_state(SpinHamiltonian::transverse_field_ising(4, 0.0, 1.0));
  EXPECT_NEAR(gs.energy, -4.0, 1e-12);
  EXPECT_NEAR(gs.gap, 2.0, 1e-8);
  EXPECT_FALSE(gs.degenerate);
  std::vector<Eigen::MatrixXcd> minus(4, Eigen::Vector2cd(1, -1) / std::sqrt(2.0));
  const Eigen::VectorXcd expected = oracle::kron_all(minus);
  EXPECT_NEAR(std::abs(expected.dot(gs.state.vector())), 1.0, 1e-10);
}

TEST(GroundState, AgreesWithDenseEigensolver) {
  std::vector<std::pair<SpinHamiltonian, Eigen::MatrixXcd>> cases;
  for (int n = 2; n <= 8; n += 3) {
    cases.emplace_back(SpinHamiltonian::transverse_field_ising(n, 1.0, 0.5), dense_tfim(n, 1.0, 0.5));
    cases.emplace_back(SpinHamiltonian::transverse_field_ising(n, 0.5, 1.0), dense_tfim(n, 0.5, 1.0));
    const auto d = random_heisenberg_disorder(n, 4);
    cases.emplace_back(SpinHamiltonian::heisenberg(n, d.jx, d.jy, d.jz, 0.0),
                       dense_heisenberg(n, d.jx, d.jy, d.jz, 0.0));
  }
  for (const auto& [h, dense] : cases) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(dense);
    const auto gs = ground_state(h);
    EXPECT_NEAR(gs.energy, eig.eigenvalues()[0], 1e-10);
    EXPECT_NEAR(gs.gap, eig.eigenvalues()[1] - eig.eigenvalues()[0], 1e-7);
    EXPECT_LE(gs.residual, 1e-8);
    if (eig.eigenvalues()[1] - eig.eigenvalues()[0] > 1e-6) {
      EXPECT_NEAR(std::abs(eig.eigenvectors().col(0).dot(gs.state.vector())), 1.0, 1e-9);
    }
  }
}

TEST(GroundState, DegeneracyFlagged) {
  // H = Z0 Z1 has the two-fold degenerate ground space {|01>, |10>}.
  SpinHamiltonian h(2);
  h.add_term(1.0, {{0, Axis::kZ}, {1, Axis::kZ}});
  const auto gs = ground_state(h);
  EXPECT_NEAR(gs.energy, -1.0, 1e-12);
  EXPECT_TRUE(gs.degenerate);
}

TEST(GroundState, AntiferromagneticIsingCorrelations) {
  const int n = 10;
  const auto gs = ground_state(SpinHamiltonian::transverse_field_ising(n, 1.0, 0.5));
  const Eigen::VectorXcd& v = gs.state.vector();
  double prev = 0;
  for (int j = 1; j < n; ++j) {
    const double c = zz(v, n, 0, j);
    EXPECT_EQ(c < 0, j % 2 == 1) << j;
    if (j > 2) EXPECT_LT(std::abs(std::abs(c) - std::abs(prev)), 0.1) << j;
    prev = c;
  }
}

TEST(GroundState, RejectsTooManySites) {
  EXPECT_THROW(ground_state(SpinHamiltonian::transverse_field_ising(13, 1, 1)), std::invalid_argument);
}

}  // namespace
}  // namespace povmshadow
