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

#ifndef POVMSHADOW_STATES_H_
#define POVMSHADOW_STATES_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "povmshadow/linalg.h"
#include "povmshadow/noise.h"
#include "povmshadow/observable.h"

namespace povmshadow {

// Basis ordering: site 0 is the most significant bit of a basis index, so a
// product state |s0 s1 ... s_{n-1}> has index sum_i s_i 2^{n-1-i} and dense
// operators are built as A_0 (x) A_1 (x) ... (x) A_{n-1}.

inline constexpr std::size_t kMaxDenseVectorQubits = 14;
inline constexpr std::size_t kMaxDensityMatrixQubits = 8;

/// Pure vector (n <= 14) or density matrix (n <= 8).
class DenseState {
 public:
  /// Rejects vectors whose norm differs from 1 by more than 1e-12.
  static DenseState from_vector(Eigen::VectorXcd amplitudes);
  /// Rejects matrices that are not Hermitian (1e-12), not unit trace (1e-12)
  /// or have an eigenvalue below -1e-10.
  static DenseState from_density_matrix(Eigen::MatrixXcd rho);

  std::size_t num_qubits() const { return n_; }
  std::size_t dimension() const { return std::size_t{1} << n_; }
  bool is_pure() const { return std::holds_alternative<Eigen::VectorXcd>(data_); }
  const Eigen::VectorXcd& vector() const { return std::get<Eigen::VectorXcd>(data_); }
  const Eigen::MatrixXcd& density_matrix() const {
    return std::get<Eigen::MatrixXcd>(data_);
  }
  Eigen::MatrixXcd to_density_matrix() const;

 private:
  DenseState(std::size_t n, std::variant<Eigen::VectorXcd, Eigen::MatrixXcd> data)
      : n_(n), data_(std::move(data)) {}

  std::size_t n_;
  std::variant<Eigen::VectorXcd, Eigen::MatrixXcd> data_;
};

/// One MPS site: A^s (left bond x right bond) for physical index s = 0, 1.
struct SiteTensor {
  std::array<Eigen::MatrixXcd, 2> matrices;

  std::size_t left() const { return static_cast<std::size_t>(matrices[0].rows()); }
  std::size_t right() const { return static_cast<std::size_t>(matrices[0].cols()); }
};

/// Open-boundary matrix product state
///   psi(s_0..s_{n-1}) = A_0^{s_0} A_1^{s_1} ... A_{n-1}^{s_{n-1}}.
class MpsState {
 public:
  /// Checks bond shapes (outer bonds of dimension 1) and that the state has
  /// norm 1 within 1e-10.
  static MpsState create(std::vector<SiteTensor> sites);

  std::size_t num_qubits() const { return sites_.size(); }
  const std::vector<SiteTensor>& sites() const { return sites_; }
  const SiteTensor& site(std::size_t i) const { return sites_.at(i); }
  std::size_t max_bond() const;
  double norm_squared() const;
  /// Full contraction; n <= 20.
  Eigen::VectorXcd to_vector() const;

 private:
  explicit MpsState(std::vector<SiteTensor> sites) : sites_(std::move(sites)) {}
  std::vector<SiteTensor> sites_;
};

using QuantumState = std::variant<DenseState, MpsState>;

std::size_t num_qubits(const QuantumState& state);

/// (|0...0> + |1...1>)/sqrt2 with bond dimension 2; n >= 2.
MpsState ghz(std::size_t n);
/// Product of pure single-qubit states given by unit Bloch vectors.
MpsState product_state(std::span<const Eigen::Vector3d> bloch_vectors);
MpsState uniform_product_state(std::size_t n, const Eigen::Vector3d& bloch);

/// Sum of real-weighted Pauli strings on n sites with open boundaries.
class SpinHamiltonian {
 public:
  struct Term {
    double coefficient = 0.0;
    std::vector<PauliFactor> factors;
  };

  explicit SpinHamiltonian(std::size_t n);

  /// H = J sum_i Z_i Z_{i+1} + h sum_i X_i.
  static SpinHamiltonian transverse_field_ising(std::size_t n, double j, double h);
  /// H = -1/2 sum_j (Jx_j X_j X_{j+1} + Jy_j Y_j Y_{j+1} + Jz_j Z_j Z_{j+1})
  ///     -1/2 h sum_j Z_j.
  static SpinHamiltonian heisenberg(std::size_t n, std::span<const double> jx,
                                    std::span<const double> jy,
                                    std::span<const double> jz, double h);

  void add_term(double coefficient, std::vector<PauliFactor> factors);

  std::size_t num_qubits() const { return n_; }
  const std::vector<Term>& terms() const { return terms_; }
  /// True when every term has an even number of Y factors.
  bool is_real() const;

  /// H|v>, matrix free.
  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;
  Eigen::MatrixXcd dense_matrix() const;

 private:
  std::size_t n_;
  std::vector<Term> terms_;
};

/// Couplings of one disorder realisation of the XXZ chain with
/// Jx = Jy = 2 Jz: for every bond u ~ U[0, 2] from a seeded stream and
/// Jx = Jy = -u, Jz = -u/2, making every bond antiferromagnetic under the
/// -1/2 prefactor of SpinHamiltonian::heisenberg.
struct HeisenbergDisorder {
  std::vector<double> jx, jy, jz;
  std::uint64_t seed = 0;
};
HeisenbergDisorder random_heisenberg_disorder(std::size_t n, std::uint64_t seed);

struct GroundState {
  DenseState state;
  double energy = 0.0;
  double gap = 0.0;          // E_1 - E_0
  bool degenerate = false;   // gap < 1e-10
  double residual = 0.0;     // ||H v - E v||
};

/// Exact diagonalization (Lanczos on the full Hilbert space) for n <= 12; the
/// gap comes from a second run deflated against the ground vector. The returned vector has
/// a canonical global phase (largest-magnitude amplitude real positive).
GroundState ground_state(const SpinHamiltonian& h);

/// <P> for a Pauli string given as (site, axis) factors, coefficient 1.
double pauli_string_expectation(const DenseState& state, std::span<const PauliFactor> factors);
double pauli_string_expectation(const MpsState& state, std::span<const PauliFactor> factors);
double pauli_string_expectation(const QuantumState& state, std::span<const PauliFactor> factors);

/// tr(rho O), optionally after independent local noise on every qubit
/// (tr(E^{(x)n}(rho) O), evaluated in the Heisenberg picture).
double exact_expectation(const QuantumState& state, const PauliObservable& obs,
                         const std::optional<NoiseModel>& noise = std::nullopt);
double exact_expectation(const DenseState& state, const PauliObservable& obs,
                         const std::optional<NoiseModel>& noise = std::nullopt);
double exact_expectation(const MpsState& state, const PauliObservable& obs,
                         const std::optional<NoiseModel>& noise = std::nullopt);

/// Single-site operator placed on one qubit of a product operator.
struct SiteOperator {
  std::size_t site = 0;
  Mat2 op = Mat2::Identity();
};

/// tr(rho (x)_i Q_i) for single-site operators on distinct sites (identity on
/// unlisted sites). Real part; exact for Hermitian Q_i.
double product_operator_expectation(const DenseState& state, std::span<const SiteOperator> ops);
double product_operator_expectation(const MpsState& state, std::span<const SiteOperator> ops);
double product_operator_expectation(const QuantumState& state, std::span<const SiteOperator> ops);

/// Factor (1 - 4p/3)^k by which local depolarizing noise of error rate p
/// scales a k-site traceless Pauli correlator; p in [0, 3/4].
double depolarizing_correlator_scale(double p, std::size_t k);

/// MPS exchange format (JSON):
///   {"format": "povm-shadows-mps", "version": 1, "n": n,
///    "index_order": "left,physical,right",
///    "tensors": [{"shape": [l, 2, r], "data": [[re, im], ...]}, ...]}
/// `data` lists A[l][s][r] in row-major order of (left, physical, right).
std::string mps_to_json(const MpsState& mps);
MpsState mps_from_json(std::string_view text);

}  // namespace povmshadow

#endif  // POVMSHADOW_STATES_H_
