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

#ifndef POVMSHADOW_POVM_H_
#define POVMSHADOW_POVM_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "povmshadow/linalg.h"
#include "povmshadow/noise.h"

namespace povmshadow {

/// Hermitian 2x2 operator kept together with its decomposition x0 I + r.sigma.
struct SingleQubitOperator {
  Mat2 matrix = Mat2::Zero();
  double x0 = 0.0;
  Eigen::Vector3d r = Eigen::Vector3d::Zero();

  static SingleQubitOperator from_matrix(const Mat2& m);
  static SingleQubitOperator from_bloch(double x0, const Eigen::Vector3d& r);
};

/// Spectral data of one POVM element, eigenvalues in descending order.
/// `top_multiplicity` counts eigenvalues within 1e-10 of the largest one.
struct ElementSpectrum {
  std::array<double, 2> values{};
  std::array<Vec2, 2> vectors{};
  int top_multiplicity = 1;
};

/// How a measured outcome a is turned into a pure snapshot |i,a><i,a|:
/// with probability f(lambda_i) / sum_j f(lambda_j), f(lambda) = lambda^m.
/// The limit m -> infinity (the default) picks the top eigenvector, split
/// uniformly over a degenerate top eigenspace.
struct SnapshotRule {
  std::optional<double> exponent;  // nullopt = limit

  static SnapshotRule limit() { return {}; }
  static SnapshotRule power(double m);
  bool is_limit() const { return !exponent.has_value(); }
  std::string describe() const;
};

/// A named single-qubit POVM. Immutable after construction.
///
/// Construction enforces element count, Hermiticity, positivity and
/// completeness. Zero elements are tolerated so that Heisenberg-picture
/// images of POVMs under non-invertible noise can still be sampled;
/// validate_povm() reports them and snapshot queries on them throw.
class Povm {
 public:
  static Povm create(std::string name, std::vector<Mat2> elements);

  const std::string& name() const { return name_; }
  std::size_t size() const { return elements_.size(); }
  const std::vector<SingleQubitOperator>& elements() const { return elements_; }
  const SingleQubitOperator& element(std::size_t a) const { return elements_.at(a); }
  const ElementSpectrum& spectrum(std::size_t a) const { return spectra_.at(a); }
  /// Top eigenvector |psi_a> of element a (first basis vector of the top
  /// eigenspace when it is degenerate).
  const Vec2& snapshot_state(std::size_t a) const { return spectra_.at(a).vectors[0]; }
  bool is_zero_element(std::size_t a) const;

  /// Outcome probabilities tr(rho M_a).
  std::vector<double> probabilities(const Mat2& rho) const;

 private:
  Povm() = default;

  std::string name_;
  std::vector<SingleQubitOperator> elements_;
  std::vector<ElementSpectrum> spectra_;
};

struct PovmViolation {
  std::string invariant;  // "element_count", "hermiticity", "completeness",
                          // "positivity", "zero_element"
  double magnitude = 0.0;
  std::optional<std::size_t> element;
};

using ValidationReport = std::vector<PovmViolation>;

ValidationReport validate_povm(std::span<const Mat2> elements);
ValidationReport validate_povm(const Povm& povm);
std::string format_report(const ValidationReport& report);

/// Built-in POVMs: "pauli6", "pauli4", "tetra". Outcome order for pauli6 is
/// |0>,|1>,|+>,|->,|l>,|r>; |l> = (|0> + i|1>)/sqrt2 is the +y eigenstate.
Povm builtin_povm(std::string_view name);
std::vector<std::string> builtin_povm_names();

/// Eigenvector/probability pairs describing the snapshot drawn for outcome a.
std::vector<std::pair<Vec2, double>> snapshot_distribution(
    const Povm& povm, std::size_t outcome, const SnapshotRule& rule);

/// Conditional mean snapshot sum_i p(i|a) |i,a><i,a|. Equals |psi_a><psi_a|
/// for the limit rule with a non-degenerate top eigenvalue.
Mat2 snapshot_operator(const Povm& povm, std::size_t outcome,
                       const SnapshotRule& rule);

/// Heisenberg-picture image {sum_j K_j^dagger M_a K_j}: sampling the returned
/// POVM on rho reproduces the law tr(E(rho) M_a) of the original one.
Povm noise_adjoint_povm(const Povm& povm, const NoiseModel& noise);

/// JSON text {name, k, elements: [[[re,im] x4] ...], snapshots: [[[re,im] x2] ...]}
/// with entries in row-major order. Round trip is bit exact.
std::string povm_to_json(const Povm& povm);
Povm povm_from_json(std::string_view text);

}  // namespace povmshadow

#endif  // POVMSHADOW_POVM_H_
