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

#ifndef POVMSHADOW_CHANNEL_H_
#define POVMSHADOW_CHANNEL_H_

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "povmshadow/linalg.h"
#include "povmshadow/noise.h"
#include "povmshadow/povm.h"

namespace povmshadow {

/// Real 4x4 matrix of a single-qubit linear map in the (I, X, Y, Z) basis:
/// entry (mu, nu) is tr(sigma_mu E(sigma_nu)) / 2, so E(x0 I + r.sigma) has
/// coefficients matrix * (x0, r). For a trace-preserving map the first row is
/// (1, 0, 0, 0), the lower-left column is the displacement c and the lower
/// right block is the 3x3 deformation T.
class BlochSuperoperator {
 public:
  BlochSuperoperator() : matrix_(Eigen::Matrix4d::Identity()) {}
  explicit BlochSuperoperator(const Eigen::Matrix4d& matrix) : matrix_(matrix) {}

  static BlochSuperoperator identity() { return BlochSuperoperator(); }

  const Eigen::Matrix4d& matrix() const { return matrix_; }
  Eigen::Matrix3d deformation() const { return matrix_.bottomRightCorner<3, 3>(); }
  Eigen::Vector3d displacement() const { return matrix_.bottomLeftCorner<3, 1>(); }
  bool is_trace_preserving(double tol = 1e-12) const;

  Bloch4 apply(const Bloch4& coefficients) const { return matrix_ * coefficients; }
  Mat2 apply(const Mat2& x) const;
  /// Hilbert-Schmidt adjoint; its matrix is the transpose.
  BlochSuperoperator adjoint() const { return BlochSuperoperator(matrix_.transpose()); }

  /// Composition: (a * b)(X) = a(b(X)).
  friend BlochSuperoperator operator*(const BlochSuperoperator& a,
                                      const BlochSuperoperator& b) {
    return BlochSuperoperator(a.matrix_ * b.matrix_);
  }

 private:
  Eigen::Matrix4d matrix_;
};

/// Bloch matrix of the map given by its action on a 2x2 operator. Only the
/// outputs on I, X, Y, Z are evaluated.
BlochSuperoperator bloch_of_map(const std::function<Mat2(const Mat2&)>& action);

/// Inverse of `superop`. Throws NumericalError naming the unobserved Bloch
/// components when the smallest singular value is below 1e-8.
BlochSuperoperator invert(const BlochSuperoperator& superop);

/// The synthetic single-qubit measurement channel
///   X -> sum_a tr(E(X) M_a) S_a,
/// where S_a is the snapshot operator of outcome a and E the optional noise.
/// Immutable; the inverse and the inverted snapshots are cached.
struct MeasurementChannel {
  Povm povm;
  SnapshotRule rule;
  std::optional<NoiseModel> noise;
  BlochSuperoperator forward;
  BlochSuperoperator inverse;
  std::vector<Mat2> snapshots;           // S_a
  std::vector<Mat2> inverted_snapshots;  // M^{-1}(S_a), the local shadows

  const std::string& povm_id() const { return povm.name(); }
  std::string noise_id() const { return noise_descriptor(noise); }
};

/// Throws NumericalError("informationally incomplete POVM ...") when the
/// forward map is singular, std::invalid_argument when `povm` fails
/// validation.
MeasurementChannel measurement_channel(const Povm& povm,
                                       const SnapshotRule& rule = SnapshotRule::limit(),
                                       const std::optional<NoiseModel>& noise = std::nullopt);

/// Bloch matrix of a noise channel.
BlochSuperoperator noise_superoperator(const NoiseModel& noise);

/// Per-outcome values of the adjoint inverse channel on the Pauli axes:
/// factor(axis, a) = tr(sigma_axis M^{-1}(S_a)). The per-record estimate of a
/// Pauli string is the product of factors over its support.
struct FactorTable {
  std::string povm_id;
  std::string noise_id;
  std::size_t outcomes = 0;
  std::array<std::vector<double>, 3> axis_factors;  // indexed by bloch_index - 1
  std::vector<double> identity_factors;
  /// sum_a factor(axis, a)^2 M'_a, with M'_a the elements governing the
  /// outcome law (the noise-adjoint elements when noise is present). Its
  /// expectation in a state is the second moment of the single-site estimate.
  std::array<Mat2, 3> second_moments;

  double factor(Axis axis, std::size_t outcome) const {
    return axis_factors[bloch_index(axis) - 1][outcome];
  }
  /// max over axes and outcomes of |factor|.
  double max_abs_factor() const;
};

FactorTable factor_table(const MeasurementChannel& channel);

/// [M^{-1}]^dagger(sigma_axis) as a Hermitian operator.
SingleQubitOperator adjoint_on_pauli(const MeasurementChannel& channel, Axis axis);
SingleQubitOperator adjoint_on_pauli(const BlochSuperoperator& inverse, Axis axis);

/// JSON export of a channel (POVM, rule, noise, forward/inverse matrices) and
/// its factor table. Doubles are written with 17 significant digits.
std::string channel_to_json(const MeasurementChannel& channel, const FactorTable& table);

}  // namespace povmshadow

#endif  // POVMSHADOW_CHANNEL_H_
