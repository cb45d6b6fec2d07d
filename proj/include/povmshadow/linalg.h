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

#ifndef POVMSHADOW_LINALG_H_
#define POVMSHADOW_LINALG_H_

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace povmshadow {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Vec2 = Eigen::Vector2cd;
using Bloch4 = Eigen::Vector4d;

/// Raised when a numerical precondition fails (singular channel, diverging
/// eigensolver, ...). Rejected user input is reported with
/// std::invalid_argument instead.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pauli axis of a single-qubit observable. The numeric value is the index of
/// the axis in the (I, X, Y, Z) Bloch ordering used everywhere in the library.
enum class Axis : std::uint8_t { kX = 1, kY = 2, kZ = 3 };

inline constexpr std::array<Axis, 3> kAllAxes = {Axis::kX, Axis::kY, Axis::kZ};

inline constexpr int bloch_index(Axis axis) { return static_cast<int>(axis); }
char axis_letter(Axis axis);
Axis axis_from_letter(char letter);

/// sigma(0) = I, sigma(1) = X, sigma(2) = Y, sigma(3) = Z.
const Mat2& sigma(int index);
inline const Mat2& sigma(Axis axis) { return sigma(bloch_index(axis)); }

/// Coefficients (x0, r) with m = x0 I + r . sigma. Only the real parts are
/// kept, so the result is meaningful for Hermitian m.
Bloch4 bloch_coefficients(const Mat2& m);
Mat2 from_bloch_coefficients(const Bloch4& c);

/// Largest absolute entry of m - m^dagger.
double hermiticity_defect(const Mat2& m);
double max_abs_entry(const Mat2& m);

/// Ascending eigenvalues of a Hermitian 2x2 matrix.
std::array<double, 2> hermitian_eigenvalues(const Mat2& m);

/// Principal square root of a positive semidefinite 2x2 matrix; tiny negative
/// eigenvalues are clamped to zero.
Mat2 psd_sqrt(const Mat2& m);

/// Pure-state vector pointing along a unit Bloch direction; exact on the
/// coordinate axes, global phase fixed by canonical_phase().
Vec2 state_from_bloch(const Eigen::Vector3d& direction);

/// Fixes the global phase so the first component with magnitude above 1e-14
/// is real and positive.
Vec2 canonical_phase(const Vec2& v);

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

}  // namespace povmshadow

#endif  // POVMSHADOW_LINALG_H_
