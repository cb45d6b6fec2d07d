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

#include "povmshadow/linalg.h"

#include <algorithm>
#include <cmath>

namespace povmshadow {

namespace {

std::array<Mat2, 4> make_paulis() {
  const Complex i(0.0, 1.0);
  std::array<Mat2, 4> p;
  p[0] << 1, 0, 0, 1;
  p[1] << 0, 1, 1, 0;
  p[2] << 0, -i, i, 0;
  p[3] << 1, 0, 0, -1;
  return p;
}

}  // namespace

char axis_letter(Axis axis) {
  switch (axis) {
    case Axis::kX:
      return 'X';
    case Axis::kY:
      return 'Y';
    case Axis::kZ:
      return 'Z';
  }
  return '?';
}

Axis axis_from_letter(char letter) {
  switch (letter) {
    case 'X':
    case 'x':
      return Axis::kX;
    case 'Y':
    case 'y':
      return Axis::kY;
    case 'Z':
    case 'z':
      return Axis::kZ;
    default:
      throw std::invalid_argument(std::string("unknown Pauli axis '") + letter + "'");
  }
}

const Mat2& sigma(int index) {
  static const std::array<Mat2, 4> paulis = make_paulis();
  return paulis.at(static_cast<std::size_t>(index));
}

Bloch4 bloch_coefficients(const Mat2& m) {
  Bloch4 c;
  for (int mu = 0; mu < 4; ++mu) {
    c[mu] = 0.5 * (sigma(mu) * m).trace().real();
  }
  return c;
}

Mat2 from_bloch_coefficients(const Bloch4& c) {
  Mat2 m = Mat2::Zero();
  for (int mu = 0; mu < 4; ++mu) {
    m += c[mu] * sigma(mu);
  }
  return m;
}

double hermiticity_defect(const Mat2& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double max_abs_entry(const Mat2& m) { return m.cwiseAbs().maxCoeff(); }

std::array<double, 2> hermitian_eigenvalues(const Mat2& m) {
  const Bloch4 c = bloch_coefficients(m);
  const double r = c.tail<3>().norm();
  return {c[0] - r, c[0] + r};
}

Mat2 psd_sqrt(const Mat2& m) {
  Eigen::SelfAdjointEigenSolver<Mat2> es(m);
  Eigen::Vector2d roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().adjoint();
}

Vec2 state_from_bloch(const Eigen::Vector3d& direction) {
  const double x = direction.x(), y = direction.y(), z = direction.z();
  Vec2 v;
  if (z >= 0.0) {
    const double a = std::sqrt((1.0 + z) / 2.0);
    v << a, Complex(x, y) / (2.0 * a);
  } else {
    const double b = std::sqrt((1.0 - z) / 2.0);
    v << Complex(x, -y) / (2.0 * b), b;
  }
  return canonical_phase(v);
}

Vec2 canonical_phase(const Vec2& v) {
  for (int i = 0; i < 2; ++i) {
    if (std::abs(v[i]) > 1e-14) {
      return v * (std::abs(v[i]) / v[i]);
    }
  }
  return v;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace povmshadow
