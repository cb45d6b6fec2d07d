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

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <random>
#include <vector>

#include <fmt/format.h>

#include "povmshadow/states.h"

namespace povmshadow {

namespace {

constexpr std::size_t kMaxGroundStateSites = 12;
constexpr double kDegeneracyGap = 1e-10;
constexpr double kResidualLimit = 1e-8;
constexpr double kLanczosTolerance = 1e-11;
constexpr double kGapTolerance = 1e-8;
constexpr Eigen::Index kKrylovDim = 120;
constexpr int kMaxRestarts = 200;

// P|b> = c (-1)^{popcount(b & yz)} |b ^ flip>, c = coefficient * i^{#Y}.
struct PauliTerm {
  std::size_t flip = 0;
  std::size_t yz = 0;
  Complex c;
};

class PauliSum {
 public:
  explicit PauliSum(const SpinHamiltonian& h) : dim_(std::size_t{1} << h.num_qubits()) {
    static constexpr std::array<Complex, 4> kIPowers = {
        Complex(1, 0), Complex(0, 1), Complex(-1, 0), Complex(0, -1)};
    const std::size_t n = h.num_qubits();
    for (const auto& term : h.terms()) {
      PauliTerm t;
      int ny = 0;
      for (const auto& f : term.factors) {
        const std::size_t bit = std::size_t{1} << (n - 1 - f.site);
        if (f.axis != Axis::kZ) t.flip |= bit;
        if (f.axis != Axis::kX) t.yz |= bit;
        if (f.axis == Axis::kY) ++ny;
      }
      t.c = term.coefficient * kIPowers[ny % 4];
      terms_.push_back(t);
    }
  }

  Eigen::Index dim() const { return static_cast<Eigen::Index>(dim_); }

  void apply(const Eigen::VectorXcd& v, Eigen::VectorXcd& out) const {
    out.setZero(v.size());
    for (const PauliTerm& t : terms_) {
      for (std::size_t b = 0; b < dim_; ++b) {
        const Complex x = t.c * v[static_cast<Eigen::Index>(b)];
        out[static_cast<Eigen::Index>(b ^ t.flip)] += (std::popcount(b & t.yz) & 1) ? -x : x;
      }
    }
  }

 private:
  std::size_t dim_;
  std::vector<PauliTerm> terms_;
};

void orthogonalize(Eigen::VectorXcd& w, const Eigen::MatrixXcd& basis, Eigen::Index count) {
  if (count == 0) return;
  // Two passes of classical Gram-Schmidt keep the basis orthogonal to
  // working precision.
  for (int pass = 0; pass < 2; ++pass) {
    const Eigen::VectorXcd proj = basis.leftCols(count).adjoint() * w;
    w -= basis.leftCols(count) * proj;
  }
}

struct Eigenpair {
  double value = 0.0;
  Eigen::VectorXcd vector;
};

// Lowest eigenpair of H restricted to the orthogonal complement of
// `deflate` (orthonormal columns). Explicitly restarted Lanczos with full
// reorthogonalization.
Eigenpair lanczos_lowest(const PauliSum& h, const Eigen::MatrixXcd& deflate, double tolerance,
                         std::uint64_t seed) {
  const Eigen::Index dim = h.dim();
  const Eigen::Index nd = deflate.cols();
  const Eigen::Index m_max = std::min(kKrylovDim, dim - nd);
  if (m_max <= 0) throw NumericalError("no space left for another eigenvector");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::VectorXcd start(dim);
  for (Eigen::Index i = 0; i < dim; ++i) start[i] = Complex(gauss(rng), gauss(rng));

  Eigen::MatrixXcd basis(dim, m_max + nd);
  basis.leftCols(nd) = deflate;
  Eigen::VectorXcd w(dim);
  Eigenpair best;
  for (int restart = 0; restart < kMaxRestarts; ++restart) {
    orthogonalize(start, basis, nd);
    const double norm = start.norm();
    if (!(norm > 0.0)) throw NumericalError("Lanczos start vector vanished");
    basis.col(nd) = start / norm;
    std::vector<double> alpha, beta;
    Eigen::Index m = 0;
    while (true) {
      h.apply(basis.col(nd + m), w);
      alpha.push_back(basis.col(nd + m).dot(w).real());
      orthogonalize(w, basis, nd + m + 1);
      ++m;
      const double b = w.norm();
      if (m == m_max || b < 1e-13 * std::max(1.0, std::abs(alpha.back()))) break;
      beta.push_back(b);
      basis.col(nd + m) = w / b;
    }
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      t(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(t);
    if (eig.info() != Eigen::Success) throw NumericalError("tridiagonal eigensolver failed");
    best.value = eig.eigenvalues()[0];
    best.vector = basis.middleCols(nd, m) * eig.eigenvectors().col(0).cast<Complex>();
    best.vector.normalize();
    h.apply(best.vector, w);
    const double residual = (w - best.value * best.vector).norm();
    if (residual <= tolerance * std::max(1.0, std::abs(best.value))) return best;
    start = best.vector;
  }
  throw NumericalError(fmt::format("Lanczos did not converge after {} restarts", kMaxRestarts));
}

}  // namespace

GroundState ground_state(const SpinHamiltonian& h) {
  if (h.num_qubits() > kMaxGroundStateSites) {
    throw std::invalid_argument(fmt::format(
        "exact diagonalization limited to {} sites (got {}); import an MPS instead",
        kMaxGroundStateSites, h.num_qubits()));
  }
  const PauliSum op(h);
  const Eigenpair ground = lanczos_lowest(op, Eigen::MatrixXcd(op.dim(), 0), kLanczosTolerance, 1);
  std::vector<double> values = {ground.value};
  if (op.dim() > 1) values.push_back(lanczos_lowest(op, ground.vector, kGapTolerance, 2).value);
  Eigen::VectorXcd v = ground.vector;
  Eigen::Index top = 0;
  v.cwiseAbs().maxCoeff(&top);
  v *= std::conj(v[top]) / std::abs(v[top]);
  v[top] = std::abs(v[top]);

  const double energy = values[0];
  const double residual = (h.apply(v) - energy * v).norm();
  if (residual > kResidualLimit) {
    throw NumericalError(
        fmt::format("ground state residual {:.3e} exceeds {:.0e}", residual, kResidualLimit));
  }
  const double gap = values.size() > 1 ? values[1] - values[0] : 0.0;
  return GroundState{DenseState::from_vector(std::move(v)), energy, gap,
                     values.size() > 1 && gap < kDegeneracyGap, residual};
}

}  // namespace povmshadow
