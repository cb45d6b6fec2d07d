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

#include "povmshadow/fidelity.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <iterator>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

namespace povmshadow {

namespace {

// sum over records in [begin, end) (sorted, sharing outcomes before `depth`)
// of (x)_{i >= depth} shadow[a_i].
Eigen::MatrixXcd accumulate(const ShadowEnsemble& ens, const std::vector<std::size_t>& order,
                            std::size_t begin, std::size_t end, std::size_t depth,
                            const std::vector<Mat2>& shadows) {
  const std::size_t n = ens.num_qubits();
  if (depth == n) {
    return Eigen::MatrixXcd::Constant(1, 1, static_cast<double>(end - begin));
  }
  const Eigen::Index sub = Eigen::Index{1} << (n - depth - 1);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(2 * sub, 2 * sub);
  std::size_t i = begin;
  while (i < end) {
    const std::uint8_t a = ens.outcome(order[i], depth);
    std::size_t j = i;
    while (j < end && ens.outcome(order[j], depth) == a) ++j;
    const Eigen::MatrixXcd tail = accumulate(ens, order, i, j, depth + 1, shadows);
    const Mat2& s = shadows[a];
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        if (s(r, c) != 0.0) out.block(r * sub, c * sub, sub, sub) += s(r, c) * tail;
      }
    }
    i = j;
  }
  return out;
}

}  // namespace

HypothesisState hypothesis_state(const ShadowEnsemble& ensemble,
                                 const MeasurementChannel& channel) {
  const std::size_t n = ensemble.num_qubits();
  if (n > kMaxHypothesisQubits) {
    throw std::invalid_argument(fmt::format(
        "dense hypothesis state limited to {} qubits (got {}); estimate local observables "
        "with the factor-table estimator instead",
        kMaxHypothesisQubits, n));
  }
  if (ensemble.empty()) throw std::invalid_argument("hypothesis state of an empty ensemble");
  if (channel.povm_id() != ensemble.povm_id() || channel.noise_id() != ensemble.noise_id() ||
      channel.povm.size() != ensemble.num_outcomes()) {
    throw std::invalid_argument(fmt::format(
        "channel (povm {}, noise {}) does not match ensemble (povm {}, noise {})",
        channel.povm_id(), channel.noise_id(), ensemble.povm_id(), ensemble.noise_id()));
  }
  std::vector<std::size_t> order(ensemble.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const auto rx = ensemble.record(x), ry = ensemble.record(y);
    return std::lexicographical_compare(rx.begin(), rx.end(), ry.begin(), ry.end());
  });
  HypothesisState h;
  h.num_qubits = n;
  h.matrix = accumulate(ensemble, order, 0, order.size(), 0, channel.inverted_snapshots) /
             static_cast<double>(ensemble.size());
  return h;
}

std::vector<double> simplex_project(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("simplex projection of an empty vector");
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("simplex projection needs finite entries");
  }
  std::vector<double> u(values.begin(), values.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0, tau = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cum += u[j];
    const double t = (1.0 - cum) / static_cast<double>(j + 1);
    if (u[j] + t > 0.0) tau = t;
  }
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = std::max(values[i] + tau, 0.0);
  return out;
}

Eigen::MatrixXcd project_to_physical(const Eigen::MatrixXcd& sigma) {
  if (sigma.rows() != sigma.cols() || sigma.rows() == 0) {
    throw std::invalid_argument("projection needs a non-empty square matrix");
  }
  const Eigen::MatrixXcd h = 0.5 * (sigma + sigma.adjoint());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
  if (eig.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const std::vector<double> p =
      simplex_project(std::span<const double>(lambda.data(), static_cast<std::size_t>(lambda.size())));
  const Eigen::VectorXd pv = Eigen::Map<const Eigen::VectorXd>(p.data(), lambda.size());
  const Eigen::MatrixXcd& v = eig.eigenvectors();
  const Eigen::MatrixXcd rho = v * pv.cast<Complex>().asDiagonal() * v.adjoint();
  return 0.5 * (rho + rho.adjoint());
}

double fidelity_pure(const Eigen::MatrixXcd& sigma, const Eigen::VectorXcd& target) {
  if (sigma.rows() != target.size() || sigma.cols() != target.size()) {
    throw std::invalid_argument(fmt::format("fidelity: matrix {}x{} vs target of length {}",
                                            sigma.rows(), sigma.cols(), target.size()));
  }
  return target.dot(sigma * target).real();
}

void write_matrix_binary(const Eigen::MatrixXcd& m, std::ostream& out) {
  static_assert(sizeof(double) == 8);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double parts[2] = {m(r, c).real(), m(r, c).imag()};
      out.write(reinterpret_cast<const char*>(parts), sizeof(parts));
    }
  }
  if (!out) throw std::runtime_error("failed to write matrix");
}

Eigen::MatrixXcd read_matrix_binary(std::istream& in) {
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::size_t entries = bytes.size() / 16;
  const auto dim = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(entries))));
  if (bytes.size() % 16 != 0 || dim * dim != entries) {
    throw std::invalid_argument(
        fmt::format("matrix file of {} bytes is not a square complex matrix", bytes.size()));
  }
  Eigen::MatrixXcd m(dim, dim);
  const char* p = bytes.data();
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c, p += 16) {
      double parts[2];
      std::copy(p, p + 16, reinterpret_cast<char*>(parts));
      m(r, c) = Complex(parts[0], parts[1]);
    }
  }
  return m;
}

}  // namespace povmshadow
