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

#include <algorithm>
#include <bit>
#include <cmath>

#include <fmt/format.h>

#include "json.hpp"

namespace povmshadow {

namespace {

std::size_t qubits_for_dimension(std::size_t dim, std::size_t max_qubits,
                                 const char* what) {
  if (dim < 2 || !std::has_single_bit(dim)) {
    throw std::invalid_argument(
        fmt::format("{} dimension {} is not a power of two >= 2", what, dim));
  }
  const auto n = static_cast<std::size_t>(std::countr_zero(dim));
  if (n > max_qubits) {
    throw std::invalid_argument(
        fmt::format("{} on {} qubits exceeds the limit of {}", what, n, max_qubits));
  }
  return n;
}

// In place: v <- (I (x) .. (x) q on `site` (x) .. (x) I) v, for a vector or for
// every column of a matrix.
void apply_site_operator(Eigen::MatrixXcd& v, std::size_t n, std::size_t site,
                         const Mat2& q) {
  const std::size_t stride = std::size_t{1} << (n - 1 - site);
  const auto dim = static_cast<std::size_t>(v.rows());
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    for (std::size_t b = 0; b < dim; ++b) {
      if (b & stride) continue;
      const Complex v0 = v(b, c);
      const Complex v1 = v(b | stride, c);
      v(b, c) = q(0, 0) * v0 + q(0, 1) * v1;
      v(b | stride, c) = q(1, 0) * v0 + q(1, 1) * v1;
    }
  }
}

void check_sites(std::span<const SiteOperator> ops, std::size_t n) {
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (ops[i].site >= n) {
      throw std::invalid_argument(
          fmt::format("site {} outside a {}-qubit state", ops[i].site, n));
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (ops[j].site == ops[i].site) {
        throw std::invalid_argument(fmt::format("site {} appears twice", ops[i].site));
      }
    }
  }
}

std::vector<SiteOperator> pauli_ops(std::span<const PauliFactor> factors) {
  std::vector<SiteOperator> ops;
  ops.reserve(factors.size());
  for (const auto& f : factors) ops.push_back({f.site, sigma(f.axis)});
  return ops;
}

std::vector<SiteOperator> observable_ops(const PauliObservable& obs,
                                         const std::optional<NoiseModel>& noise) {
  std::vector<SiteOperator> ops;
  for (const auto& f : obs.support()) {
    const Mat2& s = sigma(f.axis);
    ops.push_back({f.site, noise ? noise->adjoint_apply(s) : s});
  }
  return ops;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

DenseState DenseState::from_vector(Eigen::VectorXcd amplitudes) {
  const std::size_t n = qubits_for_dimension(static_cast<std::size_t>(amplitudes.size()),
                                             kMaxDenseVectorQubits, "state vector");
  if (!amplitudes.allFinite()) throw std::invalid_argument("state vector has non-finite entries");
  const double norm = amplitudes.norm();
  if (std::abs(norm - 1.0) > 1e-12) {
    throw std::invalid_argument(fmt::format("state vector has norm {:.17g}, expected 1", norm));
  }
  return DenseState(n, std::move(amplitudes));
}

DenseState DenseState::from_density_matrix(Eigen::MatrixXcd rho) {
  if (rho.rows() != rho.cols()) throw std::invalid_argument("density matrix is not square");
  const std::size_t n = qubits_for_dimension(static_cast<std::size_t>(rho.rows()),
                                             kMaxDensityMatrixQubits, "density matrix");
  if (!rho.allFinite()) throw std::invalid_argument("density matrix has non-finite entries");
  const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-12) {
    throw std::invalid_argument(fmt::format("density matrix not Hermitian (defect {:.3e})", herm));
  }
  const Complex tr = rho.trace();
  if (std::abs(tr - 1.0) > 1e-12) {
    throw std::invalid_argument(
        fmt::format("density matrix trace {:.17g}{:+.3e}i, expected 1", tr.real(), tr.imag()));
  }
  const Eigen::MatrixXcd h = 0.5 * (rho + rho.adjoint());
  const double lowest = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h, Eigen::EigenvaluesOnly)
                            .eigenvalues()
                            .minCoeff();
  if (lowest < -1e-10) {
    throw std::invalid_argument(
        fmt::format("density matrix has negative eigenvalue {:.3e}", lowest));
  }
  return DenseState(n, std::move(rho));
}

Eigen::MatrixXcd DenseState::to_density_matrix() const {
  if (is_pure()) return vector() * vector().adjoint();
  return density_matrix();
}

MpsState MpsState::create(std::vector<SiteTensor> sites) {
  if (sites.empty()) throw std::invalid_argument("MPS needs at least one site");
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const auto& m = sites[i].matrices;
    if (m[0].rows() != m[1].rows() || m[0].cols() != m[1].cols()) {
      throw std::invalid_argument(fmt::format("MPS site {}: physical slices differ in shape", i));
    }
    if (m[0].rows() == 0 || m[0].cols() == 0) {
      throw std::invalid_argument(fmt::format("MPS site {}: empty bond", i));
    }
    if (!m[0].allFinite() || !m[1].allFinite()) {
      throw std::invalid_argument(fmt::format("MPS site {}: non-finite entries", i));
    }
    if (i > 0 && sites[i - 1].right() != sites[i].left()) {
      throw std::invalid_argument(fmt::format(
          "MPS bond {}-{}: right dimension {} does not match left dimension {}", i - 1, i,
          sites[i - 1].right(), sites[i].left()));
    }
  }
  if (sites.front().left() != 1 || sites.back().right() != 1) {
    throw std::invalid_argument("MPS outer bonds must have dimension 1");
  }
  MpsState mps(std::move(sites));
  const double norm2 = mps.norm_squared();
  if (std::abs(norm2 - 1.0) > 1e-10) {
    throw std::invalid_argument(fmt::format("MPS has squared norm {:.17g}, expected 1", norm2));
  }
  return mps;
}

std::size_t MpsState::max_bond() const {
  std::size_t chi = 1;
  for (const auto& s : sites_) chi = std::max({chi, s.left(), s.right()});
  return chi;
}

double MpsState::norm_squared() const {
  Eigen::MatrixXcd env = Eigen::MatrixXcd::Ones(1, 1);
  for (const auto& s : sites_) {
    env = s.matrices[0].adjoint() * env * s.matrices[0] +
          s.matrices[1].adjoint() * env * s.matrices[1];
  }
  return env(0, 0).real();
}

Eigen::VectorXcd MpsState::to_vector() const {
  if (num_qubits() > 20) {
    throw std::invalid_argument("MPS contraction to a dense vector limited to 20 qubits");
  }
  Eigen::MatrixXcd rows = Eigen::MatrixXcd::Ones(1, 1);
  for (const auto& s : sites_) {
    Eigen::MatrixXcd next(2 * rows.rows(), s.right());
    for (Eigen::Index p = 0; p < rows.rows(); ++p) {
      next.row(2 * p) = rows.row(p) * s.matrices[0];
      next.row(2 * p + 1) = rows.row(p) * s.matrices[1];
    }
    rows = std::move(next);
  }
  return rows.col(0);
}

std::size_t num_qubits(const QuantumState& state) {
  return std::visit([](const auto& s) { return s.num_qubits(); }, state);
}

MpsState ghz(std::size_t n) {
  if (n < 2) throw std::invalid_argument("GHZ state needs n >= 2");
  const double amp = 1.0 / std::sqrt(2.0);
  std::vector<SiteTensor> sites(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Index l = (i == 0) ? 1 : 2;
    const Eigen::Index r = (i + 1 == n) ? 1 : 2;
    for (auto& m : sites[i].matrices) m = Eigen::MatrixXcd::Zero(l, r);
    if (i == 0) {
      sites[i].matrices[0](0, 0) = amp;
      sites[i].matrices[1](0, 1) = amp;
    } else if (i + 1 == n) {
      sites[i].matrices[0](0, 0) = 1.0;
      sites[i].matrices[1](1, 0) = 1.0;
    } else {
      sites[i].matrices[0](0, 0) = 1.0;
      sites[i].matrices[1](1, 1) = 1.0;
    }
  }
  return MpsState::create(std::move(sites));
}

MpsState product_state(std::span<const Eigen::Vector3d> bloch_vectors) {
  std::vector<SiteTensor> sites;
  for (std::size_t i = 0; i < bloch_vectors.size(); ++i) {
    const Eigen::Vector3d& b = bloch_vectors[i];
    if (!b.allFinite() || std::abs(b.norm() - 1.0) > 1e-10) {
      throw std::invalid_argument(fmt::format(
          "site {}: Bloch vector norm {:.17g}; product states must be pure", i, b.norm()));
    }
    const Vec2 v = state_from_bloch(b);
    SiteTensor t;
    t.matrices[0] = Eigen::MatrixXcd::Constant(1, 1, v[0]);
    t.matrices[1] = Eigen::MatrixXcd::Constant(1, 1, v[1]);
    sites.push_back(std::move(t));
  }
  return MpsState::create(std::move(sites));
}

MpsState uniform_product_state(std::size_t n, const Eigen::Vector3d& bloch) {
  const std::vector<Eigen::Vector3d> all(n, bloch);
  return product_state(all);
}

SpinHamiltonian::SpinHamiltonian(std::size_t n) : n_(n) {
  if (n == 0) throw std::invalid_argument("Hamiltonian needs at least one site");
}

void SpinHamiltonian::add_term(double coefficient, std::vector<PauliFactor> factors) {
  if (!std::isfinite(coefficient)) throw std::invalid_argument("non-finite coefficient");
  std::sort(factors.begin(), factors.end(),
            [](const PauliFactor& a, const PauliFactor& b) { return a.site < b.site; });
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (factors[i].site >= n_) {
      throw std::invalid_argument(
          fmt::format("term acts on site {} of a {}-site chain", factors[i].site, n_));
    }
    if (i > 0 && factors[i].site == factors[i - 1].site) {
      throw std::invalid_argument(fmt::format("term repeats site {}", factors[i].site));
    }
  }
  terms_.push_back({coefficient, std::move(factors)});
}

SpinHamiltonian SpinHamiltonian::transverse_field_ising(std::size_t n, double j, double h) {
  SpinHamiltonian ham(n);
  for (std::size_t i = 0; i + 1 < n; ++i) ham.add_term(j, {{i, Axis::kZ}, {i + 1, Axis::kZ}});
  for (std::size_t i = 0; i < n; ++i) ham.add_term(h, {{i, Axis::kX}});
  return ham;
}

SpinHamiltonian SpinHamiltonian::heisenberg(std::size_t n, std::span<const double> jx,
                                            std::span<const double> jy,
                                            std::span<const double> jz, double h) {
  const std::size_t bonds = n == 0 ? 0 : n - 1;
  if (jx.size() != bonds || jy.size() != bonds || jz.size() != bonds) {
    throw std::invalid_argument(
        fmt::format("Heisenberg chain of {} sites needs {} couplings per axis", n, bonds));
  }
  SpinHamiltonian ham(n);
  for (std::size_t i = 0; i < bonds; ++i) {
    ham.add_term(-0.5 * jx[i], {{i, Axis::kX}, {i + 1, Axis::kX}});
    ham.add_term(-0.5 * jy[i], {{i, Axis::kY}, {i + 1, Axis::kY}});
    ham.add_term(-0.5 * jz[i], {{i, Axis::kZ}, {i + 1, Axis::kZ}});
  }
  if (h != 0.0) {
    for (std::size_t i = 0; i < n; ++i) ham.add_term(-0.5 * h, {{i, Axis::kZ}});
  }
  return ham;
}

bool SpinHamiltonian::is_real() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) {
    const auto ny = std::count_if(t.factors.begin(), t.factors.end(),
                                  [](const PauliFactor& f) { return f.axis == Axis::kY; });
    return ny % 2 == 0;
  });
}

Eigen::VectorXcd SpinHamiltonian::apply(const Eigen::VectorXcd& v) const {
  if (static_cast<std::size_t>(v.size()) != (std::size_t{1} << n_)) {
    throw std::invalid_argument("vector dimension does not match the Hamiltonian");
  }
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(v.size());
  for (const Term& t : terms_) {
    Eigen::MatrixXcd w = v;
    for (const auto& f : t.factors) apply_site_operator(w, n_, f.site, sigma(f.axis));
    out += t.coefficient * w.col(0);
  }
  return out;
}

Eigen::MatrixXcd SpinHamiltonian::dense_matrix() const {
  if (n_ > 12) throw std::invalid_argument("dense Hamiltonian limited to 12 sites");
  const std::size_t dim = std::size_t{1} << n_;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (const Term& t : terms_) {
    Eigen::MatrixXcd w = Eigen::MatrixXcd::Identity(dim, dim);
    for (const auto& f : t.factors) apply_site_operator(w, n_, f.site, sigma(f.axis));
    h += t.coefficient * w;
  }
  return h;
}

HeisenbergDisorder random_heisenberg_disorder(std::size_t n, std::uint64_t seed) {
  HeisenbergDisorder d;
  d.seed = seed;
  std::uint64_t state = seed;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    // 53-bit uniform in [0, 1), scaled to [0, 2).
    const double u = 2.0 * static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
    d.jx.push_back(-u);
    d.jy.push_back(-u);
    d.jz.push_back(-0.5 * u);
  }
  return d;
}

double product_operator_expectation(const DenseState& state, std::span<const SiteOperator> ops) {
  const std::size_t n = state.num_qubits();
  check_sites(ops, n);
  if (state.is_pure()) {
    Eigen::MatrixXcd w = state.vector();
    for (const auto& o : ops) apply_site_operator(w, n, o.site, o.op);
    return state.vector().dot(w.col(0)).real();
  }
  Eigen::MatrixXcd w = state.density_matrix();
  for (const auto& o : ops) apply_site_operator(w, n, o.site, o.op);
  return w.trace().real();
}

double product_operator_expectation(const MpsState& state, std::span<const SiteOperator> ops) {
  const std::size_t n = state.num_qubits();
  check_sites(ops, n);
  std::vector<const Mat2*> at(n, nullptr);
  for (const auto& o : ops) at[o.site] = &o.op;
  // Environment indexed (bra bond, ket bond).
  Eigen::MatrixXcd env = Eigen::MatrixXcd::Ones(1, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = state.site(i).matrices;
    if (at[i] == nullptr) {
      env = a[0].adjoint() * env * a[0] + a[1].adjoint() * env * a[1];
      continue;
    }
    const Mat2& q = *at[i];
    Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(a[0].cols(), a[0].cols());
    for (int s = 0; s < 2; ++s) {
      const Eigen::MatrixXcd left = env * a[s];
      for (int t = 0; t < 2; ++t) {
        if (q(t, s) == 0.0) continue;
        next += q(t, s) * (a[t].adjoint() * left);
      }
    }
    env = std::move(next);
  }
  return env(0, 0).real();
}

double product_operator_expectation(const QuantumState& state, std::span<const SiteOperator> ops) {
  return std::visit([&](const auto& s) { return product_operator_expectation(s, ops); }, state);
}

double pauli_string_expectation(const DenseState& state, std::span<const PauliFactor> factors) {
  return product_operator_expectation(state, pauli_ops(factors));
}

double pauli_string_expectation(const MpsState& state, std::span<const PauliFactor> factors) {
  return product_operator_expectation(state, pauli_ops(factors));
}

double pauli_string_expectation(const QuantumState& state, std::span<const PauliFactor> factors) {
  return product_operator_expectation(state, pauli_ops(factors));
}

double exact_expectation(const DenseState& state, const PauliObservable& obs,
                         const std::optional<NoiseModel>& noise) {
  return obs.coefficient() * product_operator_expectation(state, observable_ops(obs, noise));
}

double exact_expectation(const MpsState& state, const PauliObservable& obs,
                         const std::optional<NoiseModel>& noise) {
  return obs.coefficient() * product_operator_expectation(state, observable_ops(obs, noise));
}

double exact_expectation(const QuantumState& state, const PauliObservable& obs,
                         const std::optional<NoiseModel>& noise) {
  return obs.coefficient() * product_operator_expectation(state, observable_ops(obs, noise));
}

double depolarizing_correlator_scale(double p, std::size_t k) {
  if (!(p >= 0.0 && p <= 0.75)) {
    throw std::invalid_argument(fmt::format("depolarizing error rate {} outside [0, 3/4]", p));
  }
  return std::pow(1.0 - 4.0 * p / 3.0, static_cast<double>(k));
}

std::string mps_to_json(const MpsState& mps) {
  nlohmann::json doc;
  doc["format"] = "povm-shadows-mps";
  doc["version"] = 1;
  doc["n"] = mps.num_qubits();
  doc["index_order"] = "left,physical,right";
  auto tensors = nlohmann::json::array();
  for (const auto& s : mps.sites()) {
    nlohmann::json t;
    t["shape"] = {s.left(), 2, s.right()};
    auto data = nlohmann::json::array();
    for (std::size_t l = 0; l < s.left(); ++l) {
      for (int p = 0; p < 2; ++p) {
        for (std::size_t r = 0; r < s.right(); ++r) {
          const Complex z = s.matrices[p](l, r);
          data.push_back({z.real(), z.imag()});
        }
      }
    }
    t["data"] = std::move(data);
    tensors.push_back(std::move(t));
  }
  doc["tensors"] = std::move(tensors);
  return doc.dump();
}

MpsState mps_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(fmt::format("MPS file is not valid JSON: {}", e.what()));
  }
  try {
    if (doc.value("format", "") != "povm-shadows-mps") {
      throw std::invalid_argument("MPS file: missing format tag 'povm-shadows-mps'");
    }
    if (doc.at("version").get<int>() != 1) {
      throw std::invalid_argument("MPS file: unsupported version");
    }
    if (doc.value("index_order", "left,physical,right") != "left,physical,right") {
      throw std::invalid_argument("MPS file: index_order must be left,physical,right");
    }
    const auto& tensors = doc.at("tensors");
    if (doc.at("n").get<std::size_t>() != tensors.size()) {
      throw std::invalid_argument("MPS file: n does not match the tensor count");
    }
    std::vector<SiteTensor> sites;
    for (std::size_t i = 0; i < tensors.size(); ++i) {
      const auto shape = tensors[i].at("shape").get<std::vector<std::size_t>>();
      if (shape.size() != 3 || shape[1] != 2) {
        throw std::invalid_argument(fmt::format("MPS site {}: shape must be [l, 2, r]", i));
      }
      const auto& data = tensors[i].at("data");
      if (data.size() != shape[0] * 2 * shape[2]) {
        throw std::invalid_argument(fmt::format("MPS site {}: data length mismatch", i));
      }
      SiteTensor t;
      for (auto& m : t.matrices) m.resize(shape[0], shape[2]);
      std::size_t idx = 0;
      for (std::size_t l = 0; l < shape[0]; ++l) {
        for (int p = 0; p < 2; ++p) {
          for (std::size_t r = 0; r < shape[2]; ++r, ++idx) {
            const auto& z = data[idx];
            t.matrices[p](l, r) = Complex(z.at(0).get<double>(), z.at(1).get<double>());
          }
        }
      }
      sites.push_back(std::move(t));
    }
    return MpsState::create(std::move(sites));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(fmt::format("malformed MPS file: {}", e.what()));
  }
}

}  // namespace povmshadow
