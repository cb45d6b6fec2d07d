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

#include "povmshadow/sampler.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include <fmt/format.h>

namespace povmshadow {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Per-outcome data shared read-only by all workers.
struct Measurement {
  std::vector<Mat2> elements;
  std::vector<Mat2> roots;  // psd square roots, used as Kraus operators

  explicit Measurement(const Povm& povm) {
    for (std::size_t a = 0; a < povm.size(); ++a) {
      elements.push_back(povm.element(a).matrix);
      roots.push_back(psd_sqrt(povm.element(a).matrix));
    }
  }

  // p(a) = tr(rho M_a) for a 2x2 (unnormalized) reduced matrix.
  void probabilities(const Mat2& rho, std::vector<double>& p) const {
    p.resize(elements.size());
    for (std::size_t a = 0; a < elements.size(); ++a) {
      p[a] = std::max(0.0, (rho * elements[a]).trace().real());
    }
  }
};

std::size_t draw(const std::vector<double>& p, std::mt19937_64& gen) {
  double total = 0.0;
  for (double x : p) total += x;
  if (!(total > 0.0)) throw NumericalError("outcome distribution has zero total weight");
  const double u = uniform01(gen) * total;
  double cum = 0.0;
  std::size_t last = 0;
  for (std::size_t a = 0; a < p.size(); ++a) {
    if (p[a] <= 0.0) continue;
    cum += p[a];
    last = a;
    if (u < cum) return a;
  }
  return last;
}

ShadowEnsemble make_ensemble(std::size_t n, const Povm& povm, std::string noise_id,
                             std::uint64_t seed) {
  return ShadowEnsemble(n, povm.size(), povm.name(), std::move(noise_id), seed);
}

void sample_vector(const Eigen::VectorXcd& psi, std::size_t n, const Measurement& meas,
                   std::mt19937_64& gen, std::uint8_t* out) {
  Eigen::VectorXcd w = psi;
  const std::size_t dim = std::size_t{1} << n;
  std::vector<double> p;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t stride = std::size_t{1} << (n - 1 - j);
    double r00 = 0.0, r11 = 0.0;
    Complex r01 = 0.0;
    for (std::size_t b = 0; b < dim; ++b) {
      if (b & stride) continue;
      const Complex w0 = w[b], w1 = w[b | stride];
      r00 += std::norm(w0);
      r11 += std::norm(w1);
      r01 += w0 * std::conj(w1);
    }
    Mat2 rho;
    rho << r00, r01, std::conj(r01), r11;
    meas.probabilities(rho, p);
    const std::size_t a = draw(p, gen);
    out[j] = static_cast<std::uint8_t>(a);
    if (j + 1 == n) break;
    const Mat2 k = meas.roots[a] / std::sqrt(p[a]);
    for (std::size_t b = 0; b < dim; ++b) {
      if (b & stride) continue;
      const Complex w0 = w[b], w1 = w[b | stride];
      w[b] = k(0, 0) * w0 + k(0, 1) * w1;
      w[b | stride] = k(1, 0) * w0 + k(1, 1) * w1;
    }
  }
}

// Measures the leading qubit of the remaining register and traces it out.
void sample_density(const Eigen::MatrixXcd& rho0, std::size_t n, const Measurement& meas,
                    std::mt19937_64& gen, std::uint8_t* out) {
  Eigen::MatrixXcd rho = rho0;
  std::vector<double> p;
  for (std::size_t j = 0; j < n; ++j) {
    const Eigen::Index h = rho.rows() / 2;
    Mat2 red;
    red << rho.topLeftCorner(h, h).trace(), rho.topRightCorner(h, h).trace(),
        rho.bottomLeftCorner(h, h).trace(), rho.bottomRightCorner(h, h).trace();
    meas.probabilities(red, p);
    const std::size_t a = draw(p, gen);
    out[j] = static_cast<std::uint8_t>(a);
    if (j + 1 == n) break;
    const Mat2& m = meas.elements[a];
    Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(h, h);
    for (int s = 0; s < 2; ++s) {
      for (int t = 0; t < 2; ++t) {
        if (m(t, s) != 0.0) next += m(t, s) * rho.block(s * h, t * h, h, h);
      }
    }
    rho = next / p[a];
  }
}

}  // namespace

ShadowEnsemble::ShadowEnsemble(std::size_t num_qubits, std::size_t num_outcomes,
                               std::string povm_id, std::string noise_id, std::uint64_t seed)
    : n_(num_qubits),
      k_(num_outcomes),
      povm_id_(std::move(povm_id)),
      noise_id_(std::move(noise_id)),
      seed_(seed) {
  if (n_ == 0) throw std::invalid_argument("ensemble needs at least one qubit");
  if (k_ < 2 || k_ > 255) {
    throw std::invalid_argument(fmt::format("outcome count {} outside [2, 255]", k_));
  }
}

void ShadowEnsemble::add_record(std::span<const std::uint8_t> outcomes) {
  if (outcomes.size() != n_) {
    throw std::invalid_argument(
        fmt::format("record has {} outcomes, ensemble has {} qubits", outcomes.size(), n_));
  }
  for (std::uint8_t a : outcomes) {
    if (a >= k_) throw std::invalid_argument(fmt::format("outcome {} >= k = {}", a, k_));
  }
  outcomes_.insert(outcomes_.end(), outcomes.begin(), outcomes.end());
}

std::span<std::uint8_t> ShadowEnsemble::allocate(std::size_t count) {
  outcomes_.assign(count * n_, 0);
  return outcomes_;
}

bool ShadowEnsemble::compatible_with(const ShadowEnsemble& other) const {
  return n_ == other.n_ && k_ == other.k_ && povm_id_ == other.povm_id_ &&
         noise_id_ == other.noise_id_;
}

void ShadowEnsemble::append(const ShadowEnsemble& other) {
  if (!compatible_with(other)) {
    throw std::invalid_argument(fmt::format(
        "cannot merge ensembles (n={}, k={}, povm={}, noise={}) and (n={}, k={}, povm={}, "
        "noise={})",
        n_, k_, povm_id_, noise_id_, other.n_, other.k_, other.povm_id_, other.noise_id_));
  }
  outcomes_.insert(outcomes_.end(), other.outcomes_.begin(), other.outcomes_.end());
}

std::uint64_t record_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(mix64(seed + 0x9e3779b97f4a7c15ULL) ^ (index * 0xd1b54a32d192ed03ULL + 1));
}

void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t, std::size_t)>& body) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(1, count / 64));
  if (workers <= 1) {
    if (count > 0) body(0, count);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk, end = std::min(count, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&, w, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

ShadowEnsemble sample_dense(const DenseState& state, const Povm& povm, std::size_t count,
                            std::uint64_t seed, const SamplerOptions& options) {
  const std::size_t n = state.num_qubits();
  ShadowEnsemble ens = make_ensemble(n, povm, "none", seed);
  const Measurement meas(povm);
  std::uint8_t* rows = ens.allocate(count).data();
  parallel_for(count, options.workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      std::mt19937_64 gen(record_seed(seed, options.first_record + j));
      if (state.is_pure()) {
        sample_vector(state.vector(), n, meas, gen, rows + j * n);
      } else {
        sample_density(state.density_matrix(), n, meas, gen, rows + j * n);
      }
    }
  });
  return ens;
}

ShadowEnsemble sample_mps(const MpsState& state, const Povm& povm, std::size_t count,
                          std::uint64_t seed, const SamplerOptions& options) {
  if (state.max_bond() > kMaxMpsBond) {
    throw std::invalid_argument(fmt::format("MPS bond dimension {} exceeds the sampler limit {}",
                                            state.max_bond(), kMaxMpsBond));
  }
  const std::size_t n = state.num_qubits();
  ShadowEnsemble ens = make_ensemble(n, povm, "none", seed);
  const Measurement meas(povm);

  // right[j]: environment of sites j..n-1, indexed (ket bond, bra bond).
  std::vector<Eigen::MatrixXcd> right(n + 1);
  right[n] = Eigen::MatrixXcd::Ones(1, 1);
  for (std::size_t j = n; j-- > 0;) {
    const auto& a = state.site(j).matrices;
    right[j] = a[0] * right[j + 1] * a[0].adjoint() + a[1] * right[j + 1] * a[1].adjoint();
  }

  std::uint8_t* rows = ens.allocate(count).data();
  parallel_for(count, options.workers, [&](std::size_t begin, std::size_t end) {
    std::vector<double> p;
    std::array<std::array<Eigen::MatrixXcd, 2>, 2> w;  // w[s][t] = A^t† L A^s
    for (std::size_t rec = begin; rec < end; ++rec) {
      std::mt19937_64 gen(record_seed(seed, options.first_record + rec));
      Eigen::MatrixXcd left = Eigen::MatrixXcd::Ones(1, 1);  // (bra bond, ket bond)
      for (std::size_t j = 0; j < n; ++j) {
        const auto& a = state.site(j).matrices;
        const Eigen::MatrixXcd rt = right[j + 1].transpose();
        Mat2 rho;
        for (int s = 0; s < 2; ++s) {
          const Eigen::MatrixXcd la = left * a[s];
          for (int t = 0; t < 2; ++t) {
            w[s][t] = a[t].adjoint() * la;
            rho(s, t) = w[s][t].cwiseProduct(rt).sum();
          }
        }
        meas.probabilities(rho, p);
        const std::size_t outcome = draw(p, gen);
        rows[rec * n + j] = static_cast<std::uint8_t>(outcome);
        const Mat2& m = meas.elements[outcome];
        Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(a[0].cols(), a[0].cols());
        for (int s = 0; s < 2; ++s) {
          for (int t = 0; t < 2; ++t) {
            if (m(t, s) != 0.0) next += m(t, s) * w[s][t];
          }
        }
        left = next / p[outcome];
      }
    }
  });
  return ens;
}

ShadowEnsemble sample_noisy(const QuantumState& state, const Povm& povm, const NoiseModel& noise,
                            std::size_t count, std::uint64_t seed,
                            const SamplerOptions& options) {
  const Povm effective = noise_adjoint_povm(povm, noise);
  ShadowEnsemble raw = std::visit(
      [&](const auto& s) -> ShadowEnsemble {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, DenseState>) {
          return sample_dense(s, effective, count, seed, options);
        } else {
          return sample_mps(s, effective, count, seed, options);
        }
      },
      state);
  ShadowEnsemble ens(raw.num_qubits(), povm.size(), povm.name(), noise.descriptor(), seed);
  const std::span<std::uint8_t> dst = ens.allocate(count);
  std::copy(raw.raw().begin(), raw.raw().end(), dst.begin());
  return ens;
}

ShadowEnsemble sample(const QuantumState& state, const Povm& povm,
                      const std::optional<NoiseModel>& noise, std::size_t count,
                      std::uint64_t seed, const SamplerOptions& options) {
  if (noise) return sample_noisy(state, povm, *noise, count, seed, options);
  return std::visit(
      [&](const auto& s) -> ShadowEnsemble {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, DenseState>) {
          return sample_dense(s, povm, count, seed, options);
        } else {
          return sample_mps(s, povm, count, seed, options);
        }
      },
      state);
}

}  // namespace povmshadow
