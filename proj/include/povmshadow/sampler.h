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

#ifndef POVMSHADOW_SAMPLER_H_
#define POVMSHADOW_SAMPLER_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "povmshadow/noise.h"
#include "povmshadow/povm.h"
#include "povmshadow/states.h"

namespace povmshadow {

inline constexpr std::size_t kMaxMpsBond = 64;

/// N measurement records of n per-qubit outcome indices, stored row-major.
class ShadowEnsemble {
 public:
  ShadowEnsemble(std::size_t num_qubits, std::size_t num_outcomes, std::string povm_id,
                 std::string noise_id, std::uint64_t seed);

  std::size_t num_qubits() const { return n_; }
  std::size_t num_outcomes() const { return k_; }
  const std::string& povm_id() const { return povm_id_; }
  const std::string& noise_id() const { return noise_id_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t size() const { return n_ == 0 ? 0 : outcomes_.size() / n_; }
  bool empty() const { return outcomes_.empty(); }

  std::span<const std::uint8_t> record(std::size_t j) const {
    return {outcomes_.data() + j * n_, n_};
  }
  std::uint8_t outcome(std::size_t j, std::size_t site) const { return outcomes_[j * n_ + site]; }
  const std::vector<std::uint8_t>& raw() const { return outcomes_; }

  /// Appends one record; every index must be < num_outcomes().
  void add_record(std::span<const std::uint8_t> outcomes);
  /// Resizes to `count` zero records; used by samplers that fill rows in place.
  std::span<std::uint8_t> allocate(std::size_t count);
  /// Concatenates `other`; n, k, POVM id and noise descriptor must match.
  /// The seed of this ensemble is kept.
  void append(const ShadowEnsemble& other);
  bool compatible_with(const ShadowEnsemble& other) const;

  friend bool operator==(const ShadowEnsemble&, const ShadowEnsemble&) = default;

 private:
  std::size_t n_;
  std::size_t k_;
  std::string povm_id_;
  std::string noise_id_;
  std::uint64_t seed_;
  std::vector<std::uint8_t> outcomes_;
};

struct SamplerOptions {
  /// Worker threads; 0 means std::thread::hardware_concurrency().
  std::size_t workers = 0;
  /// Index of the first record in the seed's stream. Sampling records
  /// [0, a) and [a, a + b) separately and concatenating equals sampling
  /// [0, a + b) at once.
  std::uint64_t first_record = 0;
};

/// Seed of record `index` in the stream of `seed`.
std::uint64_t record_seed(std::uint64_t seed, std::uint64_t index);

/// Runs body(begin, end) over disjoint contiguous chunks of [0, count).
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t, std::size_t)>& body);

/// Exact sequential conditional sampling of tr(rho M_{a_1} (x) ... (x) M_{a_n}).
ShadowEnsemble sample_dense(const DenseState& state, const Povm& povm, std::size_t count,
                            std::uint64_t seed, const SamplerOptions& options = {});
/// Same law for an MPS with bond dimension <= 64; cost O(n chi^3) per record.
ShadowEnsemble sample_mps(const MpsState& state, const Povm& povm, std::size_t count,
                          std::uint64_t seed, const SamplerOptions& options = {});
/// Outcome law tr(E^{(x)n}(rho) M_{a_1} (x) ...), realised by sampling the
/// noiseless state with noise_adjoint_povm(povm, noise). The ensemble keeps
/// the original POVM id and records the noise descriptor.
ShadowEnsemble sample_noisy(const QuantumState& state, const Povm& povm, const NoiseModel& noise,
                            std::size_t count, std::uint64_t seed,
                            const SamplerOptions& options = {});
/// Dispatches on the state type and optional noise.
ShadowEnsemble sample(const QuantumState& state, const Povm& povm,
                      const std::optional<NoiseModel>& noise, std::size_t count,
                      std::uint64_t seed, const SamplerOptions& options = {});

/// Binary ensemble file:
///   bytes 0..7    magic "POVMSHD1"
///   bytes 8..11   little-endian uint32 header length H
///   next H bytes  JSON header {"version":1,"n","k","povm","noise","seed","N"}
///   then N*n      uint8 outcome indices, record-major.
void write_ensemble(const ShadowEnsemble& ensemble, std::ostream& out);
ShadowEnsemble read_ensemble(std::istream& in);
void save_ensemble(const ShadowEnsemble& ensemble, const std::string& path);
ShadowEnsemble load_ensemble(const std::string& path);

/// CSV: a "# schema: ensemble/1" line, a "# povm=..,noise=..,seed=..,n=..,k=.."
/// line, a header "record,q0,...,q{n-1}" and one row per record.
void write_ensemble_csv(const ShadowEnsemble& ensemble, std::ostream& out);

}  // namespace povmshadow

#endif  // POVMSHADOW_SAMPLER_H_
