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

#ifndef POVMSHADOW_EXPERIMENTS_H_
#define POVMSHADOW_EXPERIMENTS_H_

#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "povmshadow/estimator.h"
#include "povmshadow/states.h"

namespace povmshadow {

/// Parsed --state argument:
///   ghz:<n>
///   product:<up|down|plus|minus>:<n>
///   tfim:<J>:<h>:<n>
///   heisenberg:<seed>:<n>
///   mps:<path to MPS JSON>
struct StateSpec {
  enum class Kind { kGhz, kProduct, kTfim, kHeisenberg, kMps };

  Kind kind = Kind::kGhz;
  std::size_t n = 0;
  std::string direction;  // product
  double j = 0.0, h = 0.0;  // tfim
  std::uint64_t disorder_seed = 0;  // heisenberg
  std::string path;  // mps
  std::string text;  // original spec

  static StateSpec parse(std::string_view text);
};

struct PreparedState {
  QuantumState state;
  std::string label;
  std::optional<double> energy;  // ground-state energy for Hamiltonian specs
  std::optional<double> gap;
  bool degenerate = false;
};

PreparedState prepare_state(const StateSpec& spec);

/// Observable set: "pairs0" (Z0Zj), "all-pairs" (ZiZj, i < j) or an explicit
/// ';'-separated list such as "Z0Z3;X1".
std::vector<PauliObservable> parse_observable_set(std::string_view text, std::size_t n);

/// Deterministic sub-seed for a run: mixes `base` with the path indices.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path);

/// Everything a subcommand needs; serialised as JSON (see to_json).
struct ExperimentConfig {
  std::string experiment;
  std::vector<std::string> povms = {"pauli6"};
  std::string state;
  std::string noise = "none";
  std::vector<double> noise_grid;          // ghz-correlators: error rates p
  std::vector<std::size_t> samples = {5000};
  std::vector<std::size_t> qubits;          // fidelity: n values
  std::size_t runs = 10;
  std::uint64_t seed = 1;
  std::string observables = "pairs0";
  std::string method = "mean";
  std::size_t workers = 0;
  std::string output;

  std::string to_json() const;
  static ExperimentConfig from_json(std::string_view text);
  /// Throws std::invalid_argument naming the first violated field.
  void validate() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

struct GhzCorrelatorRow {
  double p = 0.0;
  std::string observable;
  double mean = 0.0;  // mean over runs
  double std = 0.0;   // standard deviation over runs
  double truth = 0.0;
  std::size_t runs = 0;
  std::size_t samples = 0;
};

/// Per noise rate p: shadows of the n-qubit GHZ state after local
/// depolarizing noise of rate p (factor (1 - 4p/3) per Pauli), read with the
/// noiseless inverse channel, so estimates track the noisy state; `runs`
/// independent seeds.
std::vector<GhzCorrelatorRow> run_ghz_correlators(std::size_t n, const std::string& povm,
                                                  const std::vector<double>& p_grid,
                                                  std::size_t samples, std::size_t runs,
                                                  std::uint64_t seed,
                                                  const std::vector<PauliObservable>& observables,
                                                  std::size_t workers = 0);

struct MaxErrorRow {
  std::string state;
  std::string povm;
  std::size_t samples = 0;
  std::size_t run = 0;
  double max_error = 0.0;
};

std::vector<MaxErrorRow> run_max_error_scaling(const PreparedState& state,
                                               const std::vector<std::string>& povms,
                                               const std::vector<std::size_t>& sample_grid,
                                               std::size_t runs, std::uint64_t seed,
                                               const std::vector<PauliObservable>& observables,
                                               std::size_t workers = 0);

struct CorrelatorRow {
  std::string state;
  std::size_t i = 0, j = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  double truth = 0.0;
};

/// All <Z_i Z_j>, i < j, estimated from `samples` shadows and compared with
/// the exact values of `state`.
std::vector<CorrelatorRow> run_correlators(const PreparedState& state, const std::string& povm,
                                           std::size_t samples, std::uint64_t seed,
                                           std::size_t workers = 0);

/// Symmetric matrix with unit diagonal built from correlator rows; `truth`
/// selects exact values instead of estimates.
Eigen::MatrixXd correlation_matrix(const std::vector<CorrelatorRow>& rows, std::size_t n,
                                   bool truth);

/// Greedy pairing by most negative correlation: repeatedly take the most
/// negative entry among unpaired sites. Pairs are (i < j), sorted.
std::vector<std::pair<std::size_t, std::size_t>> singlet_pairs(const Eigen::MatrixXd& corr);

struct FidelityRow {
  std::size_t n = 0;
  std::size_t samples = 0;
  std::size_t run = 0;
  double raw = 0.0;
  double projected = 0.0;
};

/// GHZ fidelity from hypothesis states, raw and after projection onto the
/// density matrices.
std::vector<FidelityRow> run_fidelity(const std::vector<std::size_t>& qubits,
                                      const std::vector<std::size_t>& sample_grid,
                                      std::size_t runs, std::uint64_t seed,
                                      const std::string& povm, std::size_t workers = 0);

void write_csv(const std::vector<GhzCorrelatorRow>& rows, std::ostream& out);
void write_csv(const std::vector<MaxErrorRow>& rows, std::ostream& out);
void write_csv(const std::vector<CorrelatorRow>& rows, std::ostream& out);
void write_csv(const std::vector<FidelityRow>& rows, std::ostream& out);

}  // namespace povmshadow

#endif  // POVMSHADOW_EXPERIMENTS_H_
