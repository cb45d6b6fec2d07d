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

#include "povmshadow/experiments.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"
#include "povmshadow/channel.h"
#include "povmshadow/fidelity.h"
#include "povmshadow/sampler.h"

namespace povmshadow {

namespace {

const std::vector<std::string> kExperiments = {
    "sample", "estimate", "ghz-correlators", "max-error-scaling", "ising", "heisenberg",
    "fidelity"};

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument(fmt::format("bad {} '{}'", what, text));
  }
  return value;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

Eigen::Vector3d product_direction(std::string_view d) {
  if (d == "up") return {0, 0, 1};
  if (d == "down") return {0, 0, -1};
  if (d == "plus") return {1, 0, 0};
  if (d == "minus") return {-1, 0, 0};
  throw std::invalid_argument(fmt::format("unknown product direction '{}' (up|down|plus|minus)", d));
}

}  // namespace

StateSpec StateSpec::parse(std::string_view text) {
  const auto parts = split(text, ':');
  StateSpec s;
  s.text = std::string(text);
  const std::string_view kind = parts[0];
  auto want = [&](std::size_t count) {
    if (parts.size() != count) {
      throw std::invalid_argument(fmt::format("state spec '{}' needs {} ':'-separated fields",
                                              text, count));
    }
  };
  if (kind == "ghz") {
    want(2);
    s.kind = Kind::kGhz;
    s.n = parse_number<std::size_t>(parts[1], "qubit count");
    if (s.n < 2) throw std::invalid_argument("ghz needs n >= 2");
  } else if (kind == "product") {
    want(3);
    s.kind = Kind::kProduct;
    s.direction = std::string(parts[1]);
    product_direction(s.direction);
    s.n = parse_number<std::size_t>(parts[2], "qubit count");
  } else if (kind == "tfim") {
    want(4);
    s.kind = Kind::kTfim;
    s.j = parse_number<double>(parts[1], "coupling J");
    s.h = parse_number<double>(parts[2], "field h");
    s.n = parse_number<std::size_t>(parts[3], "qubit count");
  } else if (kind == "heisenberg") {
    want(3);
    s.kind = Kind::kHeisenberg;
    s.disorder_seed = parse_number<std::uint64_t>(parts[1], "disorder seed");
    s.n = parse_number<std::size_t>(parts[2], "qubit count");
  } else if (kind == "mps") {
    if (parts.size() < 2) throw std::invalid_argument("state spec 'mps:<path>' needs a path");
    s.kind = Kind::kMps;
    s.path = std::string(text.substr(4));
  } else {
    throw std::invalid_argument(fmt::format(
        "unknown state spec '{}' (ghz:n | product:dir:n | tfim:J:h:n | heisenberg:seed:n | "
        "mps:path)",
        text));
  }
  if (s.kind != Kind::kMps && s.n == 0) throw std::invalid_argument("qubit count must be >= 1");
  if ((s.kind == Kind::kTfim || s.kind == Kind::kHeisenberg) && s.n > 12) {
    throw std::invalid_argument(
        "ground states are computed by exact diagonalization for n <= 12; import larger "
        "ground states as MPS (mps:<path>)");
  }
  return s;
}

PreparedState prepare_state(const StateSpec& spec) {
  switch (spec.kind) {
    case StateSpec::Kind::kGhz:
      return {ghz(spec.n), spec.text, std::nullopt, std::nullopt, false};
    case StateSpec::Kind::kProduct:
      return {uniform_product_state(spec.n, product_direction(spec.direction)), spec.text,
              std::nullopt, std::nullopt, false};
    case StateSpec::Kind::kTfim:
    case StateSpec::Kind::kHeisenberg: {
      std::optional<SpinHamiltonian> ham;
      if (spec.kind == StateSpec::Kind::kTfim) {
        ham = SpinHamiltonian::transverse_field_ising(spec.n, spec.j, spec.h);
      } else {
        const HeisenbergDisorder d = random_heisenberg_disorder(spec.n, spec.disorder_seed);
        ham = SpinHamiltonian::heisenberg(spec.n, d.jx, d.jy, d.jz, 0.0);
      }
      GroundState gs = ground_state(*ham);
      return {std::move(gs.state), spec.text, gs.energy, gs.gap, gs.degenerate};
    }
    case StateSpec::Kind::kMps: {
      std::ifstream in(spec.path);
      if (!in) throw std::invalid_argument(fmt::format("cannot open MPS file '{}'", spec.path));
      std::stringstream buf;
      buf << in.rdbuf();
      return {mps_from_json(buf.str()), spec.text, std::nullopt, std::nullopt, false};
    }
  }
  throw std::logic_error("unhandled state kind");
}

std::vector<PauliObservable> parse_observable_set(std::string_view text, std::size_t n) {
  if (text == "pairs0") return zz_pairs_from_zero(n);
  if (text == "all-pairs") return all_zz_pairs(n);
  std::vector<PauliObservable> out;
  for (const auto part : split(text, ';')) {
    if (part.empty()) continue;
    out.push_back(PauliObservable::parse(part));
    if (out.back().max_site() >= n) {
      throw std::invalid_argument(
          fmt::format("observable '{}' acts outside {} qubits", part, n));
    }
  }
  if (out.empty()) throw std::invalid_argument(fmt::format("empty observable set '{}'", text));
  return out;
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = base;
  for (std::uint64_t p : path) s = record_seed(s, p);
  return s;
}

std::string ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["schema"] = "config/1";
  j["experiment"] = experiment;
  j["povms"] = povms;
  j["state"] = state;
  j["noise"] = noise;
  j["noise_grid"] = noise_grid;
  j["samples"] = samples;
  j["qubits"] = qubits;
  j["runs"] = runs;
  j["seed"] = seed;
  j["observables"] = observables;
  j["method"] = method;
  j["workers"] = workers;
  j["output"] = output;
  return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(std::string_view text) {
  ExperimentConfig c;
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.value("schema", "config/1") != "config/1") {
      throw std::invalid_argument("unsupported config schema");
    }
    for (const auto& [key, value] : j.items()) {
      if (key == "schema") continue;
      if (key == "experiment") c.experiment = value.get<std::string>();
      else if (key == "povms") c.povms = value.get<std::vector<std::string>>();
      else if (key == "state") c.state = value.get<std::string>();
      else if (key == "noise") c.noise = value.get<std::string>();
      else if (key == "noise_grid") c.noise_grid = value.get<std::vector<double>>();
      else if (key == "samples") c.samples = value.get<std::vector<std::size_t>>();
      else if (key == "qubits") c.qubits = value.get<std::vector<std::size_t>>();
      else if (key == "runs") c.runs = value.get<std::size_t>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "observables") c.observables = value.get<std::string>();
      else if (key == "method") c.method = value.get<std::string>();
      else if (key == "workers") c.workers = value.get<std::size_t>();
      else if (key == "output") c.output = value.get<std::string>();
      else throw std::invalid_argument(fmt::format("unknown config key '{}'", key));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(fmt::format("malformed config: {}", e.what()));
  }
  return c;
}

void ExperimentConfig::validate() const {
  if (std::find(kExperiments.begin(), kExperiments.end(), experiment) == kExperiments.end()) {
    throw std::invalid_argument(fmt::format("config: unknown experiment '{}'", experiment));
  }
  if (povms.empty()) throw std::invalid_argument("config: povms is empty");
  for (const auto& p : povms) builtin_povm(p);
  if (!state.empty()) StateSpec::parse(state);
  NoiseModel::parse(noise);
  for (double p : noise_grid) {
    if (!(p >= 0.0 && p <= 0.75)) {
      throw std::invalid_argument(fmt::format("config: noise rate {} outside [0, 0.75]", p));
    }
  }
  if (samples.empty()) throw std::invalid_argument("config: samples is empty");
  for (std::size_t n : samples) {
    if (n == 0) throw std::invalid_argument("config: sample counts must be >= 1");
  }
  for (std::size_t n : qubits) {
    if (n < 2 || n > kMaxHypothesisQubits) {
      throw std::invalid_argument(fmt::format("config: qubit count {} outside [2, 8]", n));
    }
  }
  if (runs == 0) throw std::invalid_argument("config: runs must be >= 1");
  EstimatorMethod::parse(method);
}

std::vector<GhzCorrelatorRow> run_ghz_correlators(std::size_t n, const std::string& povm_name,
                                                  const std::vector<double>& p_grid,
                                                  std::size_t samples, std::size_t runs,
                                                  std::uint64_t seed,
                                                  const std::vector<PauliObservable>& observables,
                                                  std::size_t workers) {
  const Povm povm = builtin_povm(povm_name);
  const QuantumState state = ghz(n);
  const FactorTable table = factor_table(measurement_channel(povm));
  std::vector<GhzCorrelatorRow> rows;
  for (std::size_t pi = 0; pi < p_grid.size(); ++pi) {
    const double p = p_grid[pi];
    const NoiseModel noise = NoiseModel::depolarizing_from_error_rate(p);
    std::vector<std::vector<double>> per_obs(observables.size());
    for (std::size_t r = 0; r < runs; ++r) {
      const std::uint64_t run_seed = derive_seed(seed, {pi, r});
      const ShadowEnsemble noisy =
          sample_noisy(state, povm, noise, samples, run_seed, {workers, 0});
      // The noise belongs to the prepared state, not to the measurement, so
      // the records are read with the noiseless inverse.
      ShadowEnsemble ens(n, povm.size(), povm.name(), "none", run_seed);
      const std::span<std::uint8_t> dst = ens.allocate(noisy.size());
      std::copy(noisy.raw().begin(), noisy.raw().end(), dst.begin());
      for (std::size_t o = 0; o < observables.size(); ++o) {
        per_obs[o].push_back(estimate(ens, observables[o], table).value);
      }
    }
    for (std::size_t o = 0; o < observables.size(); ++o) {
      rows.push_back({p, observables[o].label(), mean_of(per_obs[o]), std_of(per_obs[o]),
                      exact_expectation(state, observables[o], noise), runs, samples});
    }
  }
  return rows;
}

std::vector<MaxErrorRow> run_max_error_scaling(const PreparedState& state,
                                               const std::vector<std::string>& povms,
                                               const std::vector<std::size_t>& sample_grid,
                                               std::size_t runs, std::uint64_t seed,
                                               const std::vector<PauliObservable>& observables,
                                               std::size_t workers) {
  std::vector<double> truths;
  for (const auto& obs : observables) truths.push_back(exact_expectation(state.state, obs));
  std::vector<MaxErrorRow> rows;
  for (std::size_t pi = 0; pi < povms.size(); ++pi) {
    const Povm povm = builtin_povm(povms[pi]);
    const FactorTable table = factor_table(measurement_channel(povm));
    for (std::size_t ni = 0; ni < sample_grid.size(); ++ni) {
      for (std::size_t r = 0; r < runs; ++r) {
        const ShadowEnsemble ens = sample(state.state, povm, std::nullopt, sample_grid[ni],
                                          derive_seed(seed, {pi, ni, r}), {workers, 0});
        std::vector<double> est;
        for (const auto& obs : observables) est.push_back(estimate(ens, obs, table).value);
        rows.push_back({state.label, povms[pi], sample_grid[ni], r, max_error(est, truths)});
      }
    }
  }
  return rows;
}

std::vector<CorrelatorRow> run_correlators(const PreparedState& state, const std::string& povm_name,
                                           std::size_t samples, std::uint64_t seed,
                                           std::size_t workers) {
  const Povm povm = builtin_povm(povm_name);
  const FactorTable table = factor_table(measurement_channel(povm));
  const ShadowEnsemble ens = sample(state.state, povm, std::nullopt, samples, seed, {workers, 0});
  std::vector<CorrelatorRow> rows;
  for (const auto& obs : all_zz_pairs(num_qubits(state.state))) {
    const Estimate e = estimate(ens, obs, table);
    rows.push_back({state.label, obs.support()[0].site, obs.support()[1].site, e.value,
                    e.std_error, exact_expectation(state.state, obs)});
  }
  return rows;
}

Eigen::MatrixXd correlation_matrix(const std::vector<CorrelatorRow>& rows, std::size_t n,
                                   bool truth) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Identity(n, n);
  for (const auto& r : rows) {
    const double v = truth ? r.truth : r.estimate;
    c(r.i, r.j) = v;
    c(r.j, r.i) = v;
  }
  return c;
}

std::vector<std::pair<std::size_t, std::size_t>> singlet_pairs(const Eigen::MatrixXd& corr) {
  const auto n = static_cast<std::size_t>(corr.rows());
  std::vector<std::pair<std::size_t, std::size_t>> candidates;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) candidates.emplace_back(i, j);
  }
  std::stable_sort(candidates.begin(), candidates.end(), [&](const auto& a, const auto& b) {
    return corr(a.first, a.second) < corr(b.first, b.second);
  });
  std::vector<bool> used(n, false);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& [i, j] : candidates) {
    if (used[i] || used[j] || corr(i, j) >= 0.0) continue;
    used[i] = used[j] = true;
    pairs.emplace_back(i, j);
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

std::vector<FidelityRow> run_fidelity(const std::vector<std::size_t>& qubits,
                                      const std::vector<std::size_t>& sample_grid,
                                      std::size_t runs, std::uint64_t seed,
                                      const std::string& povm_name, std::size_t workers) {
  const Povm povm = builtin_povm(povm_name);
  const MeasurementChannel channel = measurement_channel(povm);
  std::vector<FidelityRow> rows;
  for (std::size_t n : qubits) {
    const MpsState state = ghz(n);
    const Eigen::VectorXcd target = state.to_vector();
    for (std::size_t ni = 0; ni < sample_grid.size(); ++ni) {
      for (std::size_t r = 0; r < runs; ++r) {
        const ShadowEnsemble ens =
            sample_mps(state, povm, sample_grid[ni], derive_seed(seed, {n, ni, r}), {workers, 0});
        const HypothesisState sigma = hypothesis_state(ens, channel);
        rows.push_back({n, sample_grid[ni], r, fidelity_pure(sigma.matrix, target),
                        fidelity_pure(project_to_physical(sigma.matrix), target)});
      }
    }
  }
  return rows;
}

void write_csv(const std::vector<GhzCorrelatorRow>& rows, std::ostream& out) {
  out << "# schema: ghz-correlators/1\n";
  out << "p,observable,N,runs,mean,std,truth,abs_error\n";
  for (const auto& r : rows) {
    out << fmt::format("{:.17g},{},{},{},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.p, r.observable,
                       r.samples, r.runs, r.mean, r.std, r.truth, std::abs(r.mean - r.truth));
  }
}

void write_csv(const std::vector<MaxErrorRow>& rows, std::ostream& out) {
  out << "# schema: max-error-scaling/1\n";
  out << "state,povm,N,run,max_error\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{:.17g}\n", r.state, r.povm, r.samples, r.run, r.max_error);
  }
}

void write_csv(const std::vector<CorrelatorRow>& rows, std::ostream& out) {
  out << "# schema: correlators/1\n";
  out << "state,i,j,estimate,std_error,truth,abs_error\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.state, r.i, r.j,
                       r.estimate, r.std_error, r.truth, std::abs(r.estimate - r.truth));
  }
}

void write_csv(const std::vector<FidelityRow>& rows, std::ostream& out) {
  out << "# schema: fidelity/1\n";
  out << "n,N,run,raw_fidelity,projected_fidelity\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{:.17g},{:.17g}\n", r.n, r.samples, r.run, r.raw, r.projected);
  }
}

}  // namespace povmshadow
