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

// Command-line front end: povm-shadows <subcommand> [options].
// Exit codes: 0 success, 2 invalid configuration or input, 3 numerical failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "povmshadow/channel.h"
#include "povmshadow/estimator.h"
#include "povmshadow/experiments.h"
#include "povmshadow/fidelity.h"
#include "povmshadow/povm.h"
#include "povmshadow/sampler.h"
#include "povmshadow/states.h"

namespace {

using namespace povmshadow;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

// Writes `content` to `path` through a temporary file and a rename, so a
// failed run never leaves a partial file behind. An empty path means stdout.
void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::invalid_argument(fmt::format("cannot write '{}'", path));
    out << content;
    if (!out) throw std::runtime_error(fmt::format("write to '{}' failed", tmp));
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument(fmt::format("cannot open '{}'", path));
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw std::invalid_argument(fmt::format("bad number '{}' in list '{}'", item, text));
    }
    out.push_back(v);
  }
  return out;
}

// Options shared by the experiment subcommands. Values given on the command
// line override those read from --config.
struct Options {
  std::string config_path;
  bool dump_config = false;
  ExperimentConfig config;
  std::string povm_list;
  std::string p_grid;
  bool all_pairs = false;
  std::string csv_out;
  std::string json_out;
  std::string ensemble_path;
  std::string povm_file;
  std::size_t k = 2, observable_count = 1;
  double epsilon = 0.1, delta = 0.05;
  std::size_t qubits_n = 0;
  std::uint64_t disorder_seed = 1;
};

struct Bound {
  CLI::Option* povm = nullptr;
  CLI::Option* state = nullptr;
  CLI::Option* noise = nullptr;
  CLI::Option* samples = nullptr;
  CLI::Option* runs = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* out = nullptr;
  CLI::Option* observables = nullptr;
  CLI::Option* method = nullptr;
  CLI::Option* workers = nullptr;
  CLI::Option* qubits = nullptr;
};

ExperimentConfig resolve(const std::string& experiment, Options& o, const Bound& b,
                         const ExperimentConfig& defaults) {
  ExperimentConfig c = defaults;
  if (!o.config_path.empty()) {
    c = ExperimentConfig::from_json(read_file(o.config_path));
    if (!c.experiment.empty() && c.experiment != experiment) {
      throw std::invalid_argument(fmt::format("config is for '{}', not '{}'", c.experiment,
                                              experiment));
    }
  }
  c.experiment = experiment;
  const ExperimentConfig& cli = o.config;
  if (b.povm && b.povm->count() > 0) {
    c.povms.clear();
    std::stringstream ss(o.povm_list);
    std::string item;
    while (std::getline(ss, item, ',')) c.povms.push_back(item);
  }
  if (b.state && b.state->count() > 0) c.state = cli.state;
  if (b.noise && b.noise->count() > 0) c.noise = cli.noise;
  if (b.samples && b.samples->count() > 0) c.samples = cli.samples;
  if (b.runs && b.runs->count() > 0) c.runs = cli.runs;
  if (b.seed && b.seed->count() > 0) c.seed = cli.seed;
  if (b.out && b.out->count() > 0) c.output = cli.output;
  if (b.observables && b.observables->count() > 0) c.observables = cli.observables;
  if (b.method && b.method->count() > 0) c.method = cli.method;
  if (b.workers && b.workers->count() > 0) c.workers = cli.workers;
  if (b.qubits && b.qubits->count() > 0) c.qubits = cli.qubits;
  if (!o.p_grid.empty()) c.noise_grid = parse_double_list(o.p_grid);
  if (o.all_pairs) c.observables = "all-pairs";
  c.validate();
  return c;
}

Bound add_common(CLI::App* app, Options& o, bool with_state = true) {
  Bound b;
  app->add_option("--config", o.config_path, "JSON experiment config (flags override it)");
  app->add_flag("--dump-config", o.dump_config, "print the resolved config as JSON and exit");
  b.povm = app->add_option("--povm", o.povm_list, "POVM name(s): pauli6, pauli4, tetra");
  if (with_state) {
    b.state = app->add_option("--state", o.config.state,
                              "ghz:n | product:up|down|plus|minus:n | tfim:J:h:n | "
                              "heisenberg:seed:n | mps:path");
  }
  b.samples = app->add_option("--samples", o.config.samples, "sample count(s) N")->delimiter(',');
  b.runs = app->add_option("--runs", o.config.runs, "independent runs");
  b.seed = app->add_option("--seed", o.config.seed, "base seed");
  b.out = app->add_option("--out", o.config.output, "output path (default stdout)");
  b.workers = app->add_option("--workers", o.config.workers, "worker threads (0 = all cores)");
  return b;
}

// Elements of a POVM JSON file, read without the checks of Povm::create so
// that invalid files can be reported on.
std::vector<Mat2> read_elements(const std::string& text) {
  std::vector<Mat2> elements;
  try {
    const auto doc = nlohmann::json::parse(text);
    for (const auto& e : doc.at("elements")) {
      if (e.size() != 4) throw std::invalid_argument("POVM element needs 4 entries");
      Mat2 m;
      for (int i = 0; i < 4; ++i) {
        m(i / 2, i % 2) = Complex(e[i].at(0).get<double>(), e[i].at(1).get<double>());
      }
      elements.push_back(m);
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(fmt::format("malformed POVM file: {}", e.what()));
  }
  return elements;
}

int run_validate(const Options& o) {
  std::string text;
  if (!o.povm_file.empty()) {
    const std::string content = read_file(o.povm_file);
    const ValidationReport report = validate_povm(read_elements(content));
    if (!report.empty()) {
      emit(o.config.output, fmt::format("povm file {}: {}\n", o.povm_file, format_report(report)));
      return kExitConfig;
    }
  }
  const Povm povm = o.povm_file.empty()
                        ? builtin_povm(o.povm_list.empty() ? "pauli6" : o.povm_list)
                        : povm_from_json(read_file(o.povm_file));
  text = fmt::format("povm {} (k = {}): valid\n", povm.name(), povm.size());
  try {
    const MeasurementChannel ch = measurement_channel(povm);
    text += channel_to_json(ch, factor_table(ch)) + "\n";
  } catch (const NumericalError& e) {
    text += fmt::format("channel: {}\n", e.what());
    emit(o.config.output, text);
    return kExitNumerical;
  }
  emit(o.config.output, text);
  return 0;
}

int run_sample(const ExperimentConfig& c, const Options& o) {
  if (c.state.empty()) throw std::invalid_argument("sample needs --state");
  if (c.output.empty()) throw std::invalid_argument("sample needs --out <ensemble file>");
  const PreparedState st = prepare_state(StateSpec::parse(c.state));
  const Povm povm = builtin_povm(c.povms.front());
  const ShadowEnsemble ens =
      sample(st.state, povm, NoiseModel::parse(c.noise), c.samples.front(), c.seed, {c.workers, 0});
  std::ostringstream bin;
  write_ensemble(ens, bin);
  if (!o.csv_out.empty()) {
    std::ostringstream csv;
    write_ensemble_csv(ens, csv);
    emit(o.csv_out, csv.str());
  }
  emit(c.output, bin.str());
  return 0;
}

int run_estimate(const ExperimentConfig& c, const Options& o) {
  if (o.ensemble_path.empty()) throw std::invalid_argument("estimate needs --ensemble");
  const ShadowEnsemble ens = load_ensemble(o.ensemble_path);
  const Povm povm = builtin_povm(ens.povm_id());
  const MeasurementChannel ch =
      measurement_channel(povm, SnapshotRule::limit(), NoiseModel::parse(ens.noise_id()));
  const FactorTable table = factor_table(ch);
  const auto observables = parse_observable_set(c.observables, ens.num_qubits());
  const EstimatorMethod method = EstimatorMethod::parse(c.method);
  std::optional<PreparedState> truth_state;
  if (!c.state.empty()) truth_state = prepare_state(StateSpec::parse(c.state));
  std::vector<EstimateRow> rows;
  std::size_t k = 0;
  for (const auto& obs : observables) {
    std::optional<double> truth;
    if (truth_state) truth = exact_expectation(truth_state->state, obs, ch.noise);
    rows.push_back(make_row(obs, method, estimate(ens, obs, table, method), truth));
    k = std::max(k, obs.locality());
  }
  std::ostringstream csv;
  write_estimates_csv(rows, csv);
  if (!o.json_out.empty()) {
    const SampleBudget budget = plan_samples(table, k, observables.size(), o.epsilon, o.delta);
    emit(o.json_out, estimates_json(rows, budget) + "\n");
  }
  emit(c.output, csv.str());
  return 0;
}

int run_plan(const Options& o) {
  const Povm povm = builtin_povm(o.povm_list.empty() ? "pauli6" : o.povm_list);
  const FactorTable table = factor_table(measurement_channel(povm));
  const SampleBudget b = plan_samples(table, o.k, o.observable_count, o.epsilon, o.delta);
  emit(o.config.output,
       fmt::format("povm={} k={} L={} epsilon={} delta={} B={:.17g} N={}\n", povm.name(), o.k,
                   b.observables, b.epsilon, b.delta, b.bound, b.samples));
  return 0;
}

int run_ghz(const ExperimentConfig& c, const Options& o) {
  const StateSpec spec = StateSpec::parse(c.state.empty() ? "ghz:30" : c.state);
  if (spec.kind != StateSpec::Kind::kGhz) throw std::invalid_argument("ghz-correlators needs --state ghz:n");
  std::vector<double> grid = c.noise_grid;
  if (grid.empty()) grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  const auto observables = parse_observable_set(c.observables, spec.n);
  const auto rows = run_ghz_correlators(spec.n, c.povms.front(), grid, c.samples.front(), c.runs,
                                        c.seed, observables, c.workers);
  (void)o;
  std::ostringstream csv;
  write_csv(rows, csv);
  emit(c.output, csv.str());
  return 0;
}

int run_max_error(const ExperimentConfig& c) {
  std::vector<std::string> states = {"ghz:30", "product:down:30"};
  if (!c.state.empty()) states = {c.state};
  std::vector<MaxErrorRow> rows;
  for (const auto& s : states) {
    const PreparedState st = prepare_state(StateSpec::parse(s));
    const auto observables = parse_observable_set(c.observables, num_qubits(st.state));
    const auto part =
        run_max_error_scaling(st, c.povms, c.samples, c.runs, c.seed, observables, c.workers);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  std::ostringstream csv;
  write_csv(rows, csv);
  emit(c.output, csv.str());
  return 0;
}

int run_ground_state(const ExperimentConfig& c, const std::vector<std::string>& default_states,
                     bool report_singlets) {
  std::vector<std::string> states = default_states;
  if (!c.state.empty()) states = {c.state};
  std::vector<CorrelatorRow> rows;
  std::string singlets;
  for (std::size_t si = 0; si < states.size(); ++si) {
    const PreparedState st = prepare_state(StateSpec::parse(states[si]));
    if (st.degenerate) {
      std::cerr << fmt::format("warning: {} has a degenerate ground space (gap {:.3e})\n",
                               st.label, st.gap.value_or(0.0));
    }
    const auto part = run_correlators(st, c.povms.front(), c.samples.front(),
                                      derive_seed(c.seed, {si}), c.workers);
    rows.insert(rows.end(), part.begin(), part.end());
    if (report_singlets) {
      const std::size_t n = num_qubits(st.state);
      for (bool truth : {true, false}) {
        singlets += fmt::format("# {} singlet pairs ({}):", st.label, truth ? "exact" : "shadow");
        for (const auto& [i, j] : singlet_pairs(correlation_matrix(part, n, truth))) {
          singlets += fmt::format(" ({},{})", i, j);
        }
        singlets += "\n";
      }
    }
  }
  std::ostringstream csv;
  write_csv(rows, csv);
  emit(c.output, csv.str());
  if (!singlets.empty()) std::cerr << singlets;
  return 0;
}

int run_fidelity_cmd(const ExperimentConfig& c) {
  std::vector<std::size_t> qubits = c.qubits;
  if (qubits.empty()) qubits = {2, 4, 6, 8};
  const auto rows = run_fidelity(qubits, c.samples, c.runs, c.seed, c.povms.front(), c.workers);
  std::ostringstream csv;
  write_csv(rows, csv);
  emit(c.output, csv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "POVM classical shadows: sampling, estimation and the correlator and fidelity "
      "experiments.\nGround states of interacting chains use exact diagonalization (n <= 12); "
      "larger ground states can be imported as MPS tensors (--state mps:path)."};
  app.require_subcommand(1);
  Options o;

  auto* validate = app.add_subcommand("validate-povm", "validate a POVM and print its channel");
  validate->add_option("--povm", o.povm_list, "built-in POVM name");
  validate->add_option("--povm-file", o.povm_file, "POVM JSON file");
  validate->add_option("--out", o.config.output, "output path");

  auto* sample_cmd = app.add_subcommand("sample", "sample a shadow ensemble");
  Bound sample_b = add_common(sample_cmd, o);
  sample_b.noise = sample_cmd->add_option(
      "--noise", o.config.noise,
      "none | depolarizing:<q> | depolarizing_rate:<p> | amplitude_damping:<gamma>");
  sample_cmd->add_option("--csv", o.csv_out, "also write the records as CSV");

  auto* estimate_cmd = app.add_subcommand("estimate", "estimate Pauli observables");
  Bound estimate_b = add_common(estimate_cmd, o);
  estimate_cmd->add_option("--ensemble", o.ensemble_path, "ensemble file")->required();
  estimate_b.observables = estimate_cmd->add_option(
      "--observables", o.config.observables, "pairs0 | all-pairs | 'Z0Z3;X1'");
  estimate_b.method = estimate_cmd->add_option("--method", o.config.method, "mean | mom:<B>");
  estimate_cmd->add_option("--json", o.json_out, "JSON results with the sample budget");
  estimate_cmd->add_option("--epsilon", o.epsilon, "budget accuracy (JSON output)");
  estimate_cmd->add_option("--delta", o.delta, "budget failure probability (JSON output)");

  auto* plan = app.add_subcommand("plan-samples", "Hoeffding sample budget");
  plan->add_option("--k", o.k, "locality")->required();
  plan->add_option("--L", o.observable_count, "number of observables")->required();
  plan->add_option("--epsilon", o.epsilon, "additive error")->required();
  plan->add_option("--delta", o.delta, "failure probability")->required();
  plan->add_option("--povm", o.povm_list, "POVM name");
  plan->add_option("--out", o.config.output, "output path");

  auto* ghz_cmd = app.add_subcommand("ghz-correlators", "noisy GHZ two-point correlators");
  Bound ghz_b = add_common(ghz_cmd, o);
  ghz_cmd->add_option("--p-grid", o.p_grid, "comma-separated depolarizing error rates p");
  ghz_cmd->add_flag("--all-pairs", o.all_pairs, "all pairs instead of (0, j)");

  auto* maxerr = app.add_subcommand("max-error-scaling", "max error over all ZZ pairs vs N");
  Bound maxerr_b = add_common(maxerr, o);
  maxerr_b.observables =
      maxerr->add_option("--observables", o.config.observables, "observable set");

  auto* ising = app.add_subcommand(
      "ising", "TFIM ground-state correlators (ED, n <= 12; default regimes J=h, J>h, J<h)");
  ising->footer(
      "Scale substitution: 30-site chains would need DMRG, which is out of scope. The "
      "ground states here come from exact diagonalization of n <= 12 sites; supply larger "
      "ground states as MPS tensors with --state mps:<path>.");
  Bound ising_b = add_common(ising, o);
  ising->add_option("--n", o.qubits_n, "chain length for the default regimes");

  auto* heis = app.add_subcommand("heisenberg", "disordered XXZ chain correlators and singlets");
  Bound heis_b = add_common(heis, o);
  heis->add_option("--n", o.qubits_n, "chain length for the default state");
  heis->add_option("--disorder-seed", o.disorder_seed, "seed of the coupling draw");

  auto* fid = app.add_subcommand("fidelity", "GHZ fidelity from hypothesis states");
  Bound fid_b = add_common(fid, o, false);
  fid_b.qubits = fid->add_option("--qubits", o.config.qubits, "qubit counts (<= 8)")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    auto finish = [&](const std::string& name, const Bound& b, ExperimentConfig defaults,
                      auto&& run) -> int {
      const ExperimentConfig c = resolve(name, o, b, defaults);
      if (o.dump_config) {
        emit("", c.to_json() + "\n");
        return 0;
      }
      return run(c);
    };
    if (validate->parsed()) return run_validate(o);
    if (plan->parsed()) return run_plan(o);
    if (sample_cmd->parsed()) {
      return finish("sample", sample_b, {}, [&](const auto& c) { return run_sample(c, o); });
    }
    if (estimate_cmd->parsed()) {
      return finish("estimate", estimate_b, {}, [&](const auto& c) { return run_estimate(c, o); });
    }
    if (ghz_cmd->parsed()) {
      return finish("ghz-correlators", ghz_b, {}, [&](const auto& c) { return run_ghz(c, o); });
    }
    if (maxerr->parsed()) {
      ExperimentConfig d;
      d.povms = {"pauli6", "pauli4", "tetra"};
      d.samples = {500, 1000, 2000, 5000};
      d.observables = "all-pairs";
      return finish("max-error-scaling", maxerr_b, d,
                    [&](const auto& c) { return run_max_error(c); });
    }
    if (ising->parsed()) {
      const std::size_t n = o.qubits_n == 0 ? 12 : o.qubits_n;
      const std::vector<std::string> regimes = {fmt::format("tfim:1:1:{}", n),
                                                fmt::format("tfim:1:0.5:{}", n),
                                                fmt::format("tfim:0.5:1:{}", n)};
      return finish("ising", ising_b, {},
                    [&](const auto& c) { return run_ground_state(c, regimes, false); });
    }
    if (heis->parsed()) {
      const std::size_t n = o.qubits_n == 0 ? 10 : o.qubits_n;
      const std::string spec = fmt::format("heisenberg:{}:{}", o.disorder_seed, n);
      return finish("heisenberg", heis_b, {},
                    [&](const auto& c) { return run_ground_state(c, {spec}, true); });
    }
    if (fid->parsed()) {
      ExperimentConfig d;
      d.samples = {1000, 10000};
      return finish("fidelity", fid_b, d, [&](const auto& c) { return run_fidelity_cmd(c); });
    }
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
