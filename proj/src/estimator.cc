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

#include "povmshadow/estimator.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "json.hpp"

namespace povmshadow {

namespace {

// ceil(x), except that x within a relative 1e-9 of an integer rounds to it,
// so that exact arithmetic like 16000.000000000002 does not bump N.
std::size_t tolerant_ceil(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) return static_cast<std::size_t>(r);
  return static_cast<std::size_t>(std::ceil(x));
}

void check_accuracy(double epsilon, double delta) {
  if (!(epsilon > 0.0)) throw std::invalid_argument(fmt::format("epsilon {} must be > 0", epsilon));
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument(fmt::format("delta {} must lie in (0, 1)", delta));
  }
}

double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

bool proportional_to_identity(const Mat2& q) {
  const double scale = std::max(1.0, max_abs_entry(q));
  return std::abs(q(0, 1)) <= 1e-12 * scale && std::abs(q(1, 0)) <= 1e-12 * scale &&
         std::abs(q(0, 0) - q(1, 1)) <= 1e-12 * scale;
}

std::string support_text(const PauliObservable& obs) {
  std::string out;
  for (const auto& f : obs.support()) {
    if (!out.empty()) out += ';';
    out += fmt::format("{}:{}", f.site, static_cast<char>(std::tolower(axis_letter(f.axis))));
  }
  return out;
}

}  // namespace

EstimatorMethod EstimatorMethod::median_of_means(std::size_t batches) {
  if (batches == 0) throw std::invalid_argument("median of means needs at least one batch");
  return {Kind::kMedianOfMeans, batches};
}

EstimatorMethod EstimatorMethod::default_median_of_means(std::size_t observables, double delta) {
  check_accuracy(1.0, delta);
  if (observables == 0) throw std::invalid_argument("observable count must be >= 1");
  const double b = std::ceil(2.0 * std::log(2.0 * static_cast<double>(observables) / delta));
  return median_of_means(static_cast<std::size_t>(b));
}

std::string EstimatorMethod::describe() const {
  if (kind == Kind::kMean) return "mean";
  return fmt::format("mom:{}", batches);
}

EstimatorMethod EstimatorMethod::parse(std::string_view text) {
  if (text == "mean") return mean();
  if (text.substr(0, 4) == "mom:") {
    std::size_t b = 0;
    const auto rest = text.substr(4);
    auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), b);
    if (ec == std::errc() && ptr == rest.data() + rest.size()) return median_of_means(b);
  }
  throw std::invalid_argument(fmt::format("unknown estimator method '{}' (mean | mom:<B>)", text));
}

void RunningMoments::add(double x) {
  ++count_;
  const double d = x - mean_;
  mean_ += d / static_cast<double>(count_);
  m2_ += d * (x - mean_);
}

void RunningMoments::merge(const RunningMoments& other) {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count_), nb = static_cast<double>(other.count_);
  const double d = other.mean_ - mean_;
  const double n = na + nb;
  mean_ += d * nb / n;
  m2_ += other.m2_ + d * d * na * nb / n;
  count_ += other.count_;
}

double RunningMoments::variance() const {
  return count_ < 2 ? 0.0 : m2_ / static_cast<double>(count_ - 1);
}

std::vector<double> record_estimates(const ShadowEnsemble& ensemble, const PauliObservable& obs,
                                     const FactorTable& table) {
  if (table.povm_id != ensemble.povm_id() || table.noise_id != ensemble.noise_id()) {
    throw std::invalid_argument(fmt::format(
        "factor table (povm {}, noise {}) does not match ensemble (povm {}, noise {})",
        table.povm_id, table.noise_id, ensemble.povm_id(), ensemble.noise_id()));
  }
  if (table.outcomes != ensemble.num_outcomes()) {
    throw std::invalid_argument("factor table and ensemble differ in outcome count");
  }
  if (obs.max_site() >= ensemble.num_qubits()) {
    throw std::invalid_argument(fmt::format("observable {} acts outside a {}-qubit ensemble",
                                            obs.label(), ensemble.num_qubits()));
  }
  std::vector<double> out(ensemble.size());
  for (std::size_t j = 0; j < ensemble.size(); ++j) {
    double v = obs.coefficient();
    for (const auto& f : obs.support()) v *= table.factor(f.axis, ensemble.outcome(j, f.site));
    out[j] = v;
  }
  return out;
}

Estimate estimate(const ShadowEnsemble& ensemble, const PauliObservable& obs,
                  const FactorTable& table, const EstimatorMethod& method) {
  const std::vector<double> values = record_estimates(ensemble, obs, table);
  const std::size_t n = values.size();
  if (n == 0) throw std::invalid_argument("cannot estimate from an empty ensemble");
  RunningMoments all;
  for (double v : values) all.add(v);
  Estimate est;
  est.samples = n;
  est.std_dev = std::sqrt(all.variance());
  est.std_error = est.std_dev / std::sqrt(static_cast<double>(n));
  if (method.kind == EstimatorMethod::Kind::kMean) {
    est.value = all.mean();
    return est;
  }
  if (method.batches < 1 || method.batches > n) {
    throw std::invalid_argument(
        fmt::format("median of means with {} batches needs 1 <= B <= N = {}", method.batches, n));
  }
  std::vector<double> means;
  for (std::size_t b = 0; b < method.batches; ++b) {
    const std::size_t begin = b * n / method.batches, end = (b + 1) * n / method.batches;
    RunningMoments m;
    for (std::size_t j = begin; j < end; ++j) m.add(values[j]);
    means.push_back(m.mean());
  }
  est.value = median(std::move(means));
  return est;
}

std::vector<Estimate> estimate_all(const ShadowEnsemble& ensemble,
                                   std::span<const PauliObservable> observables,
                                   const FactorTable& table, const EstimatorMethod& method) {
  std::vector<Estimate> out;
  out.reserve(observables.size());
  for (const auto& obs : observables) out.push_back(estimate(ensemble, obs, table, method));
  return out;
}

double bound_constant(const FactorTable& table, std::size_t k) {
  if (k == 0) return 0.0;
  const double width = 2.0 * std::pow(table.max_abs_factor(), static_cast<double>(k));
  return width * width;
}

std::size_t required_samples(double bound, std::size_t observables, double epsilon,
                             double delta) {
  check_accuracy(epsilon, delta);
  if (observables == 0) throw std::invalid_argument("observable count must be >= 1");
  if (!(bound >= 0.0) || !std::isfinite(bound)) {
    throw std::invalid_argument(fmt::format("bound constant {} must be finite and >= 0", bound));
  }
  const double n = bound * std::log(2.0 * static_cast<double>(observables) / delta) /
                   (2.0 * epsilon * epsilon);
  return std::max<std::size_t>(1, tolerant_ceil(n));
}

std::size_t chebyshev_samples(double variance, double epsilon, double delta,
                              std::size_t observables) {
  check_accuracy(epsilon, delta);
  if (observables == 0) throw std::invalid_argument("observable count must be >= 1");
  if (!(variance >= 0.0) || !std::isfinite(variance)) {
    throw std::invalid_argument(fmt::format("variance {} must be finite and >= 0", variance));
  }
  const double n = static_cast<double>(observables) * variance / (epsilon * epsilon * delta);
  return std::max<std::size_t>(1, tolerant_ceil(n));
}

SampleBudget plan_samples(const FactorTable& table, std::size_t k, std::size_t observables,
                          double epsilon, double delta) {
  if (k == 0) throw std::invalid_argument("locality k must be >= 1");
  SampleBudget b;
  b.bound = bound_constant(table, k);
  b.observables = observables;
  b.epsilon = epsilon;
  b.delta = delta;
  b.samples = required_samples(b.bound, observables, epsilon, delta);
  return b;
}

double variance_bound(const FactorTable& table, const PauliObservable& obs,
                      const QuantumState* state) {
  const double c2 = obs.coefficient() * obs.coefficient();
  bool state_free = true;
  double product = 1.0;
  std::vector<SiteOperator> ops;
  for (const auto& f : obs.support()) {
    const Mat2& q = table.second_moments[bloch_index(f.axis) - 1];
    ops.push_back({f.site, q});
    if (proportional_to_identity(q)) {
      product *= q(0, 0).real();
    } else {
      state_free = false;
    }
  }
  if (state_free) return c2 * product;
  if (state == nullptr) {
    throw std::invalid_argument(fmt::format(
        "variance bound for {} under POVM {} depends on the state; provide one",
        obs.label(), table.povm_id));
  }
  return c2 * product_operator_expectation(*state, ops);
}

double max_error(std::span<const double> estimates, std::span<const double> truths) {
  if (estimates.size() != truths.size()) {
    throw std::invalid_argument("max_error: estimate and truth lists differ in length");
  }
  if (estimates.empty()) throw std::invalid_argument("max_error: empty lists");
  double m = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    m = std::max(m, std::abs(estimates[i] - truths[i]));
  }
  return m;
}

EstimateRow make_row(const PauliObservable& obs, const EstimatorMethod& method,
                     const Estimate& est, std::optional<double> truth) {
  EstimateRow row;
  row.observable = obs.coefficient() == 1.0
                       ? obs.label()
                       : fmt::format("{}*{}", obs.coefficient(), obs.label());
  row.support = support_text(obs);
  row.method = method.describe();
  row.samples = est.samples;
  row.estimate = est.value;
  row.std_error = est.std_error;
  row.truth = truth;
  return row;
}

void write_estimates_csv(std::span<const EstimateRow> rows, std::ostream& out) {
  out << "# schema: estimates/1\n";
  out << "observable,support,method,N,estimate,std_error,truth,abs_error\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{:.17g},{:.17g}", r.observable, r.support, r.method,
                       r.samples, r.estimate, r.std_error);
    if (r.truth) {
      out << fmt::format(",{:.17g},{:.17g}\n", *r.truth, std::abs(r.estimate - *r.truth));
    } else {
      out << ",,\n";
    }
  }
}

std::string estimates_json(std::span<const EstimateRow> rows,
                           const std::optional<SampleBudget>& budget) {
  nlohmann::json doc;
  doc["schema"] = "estimates/1";
  if (budget) {
    doc["budget"] = {{"B", budget->bound},
                     {"L", budget->observables},
                     {"epsilon", budget->epsilon},
                     {"delta", budget->delta},
                     {"N", budget->samples}};
  } else {
    doc["budget"] = nullptr;
  }
  auto results = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j = {{"observable", r.observable}, {"support", r.support},
                        {"method", r.method},         {"N", r.samples},
                        {"estimate", r.estimate},     {"std_error", r.std_error}};
    if (r.truth) {
      j["truth"] = *r.truth;
      j["abs_error"] = std::abs(r.estimate - *r.truth);
    } else {
      j["truth"] = nullptr;
      j["abs_error"] = nullptr;
    }
    results.push_back(std::move(j));
  }
  doc["results"] = std::move(results);
  return doc.dump(2);
}

}  // namespace povmshadow
