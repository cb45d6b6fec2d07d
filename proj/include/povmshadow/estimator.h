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

#ifndef POVMSHADOW_ESTIMATOR_H_
#define POVMSHADOW_ESTIMATOR_H_

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "povmshadow/channel.h"
#include "povmshadow/observable.h"
#include "povmshadow/sampler.h"
#include "povmshadow/states.h"

namespace povmshadow {

struct EstimatorMethod {
  enum class Kind { kMean, kMedianOfMeans };

  Kind kind = Kind::kMean;
  std::size_t batches = 1;

  static EstimatorMethod mean() { return {}; }
  /// Median over `batches` contiguous batches of the record sequence.
  static EstimatorMethod median_of_means(std::size_t batches);
  /// ceil(2 ln(2L/delta)) batches.
  static EstimatorMethod default_median_of_means(std::size_t observables, double delta);

  /// "mean" or "mom:<batches>"; parse() accepts the same forms.
  std::string describe() const;
  static EstimatorMethod parse(std::string_view text);
};

/// Single-pass mean and variance (Welford); merge() combines accumulators
/// of disjoint record ranges.
class RunningMoments {
 public:
  void add(double x);
  void merge(const RunningMoments& other);

  std::size_t count() const { return count_; }
  double mean() const { return mean_; }
  /// Unbiased (N - 1) variance; 0 for fewer than two values.
  double variance() const;

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct Estimate {
  double value = 0.0;
  double std_dev = 0.0;    // per-record standard deviation
  double std_error = 0.0;  // std_dev / sqrt(N)
  std::size_t samples = 0;
};

/// Per-record estimates coefficient * prod_{(i, axis)} factor(axis, a_i).
/// Throws std::invalid_argument when the table's POVM or noise descriptor
/// differs from the ensemble's, or the support leaves [0, n).
std::vector<double> record_estimates(const ShadowEnsemble& ensemble, const PauliObservable& obs,
                                     const FactorTable& table);

Estimate estimate(const ShadowEnsemble& ensemble, const PauliObservable& obs,
                  const FactorTable& table, const EstimatorMethod& method = {});

std::vector<Estimate> estimate_all(const ShadowEnsemble& ensemble,
                                   std::span<const PauliObservable> observables,
                                   const FactorTable& table, const EstimatorMethod& method = {});

/// Hoeffding range constant (b - a)^2 with b - a = 2 m^k, m the largest
/// |factor| in the table. Zero for k = 0.
double bound_constant(const FactorTable& table, std::size_t k);

/// Smallest N >= 1 with N >= B ln(2L/delta) / (2 eps^2). Values within a
/// relative 1e-9 of an integer are treated as that integer.
std::size_t required_samples(double bound, std::size_t observables, double epsilon, double delta);

/// Smallest N >= 1 with N >= L Var / (eps^2 delta) (Chebyshev with a union
/// bound over L observables).
std::size_t chebyshev_samples(double variance, double epsilon, double delta,
                              std::size_t observables = 1);

struct SampleBudget {
  double bound = 0.0;
  std::size_t observables = 1;
  double epsilon = 0.0;
  double delta = 0.0;
  std::size_t samples = 0;
};

SampleBudget plan_samples(const FactorTable& table, std::size_t k, std::size_t observables,
                          double epsilon, double delta);

/// Second moment E[o^2] of the per-record estimate, an upper bound on its
/// variance: coefficient^2 tr(rho (x)_i Q_i) with Q_i the table's second
/// moment operators. When every Q_i is proportional to the identity (as for
/// Pauli-6) the bound is state independent and `state` may be null;
/// otherwise a state is required.
double variance_bound(const FactorTable& table, const PauliObservable& obs,
                      const QuantumState* state = nullptr);

/// max_i |estimates_i - truths_i|.
double max_error(std::span<const double> estimates, std::span<const double> truths);

struct EstimateRow {
  std::string observable;  // e.g. "0.5*Z0Z1"
  std::string support;     // e.g. "0:z;1:z"
  std::string method;
  std::size_t samples = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  std::optional<double> truth;
};

EstimateRow make_row(const PauliObservable& obs, const EstimatorMethod& method,
                     const Estimate& est, std::optional<double> truth = std::nullopt);

/// "# schema: estimates/1" then
/// observable,support,method,N,estimate,std_error,truth,abs_error.
void write_estimates_csv(std::span<const EstimateRow> rows, std::ostream& out);
/// {"schema": "estimates/1", "budget": {...} or null, "results": [...]}.
std::string estimates_json(std::span<const EstimateRow> rows,
                           const std::optional<SampleBudget>& budget);

}  // namespace povmshadow

#endif  // POVMSHADOW_ESTIMATOR_H_
