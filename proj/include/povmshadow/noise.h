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

#ifndef POVMSHADOW_NOISE_H_
#define POVMSHADOW_NOISE_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "povmshadow/linalg.h"

namespace povmshadow {

/// A previously characterized single-qubit noise channel, applied
/// independently to every qubit before measurement.
///
/// Descriptors are the canonical text form used in ensemble headers and
/// configuration files: "depolarizing:<q>", "amplitude_damping:<gamma>" or
/// "kraus:<label>" for user-supplied channels.
class NoiseModel {
 public:
  enum class Kind { kDepolarizing, kAmplitudeDamping, kCustom };

  /// E(rho) = (1 - q) rho + q tr(rho) I / 2, for q in [0, 4/3].
  static NoiseModel depolarizing(double q);
  /// Local depolarizing noise parameterised so that every traceless Pauli
  /// factor shrinks by (1 - 4p/3); p in [0, 3/4]. Equivalent to
  /// depolarizing(4p/3).
  static NoiseModel depolarizing_from_error_rate(double p);
  /// K0 = diag(1, sqrt(1 - gamma)), K1 = sqrt(gamma) |0><1|.
  static NoiseModel amplitude_damping(double gamma);
  /// Rejects Kraus sets that are not trace preserving within 1e-12.
  static NoiseModel from_kraus(std::string label, std::vector<Mat2> kraus);

  /// Inverse of descriptor(); "none" and "" yield std::nullopt.
  static std::optional<NoiseModel> parse(std::string_view descriptor);

  Kind kind() const { return kind_; }
  double strength() const { return strength_; }
  const std::vector<Mat2>& kraus() const { return kraus_; }
  const std::string& descriptor() const { return descriptor_; }

  Mat2 apply(const Mat2& rho) const;
  /// Heisenberg-picture action sum_j K_j^dagger m K_j.
  Mat2 adjoint_apply(const Mat2& m) const;

 private:
  NoiseModel(Kind kind, double strength, std::vector<Mat2> kraus,
             std::string descriptor);

  Kind kind_;
  double strength_;
  std::vector<Mat2> kraus_;
  std::string descriptor_;
};

/// Largest entry of |sum_j K_j^dagger K_j - I|.
double trace_preservation_defect(const std::vector<Mat2>& kraus);

/// Descriptor of an optional noise model ("none" when absent).
std::string noise_descriptor(const std::optional<NoiseModel>& noise);

}  // namespace povmshadow

#endif  // POVMSHADOW_NOISE_H_
