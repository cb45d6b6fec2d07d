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

#include "povmshadow/noise.h"

#include <charconv>
#include <cmath>
#include <utility>

#include <fmt/format.h>

namespace povmshadow {

namespace {

constexpr double kTraceTolerance = 1e-12;

double parse_double(std::string_view text) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument(fmt::format("not a number: '{}'", text));
  }
  return value;
}

}  // namespace

NoiseModel::NoiseModel(Kind kind, double strength, std::vector<Mat2> kraus,
                       std::string descriptor)
    : kind_(kind),
      strength_(strength),
      kraus_(std::move(kraus)),
      descriptor_(std::move(descriptor)) {}

NoiseModel NoiseModel::depolarizing(double q) {
  if (!(q >= 0.0 && q <= 4.0 / 3.0)) {
    throw std::invalid_argument(
        fmt::format("depolarizing strength {} outside [0, 4/3]", q));
  }
  std::vector<Mat2> kraus;
  kraus.push_back(std::sqrt(std::max(0.0, 1.0 - 0.75 * q)) * sigma(0));
  for (int mu = 1; mu < 4; ++mu) {
    kraus.push_back(std::sqrt(q / 4.0) * sigma(mu));
  }
  return NoiseModel(Kind::kDepolarizing, q, std::move(kraus),
                    fmt::format("depolarizing:{}", q));
}

NoiseModel NoiseModel::depolarizing_from_error_rate(double p) {
  if (!(p >= 0.0 && p <= 0.75)) {
    throw std::invalid_argument(
        fmt::format("depolarizing error rate {} outside [0, 3/4]", p));
  }
  return depolarizing(4.0 * p / 3.0);
}

NoiseModel NoiseModel::amplitude_damping(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument(
        fmt::format("damping parameter {} outside [0, 1]", gamma));
  }
  Mat2 k0;
  k0 << 1, 0, 0, std::sqrt(1.0 - gamma);
  Mat2 k1;
  k1 << 0, std::sqrt(gamma), 0, 0;
  return NoiseModel(Kind::kAmplitudeDamping, gamma, {k0, k1},
                    fmt::format("amplitude_damping:{}", gamma));
}

NoiseModel NoiseModel::from_kraus(std::string label, std::vector<Mat2> kraus) {
  if (kraus.empty()) {
    throw std::invalid_argument("noise channel needs at least one Kraus operator");
  }
  const double defect = trace_preservation_defect(kraus);
  if (defect > kTraceTolerance) {
    throw std::invalid_argument(fmt::format(
        "noise channel '{}' is not trace preserving (defect {:.3e})", label,
        defect));
  }
  return NoiseModel(Kind::kCustom, 0.0, std::move(kraus),
                    fmt::format("kraus:{}", label));
}

std::optional<NoiseModel> NoiseModel::parse(std::string_view descriptor) {
  if (descriptor.empty() || descriptor == "none") return std::nullopt;
  const auto colon = descriptor.find(':');
  if (colon == std::string_view::npos) {
    throw std::invalid_argument(
        fmt::format("noise descriptor '{}' lacks a parameter", descriptor));
  }
  const std::string_view kind = descriptor.substr(0, colon);
  const double value = parse_double(descriptor.substr(colon + 1));
  if (kind == "depolarizing") return depolarizing(value);
  if (kind == "amplitude_damping" || kind == "amplitude-damping") {
    return amplitude_damping(value);
  }
  if (kind == "depolarizing_rate" || kind == "depolarizing-rate") {
    return depolarizing_from_error_rate(value);
  }
  throw std::invalid_argument(fmt::format("unknown noise kind '{}'", kind));
}

Mat2 NoiseModel::apply(const Mat2& rho) const {
  Mat2 out = Mat2::Zero();
  for (const Mat2& k : kraus_) out += k * rho * k.adjoint();
  return out;
}

Mat2 NoiseModel::adjoint_apply(const Mat2& m) const {
  Mat2 out = Mat2::Zero();
  for (const Mat2& k : kraus_) out += k.adjoint() * m * k;
  return out;
}

double trace_preservation_defect(const std::vector<Mat2>& kraus) {
  Mat2 sum = Mat2::Zero();
  for (const Mat2& k : kraus) sum += k.adjoint() * k;
  return max_abs_entry(sum - Mat2::Identity());
}

std::string noise_descriptor(const std::optional<NoiseModel>& noise) {
  return noise ? noise->descriptor() : std::string("none");
}

}  // namespace povmshadow
