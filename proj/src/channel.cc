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

#include "povmshadow/channel.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "json.hpp"

namespace povmshadow {

namespace {

constexpr double kSingularThreshold = 1e-8;
constexpr std::array<const char*, 4> kComponentNames = {"I", "X", "Y", "Z"};

nlohmann::json matrix_json(const Eigen::Matrix4d& m) {
  auto rows = nlohmann::json::array();
  for (int i = 0; i < 4; ++i) {
    rows.push_back({m(i, 0), m(i, 1), m(i, 2), m(i, 3)});
  }
  return rows;
}

}  // namespace

bool BlochSuperoperator::is_trace_preserving(double tol) const {
  return std::abs(matrix_(0, 0) - 1.0) <= tol && std::abs(matrix_(0, 1)) <= tol &&
         std::abs(matrix_(0, 2)) <= tol && std::abs(matrix_(0, 3)) <= tol;
}

Mat2 BlochSuperoperator::apply(const Mat2& x) const {
  return from_bloch_coefficients(matrix_ * bloch_coefficients(x));
}

BlochSuperoperator bloch_of_map(const std::function<Mat2(const Mat2&)>& action) {
  Eigen::Matrix4d m;
  for (int nu = 0; nu < 4; ++nu) {
    const Mat2 out = action(sigma(nu));
    for (int mu = 0; mu < 4; ++mu) {
      m(mu, nu) = 0.5 * (sigma(mu) * out).trace().real();
    }
  }
  return BlochSuperoperator(m);
}

BlochSuperoperator invert(const BlochSuperoperator& superop) {
  Eigen::JacobiSVD<Eigen::Matrix4d> svd(superop.matrix(),
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv[3] < kSingularThreshold) {
    const Eigen::Vector4d null_direction = svd.matrixV().col(3);
    std::string components;
    for (int mu = 0; mu < 4; ++mu) {
      if (std::abs(null_direction[mu]) > 0.3) {
        if (!components.empty()) components += ",";
        components += kComponentNames[mu];
      }
    }
    throw NumericalError(fmt::format(
        "singular Bloch superoperator (smallest singular value {:.3e}); "
        "unobserved Bloch component(s): {}",
        sv[3], components));
  }
  return BlochSuperoperator(superop.matrix().inverse());
}

BlochSuperoperator noise_superoperator(const NoiseModel& noise) {
  return bloch_of_map([&](const Mat2& x) { return noise.apply(x); });
}

MeasurementChannel measurement_channel(const Povm& povm, const SnapshotRule& rule,
                                       const std::optional<NoiseModel>& noise) {
  const ValidationReport report = validate_povm(povm);
  if (!report.empty()) {
    throw std::invalid_argument(fmt::format(
        "POVM '{}' failed validation: {}", povm.name(), format_report(report)));
  }
  MeasurementChannel ch{povm, rule, noise, {}, {}, {}, {}};
  for (std::size_t a = 0; a < povm.size(); ++a) {
    ch.snapshots.push_back(snapshot_operator(povm, a, rule));
  }
  ch.forward = bloch_of_map([&](const Mat2& x) {
    const Mat2 measured = noise ? noise->apply(x) : x;
    Mat2 out = Mat2::Zero();
    for (std::size_t a = 0; a < povm.size(); ++a) {
      out += (measured * povm.element(a).matrix).trace() * ch.snapshots[a];
    }
    return out;
  });
  try {
    ch.inverse = invert(ch.forward);
  } catch (const NumericalError& e) {
    throw NumericalError(fmt::format(
        "informationally incomplete POVM '{}' (noise {}): {}", povm.name(),
        noise_descriptor(noise), e.what()));
  }
  for (const Mat2& s : ch.snapshots) {
    ch.inverted_snapshots.push_back(ch.inverse.apply(s));
  }
  return ch;
}

double FactorTable::max_abs_factor() const {
  double m = 0.0;
  for (const auto& column : axis_factors) {
    for (double f : column) m = std::max(m, std::abs(f));
  }
  return m;
}

FactorTable factor_table(const MeasurementChannel& channel) {
  FactorTable table;
  table.povm_id = channel.povm_id();
  table.noise_id = channel.noise_id();
  table.outcomes = channel.povm.size();
  for (const Mat2& shadow : channel.inverted_snapshots) {
    const Bloch4 c = bloch_coefficients(shadow);
    table.identity_factors.push_back(2.0 * c[0]);
    for (int alpha = 1; alpha < 4; ++alpha) {
      table.axis_factors[alpha - 1].push_back(2.0 * c[alpha]);
    }
  }
  for (int alpha = 0; alpha < 3; ++alpha) {
    Mat2 q = Mat2::Zero();
    for (std::size_t a = 0; a < table.outcomes; ++a) {
      const Mat2& m = channel.povm.element(a).matrix;
      const Mat2 law = channel.noise ? channel.noise->adjoint_apply(m) : m;
      const double f = table.axis_factors[alpha][a];
      q += f * f * law;
    }
    table.second_moments[alpha] = 0.5 * (q + q.adjoint());
  }
  return table;
}

SingleQubitOperator adjoint_on_pauli(const BlochSuperoperator& inverse, Axis axis) {
  const Eigen::Matrix4d adj = inverse.adjoint().matrix();
  const Bloch4 c = adj.col(bloch_index(axis));
  return SingleQubitOperator::from_bloch(c[0], c.tail<3>());
}

SingleQubitOperator adjoint_on_pauli(const MeasurementChannel& channel, Axis axis) {
  return adjoint_on_pauli(channel.inverse, axis);
}

std::string channel_to_json(const MeasurementChannel& channel,
                            const FactorTable& table) {
  nlohmann::json doc;
  doc["povm"] = nlohmann::json::parse(povm_to_json(channel.povm));
  doc["snapshot_rule"] = channel.rule.describe();
  doc["noise"] = channel.noise_id();
  doc["basis_order"] = "I,X,Y,Z";
  doc["forward"] = matrix_json(channel.forward.matrix());
  doc["inverse"] = matrix_json(channel.inverse.matrix());
  nlohmann::json factors;
  factors["identity"] = table.identity_factors;
  factors["x"] = table.axis_factors[0];
  factors["y"] = table.axis_factors[1];
  factors["z"] = table.axis_factors[2];
  doc["factor_table"] = std::move(factors);
  return doc.dump(2);
}

}  // namespace povmshadow
