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

#include "povmshadow/povm.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "json.hpp"

namespace povmshadow {

namespace {

constexpr double kHermitianTolerance = 1e-12;
constexpr double kCompletenessTolerance = 1e-12;
constexpr double kPositivityTolerance = 1e-12;
constexpr double kZeroTolerance = 1e-12;
constexpr double kDegeneracyTolerance = 1e-10;

ElementSpectrum compute_spectrum(const SingleQubitOperator& op) {
  ElementSpectrum s;
  const double radius = op.r.norm();
  s.values = {op.x0 + radius, op.x0 - radius};
  if (2.0 * radius <= kDegeneracyTolerance) {
    s.vectors = {Vec2(1, 0), Vec2(0, 1)};
    s.top_multiplicity = 2;
  } else {
    const Eigen::Vector3d n = op.r / radius;
    s.vectors = {state_from_bloch(n), state_from_bloch(-n)};
    s.top_multiplicity = 1;
  }
  return s;
}

Mat2 projector(const Vec2& v) { return v * v.adjoint(); }

nlohmann::json complex_pair(Complex z) {
  return nlohmann::json::array({z.real(), z.imag()});
}

Complex complex_from(const nlohmann::json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

}  // namespace

SingleQubitOperator SingleQubitOperator::from_matrix(const Mat2& m) {
  SingleQubitOperator op;
  op.matrix = m;
  const Bloch4 c = bloch_coefficients(m);
  op.x0 = c[0];
  op.r = c.tail<3>();
  return op;
}

SingleQubitOperator SingleQubitOperator::from_bloch(double x0,
                                                    const Eigen::Vector3d& r) {
  SingleQubitOperator op;
  op.x0 = x0;
  op.r = r;
  op.matrix = from_bloch_coefficients(Bloch4(x0, r.x(), r.y(), r.z()));
  return op;
}

SnapshotRule SnapshotRule::power(double m) {
  if (!(m > 0.0) || !std::isfinite(m)) {
    throw std::invalid_argument(
        fmt::format("snapshot exponent must be positive and finite, got {}", m));
  }
  return SnapshotRule{m};
}

std::string SnapshotRule::describe() const {
  return exponent ? fmt::format("power:{}", *exponent) : std::string("limit");
}

Povm Povm::create(std::string name, std::vector<Mat2> elements) {
  ValidationReport report = validate_povm(elements);
  std::erase_if(report, [](const PovmViolation& v) {
    return v.invariant == "zero_element";
  });
  if (!report.empty()) {
    throw std::invalid_argument(
        fmt::format("invalid POVM '{}': {}", name, format_report(report)));
  }
  Povm povm;
  povm.name_ = std::move(name);
  for (const Mat2& m : elements) {
    povm.elements_.push_back(SingleQubitOperator::from_matrix(m));
    povm.spectra_.push_back(compute_spectrum(povm.elements_.back()));
  }
  return povm;
}

bool Povm::is_zero_element(std::size_t a) const {
  return max_abs_entry(element(a).matrix) <= kZeroTolerance;
}

std::vector<double> Povm::probabilities(const Mat2& rho) const {
  std::vector<double> p;
  p.reserve(size());
  for (const auto& e : elements_) p.push_back((rho * e.matrix).trace().real());
  return p;
}

ValidationReport validate_povm(std::span<const Mat2> elements) {
  ValidationReport report;
  if (elements.size() < 2) {
    report.push_back({"element_count", static_cast<double>(elements.size()), {}});
  }
  Mat2 sum = Mat2::Zero();
  for (std::size_t a = 0; a < elements.size(); ++a) {
    const Mat2& m = elements[a];
    sum += m;
    const double herm = hermiticity_defect(m);
    if (herm > kHermitianTolerance) {
      report.push_back({"hermiticity", herm, a});
    }
    const Mat2 hermitian_part = 0.5 * (m + m.adjoint());
    const double lowest = hermitian_eigenvalues(hermitian_part)[0];
    if (lowest < -kPositivityTolerance) {
      report.push_back({"positivity", -lowest, a});
    }
    const double size = max_abs_entry(m);
    if (size <= kZeroTolerance) {
      report.push_back({"zero_element", size, a});
    }
  }
  const double completeness = max_abs_entry(sum - Mat2::Identity());
  if (completeness > kCompletenessTolerance) {
    report.push_back({"completeness", completeness, {}});
  }
  return report;
}

ValidationReport validate_povm(const Povm& povm) {
  std::vector<Mat2> elements;
  for (const auto& e : povm.elements()) elements.push_back(e.matrix);
  return validate_povm(elements);
}

std::string format_report(const ValidationReport& report) {
  if (report.empty()) return "ok";
  std::string out;
  for (const auto& v : report) {
    if (!out.empty()) out += "; ";
    out += v.element ? fmt::format("{}[{}]={:.3e}", v.invariant, *v.element, v.magnitude)
                     : fmt::format("{}={:.3e}", v.invariant, v.magnitude);
  }
  return out;
}

Povm builtin_povm(std::string_view name) {
  const double s = 1.0 / std::sqrt(2.0);
  const Complex i(0.0, 1.0);
  const Vec2 zero(1, 0), one(0, 1);
  const Vec2 plus(s, s), minus(s, -s);
  const Vec2 left(s, i * s), right(s, -i * s);
  if (name == "pauli6") {
    std::vector<Mat2> e;
    for (const Vec2& v : {zero, one, plus, minus, left, right}) {
      e.push_back(projector(v) / 3.0);
    }
    return Povm::create("pauli6", std::move(e));
  }
  if (name == "pauli4") {
    std::vector<Mat2> e = {projector(zero) / 3.0, projector(plus) / 3.0,
                           projector(left) / 3.0,
                           (projector(one) + projector(minus) + projector(right)) / 3.0};
    return Povm::create("pauli4", std::move(e));
  }
  if (name == "tetra") {
    const double r2 = std::sqrt(2.0);
    const std::array<Eigen::Vector3d, 4> dirs = {
        Eigen::Vector3d(0, 0, 1), Eigen::Vector3d(2 * r2 / 3, 0, -1.0 / 3),
        Eigen::Vector3d(-r2 / 3, std::sqrt(2.0 / 3), -1.0 / 3),
        Eigen::Vector3d(-r2 / 3, -std::sqrt(2.0 / 3), -1.0 / 3)};
    std::vector<Mat2> e;
    for (const auto& d : dirs) {
      e.push_back(SingleQubitOperator::from_bloch(0.25, 0.25 * d).matrix);
    }
    return Povm::create("tetra", std::move(e));
  }
  throw std::invalid_argument(fmt::format(
      "unknown POVM '{}' (expected pauli6, pauli4 or tetra)", name));
}

std::vector<std::string> builtin_povm_names() { return {"pauli6", "pauli4", "tetra"}; }

std::vector<std::pair<Vec2, double>> snapshot_distribution(
    const Povm& povm, std::size_t outcome, const SnapshotRule& rule) {
  if (outcome >= povm.size()) {
    throw std::invalid_argument(fmt::format(
        "outcome {} out of range for {}-outcome POVM", outcome, povm.size()));
  }
  if (povm.is_zero_element(outcome)) {
    throw std::invalid_argument(fmt::format(
        "element {} of POVM '{}' is zero; snapshot distribution undefined",
        outcome, povm.name()));
  }
  const ElementSpectrum& spec = povm.spectrum(outcome);
  std::vector<std::pair<Vec2, double>> out;
  if (rule.is_limit()) {
    const double share = 1.0 / spec.top_multiplicity;
    for (int i = 0; i < spec.top_multiplicity; ++i) {
      out.emplace_back(spec.vectors[i], share);
    }
    return out;
  }
  std::array<double, 2> weight{};
  for (int i = 0; i < 2; ++i) {
    weight[i] = std::pow(std::max(0.0, spec.values[i]), *rule.exponent);
  }
  const double total = weight[0] + weight[1];
  for (int i = 0; i < 2; ++i) out.emplace_back(spec.vectors[i], weight[i] / total);
  return out;
}

Mat2 snapshot_operator(const Povm& povm, std::size_t outcome,
                       const SnapshotRule& rule) {
  Mat2 s = Mat2::Zero();
  for (const auto& [v, p] : snapshot_distribution(povm, outcome, rule)) {
    s += p * projector(v);
  }
  return s;
}

Povm noise_adjoint_povm(const Povm& povm, const NoiseModel& noise) {
  const double defect = trace_preservation_defect(noise.kraus());
  if (defect > 1e-12) {
    throw std::invalid_argument(fmt::format(
        "noise '{}' is not trace preserving (defect {:.3e})", noise.descriptor(),
        defect));
  }
  std::vector<Mat2> elements;
  for (const auto& e : povm.elements()) {
    const Mat2 m = noise.adjoint_apply(e.matrix);
    elements.push_back(0.5 * (m + m.adjoint()));
  }
  return Povm::create(povm.name() + "|" + noise.descriptor(), std::move(elements));
}

std::string povm_to_json(const Povm& povm) {
  nlohmann::json doc;
  doc["name"] = povm.name();
  doc["k"] = povm.size();
  doc["basis_order"] = "I,X,Y,Z";
  auto elements = nlohmann::json::array();
  auto snapshots = nlohmann::json::array();
  for (std::size_t a = 0; a < povm.size(); ++a) {
    const Mat2& m = povm.element(a).matrix;
    elements.push_back({complex_pair(m(0, 0)), complex_pair(m(0, 1)),
                        complex_pair(m(1, 0)), complex_pair(m(1, 1))});
    const Vec2& v = povm.snapshot_state(a);
    snapshots.push_back({complex_pair(v[0]), complex_pair(v[1])});
  }
  doc["elements"] = std::move(elements);
  doc["snapshots"] = std::move(snapshots);
  return doc.dump(2);
}

Povm povm_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(fmt::format("POVM JSON: {}", e.what()));
  }
  try {
    std::vector<Mat2> elements;
    for (const auto& e : doc.at("elements")) {
      Mat2 m;
      m << complex_from(e.at(0)), complex_from(e.at(1)), complex_from(e.at(2)),
          complex_from(e.at(3));
      elements.push_back(m);
    }
    if (doc.contains("k") && doc["k"].get<std::size_t>() != elements.size()) {
      throw std::invalid_argument("POVM JSON: k does not match element count");
    }
    Povm povm = Povm::create(doc.at("name").get<std::string>(), std::move(elements));
    if (doc.contains("snapshots")) {
      const auto& snaps = doc["snapshots"];
      if (snaps.size() != povm.size()) {
        throw std::invalid_argument("POVM JSON: snapshot count mismatch");
      }
      for (std::size_t a = 0; a < povm.size(); ++a) {
        const Vec2 v(complex_from(snaps[a].at(0)), complex_from(snaps[a].at(1)));
        const double overlap = std::abs(v.dot(povm.snapshot_state(a)));
        if (std::abs(overlap - 1.0) > 1e-10) {
          throw std::invalid_argument(fmt::format(
              "POVM JSON: snapshot {} is not the top eigenvector of its element", a));
        }
      }
    }
    return povm;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(fmt::format("POVM JSON: {}", e.what()));
  }
}

}  // namespace povmshadow
