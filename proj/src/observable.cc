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

#include "povmshadow/observable.h"

#include <algorithm>
#include <cctype>
#include <charconv>

#include <fmt/format.h>

namespace povmshadow {

PauliObservable::PauliObservable(std::vector<PauliFactor> support,
                                 double coefficient)
    : support_(std::move(support)), coefficient_(coefficient) {
  if (support_.empty()) {
    throw std::invalid_argument("Pauli observable needs at least one factor");
  }
  std::sort(support_.begin(), support_.end(),
            [](const PauliFactor& a, const PauliFactor& b) { return a.site < b.site; });
  for (std::size_t i = 1; i < support_.size(); ++i) {
    if (support_[i].site == support_[i - 1].site) {
      throw std::invalid_argument(
          fmt::format("site {} appears twice in Pauli observable", support_[i].site));
    }
  }
}

PauliObservable PauliObservable::parse(std::string_view text) {
  double coefficient = 1.0;
  if (const auto star = text.find('*'); star != std::string_view::npos) {
    const std::string_view head = text.substr(0, star);
    auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), coefficient);
    if (ec != std::errc() || ptr != head.data() + head.size()) {
      throw std::invalid_argument(fmt::format("bad coefficient in '{}'", text));
    }
    text.remove_prefix(star + 1);
  }
  std::vector<PauliFactor> support;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char c = text[pos];
    if (c == ' ' || c == ',' || c == '\t') {
      ++pos;
      continue;
    }
    const Axis axis = axis_from_letter(c);
    ++pos;
    std::size_t site = 0;
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), site);
    if (ec != std::errc()) {
      throw std::invalid_argument(fmt::format("missing site index in '{}'", text));
    }
    pos = static_cast<std::size_t>(ptr - text.data());
    support.push_back({site, axis});
  }
  return PauliObservable(std::move(support), coefficient);
}

PauliObservable PauliObservable::zz(std::size_t i, std::size_t j) {
  return PauliObservable({{i, Axis::kZ}, {j, Axis::kZ}});
}

std::string PauliObservable::label() const {
  std::string out;
  for (const auto& f : support_) {
    out += axis_letter(f.axis);
    out += std::to_string(f.site);
  }
  return out;
}

std::vector<PauliObservable> all_zz_pairs(std::size_t n) {
  std::vector<PauliObservable> out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) out.push_back(PauliObservable::zz(i, j));
  }
  return out;
}

std::vector<PauliObservable> zz_pairs_from_zero(std::size_t n) {
  std::vector<PauliObservable> out;
  for (std::size_t j = 1; j < n; ++j) out.push_back(PauliObservable::zz(0, j));
  return out;
}

}  // namespace povmshadow
