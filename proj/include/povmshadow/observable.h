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

#ifndef POVMSHADOW_OBSERVABLE_H_
#define POVMSHADOW_OBSERVABLE_H_

#include <string>
#include <string_view>
#include <vector>

#include "povmshadow/linalg.h"

namespace povmshadow {

struct PauliFactor {
  std::size_t site = 0;
  Axis axis = Axis::kZ;

  friend bool operator==(const PauliFactor&, const PauliFactor&) = default;
};

/// coefficient * prod_{(site, axis) in support} sigma_axis^site.
/// Sites are distinct and kept sorted; the locality is support().size() >= 1.
class PauliObservable {
 public:
  PauliObservable(std::vector<PauliFactor> support, double coefficient = 1.0);

  /// Parses "Z0 Z3", "X1,Y2" or "0.5*Z0Z1".
  static PauliObservable parse(std::string_view text);
  static PauliObservable zz(std::size_t i, std::size_t j);

  double coefficient() const { return coefficient_; }
  const std::vector<PauliFactor>& support() const { return support_; }
  std::size_t locality() const { return support_.size(); }
  std::size_t max_site() const { return support_.back().site; }

  /// Compact label without coefficient, e.g. "Z0Z3".
  std::string label() const;

 private:
  std::vector<PauliFactor> support_;
  double coefficient_;
};

/// All sigma_z^i sigma_z^j with i < j < n.
std::vector<PauliObservable> all_zz_pairs(std::size_t n);
/// sigma_z^0 sigma_z^j for 0 < j < n.
std::vector<PauliObservable> zz_pairs_from_zero(std::size_t n);

}  // namespace povmshadow

#endif  // POVMSHADOW_OBSERVABLE_H_
