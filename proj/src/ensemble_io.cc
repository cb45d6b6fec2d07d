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

#include <array>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "json.hpp"
#include "povmshadow/sampler.h"

namespace povmshadow {

namespace {

constexpr std::array<char, 8> kMagic = {'P', 'O', 'V', 'M', 'S', 'H', 'D', '1'};
constexpr std::uint32_t kMaxHeader = 1u << 20;

}  // namespace

void write_ensemble(const ShadowEnsemble& ensemble, std::ostream& out) {
  nlohmann::json header;
  header["version"] = 1;
  header["n"] = ensemble.num_qubits();
  header["k"] = ensemble.num_outcomes();
  header["povm"] = ensemble.povm_id();
  header["noise"] = ensemble.noise_id();
  header["seed"] = ensemble.seed();
  header["N"] = ensemble.size();
  const std::string text = header.dump();
  const auto len = static_cast<std::uint32_t>(text.size());
  const std::array<char, 4> len_bytes = {
      static_cast<char>(len & 0xff), static_cast<char>((len >> 8) & 0xff),
      static_cast<char>((len >> 16) & 0xff), static_cast<char>((len >> 24) & 0xff)};
  out.write(kMagic.data(), kMagic.size());
  out.write(len_bytes.data(), len_bytes.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.write(reinterpret_cast<const char*>(ensemble.raw().data()),
            static_cast<std::streamsize>(ensemble.raw().size()));
  if (!out) throw std::runtime_error("failed to write ensemble");
}

ShadowEnsemble read_ensemble(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw std::invalid_argument("not an ensemble file (bad magic)");
  std::array<unsigned char, 4> len_bytes{};
  in.read(reinterpret_cast<char*>(len_bytes.data()), len_bytes.size());
  const std::uint32_t len = len_bytes[0] | (len_bytes[1] << 8) | (len_bytes[2] << 16) |
                            (static_cast<std::uint32_t>(len_bytes[3]) << 24);
  if (!in || len > kMaxHeader) throw std::invalid_argument("ensemble file: bad header length");
  std::string text(len, '\0');
  in.read(text.data(), len);
  if (!in) throw std::invalid_argument("ensemble file: truncated header");
  try {
    const auto header = nlohmann::json::parse(text);
    if (header.at("version").get<int>() != 1) {
      throw std::invalid_argument("ensemble file: unsupported version");
    }
    ShadowEnsemble ens(header.at("n").get<std::size_t>(), header.at("k").get<std::size_t>(),
                       header.at("povm").get<std::string>(),
                       header.at("noise").get<std::string>(),
                       header.at("seed").get<std::uint64_t>());
    const auto count = header.at("N").get<std::size_t>();
    std::vector<std::uint8_t> rows(count * ens.num_qubits());
    in.read(reinterpret_cast<char*>(rows.data()), static_cast<std::streamsize>(rows.size()));
    if (static_cast<std::size_t>(in.gcount()) != rows.size()) {
      throw std::invalid_argument(fmt::format("ensemble file: expected {} records", count));
    }
    const std::span<std::uint8_t> dst = ens.allocate(count);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i] >= ens.num_outcomes()) {
        throw std::invalid_argument(fmt::format("ensemble file: outcome {} out of range", rows[i]));
      }
      dst[i] = rows[i];
    }
    return ens;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(fmt::format("ensemble file: malformed header: {}", e.what()));
  }
}

void save_ensemble(const ShadowEnsemble& ensemble, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path));
  write_ensemble(ensemble, out);
}

ShadowEnsemble load_ensemble(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument(fmt::format("cannot open ensemble file '{}'", path));
  return read_ensemble(in);
}

void write_ensemble_csv(const ShadowEnsemble& ensemble, std::ostream& out) {
  const std::size_t n = ensemble.num_qubits();
  out << "# schema: ensemble/1\n";
  out << fmt::format("# povm={},noise={},seed={},n={},k={}\n", ensemble.povm_id(),
                     ensemble.noise_id(), ensemble.seed(), n, ensemble.num_outcomes());
  out << "record";
  for (std::size_t i = 0; i < n; ++i) out << ",q" << i;
  out << '\n';
  for (std::size_t j = 0; j < ensemble.size(); ++j) {
    out << j;
    for (std::uint8_t a : ensemble.record(j)) out << ',' << static_cast<int>(a);
    out << '\n';
  }
}

}  // namespace povmshadow
