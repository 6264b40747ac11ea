// Copyright 2026 The DP-PSI Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "dppsi/error.h"

namespace dppsi::io {

class IoError : public Error {
 public:
  using Error::Error;
};

struct LoadedItems {
  std::vector<std::string> items;
  // Aligned with `items` when a payload file was given.
  std::optional<std::vector<double>> payloads;
  std::size_t duplicates = 0;
  std::size_t blank_lines = 0;
};

namespace detail {

inline std::vector<std::string> ReadLines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  if (in.bad()) throw IoError("read error on " + path);
  return lines;
}

}  // namespace detail

// One item per line; trailing newline optional. Blank lines are skipped and
// later duplicates are dropped (with their payloads), keeping input order.
inline LoadedItems LoadItems(const std::string& path,
                             const std::optional<std::string>& payload_path = {}) {
  auto lines = detail::ReadLines(path);
  std::optional<std::vector<std::string>> payload_lines;
  if (payload_path) {
    payload_lines = detail::ReadLines(*payload_path);
    if (payload_lines->size() != lines.size()) {
      throw IoError("payload file has " + std::to_string(payload_lines->size()) +
                    " lines but item file has " + std::to_string(lines.size()));
    }
  }

  LoadedItems out;
  if (payload_path) out.payloads.emplace();
  std::unordered_set<std::string> seen;
  seen.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) {
      ++out.blank_lines;
      continue;
    }
    if (!seen.insert(lines[i]).second) {
      ++out.duplicates;
      continue;
    }
    out.items.push_back(std::move(lines[i]));
    if (payload_lines) {
      const std::string& text = (*payload_lines)[i];
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(text, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != text.size()) {
        throw IoError("bad payload on line " + std::to_string(i + 1) + ": '" +
                      text + "'");
      }
      out.payloads->push_back(v);
    }
  }
  return out;
}

inline void WriteItems(const std::string& path,
                       const std::vector<std::string>& items) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  for (const auto& item : items) out << item << '\n';
  if (!out) throw IoError("write error on " + path);
}

}  // namespace dppsi::io
