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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "dppsi/error.h"

namespace dppsi {

struct SyntheticSets {
  std::vector<std::string> sender;
  std::vector<std::string> receiver;
  std::size_t overlap = 0;
};

// Two sets with exactly round(overlap_ratio * min(sizes)) shared items. The
// tag namespaces the item strings, so different tags give disjoint universes
// with identical shape.
inline SyntheticSets MakeSyntheticSets(std::size_t sender_size,
                                       std::size_t receiver_size,
                                       double overlap_ratio,
                                       std::uint64_t tag = 0) {
  if (!(overlap_ratio >= 0.0 && overlap_ratio <= 1.0)) {
    throw DomainError("overlap ratio must lie in [0, 1]");
  }
  SyntheticSets s;
  s.overlap = static_cast<std::size_t>(
      std::llround(overlap_ratio * static_cast<double>(std::min(sender_size, receiver_size))));
  const std::string prefix = "t" + std::to_string(tag) + "-";
  s.sender.reserve(sender_size);
  s.receiver.reserve(receiver_size);
  for (std::size_t i = 0; i < s.overlap; ++i) {
    std::string common = prefix + "common-" + std::to_string(i);
    s.sender.push_back(common);
    s.receiver.push_back(std::move(common));
  }
  for (std::size_t i = s.overlap; i < sender_size; ++i) {
    s.sender.push_back(prefix + "sender-" + std::to_string(i));
  }
  for (std::size_t i = s.overlap; i < receiver_size; ++i) {
    s.receiver.push_back(prefix + "receiver-" + std::to_string(i));
  }
  return s;
}

inline SyntheticSets MakeSyntheticSets(std::size_t n, double overlap_ratio = 0.7,
                                       std::uint64_t tag = 0) {
  return MakeSyntheticSets(n, n, overlap_ratio, tag);
}

}  // namespace dppsi
