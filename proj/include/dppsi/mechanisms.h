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
#include <concepts>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "dppsi/error.h"
#include "dppsi/random.h"

namespace dppsi {

inline void CheckProbability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError(std::string(name) + " must lie in [0, 1], got " +
                      std::to_string(p));
  }
}

// p_B < 1/2 is unsupported: the proxy mechanisms used in the receiver
// analysis sample Bin(n, 2(1 - p_B)).
inline void CheckSubsampleProbability(double p_b) {
  if (!(p_b >= 0.5 && p_b <= 1.0)) {
    throw DomainError("p_B must lie in [1/2, 1], got " + std::to_string(p_b));
  }
}

// Probabilities driving both parties' randomization.
//   p_b: receiver's Bernoulli subsampling rate.
//   p_a: sender's retention rate for matched items.
//   q:   sender's injection rate for unmatched items.
struct MechanismParams {
  double p_b = 1.0;
  double p_a = 1.0;
  double q = 0.0;

  void Validate() const {
    CheckSubsampleProbability(p_b);
    CheckProbability(p_a, "p_A");
    CheckProbability(q, "q");
    if (p_a < q) {
      throw DomainError("p_A must be >= q");
    }
  }

  static MechanismParams Noiseless() { return {1.0, 1.0, 0.0}; }
};

template <class T>
struct Subsample {
  std::vector<T> kept;
  std::vector<std::size_t> kept_indices;
};

// Keeps each item independently with probability p, preserving order.
template <class T>
Subsample<T> BernoulliSubsample(std::span<const T> items, double p, Rng& rng) {
  CheckProbability(p, "subsampling probability");
  Subsample<T> out;
  out.kept.reserve(static_cast<std::size_t>(std::ceil(items.size() * p)));
  out.kept_indices.reserve(out.kept.capacity());
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (rng.Bernoulli(p)) {
      out.kept.push_back(items[i]);
      out.kept_indices.push_back(i);
    }
  }
  return out;
}

template <class T>
Subsample<T> BernoulliSubsample(const std::vector<T>& items, double p,
                                Rng& rng) {
  return BernoulliSubsample(std::span<const T>(items), p, rng);
}

// A bijection on {0, ..., n-1}. Apply() places input[mapping[i]] at slot i.
class Permutation {
 public:
  Permutation() = default;

  explicit Permutation(std::vector<std::uint32_t> mapping)
      : mapping_(std::move(mapping)) {
    std::vector<bool> seen(mapping_.size(), false);
    for (auto m : mapping_) {
      if (m >= mapping_.size() || seen[m]) {
        throw ContractError("mapping is not a bijection");
      }
      seen[m] = true;
    }
  }

  static Permutation Identity(std::size_t n) {
    std::vector<std::uint32_t> m(n);
    std::iota(m.begin(), m.end(), 0u);
    return Permutation(std::move(m));
  }

  std::size_t size() const { return mapping_.size(); }
  const std::vector<std::uint32_t>& mapping() const { return mapping_; }

  Permutation Inverse() const {
    std::vector<std::uint32_t> inv(mapping_.size());
    for (std::uint32_t i = 0; i < mapping_.size(); ++i) inv[mapping_[i]] = i;
    return Permutation(std::move(inv));
  }

  template <class T>
  std::vector<T> Apply(std::span<const T> in) const {
    if (in.size() != mapping_.size()) {
      throw ContractError("permutation size does not match input");
    }
    std::vector<T> out;
    out.reserve(in.size());
    for (auto m : mapping_) out.push_back(in[m]);
    return out;
  }

  template <class T>
  std::vector<T> Apply(const std::vector<T>& in) const {
    return Apply(std::span<const T>(in));
  }

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<std::uint32_t> mapping_;
};

// Fisher-Yates.
inline Permutation UniformPermutation(std::size_t n, Rng& rng) {
  std::vector<std::uint32_t> m(n);
  std::iota(m.begin(), m.end(), 0u);
  for (std::size_t i = n; i > 1; --i) {
    std::size_t j = rng.UniformBelow(i);
    std::swap(m[i - 1], m[j]);
  }
  return Permutation(std::move(m));
}

// Randomized response over a partition of the receiver's subsample:
// intersection members survive with probability p_a, complement members are
// injected with probability q. Output lists the surviving intersection
// members first, then the injected complement members, each in input order.
template <std::totally_ordered T>
std::vector<T> Upsample(std::span<const T> intersection,
                        std::span<const T> complement, double p_a, double q,
                        Rng& rng) {
  CheckProbability(p_a, "p_A");
  CheckProbability(q, "q");
  {
    std::vector<T> a(intersection.begin(), intersection.end());
    std::vector<T> b(complement.begin(), complement.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
      if (*ia < *ib) {
        ++ia;
      } else if (*ib < *ia) {
        ++ib;
      } else {
        throw ContractError("intersection and complement overlap");
      }
    }
  }
  std::vector<T> out;
  for (const auto& x : intersection) {
    if (rng.Bernoulli(p_a)) out.push_back(x);
  }
  for (const auto& x : complement) {
    if (rng.Bernoulli(q)) out.push_back(x);
  }
  return out;
}

template <std::totally_ordered T>
std::vector<T> Upsample(const std::vector<T>& intersection,
                        const std::vector<T>& complement, double p_a, double q,
                        Rng& rng) {
  return Upsample(std::span<const T>(intersection),
                  std::span<const T>(complement), p_a, q, rng);
}

}  // namespace dppsi
