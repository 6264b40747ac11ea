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

// Executable forms of the receiver-side analysis mechanisms.
//
// The sender's view of the receiver is |X ∩ Y_sub|. The analysis replaces
// the direct Bernoulli(p_B) thinning with equivalent proxies: first a random
// subset T of Y of size Bin(n, 2(1 - p_B)) whose intersection members answer
// with a fair coin, then the same restricted to T1 ⊆ I. Each step is exposed
// here as a sampler, with exact PMFs for the small regime, so equality of
// the distributions can be checked rather than trusted.
//
// Scenario convention: Y = {0, ..., n-1} with I = {0, ..., |I|-1}.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dppsi/error.h"
#include "dppsi/mechanisms.h"
#include "dppsi/random.h"

namespace dppsi::oracles {

inline constexpr std::size_t kExactRegimeMax = 64;

struct OracleScenario {
  std::size_t n = 0;
  std::size_t intersection_size = 0;
  double p_b = 1.0;

  void Validate() const {
    if (intersection_size > n) {
      throw DomainError("intersection_size must not exceed n");
    }
    CheckSubsampleProbability(p_b);
  }
};

// Probability mass on {0, ..., support_max}; probs[k] = Pr[X = k].
class PmfTable {
 public:
  PmfTable() = default;
  explicit PmfTable(std::vector<double> probs) : probs_(std::move(probs)) {}

  std::size_t size() const { return probs_.size(); }
  const std::vector<double>& probs() const { return probs_; }
  double operator[](std::size_t k) const {
    return k < probs_.size() ? probs_[k] : 0.0;
  }

  double Total() const {
    // Neumaier summation.
    double sum = 0.0;
    double c = 0.0;
    for (double p : probs_) {
      double t = sum + p;
      c += std::abs(sum) >= std::abs(p) ? (sum - t) + p : (p - t) + sum;
      sum = t;
    }
    return sum + c;
  }

  std::string ToCsv() const {
    std::ostringstream os;
    os.precision(17);
    os << "k,prob\n";
    for (std::size_t k = 0; k < probs_.size(); ++k) {
      os << k << ',' << probs_[k] << '\n';
    }
    return os.str();
  }

  static PmfTable FromCounts(const std::vector<std::uint64_t>& counts) {
    const double total = static_cast<double>(
        std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}));
    std::vector<double> p(counts.size());
    for (std::size_t k = 0; k < counts.size(); ++k) {
      p[k] = total > 0 ? static_cast<double>(counts[k]) / total : 0.0;
    }
    return PmfTable(std::move(p));
  }

 private:
  std::vector<double> probs_;
};

inline double TotalVariation(const PmfTable& a, const PmfTable& b) {
  const std::size_t n = std::max(a.size(), b.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) sum += std::abs(a[k] - b[k]);
  return 0.5 * sum;
}

// Binomial(trials, p) PMF for small trial counts, by direct product.
inline std::vector<double> BinomialPmf(std::size_t trials, double p) {
  std::vector<double> out(trials + 1);
  double coeff = 1.0;
  for (std::size_t k = 0; k <= trials; ++k) {
    out[k] = coeff * std::pow(p, static_cast<double>(k)) *
             std::pow(1.0 - p, static_cast<double>(trials - k));
    coeff = coeff * static_cast<double>(trials - k) / static_cast<double>(k + 1);
  }
  return out;
}

inline std::uint64_t SampleBinomial(std::uint64_t trials, double p, Rng& rng) {
  if (trials == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return trials;
  std::binomial_distribution<std::uint64_t> dist(trials, p);
  return dist(rng);
}

namespace detail {

// First `count` entries of a uniform shuffle of {0, ..., n-1}.
inline std::vector<std::uint32_t> UniformSubset(std::size_t n,
                                                std::size_t count, Rng& rng) {
  std::vector<std::uint32_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0u);
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t j = i + rng.UniformBelow(n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

inline double RandomizedResponseRate(double p_b) { return 2.0 * (1.0 - p_b); }

}  // namespace detail

// The sender's view: subsample Y by Bernoulli(p_B) and count survivors in I.
inline std::size_t SimAlg1(const OracleScenario& scn, Rng& rng) {
  scn.Validate();
  std::size_t count = 0;
  for (std::size_t y = 0; y < scn.n; ++y) {
    const bool kept = rng.Bernoulli(scn.p_b);
    if (kept && y < scn.intersection_size) ++count;
  }
  return count;
}

// Proxy with a uniform T ⊆ Y of size Bin(n, 2(1 - p_B)).
inline std::size_t SimAlg2(const OracleScenario& scn, Rng& rng) {
  scn.Validate();
  const auto s =
      SampleBinomial(scn.n, detail::RandomizedResponseRate(scn.p_b), rng);
  const auto t = detail::UniformSubset(scn.n, s, rng);
  std::size_t in_t_and_i = 0;
  std::size_t coins = 0;
  for (auto y : t) {
    if (y < scn.intersection_size) {
      ++in_t_and_i;
      if (rng.Bernoulli(0.5)) ++coins;
    }
  }
  return scn.intersection_size - in_t_and_i + coins;
}

// Fixed T1 of the given size.
inline std::size_t SimAlg4(std::size_t intersection_size, std::size_t t1_size,
                           Rng& rng) {
  if (t1_size > intersection_size) {
    throw DomainError("|T1| must not exceed |I|");
  }
  std::size_t coins = 0;
  for (std::size_t i = 0; i < t1_size; ++i) {
    if (rng.Bernoulli(0.5)) ++coins;
  }
  return intersection_size - t1_size + coins;
}

// Fixed s1, uniform T1 ⊆ I of that size.
inline std::size_t SimAlg5(std::size_t intersection_size, std::size_t s1,
                           Rng& rng) {
  if (s1 > intersection_size) throw DomainError("s1 must not exceed |I|");
  const auto t1 = detail::UniformSubset(intersection_size, s1, rng);
  std::size_t coins = 0;
  for (std::size_t i = 0; i < t1.size(); ++i) {
    if (rng.Bernoulli(0.5)) ++coins;
  }
  return intersection_size - t1.size() + coins;
}

// Proxy restricted to I: s1 ~ Bin(|I|, 2(1 - p_B)), then SimAlg5.
inline std::size_t SimAlg3(const OracleScenario& scn, Rng& rng) {
  scn.Validate();
  const auto s1 = SampleBinomial(scn.intersection_size,
                                 detail::RandomizedResponseRate(scn.p_b), rng);
  return SimAlg5(scn.intersection_size, s1, rng);
}

// Sender-side randomized response on membership bits.
inline std::vector<bool> SimAlg6(const std::vector<bool>& membership,
                                 double p_a, double q, Rng& rng) {
  CheckProbability(p_a, "p_A");
  CheckProbability(q, "q");
  std::vector<bool> out(membership.size());
  for (std::size_t i = 0; i < membership.size(); ++i) {
    out[i] = rng.Bernoulli(membership[i] ? p_a : q);
  }
  return out;
}

namespace detail {

inline void CheckExactRegime(const OracleScenario& scn) {
  scn.Validate();
  if (scn.intersection_size > kExactRegimeMax) {
    throw DomainError("exact PMF is limited to |I| <= 64");
  }
}

}  // namespace detail

inline PmfTable ExactPmfAlg1(const OracleScenario& scn) {
  detail::CheckExactRegime(scn);
  return PmfTable(BinomialPmf(scn.intersection_size, scn.p_b));
}

// Sum over s1 of Bin(|I|, 2(1-p_B))(s1) * Pr[(|I| - s1) + Bin(s1, 1/2) = z].
inline PmfTable ExactPmfAlg3(const OracleScenario& scn) {
  detail::CheckExactRegime(scn);
  const std::size_t m = scn.intersection_size;
  const auto outer = BinomialPmf(m, detail::RandomizedResponseRate(scn.p_b));
  std::vector<double> sum(m + 1, 0.0);
  std::vector<double> comp(m + 1, 0.0);
  for (std::size_t s1 = 0; s1 <= m; ++s1) {
    if (outer[s1] == 0.0) continue;
    const auto coins = BinomialPmf(s1, 0.5);
    for (std::size_t c = 0; c <= s1; ++c) {
      const std::size_t z = m - s1 + c;
      const double term = outer[s1] * coins[c];
      // Neumaier accumulation per support point.
      const double t = sum[z] + term;
      comp[z] += std::abs(sum[z]) >= std::abs(term) ? (sum[z] - t) + term
                                                    : (term - t) + sum[z];
      sum[z] = t;
    }
  }
  for (std::size_t z = 0; z <= m; ++z) sum[z] += comp[z];
  return PmfTable(std::move(sum));
}

// Empirical PMF of `draws` calls to `sampler`, on support {0, ..., max_value}.
template <class Sampler>
PmfTable MonteCarloPmf(Sampler&& sampler, std::size_t max_value,
                       std::size_t draws, Rng& rng) {
  std::vector<std::uint64_t> counts(max_value + 1, 0);
  for (std::size_t i = 0; i < draws; ++i) {
    const std::size_t v = sampler(rng);
    if (v > max_value) throw ContractError("sample outside declared support");
    ++counts[v];
  }
  return PmfTable::FromCounts(counts);
}

}  // namespace dppsi::oracles
