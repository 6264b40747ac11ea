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

// Statistical helpers shared by the test binaries. Independent of the
// library: distributions come from Boost.Math.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>

namespace dppsi::testing {

// Pearson chi-square goodness of fit. Adjacent bins are pooled from both
// tails inward until every pooled bin expects at least `min_expected`.
// Returns the upper-tail p-value.
inline double ChiSquarePValue(const std::vector<std::uint64_t>& observed,
                              const std::vector<double>& expected_probs,
                              double min_expected = 5.0) {
  const std::size_t bins = std::max(observed.size(), expected_probs.size());
  const double total = static_cast<double>(
      std::accumulate(observed.begin(), observed.end(), std::uint64_t{0}));
  std::vector<double> obs(bins, 0.0), exp(bins, 0.0);
  for (std::size_t i = 0; i < observed.size(); ++i) obs[i] = observed[i];
  for (std::size_t i = 0; i < expected_probs.size(); ++i) {
    exp[i] = expected_probs[i] * total;
  }

  std::vector<double> pooled_obs, pooled_exp;
  double acc_o = 0.0, acc_e = 0.0;
  for (std::size_t i = 0; i < bins; ++i) {
    acc_o += obs[i];
    acc_e += exp[i];
    if (acc_e >= min_expected) {
      pooled_obs.push_back(acc_o);
      pooled_exp.push_back(acc_e);
      acc_o = acc_e = 0.0;
    }
  }
  if (acc_e > 0.0 || acc_o > 0.0) {
    if (pooled_exp.empty()) {
      pooled_obs.push_back(acc_o);
      pooled_exp.push_back(acc_e);
    } else {
      pooled_obs.back() += acc_o;
      pooled_exp.back() += acc_e;
    }
  }
  if (pooled_exp.size() < 2) return 1.0;

  double stat = 0.0;
  for (std::size_t i = 0; i < pooled_exp.size(); ++i) {
    const double d = pooled_obs[i] - pooled_exp[i];
    stat += d * d / pooled_exp[i];
  }
  boost::math::chi_squared dist(static_cast<double>(pooled_exp.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

inline std::vector<double> BoostBinomialPmf(std::size_t n, double p) {
  std::vector<double> out(n + 1);
  if (p <= 0.0 || p >= 1.0) {
    std::fill(out.begin(), out.end(), 0.0);
    out[p <= 0.0 ? 0 : n] = 1.0;
    return out;
  }
  boost::math::binomial dist(static_cast<double>(n), p);
  for (std::size_t k = 0; k <= n; ++k) out[k] = boost::math::pdf(dist, static_cast<double>(k));
  return out;
}

// |hits/trials - p| within `sigmas` standard errors of Binomial(trials, p).
inline bool WithinBinomialBand(std::size_t hits, std::size_t trials, double p,
                               double sigmas = 3.0) {
  const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
  return std::abs(static_cast<double>(hits) / trials - p) <= sigmas * se;
}

}  // namespace dppsi::testing
