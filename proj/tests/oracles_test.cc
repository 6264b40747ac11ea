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

#include "dppsi/oracles.h"

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <vector>

#include "test_util.h"

namespace dppsi::oracles {
namespace {

PmfTable BoostBinomial(std::size_t n, double p) {
  return PmfTable(testing::BoostBinomialPmf(n, p));
}

TEST(SimAlg1Test, Degenerate) {
  Rng rng = Rng::Seeded(1);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_EQ(SimAlg1({30, 12, 1.0}, rng), 12u);
    EXPECT_EQ(SimAlg1({30, 0, 0.7}, rng), 0u);
  }
  EXPECT_THROW(SimAlg1({5, 6, 0.9}, rng), DomainError);
  EXPECT_THROW(SimAlg1({5, 3, 0.3}, rng), DomainError);
}

TEST(SimAlg1Test, MatchesBinomial) {
  Rng rng = Rng::Seeded(2);
  OracleScenario scn{20, 20, 0.75};
  auto mc = MonteCarloPmf([&](Rng& r) { return SimAlg1(scn, r); }, 20, 1000000, rng);
  EXPECT_LT(TotalVariation(mc, BoostBinomial(20, 0.75)), 0.01);
}

TEST(SimAlg2Test, NoSubsamplingReturnsIntersection) {
  Rng rng = Rng::Seeded(3);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(SimAlg2({15, 10, 1.0}, rng), 10u);
}

TEST(SimAlg2Test, SingleElementEnumeration) {
  // s ~ Bin(1, 0.5): with prob 1/2 the element keeps itself, otherwise it
  // answers with a fair coin.
  const double exact = (1 - 0.5) + 0.5 * 0.5;
  EXPECT_DOUBLE_EQ(exact, 0.75);
  Rng rng = Rng::Seeded(4);
  std::size_t ones = 0;
  constexpr std::size_t kDraws = 200000;
  for (std::size_t i = 0; i < kDraws; ++i) ones += SimAlg2({1, 1, 0.75}, rng);
  EXPECT_TRUE(testing::WithinBinomialBand(ones, kDraws, exact));
}

TEST(SimAlg2Test, MatchesSimAlg1) {
  Rng rng = Rng::Seeded(5);
  OracleScenario scn{15, 10, 0.8};
  auto a1 = MonteCarloPmf([&](Rng& r) { return SimAlg1(scn, r); }, 10, 1000000, rng);
  auto a2 = MonteCarloPmf([&](Rng& r) { return SimAlg2(scn, r); }, 10, 1000000, rng);
  EXPECT_LT(TotalVariation(a1, a2), 0.01);
}

TEST(SimAlg3Test, EmptyIntersection) {
  Rng rng = Rng::Seeded(6);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(SimAlg3({10, 0, 0.6}, rng), 0u);
}

TEST(SimAlg3Test, MonteCarloMatchesExactConvolution) {
  Rng rng = Rng::Seeded(7);
  OracleScenario scn{12, 12, 0.9};
  auto mc = MonteCarloPmf([&](Rng& r) { return SimAlg3(scn, r); }, 12, 1000000, rng);
  EXPECT_LT(TotalVariation(mc, ExactPmfAlg3(scn)), 0.01);
}

TEST(SimAlg4Test, Behaviour) {
  Rng rng = Rng::Seeded(8);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(SimAlg4(9, 0, rng), 9u);
  double sum = 0;
  constexpr int kDraws = 100000;
  for (int i = 0; i < kDraws; ++i) {
    const auto v = SimAlg4(10, 10, rng);
    ASSERT_LE(v, 10u);
    sum += v;
  }
  // Bin(10, 1/2): mean 5, sd of the mean sqrt(2.5 / kDraws).
  EXPECT_LE(std::abs(sum / kDraws - 5.0), 3 * std::sqrt(2.5 / kDraws));
  for (int i = 0; i < 1000; ++i) {
    const auto v = SimAlg4(12, 5, rng);
    EXPECT_GE(v, 7u);
    EXPECT_LE(v, 12u);
  }
  EXPECT_THROW(SimAlg4(3, 4, rng), DomainError);
}

// Exhaustive enumeration over every T1 of size s1 and every coin vector.
std::vector<double> EnumerateAlg5(std::size_t m, std::size_t s1) {
  std::vector<double> pmf(m + 1, 0.0);
  std::size_t subsets = 0;
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) == s1) ++subsets;
  }
  const double p_subset = 1.0 / static_cast<double>(subsets);
  const double p_coins = std::ldexp(1.0, -static_cast<int>(s1));
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != s1) continue;
    for (std::uint32_t coins = 0; coins < (1u << s1); ++coins) {
      pmf[m - s1 + std::popcount(coins)] += p_subset * p_coins;
    }
  }
  return pmf;
}

TEST(SimAlg5Test, EnumerationEqualsFixedT1Law) {
  const auto enumerated = EnumerateAlg5(8, 5);
  // SimAlg4(8, 5) is 3 + Bin(5, 1/2).
  auto coins = testing::BoostBinomialPmf(5, 0.5);
  std::vector<double> alg4(9, 0.0);
  for (std::size_t c = 0; c <= 5; ++c) alg4[3 + c] = coins[c];
  EXPECT_LT(TotalVariation(PmfTable(enumerated), PmfTable(alg4)), 1e-15);

  Rng rng = Rng::Seeded(9);
  auto mc = MonteCarloPmf([&](Rng& r) { return SimAlg5(8, 5, r); }, 8, 200000, rng);
  EXPECT_LT(TotalVariation(mc, PmfTable(enumerated)), 0.01);
}

TEST(SimAlg5Test, Support) {
  Rng rng = Rng::Seeded(10);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(SimAlg5(7, 0, rng), 7u);
  for (int i = 0; i < 1000; ++i) {
    const auto v = SimAlg5(10, 4, rng);
    EXPECT_GE(v, 6u);
    EXPECT_LE(v, 10u);
  }
  EXPECT_THROW(SimAlg5(3, 4, rng), DomainError);
}

TEST(SimAlg6Test, Behaviour) {
  Rng rng = Rng::Seeded(11);
  std::vector<bool> membership = {true, false, true, true, false};
  EXPECT_EQ(SimAlg6(membership, 1.0, 0.0, rng), membership);

  constexpr std::size_t kTrials = 100000;
  auto members = SimAlg6(std::vector<bool>(kTrials, true), 0.9, 0.1, rng);
  auto nonmembers = SimAlg6(std::vector<bool>(kTrials, false), 0.9, 0.1, rng);
  const auto hits_m = static_cast<std::size_t>(std::count(members.begin(), members.end(), true));
  const auto hits_n =
      static_cast<std::size_t>(std::count(nonmembers.begin(), nonmembers.end(), true));
  EXPECT_TRUE(testing::WithinBinomialBand(hits_m, kTrials, 0.9));
  EXPECT_TRUE(testing::WithinBinomialBand(hits_n, kTrials, 0.1));
}

TEST(ExactPmfTest, Alg1Corners) {
  auto pmf = ExactPmfAlg1({40, 20, 0.75});
  EXPECT_NEAR(pmf[20], std::pow(0.75, 20), 1e-18);
  EXPECT_NEAR(pmf[0], std::pow(0.25, 20), 1e-30);
  EXPECT_NEAR(pmf.Total(), 1.0, 1e-12);
  EXPECT_LT(TotalVariation(pmf, BoostBinomial(20, 0.75)), 1e-12);
  EXPECT_THROW(ExactPmfAlg1({100, 65, 0.9}), DomainError);
  EXPECT_THROW(ExactPmfAlg3({100, 65, 0.9}), DomainError);
}

TEST(ExactPmfTest, Alg3SingleElement) {
  auto pmf = ExactPmfAlg3({1, 1, 0.75});
  ASSERT_EQ(pmf.size(), 2u);
  EXPECT_DOUBLE_EQ(pmf[1], 0.75);
  EXPECT_DOUBLE_EQ(pmf[0], 0.25);
}

TEST(ExactPmfTest, Alg3EqualsAlg1ThroughExactRegime) {
  for (std::size_t m = 0; m <= kExactRegimeMax; ++m) {
    for (double p : {0.5, 0.55, 0.6, 0.7, 0.75, 0.8, 0.9, 0.95, 0.99, 1.0}) {
      OracleScenario scn{m, m, p};
      auto a1 = ExactPmfAlg1(scn);
      auto a3 = ExactPmfAlg3(scn);
      EXPECT_EQ(a3.size(), m + 1);
      EXPECT_LT(TotalVariation(a1, a3), 1e-12) << m << " " << p;
      EXPECT_NEAR(a3.Total(), 1.0, 1e-12);
    }
  }
}

TEST(ExactPmfTest, MarginalIdentity) {
  // A single element survives the proxy with probability
  // (1 - 2(1-p)) + 2(1-p) / 2, which must equal p.
  for (double p = 0.5; p <= 1.0; p += 1.0 / 1024) {
    const double rr = 2.0 * (1.0 - p);
    EXPECT_NEAR((1.0 - rr) + rr * 0.5, p, 1e-15);
  }
}

TEST(PmfTableTest, CsvAndCounts) {
  auto t = PmfTable::FromCounts({1, 3});
  EXPECT_DOUBLE_EQ(t[0], 0.25);
  EXPECT_DOUBLE_EQ(t[1], 0.75);
  EXPECT_DOUBLE_EQ(t[7], 0.0);
  EXPECT_EQ(t.ToCsv(), "k,prob\n0,0.25\n1,0.75\n");
  Rng rng = Rng::Seeded(1);
  EXPECT_THROW(MonteCarloPmf([](Rng&) { return std::size_t{5}; }, 3, 10, rng), ContractError);
}

}  // namespace
}  // namespace dppsi::oracles
