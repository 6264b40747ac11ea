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

#include "dppsi/accountant.h"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "accountant_oracle.h"

namespace dppsi::accountant {
namespace {

// Frozen from a 40-digit mpmath evaluation.
constexpr double kLowerBound_09_1e10 = 699.538040514589009;
constexpr double kEpsB_1e4_09_1e10 = 0.416119600591807011;
constexpr double kPrecision_7000_3000_3 = 0.979108454473251413;
constexpr double kPa3 = 0.952574126822433219;
constexpr double kQ3 = 0.0474258731775667809;

double Rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

TEST(IntersectionLowerBoundTest, KnownValue) {
  EXPECT_LT(Rel(IntersectionLowerBoundReal(0.9, 1e-10), kLowerBound_09_1e10), 1e-12);
  EXPECT_EQ(IntersectionLowerBound(0.9, 1e-10), 700u);
  EXPECT_LT(Rel(IntersectionLowerBoundReal(0.9, 1e-10),
                testing::OracleLowerBound(0.9, 1e-10)),
            1e-9);
}

TEST(IntersectionLowerBoundTest, TightensWithSmallerDelta) {
  double prev = 0;
  for (double delta : {1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12}) {
    const double v = IntersectionLowerBoundReal(0.8, delta);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(IntersectionLowerBoundTest, GrowsAsSubsamplingVanishes) {
  double prev = 0;
  for (double p = 0.5; p < 0.999; p += 0.01) {
    const double v = IntersectionLowerBoundReal(p, 1e-6);
    EXPECT_GT(v, prev) << p;
    prev = v;
  }
}

TEST(IntersectionLowerBoundTest, DomainErrors) {
  EXPECT_THROW(IntersectionLowerBound(1.0, 1e-6), DomainError);
  EXPECT_THROW(IntersectionLowerBound(0.4, 1e-6), DomainError);
  EXPECT_THROW(IntersectionLowerBound(0.9, 0.0), DomainError);
  EXPECT_THROW(IntersectionLowerBound(0.9, 1.0), DomainError);
}

TEST(ReceiverEpsilonTest, KnownValue) {
  const double eps = ReceiverEpsilon(10000, 0.9, 1e-10);
  EXPECT_LT(Rel(eps, kEpsB_1e4_09_1e10), 1e-6);
  EXPECT_LT(Rel(eps, testing::OracleReceiverEpsilon(10000, 0.9, 1e-10)), 1e-9);
  EXPECT_NEAR(EffectiveCount(10000, 0.9, 1e-10), 827.8118829938, 1e-6);
}

TEST(ReceiverEpsilonTest, RejectsSmallIntersections) {
  EXPECT_THROW(ReceiverEpsilon(700, 0.9, 1e-10), IntersectionTooSmallError);
  try {
    ReceiverEpsilon(10, 0.9, 1e-10);
    FAIL();
  } catch (const IntersectionTooSmallError& e) {
    EXPECT_EQ(e.lower_bound(), 700u);
    EXPECT_EQ(e.size(), 10u);
  }
  const double eps = ReceiverEpsilon(701, 0.9, 1e-10);
  EXPECT_TRUE(std::isfinite(eps));
  EXPECT_GT(eps, 0.0);
}

TEST(ReceiverEpsilonTest, DecreasesWithIntersectionSize) {
  for (double p : {0.5, 0.75, 0.9}) {
    const std::size_t floor = IntersectionLowerBound(p, 1e-8);
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t n = floor + 1; n < floor + 5000; n += 37) {
      const double eps = ReceiverEpsilon(n, p, 1e-8);
      EXPECT_LT(eps, prev) << n;
      prev = eps;
    }
  }
}

TEST(ReceiverEpsilonTest, APrioriBoundDominates) {
  const double bound = ReceiverEpsilonAPriori(0.9, 1e-10);
  EXPECT_TRUE(std::isfinite(bound));
  for (std::size_t n : {701, 800, 2000, 10000}) {
    EXPECT_GE(bound, ReceiverEpsilon(n, 0.9, 1e-10));
  }
  EXPECT_DOUBLE_EQ(bound, ReceiverEpsilon(0, 0.9, 1e-10, ReceiverBoundMode::kAPriori));
}

// t(|I|) increases past log(2/delta) / (8 (1-p)^2).
TEST(MonotonicityTest, EffectiveCountIncreasing) {
  for (double p : {0.5, 0.7, 0.9, 0.95}) {
    const double delta = 1e-6;
    const double start = std::log(2.0 / delta) / (8 * (1 - p) * (1 - p));
    double prev = EffectiveCount(start, p, delta);
    for (double n = start + 1; n < start + 1e5; n *= 1.05) {
      const double t = EffectiveCount(n, p, delta);
      EXPECT_GT(t, prev);
      prev = t;
    }
  }
}

// epsilon_B(t) decreases past log(4/delta).
TEST(MonotonicityTest, EpsilonDecreasingInT) {
  const double delta = 1e-6;
  const double start = std::log(4.0 / delta);
  double prev = std::numeric_limits<double>::infinity();
  for (double t = start * 1.0001; t < 1e7; t *= 1.1) {
    const double eps = EpsilonFromEffectiveCount(t, delta);
    EXPECT_LT(eps, prev) << t;
    prev = eps;
  }
  EXPECT_TRUE(std::isinf(EpsilonFromEffectiveCount(start, delta)));
}

TEST(ValidateRegionTest, Cases) {
  auto [p_a, q] = OptimalPq(3.0);
  EXPECT_TRUE(ValidateRegion(p_a, q, 3.0));
  EXPECT_LT(Rel(p_a / q, std::exp(3.0)), 1e-9);
  EXPECT_FALSE(ValidateRegion(1.0, 0.0, 3.0));
  EXPECT_FALSE(ValidateRegion(1.0, 0.0, 50.0));
  EXPECT_TRUE(ValidateRegion(0.5, 0.5, 0.0));
  EXPECT_FALSE(ValidateRegion(0.6, 0.4, 0.0));
  EXPECT_FALSE(ValidateRegion(0.2, 0.4, 3.0));  // p_A < q
  EXPECT_FALSE(ValidateRegion(1.2, 0.4, 3.0));
  // Interior point: p_A / q well below e^eps and 1 - q well below e^eps p_A.
  EXPECT_TRUE(ValidateRegion(0.6, 0.5, 1.0));
  EXPECT_TRUE(ValidateRegion(1.0, 0.0, std::numeric_limits<double>::infinity()));
  EXPECT_FALSE(ValidateRegion(0.1, 0.3, std::numeric_limits<double>::infinity()));
}

TEST(OptimalPqTest, Values) {
  auto zero = OptimalPq(0.0);
  EXPECT_DOUBLE_EQ(zero.p_a, 0.5);
  EXPECT_DOUBLE_EQ(zero.q, 0.5);
  auto three = OptimalPq(3.0);
  EXPECT_NEAR(three.p_a, kPa3, 1e-15);
  EXPECT_NEAR(three.q, kQ3, 1e-15);
  EXPECT_NEAR(three.p_a + three.q, 1.0, 1e-15);
  auto inf = OptimalPq(std::numeric_limits<double>::infinity());
  EXPECT_EQ(inf.p_a, 1.0);
  EXPECT_EQ(inf.q, 0.0);
  EXPECT_THROW(OptimalPq(-1.0), DomainError);
}

TEST(OptimalPqTest, FirstConstraintBindsOnGrid) {
  for (double eps = 0.1; eps <= 10.0 + 1e-9; eps += 0.1) {
    auto [p_a, q] = OptimalPq(eps);
    EXPECT_LT(Rel(p_a, std::exp(eps) * q), 1e-12) << eps;
    EXPECT_TRUE(ValidateRegion(p_a, q, eps)) << eps;
  }
}

TEST(PredictUtilityTest, Values) {
  auto u = PredictUtility(7000, 3000, 3.0);
  EXPECT_NEAR(u.precision, kPrecision_7000_3000_3, 1e-12);
  EXPECT_NEAR(u.recall, kPa3, 1e-15);
  auto limit = PredictUtility(7000, 3000, 60.0);
  EXPECT_NEAR(limit.precision, 1.0, 1e-12);
  EXPECT_NEAR(limit.recall, 1.0, 1e-12);
  EXPECT_THROW(PredictUtility(0, 0, 3.0), DomainError);
  EXPECT_DOUBLE_EQ(PredictUtility(0, 10, 3.0).precision, 0.0);
}

TEST(PlanTest, ReportMatchesClosedForms) {
  PlanInput in;
  in.eps_a = 3.0;
  in.delta_b = 1e-10;
  in.p_b = 0.9;
  in.intersection_size = 10000;
  in.intersection_sub_size = 7000;
  in.complement_size = 3000;
  auto r = Plan(in);
  EXPECT_DOUBLE_EQ(r.p_a, OptimalPq(3.0).p_a);
  EXPECT_DOUBLE_EQ(r.q, OptimalPq(3.0).q);
  EXPECT_TRUE(r.region_ok);
  EXPECT_EQ(r.intersection_lower_bound, 700u);
  ASSERT_TRUE(r.eps_b.has_value());
  EXPECT_DOUBLE_EQ(*r.eps_b, ReceiverEpsilon(10000, 0.9, 1e-10));
  ASSERT_TRUE(r.precision.has_value());
  EXPECT_DOUBLE_EQ(*r.precision, PredictUtility(7000, 3000, 3.0).precision);

  auto j = r.ToJson();
  EXPECT_DOUBLE_EQ(j["eps_b"].get<double>(), *r.eps_b);
  EXPECT_EQ(j["intersection_lower_bound"].get<std::size_t>(), 700u);
  const std::string text = r.ToText();
  EXPECT_NE(text.find("intersection_lower_bound=700\n"), std::string::npos);
  EXPECT_NE(text.find("p_a=0.95257412682243"), std::string::npos);

  in.intersection_size = 5;
  auto small = Plan(in);
  EXPECT_FALSE(small.eps_b.has_value());
  EXPECT_TRUE(small.ToJson()["eps_b"].is_null());
}

}  // namespace
}  // namespace dppsi::accountant
