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

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include "dppsi/error.h"
#include "dppsi/mechanisms.h"
#include "json.hpp"

// Closed-form privacy and utility accounting. All logarithms are natural.
namespace dppsi::accountant {

namespace detail {

inline void CheckDelta(double delta_b) {
  if (!(delta_b > 0.0 && delta_b < 1.0)) {
    throw DomainError("delta_B must lie in (0, 1)");
  }
}

inline void CheckReceiverDomain(double p_b, double delta_b) {
  CheckSubsampleProbability(p_b);
  if (p_b >= 1.0) {
    throw DomainError("p_B = 1 gives no subsampling, hence no receiver bound");
  }
  CheckDelta(delta_b);
}

}  // namespace detail

// Real-valued floor |I_L| on the true intersection size.
inline double IntersectionLowerBoundReal(double p_b, double delta_b) {
  detail::CheckReceiverDomain(p_b, delta_b);
  const double log2d = std::log(2.0 / delta_b);
  const double log4d = std::log(4.0 / delta_b);
  const double gap = 1.0 - p_b;
  const double a = std::sqrt(0.5 * log2d);
  const double b = std::sqrt(0.5 * log2d + 16.0 * gap * log4d);
  return (a + b) * (a + b) / (16.0 * gap * gap);
}

// ceil(|I_L|). The receiver bound requires |I| strictly above this.
inline std::size_t IntersectionLowerBound(double p_b, double delta_b) {
  return static_cast<std::size_t>(
      std::ceil(IntersectionLowerBoundReal(p_b, delta_b)));
}

// t = (1 - p_B)|I| - sqrt(|I|/8 * log(2/delta_B)).
inline double EffectiveCount(double intersection_size, double p_b,
                             double delta_b) {
  return (1.0 - p_b) * intersection_size -
         std::sqrt(intersection_size / 8.0 * std::log(2.0 / delta_b));
}

// epsilon_B as a function of t; finite only for t > log(4/delta_B).
inline double EpsilonFromEffectiveCount(double t, double delta_b) {
  const double log4d = std::log(4.0 / delta_b);
  if (!(t > log4d)) return std::numeric_limits<double>::infinity();
  const double root = std::sqrt(t * log4d);
  return (2.0 * root + 1.0) / (t - root);
}

enum class ReceiverBoundMode {
  // Evaluate at the actual |I|.
  kActual,
  // Evaluate at ceil(|I_L|): a bound that holds for every admissible |I|.
  kAPriori,
};

// (epsilon_B, delta_B) for the receiver's membership privacy.
inline double ReceiverEpsilon(std::size_t intersection_size, double p_b,
                              double delta_b,
                              ReceiverBoundMode mode = ReceiverBoundMode::kActual) {
  const std::size_t floor = IntersectionLowerBound(p_b, delta_b);
  if (mode == ReceiverBoundMode::kAPriori) {
    return EpsilonFromEffectiveCount(
        EffectiveCount(static_cast<double>(floor), p_b, delta_b), delta_b);
  }
  if (intersection_size <= floor) {
    throw IntersectionTooSmallError(intersection_size, floor);
  }
  return EpsilonFromEffectiveCount(
      EffectiveCount(static_cast<double>(intersection_size), p_b, delta_b),
      delta_b);
}

inline double ReceiverEpsilonAPriori(double p_b, double delta_b) {
  return ReceiverEpsilon(0, p_b, delta_b, ReceiverBoundMode::kAPriori);
}

// Membership in the sender's valid region for epsilon_A.
inline bool ValidateRegion(double p_a, double q, double eps_a) {
  if (!(p_a >= 0.0 && p_a <= 1.0 && q >= 0.0 && q <= 1.0)) return false;
  if (p_a < q) return false;
  if (std::isinf(eps_a)) return true;
  const double scale = std::exp(eps_a);
  // The optimum lies on the boundary p_A = e^eps q; allow for rounding.
  constexpr double kSlack = 1e-12;
  return p_a <= scale * q * (1.0 + kSlack) &&
         1.0 - q <= scale * p_a * (1.0 + kSlack);
}

struct PqPair {
  double p_a;
  double q;
};

inline PqPair OptimalPq(double eps_a) {
  if (!(eps_a >= 0.0)) throw DomainError("epsilon_A must be >= 0");
  // Logistic form; stable for large eps.
  const double q = 1.0 / (1.0 + std::exp(eps_a));
  const double p_a = 1.0 / (1.0 + std::exp(-eps_a));
  return {p_a, q};
}

struct UtilityPrediction {
  double precision;
  double recall;
};

inline UtilityPrediction PredictUtility(std::size_t intersection_sub_size,
                                        std::size_t complement_size,
                                        double eps_a) {
  if (intersection_sub_size == 0 && complement_size == 0) {
    throw DomainError("intersection and complement sizes are both zero");
  }
  if (!(eps_a >= 0.0)) throw DomainError("epsilon_A must be >= 0");
  const double i_sub = static_cast<double>(intersection_sub_size);
  const double comp = static_cast<double>(complement_size);
  UtilityPrediction u;
  u.precision = i_sub / (std::exp(-eps_a) * comp + i_sub);
  u.recall = OptimalPq(eps_a).p_a;
  return u;
}

// Everything the `plan` command reports.
struct PlanInput {
  double eps_a = 3.0;
  double delta_b = 1e-10;
  double p_b = 0.9;
  std::optional<std::size_t> intersection_size;
  std::optional<std::size_t> intersection_sub_size;
  std::optional<std::size_t> complement_size;
};

struct PlanReport {
  PlanInput input;
  double p_a = 0;
  double q = 0;
  bool region_ok = false;
  double recall = 0;
  std::optional<double> precision;
  std::size_t intersection_lower_bound = 0;
  double eps_b_a_priori = 0;
  std::optional<double> eps_b;

  nlohmann::ordered_json ToJson() const {
    nlohmann::ordered_json j;
    j["eps_a"] = std::isfinite(input.eps_a) ? nlohmann::ordered_json(input.eps_a)
                                            : nlohmann::ordered_json("inf");
    j["delta_b"] = input.delta_b;
    j["p_b"] = input.p_b;
    j["p_a"] = p_a;
    j["q"] = q;
    j["region_ok"] = region_ok;
    j["recall"] = recall;
    if (precision) j["precision"] = *precision;
    j["intersection_lower_bound"] = intersection_lower_bound;
    j["eps_b_a_priori"] = std::isfinite(eps_b_a_priori)
                              ? nlohmann::ordered_json(eps_b_a_priori)
                              : nlohmann::ordered_json("inf");
    if (input.intersection_size) {
      j["intersection_size"] = *input.intersection_size;
      if (eps_b) {
        j["eps_b"] = *eps_b;
      } else {
        j["eps_b"] = nullptr;
      }
    }
    return j;
  }

  // key=value per line, same keys and order as the JSON form.
  std::string ToText() const {
    std::ostringstream os;
    os.precision(17);
    const auto j = ToJson();
    for (const auto& [key, value] : j.items()) {
      os << key << '=';
      if (value.is_string()) {
        os << value.get<std::string>();
      } else if (value.is_null()) {
        os << "undefined";
      } else if (value.is_number_float()) {
        os << value.get<double>();
      } else {
        os << value.dump();
      }
      os << '\n';
    }
    return os.str();
  }
};

inline PlanReport Plan(const PlanInput& in) {
  PlanReport r;
  r.input = in;
  auto [p_a, q] = OptimalPq(in.eps_a);
  r.p_a = p_a;
  r.q = q;
  r.region_ok = ValidateRegion(p_a, q, in.eps_a);
  r.recall = p_a;
  if (in.intersection_sub_size && in.complement_size) {
    r.precision =
        PredictUtility(*in.intersection_sub_size, *in.complement_size, in.eps_a)
            .precision;
  }
  r.intersection_lower_bound = IntersectionLowerBound(in.p_b, in.delta_b);
  r.eps_b_a_priori = ReceiverEpsilonAPriori(in.p_b, in.delta_b);
  if (in.intersection_size && *in.intersection_size > r.intersection_lower_bound) {
    r.eps_b = ReceiverEpsilon(*in.intersection_size, in.p_b, in.delta_b);
  }
  return r;
}

}  // namespace dppsi::accountant
