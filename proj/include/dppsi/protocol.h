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

// Sender and receiver state machines for DP-PSI.
//
//   sender                                   receiver
//   ------                                   --------
//   Round1()          --- X^a --------->
//                     <-- Y_sub^b -------    Round1()    (Bernoulli(p_B) subsample)
//                     <-- X^ab_pi -------    Round2(X^a) (re-encrypt, permute)
//   Round2(Y_sub^b, X^ab_pi)
//     intersect, randomized response
//                     --- IndexSet ----->    Finish(IndexSet)
//
// Indices in the IndexSet refer to positions in the receiver's Y_sub^b
// message and are sorted ascending.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "dppsi/error.h"
#include "dppsi/group.h"
#include "dppsi/mechanisms.h"
#include "dppsi/random.h"
#include "dppsi/wire.h"

namespace dppsi {

enum class Role { kSender, kReceiver };

enum class Phase { kSetup, kRound1, kRound2, kDone };

inline const char* PhaseName(Phase p) {
  switch (p) {
    case Phase::kSetup:
      return "setup";
    case Phase::kRound1:
      return "round1";
    case Phase::kRound2:
      return "round2";
    case Phase::kDone:
      return "done";
  }
  return "?";
}

enum class Provenance { kXa, kXabPermuted, kYbSub, kYabSub };

// Ordered group elements with a fixed provenance and no duplicate encodings.
class EncryptedSet {
 public:
  EncryptedSet(Provenance provenance, std::vector<GroupElement> elements)
      : provenance_(provenance), elements_(std::move(elements)) {
    std::vector<GroupElement> sorted = elements_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw ProtocolError("duplicate encoding in encrypted set");
    }
  }

  Provenance provenance() const { return provenance_; }
  const std::vector<GroupElement>& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }

 private:
  Provenance provenance_;
  std::vector<GroupElement> elements_;
};

struct HashedItem {
  std::string source;
  GroupElement point;
};

// Traffic and leakage-profile quantities seen by one party.
struct SessionStats {
  std::uint64_t sent_bytes = 0;
  std::uint64_t received_bytes = 0;
  double wall_time_s = 0.0;
  std::size_t sender_set_size = 0;        // |X|
  std::size_t receiver_sub_size = 0;      // |Y_sub|
  std::size_t intersection_sub_size = 0;  // |X ∩ Y_sub|, sender only
  std::size_t dp_intersection_size = 0;   // |I_dp|
};

// The receiver's output.
struct DpIntersection {
  std::vector<std::string> elements;
  std::optional<double> payload_sum;
  SessionStats stats;
};

namespace protocol_detail {

// Hashes items and orders them by encoding. Returns the order applied so
// that payloads can follow it.
template <PrimeOrderGroup G>
std::pair<std::vector<HashedItem>, std::vector<std::size_t>> HashAndSort(
    const std::vector<std::string>& items) {
  std::vector<HashedItem> hashed;
  hashed.reserve(items.size());
  for (const auto& item : items) {
    if (item.empty()) throw ContractError("items must be nonempty");
    hashed.push_back({item, G::HashToGroup(AsBytes(item))});
  }
  std::vector<std::size_t> order(items.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return hashed[a].point < hashed[b].point;
  });
  std::vector<HashedItem> sorted;
  sorted.reserve(hashed.size());
  for (auto i : order) sorted.push_back(std::move(hashed[i]));
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].point == sorted[i - 1].point) {
      throw ContractError("duplicate item: " + sorted[i].source);
    }
  }
  return {std::move(sorted), std::move(order)};
}

inline void ExpectType(const Message& m, MessageType want) {
  if (m.type == MessageType::kAbort) {
    throw ProtocolError("peer aborted the session");
  }
  if (m.type != want) {
    throw ProtocolError(std::string("expected ") + MessageTypeName(want) +
                        " message, got " + MessageTypeName(m.type));
  }
}

template <PrimeOrderGroup G>
std::vector<GroupElement> Reencrypt(const std::vector<GroupElement>& in,
                                    const Scalar& k, const char* what) {
  try {
    return BatchExp<G>(in, k);
  } catch (const InvalidElementError& e) {
    throw ProtocolError(std::string("malformed element in ") + what +
                        " at index " + std::to_string(e.index()));
  }
}

class Stopwatch {
 public:
  double Seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace protocol_detail

// Holds X, secret a, and the retention/injection rates.
template <PrimeOrderGroup G = Ristretto255>
class Sender {
 public:
  Sender(const std::vector<std::string>& items, MechanismParams params, Rng rng)
      : params_(params), rng_(std::move(rng)) {
    params_.Validate();
    items_ = protocol_detail::HashAndSort<G>(items).first;
    secret_ = G::GenSecret(rng_);
    stats_.sender_set_size = items_.size();
  }

  Phase phase() const { return phase_; }
  const SessionStats& stats() const { return stats_; }
  const MechanismParams& params() const { return params_; }

  // Emits X^a in sorted-hash order.
  Message Round1() {
    RequirePhase(Phase::kSetup);
    std::vector<GroupElement> points;
    points.reserve(items_.size());
    for (const auto& h : items_) points.push_back(h.point);
    Message m = Message::Elements(MessageType::kXa, BatchExp<G>(points, secret_));
    stats_.sent_bytes += m.EncodedSize();
    phase_ = Phase::kRound1;
    return m;
  }

  // Intersects Y_sub^ab with X^ab_pi, applies randomized response and emits
  // the selected positions of Y_sub.
  Message Round2(const Message& y_b_sub, const Message& x_ab_pi) {
    RequirePhase(Phase::kRound1);
    protocol_detail::ExpectType(y_b_sub, MessageType::kYbSub);
    protocol_detail::ExpectType(x_ab_pi, MessageType::kXabPi);
    stats_.received_bytes += y_b_sub.EncodedSize() + x_ab_pi.EncodedSize();
    if (x_ab_pi.elements.size() != items_.size()) {
      phase_ = Phase::kDone;
      throw ProtocolError("X^ab_pi size differs from |X|");
    }
    if (y_b_sub.elements.size() > UINT32_MAX) {
      throw ProtocolError("Y_sub too large for 32-bit indices");
    }
    for (std::size_t i = 0; i < x_ab_pi.elements.size(); ++i) {
      if (!G::IsValid(x_ab_pi.elements[i])) {
        phase_ = Phase::kDone;
        throw ProtocolError("malformed element in X^ab_pi at index " +
                            std::to_string(i));
      }
    }
    EncryptedSet x_ab(Provenance::kXabPermuted, x_ab_pi.elements);
    EncryptedSet y_b(Provenance::kYbSub, y_b_sub.elements);
    EncryptedSet y_ab(Provenance::kYabSub,
                      protocol_detail::Reencrypt<G>(y_b.elements(), secret_,
                                                    "Y_sub^b"));

    std::unordered_set<GroupElement, GroupElementHash> x_lookup;
    x_lookup.reserve(x_ab.size());
    x_lookup.insert(x_ab.elements().begin(), x_ab.elements().end());

    std::vector<std::uint32_t> matched;
    std::vector<std::uint32_t> unmatched;
    for (std::uint32_t i = 0; i < y_ab.size(); ++i) {
      (x_lookup.contains(y_ab.elements()[i]) ? matched : unmatched).push_back(i);
    }
    auto selected = Upsample<std::uint32_t>(matched, unmatched, params_.p_a,
                                            params_.q, rng_);
    std::sort(selected.begin(), selected.end());

    stats_.receiver_sub_size = y_ab.size();
    stats_.intersection_sub_size = matched.size();
    stats_.dp_intersection_size = selected.size();
    Message out = Message::IndexSet(std::move(selected));
    stats_.sent_bytes += out.EncodedSize();
    stats_.wall_time_s = clock_.Seconds();
    phase_ = Phase::kDone;
    return out;
  }

 private:
  void RequirePhase(Phase want) const {
    if (phase_ != want) {
      throw ProtocolError(std::string("sender in phase ") + PhaseName(phase_) +
                          ", expected " + PhaseName(want));
    }
  }

  MechanismParams params_;
  Rng rng_;
  std::vector<HashedItem> items_;
  Scalar secret_;
  Phase phase_ = Phase::kSetup;
  SessionStats stats_;
  protocol_detail::Stopwatch clock_;
};

// Holds Y, optional aligned payloads, secret b and the subsampling rate.
template <PrimeOrderGroup G = Ristretto255>
class Receiver {
 public:
  Receiver(const std::vector<std::string>& items,
           std::optional<std::vector<double>> payloads, MechanismParams params,
           Rng rng)
      : params_(params), rng_(std::move(rng)) {
    params_.Validate();
    if (payloads && payloads->size() != items.size()) {
      throw ContractError("payload count " + std::to_string(payloads->size()) +
                          " does not match item count " +
                          std::to_string(items.size()));
    }
    auto [sorted, order] = protocol_detail::HashAndSort<G>(items);
    items_ = std::move(sorted);
    if (payloads) {
      std::vector<double> permuted;
      permuted.reserve(order.size());
      for (auto i : order) permuted.push_back((*payloads)[i]);
      payloads_ = std::move(permuted);
    }
    secret_ = G::GenSecret(rng_);
  }

  Phase phase() const { return phase_; }
  const SessionStats& stats() const { return stats_; }

  // Subsamples Y and emits Y_sub^b in sorted-hash order.
  Message Round1() {
    RequirePhase(Phase::kSetup);
    auto sub = BernoulliSubsample<HashedItem>(items_, params_.p_b, rng_);
    std::vector<GroupElement> points;
    points.reserve(sub.kept.size());
    for (const auto& h : sub.kept) points.push_back(h.point);
    sub_items_.reserve(sub.kept.size());
    for (auto& h : sub.kept) sub_items_.push_back(std::move(h.source));
    if (payloads_) {
      std::vector<double> sub_payloads;
      sub_payloads.reserve(sub.kept_indices.size());
      for (auto i : sub.kept_indices) sub_payloads.push_back((*payloads_)[i]);
      sub_payloads_ = std::move(sub_payloads);
    }
    Message m =
        Message::Elements(MessageType::kYbSub, BatchExp<G>(points, secret_));
    stats_.receiver_sub_size = sub_items_.size();
    stats_.sent_bytes += m.EncodedSize();
    phase_ = Phase::kRound1;
    return m;
  }

  // Re-encrypts X^a with b and shuffles it.
  Message Round2(const Message& x_a) {
    RequirePhase(Phase::kRound1);
    protocol_detail::ExpectType(x_a, MessageType::kXa);
    stats_.received_bytes += x_a.EncodedSize();
    stats_.sender_set_size = x_a.elements.size();
    EncryptedSet xa(Provenance::kXa, x_a.elements);
    auto x_ab = protocol_detail::Reencrypt<G>(xa.elements(), secret_, "X^a");
    auto pi = UniformPermutation(x_ab.size(), rng_);
    Message m = Message::Elements(MessageType::kXabPi, pi.Apply(x_ab));
    stats_.sent_bytes += m.EncodedSize();
    phase_ = Phase::kRound2;
    return m;
  }

  DpIntersection Finish(const Message& index_set) {
    RequirePhase(Phase::kRound2);
    protocol_detail::ExpectType(index_set, MessageType::kIndexSet);
    stats_.received_bytes += index_set.EncodedSize();
    const auto& idx = index_set.indices;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (idx[i] >= sub_items_.size()) {
        phase_ = Phase::kDone;
        throw ProtocolError("index " + std::to_string(idx[i]) +
                            " out of range for |Y_sub| = " +
                            std::to_string(sub_items_.size()));
      }
      if (i > 0 && idx[i] <= idx[i - 1]) {
        phase_ = Phase::kDone;
        throw ProtocolError("index set is not strictly increasing");
      }
    }
    DpIntersection out;
    out.elements.reserve(idx.size());
    for (auto i : idx) out.elements.push_back(sub_items_[i]);
    if (sub_payloads_) {
      double sum = 0.0;
      for (auto i : idx) sum += (*sub_payloads_)[i];
      out.payload_sum = sum;
    }
    stats_.dp_intersection_size = idx.size();
    stats_.wall_time_s = clock_.Seconds();
    out.stats = stats_;
    phase_ = Phase::kDone;
    return out;
  }

  // Plaintext Y_sub in transmission order; valid after Round1.
  const std::vector<std::string>& subsample() const { return sub_items_; }

 private:
  void RequirePhase(Phase want) const {
    if (phase_ != want) {
      throw ProtocolError(std::string("receiver in phase ") +
                          PhaseName(phase_) + ", expected " + PhaseName(want));
    }
  }

  MechanismParams params_;
  Rng rng_;
  std::vector<HashedItem> items_;
  std::optional<std::vector<double>> payloads_;
  std::vector<std::string> sub_items_;
  std::optional<std::vector<double>> sub_payloads_;
  Scalar secret_;
  Phase phase_ = Phase::kSetup;
  SessionStats stats_;
  protocol_detail::Stopwatch clock_;
};

// Plain DH-PSI: the receiver learns X ∩ Y exactly. Runs both parties in
// process; output follows the receiver's input order.
template <PrimeOrderGroup G = Ristretto255>
std::vector<std::string> BaselineDhPsi(const std::vector<std::string>& sender_items,
                                       const std::vector<std::string>& receiver_items,
                                       Rng& rng) {
  auto xs = protocol_detail::HashAndSort<G>(sender_items).first;
  protocol_detail::HashAndSort<G>(receiver_items);  // duplicate check
  const Scalar a = G::GenSecret(rng);
  const Scalar b = G::GenSecret(rng);

  std::vector<GroupElement> hx;
  hx.reserve(xs.size());
  for (const auto& h : xs) hx.push_back(h.point);
  std::vector<GroupElement> hy;
  hy.reserve(receiver_items.size());
  for (const auto& y : receiver_items) hy.push_back(G::HashToGroup(AsBytes(y)));

  // Sender sends X^a; receiver sends Y^b.
  const auto x_a = BatchExp<G>(hx, a);
  const auto y_b = BatchExp<G>(hy, b);
  // Sender returns (Y^b)^a in order; receiver computes (X^a)^b.
  const auto y_ab = BatchExp<G>(y_b, a);
  const auto x_ab = BatchExp<G>(x_a, b);

  std::unordered_set<GroupElement, GroupElementHash> lookup(x_ab.begin(),
                                                            x_ab.end());
  std::vector<std::string> out;
  for (std::size_t i = 0; i < receiver_items.size(); ++i) {
    if (lookup.contains(y_ab[i])) out.push_back(receiver_items[i]);
  }
  return out;
}

}  // namespace dppsi
