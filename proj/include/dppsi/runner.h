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

#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "dppsi/accountant.h"
#include "dppsi/error.h"
#include "dppsi/mechanisms.h"
#include "dppsi/protocol.h"
#include "dppsi/random.h"
#include "dppsi/synthetic.h"
#include "dppsi/transport.h"

namespace dppsi {

// Stream ids for the two parties when a run is seeded.
inline constexpr std::uint64_t kSenderStream = 1;
inline constexpr std::uint64_t kReceiverStream = 2;

struct RunConfig {
  std::string input_path;
  std::optional<std::string> payload_path;
  // eps_a = +inf selects the noiseless (p_A, q) = (1, 0).
  double eps_a = 3.0;
  double delta_b = 1e-10;
  double p_b = 0.9;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> listen;
  std::optional<std::string> connect;

  void Validate() const {
    if (!(eps_a > 0.0)) throw DomainError("eps_A must be > 0");
    if (!(delta_b > 0.0 && delta_b < 1.0)) {
      throw DomainError("delta_B must lie in (0, 1)");
    }
    CheckSubsampleProbability(p_b);
  }

  MechanismParams Params() const {
    Validate();
    auto [p_a, q] = accountant::OptimalPq(eps_a);
    MechanismParams p{p_b, p_a, q};
    p.Validate();
    return p;
  }

  Rng PartyRng(Role role) const {
    if (!seed) return Rng::Secure();
    return Rng::Seeded(*seed, role == Role::kSender ? kSenderStream : kReceiverStream);
  }
};

// One row of a benchmark table.
struct BenchRecord {
  int k = 0;  // log2 of the input size, 0 when not a power of two
  std::size_t n = 0;
  double runtime_seconds = 0.0;
  double comm_megabytes = 0.0;
  double eps_a = 0.0;
  double p_b = 0.0;
  double recall_observed = std::numeric_limits<double>::quiet_NaN();
  double precision_observed = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t transcript_bytes = 0;
  std::size_t sender_size = 0;
  std::size_t receiver_sub_size = 0;
  std::size_t intersection_sub_size = 0;
  std::size_t dp_intersection_size = 0;
};

inline constexpr double kBytesPerMegabyte = 1024.0 * 1024.0;

inline std::string BenchCsvHeader() { return "k,runtime_s,comm_MB,recall,precision\n"; }

inline std::string BenchCsvRow(const BenchRecord& r) {
  std::ostringstream os;
  os.precision(6);
  os << r.k << ',' << r.runtime_seconds << ',' << r.comm_megabytes << ','
     << r.recall_observed << ',' << r.precision_observed << '\n';
  return os.str();
}

inline std::string BenchCsv(const std::vector<BenchRecord>& records) {
  std::string out = BenchCsvHeader();
  for (const auto& r : records) out += BenchCsvRow(r);
  return out;
}

struct LocalRunResult {
  DpIntersection result;
  SessionStats sender_stats;
  BenchRecord record;
  std::vector<FrameRecord> transcript;  // as seen by the receiver
};

namespace runner_detail {

inline int Log2Exact(std::size_t n) {
  if (n == 0 || (n & (n - 1)) != 0) return 0;
  int k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  return k;
}

// Recall and precision against ground truth known to a local harness.
inline void FillQuality(BenchRecord& rec, const DpIntersection& out,
                        const std::vector<std::string>& sender_items,
                        std::size_t intersection_sub_size) {
  std::unordered_set<std::string> x(sender_items.begin(), sender_items.end());
  std::size_t true_positives = 0;
  for (const auto& e : out.elements) true_positives += x.contains(e);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  rec.recall_observed = intersection_sub_size
                            ? static_cast<double>(true_positives) / intersection_sub_size
                            : nan;
  rec.precision_observed =
      out.elements.empty() ? nan
                           : static_cast<double>(true_positives) / out.elements.size();
}

}  // namespace runner_detail

// Full protocol over an in-process duplex channel; sender on a worker
// thread, receiver on the calling thread.
template <PrimeOrderGroup G = Ristretto255>
LocalRunResult RunLocal(const RunConfig& cfg,
                        const std::vector<std::string>& sender_items,
                        const std::vector<std::string>& receiver_items,
                        std::optional<std::vector<double>> payloads = {}) {
  const MechanismParams params = cfg.Params();
  auto [sender_end, receiver_end] = InProcessChannel::MakePair();

  const auto start = std::chrono::steady_clock::now();
  SessionStats sender_stats;
  std::exception_ptr sender_error;
  std::thread sender_thread([&, ch = sender_end.get()] {
    try {
      sender_stats = RunSenderSession<G>(*ch, sender_items, params,
                                         cfg.PartyRng(Role::kSender));
    } catch (...) {
      sender_error = std::current_exception();
      ch->Close();
    }
  });

  LocalRunResult out;
  std::exception_ptr receiver_error;
  try {
    out.result = RunReceiverSession<G>(*receiver_end, receiver_items,
                                       std::move(payloads), params,
                                       cfg.PartyRng(Role::kReceiver));
  } catch (...) {
    receiver_error = std::current_exception();
    receiver_end->Close();
  }
  sender_thread.join();
  const double elapsed = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
  if (sender_error) std::rethrow_exception(sender_error);
  if (receiver_error) std::rethrow_exception(receiver_error);

  out.sender_stats = sender_stats;
  out.transcript = receiver_end->log();

  BenchRecord& rec = out.record;
  rec.n = std::max(sender_items.size(), receiver_items.size());
  rec.k = runner_detail::Log2Exact(rec.n);
  rec.runtime_seconds = elapsed;
  rec.transcript_bytes = receiver_end->bytes_sent() + receiver_end->bytes_received();
  rec.comm_megabytes = static_cast<double>(rec.transcript_bytes) / kBytesPerMegabyte;
  rec.eps_a = cfg.eps_a;
  rec.p_b = cfg.p_b;
  rec.sender_size = sender_items.size();
  rec.receiver_sub_size = out.result.stats.receiver_sub_size;
  rec.intersection_sub_size = sender_stats.intersection_sub_size;
  rec.dp_intersection_size = out.result.elements.size();
  runner_detail::FillQuality(rec, out.result, sender_items,
                             sender_stats.intersection_sub_size);
  return out;
}

struct NetworkedResult {
  // Empty for the sender, whose functionality output is the empty set.
  std::optional<DpIntersection> result;
  SessionStats stats;
  BenchRecord record;
  std::vector<FrameRecord> transcript;
};

// Runs one party over TCP. Exactly one of cfg.listen / cfg.connect is used.
template <PrimeOrderGroup G = Ristretto255>
NetworkedResult RunNetworked(const RunConfig& cfg, Role role,
                             const std::vector<std::string>& items,
                             std::optional<std::vector<double>> payloads = {}) {
  const MechanismParams params = cfg.Params();
  if (cfg.listen.has_value() == cfg.connect.has_value()) {
    throw DomainError("exactly one of listen / connect must be set");
  }
  std::unique_ptr<Channel> ch;
  if (cfg.listen) {
    TcpListener listener(Endpoint::Parse(*cfg.listen));
    ch = listener.Accept();
  } else {
    ch = TcpChannel::Connect(Endpoint::Parse(*cfg.connect));
  }

  const auto start = std::chrono::steady_clock::now();
  NetworkedResult out;
  if (role == Role::kSender) {
    out.stats = RunSenderSession<G>(*ch, items, params, cfg.PartyRng(role));
  } else {
    out.result = RunReceiverSession<G>(*ch, items, std::move(payloads), params,
                                       cfg.PartyRng(role));
    out.stats = out.result->stats;
  }
  const double elapsed = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
  out.transcript = ch->log();
  BenchRecord& rec = out.record;
  rec.n = items.size();
  rec.k = runner_detail::Log2Exact(rec.n);
  rec.runtime_seconds = elapsed;
  rec.transcript_bytes = ch->bytes_sent() + ch->bytes_received();
  rec.comm_megabytes = static_cast<double>(rec.transcript_bytes) / kBytesPerMegabyte;
  rec.eps_a = cfg.eps_a;
  rec.p_b = cfg.p_b;
  rec.sender_size = out.stats.sender_set_size;
  rec.receiver_sub_size = out.stats.receiver_sub_size;
  rec.intersection_sub_size = out.stats.intersection_sub_size;
  rec.dp_intersection_size = out.stats.dp_intersection_size;
  ch->Close();
  return out;
}

struct BenchConfig {
  double eps_a = 3.0;
  double p_b = 0.9;
  double overlap = 0.7;
  std::optional<std::uint64_t> seed;
  // Runtime is the minimum over this many repetitions for inputs up to
  // 2^repeat_max_k, and a single run above.
  int repetitions = 3;
  int repeat_max_k = 14;
};

// One synthetic local run per k in [k_min, k_max], sizes 2^k on both sides.
template <PrimeOrderGroup G = Ristretto255>
std::vector<BenchRecord> BenchSweep(int k_min, int k_max, const BenchConfig& bc) {
  if (k_min < 1 || k_max < k_min || k_max > 28) {
    throw DomainError("bench range must satisfy 1 <= k_min <= k_max <= 28");
  }
  RunConfig cfg;
  cfg.eps_a = bc.eps_a;
  cfg.p_b = bc.p_b;
  std::vector<BenchRecord> records;
  for (int k = k_min; k <= k_max; ++k) {
    const std::size_t n = std::size_t{1} << k;
    auto sets = MakeSyntheticSets(n, bc.overlap, static_cast<std::uint64_t>(k));
    const int reps = k <= bc.repeat_max_k ? std::max(1, bc.repetitions) : 1;
    std::optional<BenchRecord> best;
    for (int r = 0; r < reps; ++r) {
      if (bc.seed) cfg.seed = *bc.seed + static_cast<std::uint64_t>(k) * 1000 + r;
      auto run = RunLocal<G>(cfg, sets.sender, sets.receiver);
      if (!best || run.record.runtime_seconds < best->runtime_seconds) {
        best = run.record;
      }
    }
    records.push_back(*best);
  }
  return records;
}

}  // namespace dppsi
