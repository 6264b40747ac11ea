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

// dppsi: command-line front end for the DP-PSI protocol.
//
//   dppsi plan         privacy accountant report
//   dppsi local        both parties in one process
//   dppsi run-sender   sender side over TCP
//   dppsi run-receiver receiver side over TCP
//   dppsi bench        synthetic scaling sweep, CSV output
//
// DPPSI_LOG_LEVEL (trace, debug, info, warn, error, off) sets log verbosity.

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "dppsi/dppsi.h"

namespace {

using dppsi::RunConfig;

struct PartyOptions {
  std::string input;
  std::string payloads;
  std::string listen;
  std::string connect;
  std::string out;
  double eps_a = 3.0;
  double delta_b = 1e-10;
  double p_b = 0.9;
  std::optional<std::uint64_t> seed;
};

void AddPrivacyFlags(CLI::App* cmd, PartyOptions& o) {
  cmd->add_option("--eps-a", o.eps_a, "sender-side epsilon; 'inf' disables randomized response")
      ->capture_default_str();
  cmd->add_option("--delta-b", o.delta_b, "receiver-side delta")->capture_default_str();
  cmd->add_option("--p-b", o.p_b, "receiver subsampling rate in [0.5, 1]")->capture_default_str();
  cmd->add_option("--seed", o.seed, "deterministic run (testing and benchmarks only)");
}

RunConfig ToConfig(const PartyOptions& o) {
  RunConfig cfg;
  cfg.input_path = o.input;
  if (!o.payloads.empty()) cfg.payload_path = o.payloads;
  cfg.eps_a = o.eps_a;
  cfg.delta_b = o.delta_b;
  cfg.p_b = o.p_b;
  cfg.seed = o.seed;
  if (!o.listen.empty()) cfg.listen = o.listen;
  if (!o.connect.empty()) cfg.connect = o.connect;
  cfg.Validate();
  return cfg;
}

dppsi::io::LoadedItems Load(const std::string& path, const std::string& payloads = {}) {
  std::optional<std::string> pp;
  if (!payloads.empty()) pp = payloads;
  auto loaded = dppsi::io::LoadItems(path, pp);
  if (loaded.duplicates) {
    spdlog::warn("{}: dropped {} duplicate item(s)", path, loaded.duplicates);
  }
  if (loaded.blank_lines) {
    spdlog::warn("{}: skipped {} blank line(s)", path, loaded.blank_lines);
  }
  spdlog::info("{}: {} item(s)", path, loaded.items.size());
  return loaded;
}

// Writes to `path`, or stdout when empty.
void Emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << text;
  if (!f) throw dppsi::io::IoError("cannot write " + path);
}

std::string ResultText(const dppsi::DpIntersection& r) {
  std::string text;
  for (const auto& e : r.elements) text += e + '\n';
  return text;
}

void LogStats(const char* who, const dppsi::BenchRecord& rec) {
  spdlog::info("{}: |X|={} |Y_sub|={} |I_dp|={} bytes={} time={:.3f}s", who,
               rec.sender_size, rec.receiver_sub_size, rec.dp_intersection_size,
               rec.transcript_bytes, rec.runtime_seconds);
}

void ReportReceiver(const dppsi::DpIntersection& r, const std::string& out) {
  Emit(out, ResultText(r));
  if (r.payload_sum) {
    spdlog::info("payload sum over DP intersection: {}", *r.payload_sum);
    if (!out.empty()) std::cout << "payload_sum=" << *r.payload_sum << '\n';
  }
  if (!out.empty()) std::cout << "dp_intersection_size=" << r.elements.size() << '\n';
}

void ConfigureLogging() {
  spdlog::set_default_logger(spdlog::stderr_color_mt("dppsi"));
  spdlog::set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("DPPSI_LOG_LEVEL")) {
    spdlog::set_level(spdlog::level::from_str(env));
  }
}

}  // namespace

int main(int argc, char** argv) {
  ConfigureLogging();
  CLI::App app{"Differentially private set intersection over DH-PSI"};
  app.require_subcommand(1);

  // plan
  dppsi::accountant::PlanInput plan_in;
  bool plan_json = false;
  std::string plan_out;
  auto* plan = app.add_subcommand("plan", "privacy accountant report");
  plan->add_option("--eps-a", plan_in.eps_a, "sender-side epsilon")->capture_default_str();
  plan->add_option("--delta-b", plan_in.delta_b, "receiver-side delta")->capture_default_str();
  plan->add_option("--p-b", plan_in.p_b, "receiver subsampling rate")->capture_default_str();
  plan->add_option("--intersection-size", plan_in.intersection_size,
                   "|I|, for the realized receiver epsilon");
  plan->add_option("--intersection-sub-size", plan_in.intersection_sub_size,
                   "|I_sub|, for predicted precision");
  plan->add_option("--complement-size", plan_in.complement_size,
                   "|Y_sub \\ X|, for predicted precision");
  plan->add_flag("--json", plan_json, "JSON instead of key=value lines");
  plan->add_option("--out", plan_out, "output file (default stdout)");

  // local
  PartyOptions local_opts;
  std::string local_sender_input;
  int local_k = 0;
  double local_overlap = 0.7;
  auto* local = app.add_subcommand("local", "run both parties in process");
  local->add_option("--input", local_opts.input, "receiver item file");
  local->add_option("--sender-input", local_sender_input, "sender item file");
  local->add_option("--payloads", local_opts.payloads, "receiver payload file, one number per line");
  local->add_option("--k", local_k, "synthetic sets of size 2^k instead of files")
      ->check(CLI::Range(1, 24));
  local->add_option("--overlap", local_overlap, "synthetic overlap ratio")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  local->add_option("--out", local_opts.out, "file for the DP intersection (default stdout)");
  AddPrivacyFlags(local, local_opts);

  // run-sender / run-receiver
  PartyOptions sender_opts;
  auto* run_sender = app.add_subcommand("run-sender", "sender side over TCP");
  run_sender->add_option("--input", sender_opts.input, "item file")->required();
  auto* s_listen = run_sender->add_option("--listen", sender_opts.listen, "host:port to accept on");
  auto* s_connect =
      run_sender->add_option("--connect", sender_opts.connect, "host:port to connect to");
  s_listen->excludes(s_connect);
  run_sender->add_option("--out", sender_opts.out, "file for the session statistics (JSON)");
  AddPrivacyFlags(run_sender, sender_opts);

  PartyOptions receiver_opts;
  auto* run_receiver = app.add_subcommand("run-receiver", "receiver side over TCP");
  run_receiver->add_option("--input", receiver_opts.input, "item file")->required();
  run_receiver->add_option("--payloads", receiver_opts.payloads,
                           "payload file, one number per line");
  auto* r_listen =
      run_receiver->add_option("--listen", receiver_opts.listen, "host:port to accept on");
  auto* r_connect =
      run_receiver->add_option("--connect", receiver_opts.connect, "host:port to connect to");
  r_listen->excludes(r_connect);
  run_receiver->add_option("--out", receiver_opts.out,
                           "file for the DP intersection (default stdout)");
  AddPrivacyFlags(run_receiver, receiver_opts);

  // bench
  PartyOptions bench_opts;
  int kmin = 10, kmax = 17;
  dppsi::BenchConfig bench_cfg;
  auto* bench = app.add_subcommand("bench", "synthetic scaling sweep");
  bench->add_option("--bench-kmin", kmin, "smallest log2 set size")->capture_default_str();
  bench->add_option("--bench-kmax", kmax, "largest log2 set size")->capture_default_str();
  bench->add_option("--overlap", bench_cfg.overlap, "planted overlap ratio")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  bench->add_option("--reps", bench_cfg.repetitions, "repetitions for small k (min runtime kept)")
      ->capture_default_str();
  bench->add_option("--out", bench_opts.out, "CSV file (default stdout)");
  AddPrivacyFlags(bench, bench_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*plan) {
      auto report = dppsi::accountant::Plan(plan_in);
      Emit(plan_out, plan_json ? report.ToJson().dump(2) + "\n" : report.ToText());
      if (!report.region_ok) spdlog::warn("(p_A, q) outside the eps_A-DP region");
    } else if (*local) {
      RunConfig cfg = ToConfig(local_opts);
      std::vector<std::string> x, y;
      std::optional<std::vector<double>> payloads;
      if (local_k > 0) {
        if (!local_opts.input.empty() || !local_sender_input.empty()) {
          throw dppsi::DomainError("--k excludes --input / --sender-input");
        }
        auto sets = dppsi::MakeSyntheticSets(std::size_t{1} << local_k, local_overlap);
        x = std::move(sets.sender);
        y = std::move(sets.receiver);
      } else {
        if (local_opts.input.empty() || local_sender_input.empty()) {
          throw dppsi::DomainError("local needs --input and --sender-input, or --k");
        }
        x = Load(local_sender_input).items;
        auto ly = Load(local_opts.input, local_opts.payloads);
        y = std::move(ly.items);
        payloads = std::move(ly.payloads);
      }
      auto run = dppsi::RunLocal(cfg, x, y, std::move(payloads));
      LogStats("local", run.record);
      ReportReceiver(run.result, local_opts.out);
    } else if (*run_sender) {
      RunConfig cfg = ToConfig(sender_opts);
      auto items = Load(sender_opts.input).items;
      auto res = dppsi::RunNetworked(cfg, dppsi::Role::kSender, items);
      LogStats("sender", res.record);
      if (!sender_opts.out.empty()) {
        nlohmann::ordered_json j;
        j["sender_set_size"] = res.stats.sender_set_size;
        j["receiver_sub_size"] = res.stats.receiver_sub_size;
        j["dp_intersection_size"] = res.stats.dp_intersection_size;
        j["transcript_bytes"] = res.record.transcript_bytes;
        j["runtime_s"] = res.record.runtime_seconds;
        Emit(sender_opts.out, j.dump(2) + "\n");
      }
    } else if (*run_receiver) {
      RunConfig cfg = ToConfig(receiver_opts);
      auto loaded = Load(receiver_opts.input, receiver_opts.payloads);
      auto res = dppsi::RunNetworked(cfg, dppsi::Role::kReceiver, loaded.items,
                                     std::move(loaded.payloads));
      LogStats("receiver", res.record);
      ReportReceiver(*res.result, receiver_opts.out);
    } else if (*bench) {
      bench_cfg.eps_a = bench_opts.eps_a;
      bench_cfg.p_b = bench_opts.p_b;
      bench_cfg.seed = bench_opts.seed;
      ToConfig(bench_opts);
      auto records = dppsi::BenchSweep(kmin, kmax, bench_cfg);
      for (const auto& r : records) LogStats(("k=" + std::to_string(r.k)).c_str(), r);
      Emit(bench_opts.out, dppsi::BenchCsv(records));
    }
  } catch (const dppsi::Error& e) {
    spdlog::error("{}", e.what());
    std::cerr << "dppsi: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
