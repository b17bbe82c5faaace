// Copyright 2026 The Millforge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// millforge: verification sweeps, benchmarks, reuse-plan audits and cost
// estimates for the two-party comparison engine.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "millforge/millforge.hpp"

namespace {

using namespace millforge;
using Json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

struct Options {
  std::string variant = "both";
  bool interleaved = false;
  unsigned bits = 32;
  unsigned chunk = 4;
  std::string op = "millionaire";
  std::size_t count = 0;  // 0: command default
  std::string network = "all";
  std::string seed;
  std::string out = "json";
  unsigned parallel = 1;
  bool lockstep = false;
  bool no_timing = false;
  bool inject_fault = false;
  std::string profile = "desk-cpu";
  std::string matrix_file;
  std::size_t compare_n = 0;
  double blocks = 1e5;
  unsigned tami_seeds = 256;
};

std::uint64_t resolve_seed(const std::string& flag) {
  std::string text = flag;
  if (text.empty()) {
    const char* env = std::getenv("MILLFORGE_SEED");
    if (!env || !*env) return kDefaultSeed;
    text = env;
  }
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(text, &used, 0);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) throw ConfigError("seed '" + text + "' is not an integer");
  return v;
}

std::vector<Variant> variants(const Options& o) {
  if (o.variant == "baseline") return {Variant::Baseline};
  if (o.variant == "tami") return {Variant::Tami};
  return {Variant::Baseline, Variant::Tami};
}

Operation operation(const Options& o) {
  if (o.op == "drelu") return Operation::Drelu;
  if (o.op == "relu") return Operation::Relu;
  return Operation::Millionaire;
}

std::vector<NetworkPreset> presets(const Options& o) {
  if (o.network == "lan") return {NetworkPreset::lan()};
  if (o.network == "wan") return {NetworkPreset::wan()};
  if (o.network == "mobile") return {NetworkPreset::mobile()};
  const auto all = NetworkPreset::all();
  return {all.begin(), all.end()};
}

BatchOptions batch_options(const Options& o, Variant v) {
  BatchOptions b;
  b.op = operation(o);
  b.cfg.bits = o.bits;
  b.cfg.chunk = o.chunk;
  b.cfg.variant = v;
  b.cfg.interleaved = v == Variant::Tami && o.interleaved;
  b.seed = resolve_seed(o.seed);
  b.schedule = o.lockstep ? Schedule::Lockstep : Schedule::Threaded;
  b.parallel = o.parallel;
  b.inject_fault = o.inject_fault;
  b.profile = compute_profile_by_name(o.profile);
  b.presets = presets(o);
  return b;
}

std::string fixed(double v, int digits = 3) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// verify

int cmd_verify(const Options& o) {
  const bool exhaustive = o.bits <= 10 && o.count == 0;
  Json runs = Json::array();
  bool passed = true;
  for (Variant v : variants(o)) {
    BatchOptions b = batch_options(o, v);
    b.cfg.validate();
    Json run{{"variant", to_string(v)},
             {"op", to_string(b.op)},
             {"bits", b.cfg.bits},
             {"chunk", b.cfg.chunk},
             {"interleaved", b.cfg.interleaved},
             {"mode", exhaustive ? "exhaustive" : "random"}};
    std::size_t items = 0, correct = 0;
    Json failure;
    if (exhaustive) {
      b.inputs = InputMode::Exhaustive;
      b.parallel = 1;
      b.count = exhaustive_count(b.cfg);
      const unsigned sessions = v == Variant::Tami ? o.tami_seeds : 1;
      for (unsigned k = 0; k < sessions; ++k) {
        b.session_id = k;
        const auto r = run_batch(b);
        items += r.count;
        correct += r.correct_count;
        if (!r.correct() && failure.is_null()) failure = r.to_json(false)["counterexample"];
      }
      run["sessions"] = sessions;
    } else {
      b.count = o.count ? o.count : 10000;
      const auto r = run_batch(b);
      items = r.count;
      correct = r.correct_count;
      if (!r.correct()) failure = r.to_json(false)["counterexample"];
      run["sessions"] = r.sessions;
    }
    run["items"] = items;
    run["correct_count"] = correct;
    run["passed"] = items == correct;
    if (!failure.is_null()) run["counterexample"] = failure;
    passed = passed && items == correct;
    runs.push_back(std::move(run));
  }
  Json j{{"command", "verify"}, {"seed", resolve_seed(o.seed)}, {"passed", passed}, {"runs", runs}};
  if (o.out == "json") {
    std::cout << j.dump(2) << "\n";
  } else {
    const bool csv = o.out == "csv";
    if (csv) std::cout << "variant,op,bits,chunk,mode,items,correct_count,passed\n";
    for (const auto& r : runs) {
      const char sep = csv ? ',' : ' ';
      std::cout << r["variant"].get<std::string>() << sep << r["op"].get<std::string>() << sep
                << r["bits"] << sep << r["chunk"] << sep << r["mode"].get<std::string>() << sep
                << r["items"] << sep << r["correct_count"] << sep
                << (r["passed"].get<bool>() ? (csv ? "1" : "PASS") : (csv ? "0" : "FAIL")) << "\n";
    }
  }
  return passed ? kExitOk : kExitFailed;
}

// ---------------------------------------------------------------------------
// bench

void print_report_table(const ProtocolReport& r) {
  std::cout << to_string(r.op) << " " << to_string(r.variant) << (r.interleaved ? " interleaved" : "")
            << "  l=" << r.bits << " q=" << r.chunk << " n=" << r.chunks << " count=" << r.count
            << (r.correct() ? "  correct" : "  INCORRECT") << "\n";
  std::cout << "  rounds " << r.stats.rounds << " (pipelined " << r.rounds_pipelined << ")"
            << "  bytes s->r " << r.stats.bytes_s2r << "  r->s " << r.stats.bytes_r2s
            << "  offline bits " << r.offline_bits << "\n";
  for (const auto& p : r.phases) {
    std::cout << "  phase " << std::left << std::setw(10) << p.name << std::right << " rounds "
              << p.rounds << "  bits s->r " << p.bits_s2r << "  r->s " << p.bits_r2s << "\n";
  }
  for (const auto& p : r.presets) {
    std::cout << "  " << std::left << std::setw(7) << p.preset << std::right << " network "
              << fixed(p.simulated_ms) << " ms  estimate " << fixed(p.total_ms) << " ms\n";
  }
  for (const auto& n : r.discrepancy_notes) std::cout << "  note: " << n << "\n";
}

int cmd_bench(const Options& o) {
  std::vector<ProtocolReport> reports;
  for (Variant v : variants(o)) {
    BatchOptions b = batch_options(o, v);
    b.count = o.count ? o.count : 1000;
    reports.push_back(run_batch(b));
  }
  if (o.out == "json") {
    Json arr = Json::array();
    for (const auto& r : reports) arr.push_back(r.to_json(!o.no_timing));
    Json j{{"command", "bench"}, {"reports", arr}};
    if (reports.size() == 2) {
      Json ratios = Json::object();
      for (std::size_t i = 0; i < reports[0].presets.size(); ++i) {
        const auto& b = reports[0].presets[i];
        const auto& t = reports[1].presets[i];
        ratios[b.preset] = {{"simulated", b.simulated_ms / t.simulated_ms},
                            {"estimate", b.total_ms / t.total_ms}};
      }
      j["baseline_over_tami"] = ratios;
    }
    std::cout << j.dump(2) << "\n";
  } else if (o.out == "csv") {
    std::cout << csv_header() << "\n";
    for (const auto& r : reports) {
      for (const auto& row : csv_rows(r)) std::cout << row << "\n";
    }
  } else {
    for (const auto& r : reports) print_report_table(r);
  }
  bool ok = true;
  for (const auto& r : reports) ok = ok && r.correct();
  return ok ? kExitOk : kExitFailed;
}

// ---------------------------------------------------------------------------
// plan-reuse

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open matrix file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int cmd_plan_reuse(const Options& o) {
  if (o.compare_n == 0 && o.matrix_file.empty()) {
    throw ConfigError("plan-reuse needs a matrix file or --compare-n");
  }
  if (o.compare_n != 0 && !o.matrix_file.empty()) {
    throw ConfigError("give either a matrix file or --compare-n, not both");
  }
  const ExponentMatrix e = o.compare_n ? comparison_merge_matrix(o.compare_n)
                                       : ExponentMatrix::parse(read_file(o.matrix_file));
  const auto naive = n_naive(e);
  const auto opt = n_opt(e);
  const auto fin = n_final(e);
  const auto plan = build_reuse_plan(e);
  std::string oracle = "skipped";
  std::uint64_t brute = 0;
  if (e.cols() <= 20) {
    brute = brute_force_count(e);
    oracle = brute == fin.total && plan.size() == fin.total ? "match" : "mismatch";
  }
  if (o.out == "json") {
    Json j{{"command", "plan-reuse"},
           {"rows", e.rows()},
           {"cols", e.cols()},
           {"n_naive", naive},
           {"n_opt", opt},
           {"n_final", {{"per_row", fin.per_row}, {"total", fin.total}}},
           {"oracle", oracle}};
    if (oracle != "skipped") j["brute_force"] = brute;
    j["plan"] = plan.to_json();
    std::cout << j.dump(2) << "\n";
  } else if (o.out == "csv") {
    std::cout << "rows,cols,n_naive,n_opt,n_final,oracle\n"
              << e.rows() << ',' << e.cols() << ',' << naive << ',' << opt << ',' << fin.total
              << ',' << oracle << "\n";
  } else {
    std::cout << "matrix " << e.rows() << "x" << e.cols() << "\n"
              << "N_naive " << naive << "\nN_opt   " << opt << "\nN_final " << fin.total << " (";
    for (std::size_t i = 0; i < fin.per_row.size(); ++i) {
      std::cout << (i ? " " : "") << fin.per_row[i];
    }
    std::cout << ")\noracle=" << oracle << "\nplan:\n";
    for (std::size_t i = 0; i < plan.size(); ++i) {
      std::cout << "  " << i << ": {";
      const auto idx = mask_indices(plan.subsets()[i]);
      for (std::size_t k = 0; k < idx.size(); ++k) std::cout << (k ? "," : "") << idx[k];
      std::cout << "}\n";
    }
  }
  return oracle == "mismatch" ? kExitFailed : kExitOk;
}

// ---------------------------------------------------------------------------
// estimate

int cmd_estimate(const Options& o) {
  const auto cpu = crh_cpu_cost(o.blocks);
  const auto pipe = crh_pipelined_cost(o.blocks);
  std::vector<ProtocolReport> reports;
  for (Variant v : variants(o)) {
    BatchOptions b = batch_options(o, v);
    b.count = o.count ? o.count : 1000;
    reports.push_back(run_batch(b));
  }
  Json est = Json::array();
  for (const auto& r : reports) {
    for (const auto& profile : ComputeProfile::all()) {
      for (const auto& preset : presets(o)) {
        const auto e = estimate_end_to_end(r, profile, preset);
        est.push_back({{"variant", to_string(r.variant)},
                       {"profile", profile.name},
                       {"preset", preset.name},
                       {"compute_sender_ms", e.compute_sender_s * 1e3},
                       {"compute_receiver_ms", e.compute_receiver_s * 1e3},
                       {"network_ms", e.network_s * 1e3},
                       {"total_ms", e.total_s * 1e3}});
      }
    }
  }
  if (o.out == "json") {
    Json j{{"command", "estimate"},
           {"crh",
            {{"blocks", o.blocks},
             {"cpu", {{"cycles", cpu.cycles}, {"transfers", cpu.transfers}}},
             {"pipelined", {{"cycles", pipe.cycles}, {"transfers", pipe.transfers}}},
             {"cycle_ratio", cpu.cycles / pipe.cycles},
             {"transfer_ratio", cpu.transfers / pipe.transfers}}},
           {"op", to_string(operation(o))},
           {"count", reports.front().count},
           {"estimates", est}};
    std::cout << j.dump(2) << "\n";
  } else if (o.out == "csv") {
    std::cout << "variant,profile,preset,compute_sender_ms,compute_receiver_ms,network_ms,total_ms\n";
    for (const auto& e : est) {
      std::cout << e["variant"].get<std::string>() << ',' << e["profile"].get<std::string>() << ','
                << e["preset"].get<std::string>() << ',' << e["compute_sender_ms"].dump() << ','
                << e["compute_receiver_ms"].dump() << ',' << e["network_ms"].dump() << ','
                << e["total_ms"].dump() << "\n";
    }
  } else {
    std::cout << "CRH over " << o.blocks << " blocks\n"
              << "  cpu        cycles " << cpu.cycles << "  transfers " << cpu.transfers << "\n"
              << "  pipelined  cycles " << pipe.cycles << "  transfers " << pipe.transfers << "\n"
              << "  ratios     cycles " << fixed(cpu.cycles / pipe.cycles) << "  transfers "
              << fixed(cpu.transfers / pipe.transfers) << "\n";
    for (const auto& e : est) {
      std::cout << "  " << std::left << std::setw(9) << e["variant"].get<std::string>()
                << std::setw(19) << e["profile"].get<std::string>() << std::setw(7)
                << e["preset"].get<std::string>() << std::right << " total "
                << fixed(e["total_ms"].get<double>()) << " ms\n";
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Two-party secure comparison engine: baseline and tape-assisted protocols"};
  app.require_subcommand(1);

  auto common = [&o](CLI::App* sub, bool protocol) {
    sub->add_option("--out", o.out, "Output format")
        ->check(CLI::IsMember({"json", "csv", "table"}));
    if (!protocol) return;
    sub->add_option("--variant", o.variant, "Protocol variant")
        ->check(CLI::IsMember({"baseline", "tami", "both"}));
    sub->add_flag("--interleaved", o.interleaved, "Receiver-only merge openings (tami)");
    sub->add_option("--bits", o.bits, "Ring width l")->check(CLI::Range(1, 64));
    sub->add_option("--chunk", o.chunk, "Leaf chunk width q")->check(CLI::Range(1, 8));
    sub->add_option("--op", o.op, "Operation")
        ->check(CLI::IsMember({"millionaire", "drelu", "relu"}));
    sub->add_option("--count", o.count, "Items per run");
    sub->add_option("--network", o.network, "Network preset")
        ->check(CLI::IsMember({"lan", "wan", "mobile", "all"}));
    sub->add_option("--seed", o.seed, "Session seed (default: MILLFORGE_SEED or built-in)");
    sub->add_option("--parallel", o.parallel, "Independent concurrent sessions")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--lockstep", o.lockstep, "Single-threaded deterministic scheduler");
    sub->add_option("--profile", o.profile, "Compute profile for estimates")
        ->check(CLI::IsMember({"desk-cpu", "constrained-client", "fpga-pipelined"}));
  };

  auto* verify = app.add_subcommand("verify", "Check protocol outputs against plaintext");
  common(verify, true);
  verify->add_flag("--inject-fault", o.inject_fault, "Corrupt one tape pad (negative control)");
  verify->add_option("--tami-seeds", o.tami_seeds, "Tape seeds per exhaustive tami sweep")
      ->check(CLI::PositiveNumber);

  auto* bench = app.add_subcommand("bench", "Measure rounds, bytes and modeled time");
  common(bench, true);
  bench->add_flag("--no-timing", o.no_timing, "Omit measured CPU time from JSON");

  auto* plan = app.add_subcommand("plan-reuse", "Correlated-randomness counts and reuse plan");
  common(plan, false);
  plan->add_option("matrix", o.matrix_file, "Exponent matrix file");
  plan->add_option("--compare-n", o.compare_n, "Use the n-chunk comparison merge matrix")
      ->check(CLI::Range(1, 32));

  auto* estimate = app.add_subcommand("estimate", "CRH cost model and end-to-end estimates");
  common(estimate, true);
  estimate->add_option("--blocks", o.blocks, "CRH block count")->check(CLI::Range(1.0, 1e15));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*verify) return cmd_verify(o);
    if (*bench) return cmd_bench(o);
    if (*plan) return cmd_plan_reuse(o);
    return cmd_estimate(o);
  } catch (const ParseError& e) {
    std::cerr << "error: " << (o.matrix_file.empty() ? "" : o.matrix_file + ": ") << e.what()
              << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailed;
  }
}
