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

#pragma once

// Per-run protocol report: configuration, correctness, measured rounds and
// traffic, per-phase breakdown, modeled time, and the places where measured
// costs differ from the published complexity formulas.

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "millforge/leaf.hpp"
#include "millforge/transport.hpp"

namespace millforge {

enum class Variant { Baseline, Tami };

inline const char* to_string(Variant v) noexcept {
  return v == Variant::Baseline ? "baseline" : "tami";
}

enum class Operation { Millionaire, Drelu, Relu };

inline const char* to_string(Operation op) noexcept {
  switch (op) {
    case Operation::Millionaire: return "millionaire";
    case Operation::Drelu: return "drelu";
    case Operation::Relu: return "relu";
  }
  return "unknown";
}

struct PhaseStats {
  std::string name;
  std::uint64_t rounds = 0;
  std::uint64_t bits_s2r = 0;
  std::uint64_t bits_r2s = 0;
  std::uint64_t bytes = 0;
  std::uint64_t messages = 0;

  friend bool operator==(const PhaseStats&, const PhaseStats&) = default;
};

struct PhaseSpec {
  const char* name;
  std::vector<FrameTag> tags;
};

inline const std::vector<PhaseSpec>& protocol_phases() {
  static const std::vector<PhaseSpec> phases{
      {"leaf", {FrameTag::LeafTmp, FrameTag::LeafMsgs}},
      {"merge", {FrameTag::MergeOpenBase, FrameTag::MergeOpenTami}},
      {"poly", {FrameTag::PolyOpen}},
      {"mux", {FrameTag::MuxOpen}},
      {"data", {FrameTag::Data}},
  };
  return phases;
}

// Splits channel totals by protocol phase. A phase's rounds are how far its
// frames push the dependency depth beyond all earlier phases.
inline std::vector<PhaseStats> phase_breakdown(const ChannelStats& s) {
  std::vector<PhaseStats> out;
  std::uint32_t depth_before = 0;
  for (const auto& def : protocol_phases()) {
    PhaseStats p;
    p.name = def.name;
    std::uint32_t depth = 0;
    bool any = false;
    for (auto tag : def.tags) {
      auto it = s.by_tag.find(tag);
      if (it == s.by_tag.end()) continue;
      any = true;
      p.bits_s2r += it->second.bits_s2r;
      p.bits_r2s += it->second.bits_r2s;
      p.bytes += it->second.bytes;
      p.messages += it->second.messages;
      depth = std::max(depth, it->second.max_depth);
    }
    if (!any) continue;
    p.rounds = depth > depth_before ? depth - depth_before : 0;
    depth_before = std::max(depth_before, depth);
    out.push_back(std::move(p));
  }
  return out;
}

struct PresetEstimate {
  std::string preset;
  double simulated_ms = 0;  // network model only
  double compute_sender_ms = 0;
  double compute_receiver_ms = 0;
  double total_ms = 0;

  friend bool operator==(const PresetEstimate&, const PresetEstimate&) = default;
};

struct Counterexample {
  std::size_t item = 0;
  std::uint64_t sender_input = 0;
  std::uint64_t receiver_input = 0;
  std::uint64_t expected = 0;
  std::uint64_t got = 0;
  std::uint64_t seed = 0;
  std::uint64_t session_id = 0;
  std::string transcript_hex;
};

struct ProtocolReport {
  Operation op = Operation::Millionaire;
  Variant variant = Variant::Baseline;
  unsigned bits = 0;
  unsigned chunk = 0;
  unsigned chunks = 0;         // n of the comparison actually run
  unsigned compare_bits = 0;   // n * q
  bool interleaved = false;
  std::string schedule = "threaded";
  std::uint64_t seed = 0;
  std::uint64_t sessions = 1;

  std::size_t count = 0;
  std::size_t correct_count = 0;

  ChannelStats stats;
  std::uint64_t rounds_pipelined = 0;
  std::vector<PhaseStats> phases;
  std::uint64_t offline_bits = 0;
  PartyCounters sender_ops;
  PartyCounters receiver_ops;
  double cpu_ms_sender = 0;
  double cpu_ms_receiver = 0;

  std::string compute_profile;
  std::vector<PresetEstimate> presets;
  std::vector<std::string> discrepancy_notes;
  std::optional<Counterexample> counterexample;

  bool correct() const noexcept { return correct_count == count; }

  nlohmann::ordered_json to_json(bool include_timing = true) const {
    nlohmann::ordered_json j;
    j["op"] = to_string(op);
    j["variant"] = to_string(variant);
    j["config"] = {{"bits", bits},
                   {"chunk", chunk},
                   {"chunks", chunks},
                   {"compare_bits", compare_bits},
                   {"interleaved", interleaved},
                   {"schedule", schedule},
                   {"seed", seed},
                   {"sessions", sessions}};
    j["count"] = count;
    j["correct"] = correct();
    j["correct_count"] = correct_count;
    j["rounds"] = stats.rounds;
    j["rounds_pipelined"] = rounds_pipelined;
    j["bytes_s2r"] = stats.bytes_s2r;
    j["bytes_r2s"] = stats.bytes_r2s;
    j["bits_s2r"] = stats.bits_s2r;
    j["bits_r2s"] = stats.bits_r2s;
    j["messages"] = stats.messages;
    j["header_bytes"] = stats.header_bytes();
    auto phases_json = nlohmann::ordered_json::array();
    for (const auto& p : phases) {
      phases_json.push_back({{"name", p.name},
                             {"rounds", p.rounds},
                             {"bits_s2r", p.bits_s2r},
                             {"bits_r2s", p.bits_r2s},
                             {"bytes", p.bytes},
                             {"messages", p.messages}});
    }
    j["phases"] = std::move(phases_json);
    j["offline_bits"] = offline_bits;
    auto ops = [](const PartyCounters& c) {
      return nlohmann::ordered_json{{"crh_blocks", c.crh_blocks},
                                    {"message_entries", c.message_entries},
                                    {"beaver_ands", c.beaver_ands},
                                    {"poly_terms", c.poly_terms},
                                    {"mux_ops", c.mux_ops}};
    };
    j["ops"] = {{"sender", ops(sender_ops)}, {"receiver", ops(receiver_ops)}};
    if (include_timing) {
      j["cpu_ms"] = {{"sender", cpu_ms_sender}, {"receiver", cpu_ms_receiver}};
    }
    nlohmann::ordered_json sim = nlohmann::ordered_json::object();
    for (const auto& p : presets) sim[p.preset] = p.simulated_ms;
    j["simulated_ms"] = std::move(sim);
    j["discrepancy_notes"] = discrepancy_notes;
    nlohmann::ordered_json est;
    est["profile"] = compute_profile;
    for (const auto& p : presets) {
      est["presets"][p.preset] = {{"compute_sender_ms", p.compute_sender_ms},
                                  {"compute_receiver_ms", p.compute_receiver_ms},
                                  {"network_ms", p.simulated_ms},
                                  {"total_ms", p.total_ms}};
    }
    j["estimate"] = std::move(est);
    if (counterexample) {
      const auto& c = *counterexample;
      j["counterexample"] = {{"item", c.item},
                             {"sender_input", c.sender_input},
                             {"receiver_input", c.receiver_input},
                             {"expected", c.expected},
                             {"got", c.got},
                             {"seed", c.seed},
                             {"session_id", c.session_id},
                             {"transcript_hex", c.transcript_hex}};
    }
    return j;
  }
};

inline std::string csv_header() {
  return "op,variant,bits,chunk,interleaved,count,correct,rounds,rounds_pipelined,bytes_s2r,"
         "bytes_r2s,preset,simulated_ms,estimate_total_ms";
}

// One CSV row per preset in the report.
inline std::vector<std::string> csv_rows(const ProtocolReport& r) {
  std::vector<std::string> rows;
  for (const auto& p : r.presets) {
    std::ostringstream os;
    os << to_string(r.op) << ',' << to_string(r.variant) << ',' << r.bits << ',' << r.chunk << ','
       << (r.interleaved ? 1 : 0) << ',' << r.count << ',' << (r.correct() ? 1 : 0) << ','
       << r.stats.rounds << ',' << r.rounds_pipelined << ',' << r.stats.bytes_s2r << ','
       << r.stats.bytes_r2s << ',' << p.preset << ',' << nlohmann::json(p.simulated_ms).dump()
       << ',' << nlohmann::json(p.total_ms).dump();
    rows.push_back(os.str());
  }
  return rows;
}

inline std::string hex_encode(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 15]);
  }
  return out;
}

}  // namespace millforge
