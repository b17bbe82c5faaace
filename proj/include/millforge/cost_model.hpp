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

// Analytical compute models: the correlation-robust-hash (key expansion +
// AES) cost on a conventional CPU versus a pipelined engine, and an
// end-to-end estimate that adds modeled compute to simulated network time.

#include <algorithm>
#include <array>
#include <string>
#include <string_view>

#include "millforge/errors.hpp"
#include "millforge/leaf.hpp"
#include "millforge/report.hpp"
#include "millforge/transport.hpp"

namespace millforge {

struct CrhCost {
  double cycles = 0;
  double transfers = 0;

  friend bool operator==(const CrhCost&, const CrhCost&) = default;
};

// Conventional CPU, N blocks: key expansion (11N+100) plus AES (11N+42)
// cycles; 22N + 36N memory transfers.
inline CrhCost crh_cpu_cost(double blocks) {
  if (!(blocks >= 1)) throw ConfigError("CRH block count must be at least 1");
  const double n = blocks;
  return {(11 * n + 100) + (11 * n + 42), 22 * n + 36 * n};
}

// Pipelined engine: stages overlap, so cycles are the slower branch,
// max(13N/4, 18N/4); transfers 12N/4 + 13N/4.
inline CrhCost crh_pipelined_cost(double blocks) {
  if (!(blocks >= 1)) throw ConfigError("CRH block count must be at least 1");
  const double n = blocks;
  return {std::max(13 * n / 4, 18 * n / 4), 12 * n / 4 + 13 * n / 4};
}

enum class CrhEngine { Cpu, Pipelined };

struct CrhCostProfile {
  CrhEngine engine = CrhEngine::Cpu;
  double clock_hz = 3e9;

  CrhCost cost(double blocks) const {
    return engine == CrhEngine::Cpu ? crh_cpu_cost(blocks) : crh_pipelined_cost(blocks);
  }
  double seconds(double blocks) const { return blocks < 1 ? 0 : cost(blocks).cycles / clock_hz; }
};

// Cycle weights for the non-hash work each party does online.
struct ComputeProfile {
  std::string_view name;
  CrhCostProfile crh;
  double cycles_per_entry = 0;  // build or open one leaf message entry
  double cycles_per_and = 0;    // one Beaver AND (share side)
  double cycles_per_term = 0;   // one polynomial expansion term
  double cycles_per_mux = 0;    // one multiplexer product

  static constexpr ComputeProfile desk_cpu() {
    return {"desk-cpu", {CrhEngine::Cpu, 3e9}, 4, 8, 2, 24};
  }
  static constexpr ComputeProfile constrained_client() {
    return {"constrained-client", {CrhEngine::Cpu, 0.8e9}, 4, 8, 2, 24};
  }
  static constexpr ComputeProfile fpga_pipelined() {
    return {"fpga-pipelined", {CrhEngine::Pipelined, 170e6}, 0.25, 1, 0.125, 4};
  }
  static constexpr std::array<ComputeProfile, 3> all() {
    return {desk_cpu(), constrained_client(), fpga_pipelined()};
  }
};

inline ComputeProfile compute_profile_by_name(std::string_view name) {
  for (const auto& p : ComputeProfile::all()) {
    if (p.name == name) return p;
  }
  throw ConfigError("unknown compute profile '" + std::string(name) + "'");
}

inline double modeled_compute_seconds(const PartyCounters& c, const ComputeProfile& p) {
  const double cycles = static_cast<double>(c.message_entries) * p.cycles_per_entry +
                        static_cast<double>(c.beaver_ands) * p.cycles_per_and +
                        static_cast<double>(c.poly_terms) * p.cycles_per_term +
                        static_cast<double>(c.mux_ops) * p.cycles_per_mux;
  return p.crh.seconds(static_cast<double>(c.crh_blocks)) + cycles / p.crh.clock_hz;
}

struct EndToEndEstimate {
  double compute_sender_s = 0;
  double compute_receiver_s = 0;
  double network_s = 0;
  double total_s = 0;
};

// Slower party's modeled compute plus simulated network time.
inline EndToEndEstimate estimate_end_to_end(const ProtocolReport& report,
                                            const ComputeProfile& profile,
                                            const NetworkPreset& preset) {
  EndToEndEstimate e;
  e.compute_sender_s = modeled_compute_seconds(report.sender_ops, profile);
  e.compute_receiver_s = modeled_compute_seconds(report.receiver_ops, profile);
  e.network_s = simulated_time(report.stats, preset);
  e.total_s = std::max(e.compute_sender_s, e.compute_receiver_s) + e.network_s;
  return e;
}

// Fills the report's per-preset simulated and estimated times.
inline void attach_estimates(ProtocolReport& report, const ComputeProfile& profile,
                             std::span<const NetworkPreset> presets) {
  report.compute_profile = std::string(profile.name);
  report.presets.clear();
  for (const auto& p : presets) {
    const auto e = estimate_end_to_end(report, profile, p);
    report.presets.push_back(PresetEstimate{std::string(p.name), e.network_s * 1e3,
                                            e.compute_sender_s * 1e3, e.compute_receiver_s * 1e3,
                                            e.total_s * 1e3});
  }
}

}  // namespace millforge
