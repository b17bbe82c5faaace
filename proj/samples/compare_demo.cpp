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

// Compares two 16-bit values with both protocol variants and prints the
// reconstructed result with the traffic each one used.

#include <cstdint>
#include <iostream>

#include "millforge/millforge.hpp"

int main() {
  using namespace millforge;

  const std::uint64_t y = 0x51c3;
  MillionaireConfig cfg;
  cfg.bits = 16;
  cfg.chunk = 4;

  {
    Session s(kDefaultSeed);
    const std::uint64_t x = 0x51d0;
    const auto [a, b] = millionaire(RingValue(y, 16), RingValue(x, 16), cfg, s);
    const auto st = s.stats();
    std::cout << "baseline: " << std::hex << y << " < " << x << std::dec << " is "
              << (a != b) << "  rounds " << st.rounds << "  bits " << st.total_bits() << "\n";
  }
  {
    cfg.variant = Variant::Tami;
    Session s(kDefaultSeed);
    // The receiver's operand is its tape mask for this comparison.
    const auto x = tami_comparison_inputs(s.receiver_tape(), 0, 1, millionaire_shape(cfg))[0];
    const auto [a, b] = millionaire(RingValue(y, 16), RingValue(x, 16), cfg, s);
    const auto st = s.stats();
    std::cout << "tami:     " << std::hex << y << " < " << x << std::dec << " is "
              << (a != b) << "  rounds " << st.rounds << "  bits " << st.total_bits() << "\n";
  }

  MillionaireConfig rcfg;
  rcfg.bits = 32;
  rcfg.chunk = 4;
  rcfg.variant = Variant::Tami;
  const auto report = relu_batch(1000, rcfg);
  std::cout << "relu x1000 (tami): correct " << report.correct_count << "/" << report.count
            << "  rounds " << report.stats.rounds << "\n";
  for (const auto& p : report.presets) {
    std::cout << "  " << p.preset << " network " << p.simulated_ms << " ms\n";
  }
  return report.correct() ? 0 : 1;
}
