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

// Per-chunk comparison: XOR shares of lt_j = 1{y_j < x_j} and
// eq_j = 1{y_j = x_j}, where the sender holds y and the receiver holds x.
//
// The sender sends, for every chunk j and every t in [0, 2^q), the entry
//   (1{y_j < t} ^ <lt_j>_S ^ padlt[tmp_j ^ t], 1{y_j = t} ^ <eq_j>_S ^ padeq[tmp_j ^ t])
// and the receiver opens entry t = x_j with its single pad u_{c_j}.
// Baseline: the receiver first sends tmp_j = x_j ^ c_j (two rounds).
// Tape-assisted: tmp_j comes from the tape and x_j is the receiver's tape
// mask (one round, nothing sent by the receiver).
//
// Payload of LEAF_MSGS: item-major, then chunk, then entry, 2 bits per entry
// (lt first). Payload of LEAF_TMP: item-major, then chunk, q bits each.

#include <algorithm>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "millforge/bits.hpp"
#include "millforge/errors.hpp"
#include "millforge/session.hpp"
#include "millforge/tape.hpp"
#include "millforge/task.hpp"
#include "millforge/transport.hpp"

namespace millforge {

// One party's leaf outputs for a batch of comparisons; bit i*n + j is
// chunk j of item i.
struct LeafShares {
  Role owner = Role::Sender;
  unsigned n = 0;
  std::size_t count = 0;
  BitVector lt;
  BitVector eq;

  bool lt_at(std::size_t item, unsigned j) const { return lt.get(item * n + j); }
  bool eq_at(std::size_t item, unsigned j) const { return eq.get(item * n + j); }
};

struct LeafResult {
  LeafShares sender;
  LeafShares receiver;
  InstanceId instance = 0;  // first tape instance of the batch

  BitVector lt() const { return sender.lt ^ receiver.lt; }
  BitVector eq() const { return sender.eq ^ receiver.eq; }
  BitShareVector lt_shares(Role r) const {
    return {r == Role::Sender ? sender.lt : receiver.lt, r};
  }
  BitShareVector eq_shares(Role r) const {
    return {r == Role::Sender ? sender.eq : receiver.eq, r};
  }
};

// Work done by one party, for the compute model.
struct PartyCounters {
  std::uint64_t crh_blocks = 0;
  std::uint64_t message_entries = 0;
  std::uint64_t beaver_ands = 0;
  std::uint64_t poly_terms = 0;
  std::uint64_t mux_ops = 0;

  PartyCounters& operator+=(const PartyCounters& o) {
    crh_blocks += o.crh_blocks;
    message_entries += o.message_entries;
    beaver_ands += o.beaver_ands;
    poly_terms += o.poly_terms;
    mux_ops += o.mux_ops;
    return *this;
  }
  friend bool operator==(const PartyCounters&, const PartyCounters&) = default;
};

// Opens entry `index` of one chunk's 2^q message entries.
inline std::pair<bool, bool> decrypt_selected(const BitVector& messages, std::size_t index,
                                              std::pair<bool, bool> pad) {
  if (messages.size() % 2 != 0) throw MisuseError("leaf messages must hold bit pairs");
  if (index >= messages.size() / 2) {
    throw MisuseError("selection index " + std::to_string(index) + " out of range for " +
                      std::to_string(messages.size() / 2) + " entries");
  }
  return {messages.get(2 * index) ^ pad.first, messages.get(2 * index + 1) ^ pad.second};
}

namespace detail {

inline void check_offline(std::span<const LeafOffline> offline, std::size_t count, unsigned n,
                          unsigned q, Role role) {
  if (offline.size() != count) {
    throw ConfigError("leaf offline material covers " + std::to_string(offline.size()) +
                      " comparisons, expected " + std::to_string(count));
  }
  for (const auto& o : offline) {
    if (o.size() != n || o.chunk_bits != q) {
      throw ConfigError("leaf offline bundle shape does not match the chunking");
    }
    if (o.holder != role) throw MisuseError("leaf offline material belongs to the other party");
    if (o.tape_assisted != offline.front().tape_assisted) {
      throw ConfigError("leaf batch mixes baseline and tape-assisted material");
    }
  }
}

inline void write_leaf_entries(BitVector& out, std::size_t offset, unsigned y, unsigned tmp,
                               const LeafOffline& o, unsigned j) {
  const unsigned entries = 1u << o.chunk_bits;
  const auto& b = o.chunks[j];
  const std::size_t pad0 = 2 * (std::size_t{j} << o.chunk_bits);
  for (unsigned t = 0; t < entries; ++t) {
    const std::size_t p = pad0 + 2 * (tmp ^ t);
    out.set(offset + 2 * t, (y < t) ^ b.lt_share ^ o.pads.get(p));
    out.set(offset + 2 * t + 1, (y == t) ^ b.eq_share ^ o.pads.get(p + 1));
  }
}

}  // namespace detail

// Sender routine. `y` holds count*n chunk values, item-major.
inline Task<LeafShares> leaf_sender(Endpoint& ep, std::span<const LeafOffline> offline,
                                    std::span<const std::uint8_t> y, unsigned n, unsigned q,
                                    PartyCounters* counters = nullptr) {
  const std::size_t count = offline.size();
  detail::check_offline(offline, count, n, q, Role::Sender);
  if (y.size() != count * n) throw ConfigError("sender chunk count does not match the batch");
  const bool tami = count > 0 && offline.front().tape_assisted;
  const std::size_t entries = std::size_t{1} << q;

  std::vector<std::uint8_t> tmp(count * n);
  if (tami) {
    for (std::size_t i = 0; i < count; ++i) {
      for (unsigned j = 0; j < n; ++j) tmp[i * n + j] = offline[i].chunks[j].tmp;
    }
  } else {
    // Baseline: tmp_j = x_j ^ c_j arrives from the receiver.
    const BitVector in = co_await ep.recv(FrameTag::LeafTmp, count * n * q);
    for (std::size_t k = 0; k < count * n; ++k) {
      tmp[k] = static_cast<std::uint8_t>(in.get_bits(k * q, q));
    }
  }

  BitVector msgs(count * n * entries * 2);
  LeafShares out{Role::Sender, n, count, BitVector(count * n), BitVector(count * n)};
  for (std::size_t i = 0; i < count; ++i) {
    for (unsigned j = 0; j < n; ++j) {
      const auto& b = offline[i].chunks[j];
      const std::size_t k = i * n + j;
      if (y[k] >= entries) throw ConfigError("sender chunk value exceeds the chunk width");
      detail::write_leaf_entries(msgs, k * entries * 2, y[k], tmp[k], offline[i], j);
      out.lt.set(k, b.lt_share);
      out.eq.set(k, b.eq_share);
    }
  }
  ep.send(FrameTag::LeafMsgs, msgs);
  if (counters) {
    // Both variants hash every pad online (ROT derivation); the tape only
    // replaces the OT extension itself.
    counters->message_entries += count * n * entries;
    counters->crh_blocks += count * n * entries;
  }
  co_return out;
}

// Receiver routine. Baseline: `x` holds count*n chunk values. Tape-assisted:
// the comparison operand is each bundle's input mask and `x` may be empty;
// if given it must equal the masks.
inline Task<LeafShares> leaf_receiver(Endpoint& ep, std::span<const LeafOffline> offline,
                                      std::span<const std::uint8_t> x, unsigned n, unsigned q,
                                      PartyCounters* counters = nullptr) {
  const std::size_t count = offline.size();
  detail::check_offline(offline, count, n, q, Role::Receiver);
  const bool tami = count > 0 && offline.front().tape_assisted;
  const std::size_t entries = std::size_t{1} << q;

  std::vector<std::uint8_t> sel(count * n);
  if (tami) {
    for (std::size_t i = 0; i < count; ++i) {
      for (unsigned j = 0; j < n; ++j) sel[i * n + j] = offline[i].chunks[j].input_mask;
    }
    if (!x.empty() && !std::equal(x.begin(), x.end(), sel.begin(), sel.end())) {
      throw MisuseError("tape-assisted comparison: receiver input must be its tape mask");
    }
  } else {
    if (x.size() != count * n) throw ConfigError("receiver chunk count does not match the batch");
    BitVector tmp(count * n * q);
    for (std::size_t i = 0; i < count; ++i) {
      for (unsigned j = 0; j < n; ++j) {
        const std::size_t k = i * n + j;
        if (x[k] >= entries) throw ConfigError("receiver chunk value exceeds the chunk width");
        tmp.write_bits(k * q, x[k] ^ offline[i].chunks[j].select, q);
        sel[k] = x[k];
      }
    }
    ep.send(FrameTag::LeafTmp, tmp);
  }

  const BitVector msgs = co_await ep.recv(FrameTag::LeafMsgs, count * n * entries * 2);
  LeafShares out{Role::Receiver, n, count, BitVector(count * n), BitVector(count * n)};
  for (std::size_t i = 0; i < count; ++i) {
    for (unsigned j = 0; j < n; ++j) {
      const auto& b = offline[i].chunks[j];
      const std::size_t k = i * n + j;
      const std::size_t at = (k * entries + sel[k]) * 2;
      out.lt.set(k, msgs.get(at) ^ b.lt_pad);
      out.eq.set(k, msgs.get(at + 1) ^ b.eq_pad);
    }
  }
  if (counters) {
    counters->message_entries += count * n;
    counters->crh_blocks += count * n;
  }
  co_return out;
}

// ---------------------------------------------------------------------------
// Drivers: derive offline material on both tapes and run both parties.

inline LeafResult leaf_compare_baseline(const ChunkVector& y, const ChunkVector& x,
                                        Session& session) {
  if (y.chunk_bits != x.chunk_bits || y.size() != x.size()) {
    throw ConfigError("sender and receiver chunkings differ");
  }
  const unsigned n = static_cast<unsigned>(y.size());
  const unsigned q = y.chunk_bits;
  const InstanceId inst = session.allocate(1);
  const std::vector<LeafOffline> so{baseline_leaf_offline(session.sender_tape(), inst, n, q)};
  const std::vector<LeafOffline> ro{baseline_leaf_offline(session.receiver_tape(), inst, n, q)};
  auto out = session.run(leaf_sender(session.channel().sender(), so, y.chunks, n, q),
                         leaf_receiver(session.channel().receiver(), ro, x.chunks, n, q));
  return LeafResult{std::move(out.sender), std::move(out.receiver), inst};
}

struct TamiLeafRun {
  LeafResult result;
  ChunkVector x;  // the receiver's tape-derived operand
};

inline TamiLeafRun leaf_compare_tami(const ChunkVector& y, Session& session) {
  const unsigned n = static_cast<unsigned>(y.size());
  const unsigned q = y.chunk_bits;
  const InstanceId inst = session.allocate(1);
  const std::vector<LeafOffline> so{leaf_offline(session.sender_tape(), inst, n, q, n * q)};
  const std::vector<LeafOffline> ro{leaf_offline(session.receiver_tape(), inst, n, q, n * q)};
  auto out = session.run(leaf_sender(session.channel().sender(), so, y.chunks, n, q),
                         leaf_receiver(session.channel().receiver(), ro, {}, n, q));
  ChunkVector x{{}, q};
  for (const auto& b : ro.front().chunks) x.chunks.push_back(b.input_mask);
  return TamiLeafRun{LeafResult{std::move(out.sender), std::move(out.receiver), inst}, std::move(x)};
}

}  // namespace millforge
