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

// Emulated trusted-execution tape: both parties derive the same correlated
// randomness offline from a synchronized seed, and each host sees only the
// values its visibility tag licenses.
//
// Stream layout (part of the wire-stability contract). Every draw is the
// ChaCha20-IETF keystream under key = master seed and
//   nonce = session_id (8 bytes LE) || label (1 byte) || instance (3 bytes LE)
// read as a bit string, least significant bit of byte 0 first. Per instance:
//   LeafMask     n*q bits       x_j, chunk-major (bits at or above mask_bits cleared)
//   LeafSelect   n*q bits       c_j
//   LeafPad      n*2^q*2 bits   (lt, eq) pad pairs, chunk-major, entry-minor
//   LeafShare    2n bits        sender shares (lt_j, eq_j)
//   MergeMask    v bits         r_v for merge variable v
//   MaskShare    v bits         sender share of r_v (the singleton subset product)
//   SubsetShare  |plan| bits    sender share of the plan entry at that position
//   Triple       2w per triple  (a, b)
//   TripleShare  3w per triple  sender shares (a, b, c)
//   MuxTriple    1+w per item   (rho, a)
//   MuxShare     1+3w per item  sender shares (rho as bit, rho additive, a, rho*a)
//   InputMsb     1 bit          top bit of a receiver input mask
//   MonomialMask w per column   ring masks r_j
//   MonomialShare w per monomial sender share, monomials in lexicographic order

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <sodium.h>

#include "millforge/bits.hpp"
#include "millforge/errors.hpp"
#include "millforge/reuse.hpp"

namespace millforge {

using InstanceId = std::uint32_t;
inline constexpr InstanceId kMaxInstances = InstanceId{1} << 24;

enum class Visibility : std::uint8_t {
  SenderHost = 1,
  ReceiverHost = 2,
  BothHosts = 3,
  TeeInternal = 4,
};

constexpr bool visible_to(Visibility v, Role r) noexcept {
  switch (v) {
    case Visibility::SenderHost:
      return r == Role::Sender;
    case Visibility::ReceiverHost:
      return r == Role::Receiver;
    case Visibility::BothHosts:
      return true;
    case Visibility::TeeInternal:
      return false;
  }
  return false;
}

constexpr Visibility host_visibility(Role r) noexcept {
  return r == Role::Sender ? Visibility::SenderHost : Visibility::ReceiverHost;
}

enum class StreamLabel : std::uint8_t {
  Header = 0x00,
  LeafMask = 0x01,
  LeafSelect = 0x02,
  LeafPad = 0x03,
  LeafShare = 0x04,
  MergeMask = 0x05,
  MaskShare = 0x06,
  SubsetShare = 0x07,
  Triple = 0x08,
  TripleShare = 0x09,
  MuxTriple = 0x0A,
  MuxShare = 0x0B,
  InputMsb = 0x0C,
  MonomialMask = 0x0D,
  MonomialShare = 0x0E,
  LeafTmp = 0x0F,
  LeafRelease = 0x10,
};

struct TapeSeed {
  std::array<std::uint8_t, 32> master{};
  std::uint64_t session_id = 0;

  // Expands a 64-bit seed into a master seed with BLAKE2b.
  static TapeSeed from_u64(std::uint64_t seed, std::uint64_t session_id = 0) {
    static constexpr char kContext[] = "millforge/tape-seed/v1";
    std::array<std::uint8_t, sizeof(kContext) - 1 + 8> input{};
    std::memcpy(input.data(), kContext, sizeof(kContext) - 1);
    for (int i = 0; i < 8; ++i) {
      input[sizeof(kContext) - 1 + i] = static_cast<std::uint8_t>(seed >> (8 * i));
    }
    TapeSeed out;
    out.session_id = session_id;
    crypto_generichash(out.master.data(), out.master.size(), input.data(), input.size(), nullptr, 0);
    return out;
  }

  friend bool operator==(const TapeSeed&, const TapeSeed&) = default;
};

struct TapeRecord {
  StreamLabel label = StreamLabel::Header;
  InstanceId instance = 0;
  std::uint32_t index = 0;
  Visibility visibility = Visibility::TeeInternal;
  BitVector value;

  friend bool operator==(const TapeRecord&, const TapeRecord&) = default;
};

namespace detail {

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[at + i]) << (8 * i);
  return v;
}

inline void ensure_sodium() {
  static const int rc = sodium_init();
  if (rc < 0) throw ProtocolError("libsodium initialization failed");
}

}  // namespace detail

// Tape dump: a sequence of records, each
//   u32 body_length | u8 label | u32 instance | u32 index | u8 visibility |
//   u32 nbits | packed value bytes
// with all integers little-endian and body_length counting everything after it.
inline std::vector<std::uint8_t> encode_tape_dump(std::span<const TapeRecord> records) {
  std::vector<std::uint8_t> out;
  for (const auto& r : records) {
    const auto payload = r.value.bytes();
    detail::put_u32(out, static_cast<std::uint32_t>(14 + payload.size()));
    out.push_back(static_cast<std::uint8_t>(r.label));
    detail::put_u32(out, r.instance);
    detail::put_u32(out, r.index);
    out.push_back(static_cast<std::uint8_t>(r.visibility));
    detail::put_u32(out, static_cast<std::uint32_t>(r.value.size()));
    out.insert(out.end(), payload.begin(), payload.end());
  }
  return out;
}

inline std::vector<TapeRecord> decode_tape_dump(std::span<const std::uint8_t> in) {
  std::vector<TapeRecord> out;
  std::size_t pos = 0;
  while (pos < in.size()) {
    if (in.size() - pos < 4) throw ProtocolError("tape dump: truncated record length");
    const std::uint32_t len = detail::get_u32(in, pos);
    pos += 4;
    if (len < 14 || in.size() - pos < len) throw ProtocolError("tape dump: truncated record");
    TapeRecord r;
    r.label = static_cast<StreamLabel>(in[pos]);
    r.instance = detail::get_u32(in, pos + 1);
    r.index = detail::get_u32(in, pos + 5);
    const auto vis = in[pos + 9];
    if (vis < 1 || vis > 4) throw ProtocolError("tape dump: bad visibility tag");
    r.visibility = static_cast<Visibility>(vis);
    const std::uint32_t nbits = detail::get_u32(in, pos + 10);
    if ((nbits + 7) / 8 != len - 14) throw ProtocolError("tape dump: value length mismatch");
    r.value = BitVector::from_bytes(in.subspan(pos + 14, len - 14), nbits);
    out.push_back(std::move(r));
    pos += len;
  }
  return out;
}

// Sequential little-endian bit reader over a keystream draw.
class BitReader {
 public:
  explicit BitReader(std::vector<std::uint8_t> bytes) : bytes_(std::move(bytes)) {}

  bool bit() {
    const bool b = (bytes_[pos_ >> 3] >> (pos_ & 7)) & 1u;
    ++pos_;
    return b;
  }

  std::uint64_t bits(unsigned width) {
    std::uint64_t v = 0;
    for (unsigned i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(bit()) << i;
    return v;
  }

  void skip(std::size_t nbits) { pos_ += nbits; }

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

class TeeTape {
 public:
  TeeTape(const TapeSeed& seed, Role role) : seed_(seed), role_(role) { detail::ensure_sodium(); }

  Role role() const noexcept { return role_; }
  const TapeSeed& seed() const noexcept { return seed_; }

  // Reserves `count` consecutive comparison instances and returns the first.
  InstanceId allocate(std::size_t count = 1) {
    if (count > kMaxInstances - next_) throw ConfigError("tape instance space exhausted");
    const InstanceId first = next_;
    next_ += static_cast<InstanceId>(count);
    return first;
  }

  InstanceId peek() const noexcept { return next_; }

  // Test hook: the receiver's retained pad for the top chunk of `inst` is
  // flipped, which corrupts that comparison's result.
  void inject_pad_fault(InstanceId inst) { fault_ = inst; }
  bool has_pad_fault(InstanceId inst) const noexcept { return fault_ && *fault_ == inst; }

  void set_recording(bool on) noexcept { recording_ = on; }
  bool recording() const noexcept { return recording_; }
  const std::vector<TapeRecord>& host_view() const noexcept { return view_; }
  void clear_host_view() { view_.clear(); }

  // Raw PRG output of one stream. Inside the emulated enclave only; protocol
  // code reaches host-visible values through the offline derivations below.
  std::vector<std::uint8_t> keystream(StreamLabel label, InstanceId instance,
                                      std::size_t nbytes) const {
    if (instance >= kMaxInstances) throw ConfigError("tape instance id out of range");
    std::array<std::uint8_t, crypto_stream_chacha20_ietf_NONCEBYTES> nonce{};
    for (int i = 0; i < 8; ++i) nonce[i] = static_cast<std::uint8_t>(seed_.session_id >> (8 * i));
    nonce[8] = static_cast<std::uint8_t>(label);
    for (int i = 0; i < 3; ++i) nonce[9 + i] = static_cast<std::uint8_t>(instance >> (8 * i));
    std::vector<std::uint8_t> out(nbytes);
    if (nbytes > 0) {
      crypto_stream_chacha20_ietf(out.data(), out.size(), nonce.data(), seed_.master.data());
    }
    return out;
  }

  BitReader reader(StreamLabel label, InstanceId instance, std::size_t nbits) const {
    return BitReader(keystream(label, instance, (nbits + 7) / 8));
  }

  // Appends a value to this host's view. Refuses values the tag does not
  // license for this role.
  void emit(StreamLabel label, InstanceId instance, std::uint32_t index, Visibility vis,
            BitVector value) {
    if (!visible_to(vis, role_)) {
      throw MisuseError(std::string("tape: value not visible to the ") + to_string(role_));
    }
    if (recording_) view_.push_back(TapeRecord{label, instance, index, vis, std::move(value)});
  }

  void emit_value(StreamLabel label, InstanceId instance, std::uint32_t index, Visibility vis,
                  std::uint64_t value, unsigned width) {
    if (!recording_) {
      if (!visible_to(vis, role_)) {
        throw MisuseError(std::string("tape: value not visible to the ") + to_string(role_));
      }
      return;
    }
    BitVector v;
    v.append_bits(value, width);
    emit(label, instance, index, vis, std::move(v));
  }

 private:
  TapeSeed seed_;
  Role role_;
  InstanceId next_ = 0;
  bool recording_ = false;
  std::optional<InstanceId> fault_;
  std::vector<TapeRecord> view_;
};

inline TeeTape derive_tape(const TapeSeed& seed, Role role) { return TeeTape(seed, role); }

// ---------------------------------------------------------------------------
// Leaf comparison material

// One chunk's offline material as seen by one host. Fields outside the
// holder's view stay zero/empty.
struct LeafOfflineBundle {
  // Sender view.
  std::uint8_t tmp = 0;  // x_j ^ c_j (tape-assisted variant only)
  bool lt_share = false;
  bool eq_share = false;
  // Receiver view.
  std::uint8_t input_mask = 0;  // x_j (tape-assisted variant only)
  std::uint8_t select = 0;      // c_j (baseline only)
  bool lt_pad = false;          // u_{c_j}
  bool eq_pad = false;
  bool lt_release = false;  // <lt_j>_S ^ <r>_S for the merge (tape-assisted only)
  bool eq_release = false;
};

struct LeafOffline {
  InstanceId instance = 0;
  Role holder = Role::Sender;
  bool tape_assisted = false;
  unsigned chunk_bits = 0;
  std::vector<LeafOfflineBundle> chunks;
  // Sender only: the 2^q (lt, eq) pad pairs of every chunk, chunk-major;
  // pad pair t of chunk j sits at bits 2(j*2^q + t) and 2(j*2^q + t) + 1.
  BitVector pads;

  std::size_t size() const noexcept { return chunks.size(); }
  std::pair<bool, bool> pad(unsigned j, std::size_t t) const {
    const std::size_t at = 2 * ((std::size_t{j} << chunk_bits) + t);
    return {pads.get(at), pads.get(at + 1)};
  }
};

namespace detail {

inline void check_leaf_shape(unsigned n, unsigned q) {
  if (q < 1 || q > 8) throw ConfigError("chunk width must be in [1, 8]");
  if (n < 1) throw ConfigError("at least one chunk is required");
  if (2 * n - 1 > 64) throw ConfigError("at most 32 chunks are supported");
}

inline void emit_header(TeeTape& tape, InstanceId inst, unsigned n, unsigned q) {
  if (!tape.recording()) return;
  BitVector v;
  v.append_bits(n, 16);
  v.append_bits(q, 8);
  tape.emit(StreamLabel::Header, inst, 0, Visibility::BothHosts, std::move(v));
}

// Shared by both leaf variants: pads and the sender's output shares.
inline LeafOffline leaf_common(TeeTape& tape, InstanceId inst, unsigned n, unsigned q,
                               bool tape_assisted, std::vector<std::uint8_t>& select) {
  check_leaf_shape(n, q);
  const std::size_t entries = std::size_t{1} << q;
  LeafOffline out;
  out.instance = inst;
  out.holder = tape.role();
  out.tape_assisted = tape_assisted;
  out.chunk_bits = q;
  out.chunks.resize(n);

  auto sel = tape.reader(StreamLabel::LeafSelect, inst, std::size_t{n} * q);
  select.resize(n);
  for (unsigned j = 0; j < n; ++j) select[j] = static_cast<std::uint8_t>(sel.bits(q));

  const std::size_t pad_bits = n * entries * 2;
  auto stream = tape.keystream(StreamLabel::LeafPad, inst, (pad_bits + 7) / 8);
  if (pad_bits % 8 != 0) stream.back() &= static_cast<std::uint8_t>(low_mask(pad_bits % 8));
  BitVector pads = BitVector::from_bytes(stream, pad_bits);
  auto shares = tape.reader(StreamLabel::LeafShare, inst, 2 * std::size_t{n});
  const Visibility own = host_visibility(tape.role());
  for (unsigned j = 0; j < n; ++j) {
    auto& b = out.chunks[j];
    const bool lt_s = shares.bit();
    const bool eq_s = shares.bit();
    if (tape.role() == Role::Sender) {
      b.lt_share = lt_s;
      b.eq_share = eq_s;
      tape.emit_value(StreamLabel::LeafShare, inst, j, own,
                      static_cast<std::uint64_t>(lt_s) | (static_cast<std::uint64_t>(eq_s) << 1),
                      2);
      if (tape.recording()) {
        BitVector chunk_pads;
        for (std::size_t t = 0; t < entries * 2; ++t) {
          chunk_pads.push_back(pads.get(j * entries * 2 + t));
        }
        tape.emit(StreamLabel::LeafPad, inst, j, own, std::move(chunk_pads));
      }
    } else {
      const std::size_t at = (j * entries + select[j]) * 2;
      b.lt_pad = pads.get(at);
      b.eq_pad = pads.get(at + 1);
      if (j + 1 == n && tape.has_pad_fault(inst)) b.lt_pad = !b.lt_pad;
      tape.emit_value(StreamLabel::LeafPad, inst, j, own,
                      static_cast<std::uint64_t>(b.lt_pad) |
                          (static_cast<std::uint64_t>(b.eq_pad) << 1),
                      2);
    }
  }
  if (tape.role() == Role::Sender) out.pads = std::move(pads);
  return out;
}

}  // namespace detail

// Receiver's tape-derived comparison input for one instance: n chunks of q
// bits, with bits at or above mask_bits forced to zero.
inline std::vector<std::uint8_t> leaf_masks(const TeeTape& tape, InstanceId inst, unsigned n,
                                            unsigned q, unsigned mask_bits) {
  auto r = tape.reader(StreamLabel::LeafMask, inst, std::size_t{n} * q);
  std::vector<std::uint8_t> masks(n);
  for (unsigned j = 0; j < n; ++j) {
    std::uint64_t v = r.bits(q);
    const unsigned lo = j * q;
    if (mask_bits <= lo) {
      v = 0;
    } else if (mask_bits < lo + q) {
      v &= low_mask(mask_bits - lo);
    }
    masks[j] = static_cast<std::uint8_t>(v);
  }
  return masks;
}

// The sender's leaf output shares (<lt_j>_S, <eq_j>_S) for one instance; the
// tape fixes them independently of the chunk width.
inline std::vector<std::pair<bool, bool>> leaf_sender_shares(const TeeTape& tape, InstanceId inst,
                                                             unsigned n) {
  if (tape.role() != Role::Sender) throw MisuseError("leaf output shares are sender-host only");
  auto shares = tape.reader(StreamLabel::LeafShare, inst, 2 * std::size_t{n});
  std::vector<std::pair<bool, bool>> out(n);
  for (auto& p : out) {
    p.first = shares.bit();
    p.second = shares.bit();
  }
  return out;
}

// Sender shares of the merge masks r_v: the MaskShare stream, which is also
// the singleton entry of every subset-product share vector.
inline BitVector merge_mask_shares(const TeeTape& tape, InstanceId inst, std::size_t num_vars) {
  if (num_vars < 1 || num_vars > 64) throw ConfigError("merge variable count must be in [1, 64]");
  const auto nv = static_cast<unsigned>(num_vars);
  const std::uint64_t sender = tape.reader(StreamLabel::MaskShare, inst, num_vars).bits(nv);
  std::uint64_t mine = sender;
  if (tape.role() == Role::Receiver) {
    mine ^= tape.reader(StreamLabel::MergeMask, inst, num_vars).bits(nv);
  }
  BitVector out(num_vars);
  out.write_bits(0, mine, nv);
  return out;
}

// Receiver-side release for the one-directional merge opening: per chunk,
// (<lt_j>_S ^ <r_lt_j>_S, <eq_j>_S ^ <r_eq_j>_S); the eq entry of chunk 0 is
// unused and zero. Only the combined value is ever exposed.
inline std::vector<std::pair<bool, bool>> leaf_release(const TeeTape& tape, InstanceId inst,
                                                       unsigned n) {
  if (tape.role() != Role::Receiver) throw MisuseError("leaf release is receiver-host only");
  const std::size_t vars = 2 * std::size_t{n} - 1;
  auto mask_share = tape.reader(StreamLabel::MaskShare, inst, vars);
  std::vector<bool> r_sender(vars);
  for (std::size_t v = 0; v < vars; ++v) r_sender[v] = mask_share.bit();
  auto shares = tape.reader(StreamLabel::LeafShare, inst, 2 * std::size_t{n});
  std::vector<std::pair<bool, bool>> out(n);
  for (unsigned j = 0; j < n; ++j) {
    const bool lt_s = shares.bit();
    const bool eq_s = shares.bit();
    out[j].first = lt_s ^ r_sender[merge_var_lt(n, j)];
    out[j].second = j > 0 ? (eq_s ^ r_sender[merge_var_eq(n, j)]) : false;
  }
  return out;
}

// Tape-assisted leaf material: x_j and c_j never leave the enclave except x_j
// to the receiver (its own comparison input) and tmp_j = x_j ^ c_j to the
// sender. The receiver also gets the XOR-combined release of the sender's
// output share and merge-mask share for each merge variable.
inline LeafOffline leaf_offline(TeeTape& tape, InstanceId inst, unsigned n, unsigned q,
                                unsigned mask_bits) {
  if (mask_bits > n * q) throw ConfigError("mask width exceeds n*q");
  detail::emit_header(tape, inst, n, q);
  std::vector<std::uint8_t> select;
  LeafOffline out = detail::leaf_common(tape, inst, n, q, true, select);
  const auto masks = leaf_masks(tape, inst, n, q, mask_bits);
  const Visibility own = host_visibility(tape.role());

  if (tape.role() == Role::Sender) {
    for (unsigned j = 0; j < n; ++j) {
      out.chunks[j].tmp = static_cast<std::uint8_t>(masks[j] ^ select[j]);
      tape.emit_value(StreamLabel::LeafTmp, inst, j, own, out.chunks[j].tmp, q);
    }
  } else {
    const auto release = leaf_release(tape, inst, n);
    for (unsigned j = 0; j < n; ++j) {
      auto& b = out.chunks[j];
      b.input_mask = masks[j];
      b.lt_release = release[j].first;
      b.eq_release = release[j].second;
      tape.emit_value(StreamLabel::LeafMask, inst, j, own, b.input_mask, q);
      tape.emit_value(StreamLabel::LeafRelease, inst, j, own,
                      static_cast<std::uint64_t>(b.lt_release) |
                          (static_cast<std::uint64_t>(b.eq_release) << 1),
                      2);
    }
  }
  return out;
}

inline LeafOffline leaf_offline(TeeTape& tape, unsigned n, unsigned q) {
  return leaf_offline(tape, tape.allocate(), n, q, n * q);
}

// Baseline leaf material: stands in for random OT, so c_j goes to the
// receiver and the receiver's comparison input is chosen online.
inline LeafOffline baseline_leaf_offline(TeeTape& tape, InstanceId inst, unsigned n, unsigned q) {
  detail::emit_header(tape, inst, n, q);
  std::vector<std::uint8_t> select;
  LeafOffline out = detail::leaf_common(tape, inst, n, q, false, select);
  if (tape.role() == Role::Receiver) {
    for (unsigned j = 0; j < n; ++j) {
      out.chunks[j].select = select[j];
      tape.emit_value(StreamLabel::LeafSelect, inst, j, Visibility::ReceiverHost, select[j], q);
    }
  }
  return out;
}

// Top bit of a receiver input mask (used when the masked value is wider than
// the comparison).
inline bool input_mask_msb(const TeeTape& tape, InstanceId inst) {
  if (tape.role() != Role::Receiver) throw MisuseError("input mask is receiver-host only");
  return tape.reader(StreamLabel::InputMsb, inst, 1).bit();
}

// ---------------------------------------------------------------------------
// Subset products of merge masks

// One party's XOR shares of AND_{v in S} r_v for each subset S, in the order
// the subsets were requested.
struct SubsetProductShares {
  Role holder = Role::Sender;
  InstanceId instance = 0;
  BitVector shares;

  std::size_t size() const noexcept { return shares.size(); }
  bool at(std::size_t i) const noexcept { return shares.get(i); }
};

namespace detail {

// Assumes distinct subsets (checked by the callers).
inline SubsetProductShares subset_products(TeeTape& tape, InstanceId inst,
                                           std::span<const SubsetMask> subsets,
                                           std::size_t num_vars) {
  if (num_vars < 1 || num_vars > 64) throw ConfigError("merge variable count must be in [1, 64]");
  const SubsetMask universe = low_mask(static_cast<unsigned>(num_vars));
  auto masks = tape.reader(StreamLabel::MergeMask, inst, num_vars);
  const SubsetMask r = masks.bits(static_cast<unsigned>(num_vars));
  auto singles = tape.reader(StreamLabel::MaskShare, inst, num_vars);
  const SubsetMask r_sender = singles.bits(static_cast<unsigned>(num_vars));

  // Position i of the SubsetShare stream is the sender share of subsets[i];
  // singletons take their share from MaskShare instead, so that the leaf
  // release and the merge agree on the sender's share of r_v.
  auto stream = tape.keystream(StreamLabel::SubsetShare, inst, (subsets.size() + 7) / 8);
  if (subsets.size() % 8 != 0) stream.back() &= static_cast<std::uint8_t>(low_mask(subsets.size() % 8));
  SubsetProductShares out;
  out.holder = tape.role();
  out.instance = inst;
  out.shares = BitVector::from_bytes(stream, subsets.size());
  const bool receiver = tape.role() == Role::Receiver;
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    const SubsetMask s = subsets[i];
    if (s == 0 || (s & ~universe) != 0) {
      throw MisuseError("subset_product_shares: subset outside the variable range");
    }
    if ((s & (s - 1)) == 0) out.shares.set(i, (r_sender & s) != 0);
    if (receiver && (r & s) == s) out.shares.flip(i);
  }
  if (tape.recording()) {
    const Visibility own = host_visibility(tape.role());
    for (std::size_t i = 0; i < subsets.size(); ++i) {
      tape.emit_value(StreamLabel::SubsetShare, inst, static_cast<std::uint32_t>(i), own,
                      out.shares.get(i), 1);
    }
  }
  return out;
}

}  // namespace detail

inline SubsetProductShares subset_product_shares(TeeTape& tape, InstanceId inst,
                                                 std::span<const SubsetMask> subsets,
                                                 std::size_t num_vars) {
  std::vector<SubsetMask> sorted(subsets.begin(), subsets.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw MisuseError("subset_product_shares: duplicate subset in plan");
  }
  return detail::subset_products(tape, inst, subsets, num_vars);
}

// Plans hold distinct subsets by construction.
inline SubsetProductShares subset_product_shares(TeeTape& tape, InstanceId inst,
                                                 const ReusePlan& plan) {
  return detail::subset_products(tape, inst, plan.subsets(), plan.num_vars());
}

inline SubsetProductShares subset_product_shares(TeeTape& tape, const ReusePlan& plan) {
  return subset_product_shares(tape, tape.allocate(), plan);
}

// ---------------------------------------------------------------------------
// Beaver triples

// One party's additive shares of (a, b, a*b) in Z_{2^width}; width 1 is GF(2).
struct BeaverTriple {
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  std::uint64_t c = 0;
};

inline std::vector<BeaverTriple> beaver_triples(TeeTape& tape, InstanceId inst, std::size_t count,
                                                unsigned width) {
  if (width < 1 || width > 64) throw ConfigError("triple ring width must be in [1, 64]");
  const std::uint64_t m = low_mask(width);
  auto secret = tape.reader(StreamLabel::Triple, inst, count * 2 * width);
  auto sender = tape.reader(StreamLabel::TripleShare, inst, count * 3 * width);
  std::vector<BeaverTriple> out(count);
  const Visibility own = host_visibility(tape.role());
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t a = secret.bits(width);
    const std::uint64_t b = secret.bits(width);
    const std::uint64_t c = (a * b) & m;
    BeaverTriple s{sender.bits(width), sender.bits(width), sender.bits(width)};
    if (tape.role() == Role::Sender) {
      out[i] = s;
    } else {
      out[i] = BeaverTriple{(a - s.a) & m, (b - s.b) & m, (c - s.c) & m};
    }
    if (tape.recording()) {
      BitVector v;
      v.append_bits(out[i].a, width);
      v.append_bits(out[i].b, width);
      v.append_bits(out[i].c, width);
      tape.emit(StreamLabel::TripleShare, inst, static_cast<std::uint32_t>(i), own, std::move(v));
    }
  }
  return out;
}

// GF(2) triples packed for the tree merge; same draws as
// beaver_triples(tape, inst, count, 1).
struct BitTriples {
  BitVector a, b, c;
  std::size_t size() const noexcept { return a.size(); }
};

inline BitTriples bit_triples(TeeTape& tape, InstanceId inst, std::size_t count) {
  const auto t = beaver_triples(tape, inst, count, 1);
  BitTriples out{BitVector(count), BitVector(count), BitVector(count)};
  for (std::size_t i = 0; i < count; ++i) {
    out.a.set(i, t[i].a);
    out.b.set(i, t[i].b);
    out.c.set(i, t[i].c);
  }
  return out;
}

// Correlation for a one-round bit-times-ring-element multiplexer: a random
// bit rho held both as XOR shares and as additive shares, a random ring
// element a, and additive shares of rho*a.
struct MuxTriple {
  bool rho_bit = false;
  std::uint64_t rho = 0;
  std::uint64_t a = 0;
  std::uint64_t rho_a = 0;
};

inline std::vector<MuxTriple> mux_triples(TeeTape& tape, InstanceId inst, std::size_t count,
                                          unsigned width) {
  if (width < 1 || width > 64) throw ConfigError("mux ring width must be in [1, 64]");
  const std::uint64_t m = low_mask(width);
  auto secret = tape.reader(StreamLabel::MuxTriple, inst, count * (1 + width));
  auto sender = tape.reader(StreamLabel::MuxShare, inst, count * (1 + 3 * width));
  std::vector<MuxTriple> out(count);
  const Visibility own = host_visibility(tape.role());
  for (std::size_t i = 0; i < count; ++i) {
    const bool rho = secret.bit();
    const std::uint64_t a = secret.bits(width);
    const std::uint64_t rho_a = rho ? a : 0;
    MuxTriple s;
    s.rho_bit = sender.bit();
    s.rho = sender.bits(width);
    s.a = sender.bits(width);
    s.rho_a = sender.bits(width);
    if (tape.role() == Role::Sender) {
      out[i] = s;
    } else {
      out[i] = MuxTriple{static_cast<bool>(rho ^ s.rho_bit), (static_cast<std::uint64_t>(rho) - s.rho) & m,
                         (a - s.a) & m, (rho_a - s.rho_a) & m};
    }
    if (tape.recording()) {
      BitVector v;
      v.push_back(out[i].rho_bit);
      v.append_bits(out[i].rho, width);
      v.append_bits(out[i].a, width);
      v.append_bits(out[i].rho_a, width);
      tape.emit(StreamLabel::MuxShare, inst, static_cast<std::uint32_t>(i), own, std::move(v));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ring monomials for general polynomial evaluation

using Monomial = std::vector<std::uint32_t>;

// Every exponent vector k with 0 <= k <= E_i componentwise, k != 0, over all
// rows, deduplicated and sorted.
inline std::vector<Monomial> required_monomials(const ExponentMatrix& e) {
  std::vector<Monomial> all;
  for (std::size_t i = 0; i < e.rows(); ++i) {
    const auto& row = e.row(i);
    Monomial k(row.size(), 0);
    while (true) {
      std::size_t j = 0;
      while (j < k.size() && k[j] == row[j]) {
        k[j] = 0;
        ++j;
      }
      if (j == k.size()) break;
      ++k[j];
      all.push_back(k);
    }
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

struct MonomialShares {
  Role holder = Role::Sender;
  InstanceId instance = 0;
  unsigned width = 0;
  std::map<Monomial, std::uint64_t> shares;
};

inline MonomialShares monomial_shares(TeeTape& tape, InstanceId inst, const ExponentMatrix& e,
                                      unsigned width) {
  if (width < 1 || width > 64) throw ConfigError("ring width must be in [1, 64]");
  const std::uint64_t m = low_mask(width);
  auto masks = tape.reader(StreamLabel::MonomialMask, inst, e.cols() * width);
  std::vector<std::uint64_t> r(e.cols());
  for (auto& v : r) v = masks.bits(width);
  const auto monos = required_monomials(e);
  auto sender = tape.reader(StreamLabel::MonomialShare, inst, monos.size() * width);
  MonomialShares out;
  out.holder = tape.role();
  out.instance = inst;
  out.width = width;
  const Visibility own = host_visibility(tape.role());
  for (std::size_t i = 0; i < monos.size(); ++i) {
    std::uint64_t value = 1;
    for (std::size_t j = 0; j < monos[i].size(); ++j) {
      for (std::uint32_t p = 0; p < monos[i][j]; ++p) value *= r[j];
    }
    value &= m;
    const std::uint64_t s = sender.bits(width);
    const std::uint64_t mine = tape.role() == Role::Sender ? s : ((value - s) & m);
    out.shares.emplace(monos[i], mine);
    tape.emit_value(StreamLabel::MonomialShare, inst, static_cast<std::uint32_t>(i), own, mine,
                    width);
  }
  return out;
}

}  // namespace millforge
