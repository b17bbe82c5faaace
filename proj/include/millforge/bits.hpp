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

// Fixed-width ring values, chunk decomposition, packed bit vectors and
// XOR / additive secret shares.

#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "millforge/errors.hpp"

namespace millforge {

enum class Role : std::uint8_t { Sender = 0, Receiver = 1 };

constexpr Role peer_of(Role r) noexcept {
  return r == Role::Sender ? Role::Receiver : Role::Sender;
}

inline const char* to_string(Role r) noexcept {
  return r == Role::Sender ? "sender" : "receiver";
}

// Mask with the low `width` bits set; width in [0, 64].
constexpr std::uint64_t low_mask(unsigned width) noexcept {
  return width >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << width) - 1);
}

// Packed bit vector. Bit i lives in bit (i % 8) of byte i / 8; unused high
// bits of the last byte are always zero, so bytes() is a canonical encoding.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t nbits) : bytes_((nbits + 7) / 8, 0), size_(nbits) {}

  static BitVector from_bytes(std::span<const std::uint8_t> bytes, std::size_t nbits) {
    if (bytes.size() != (nbits + 7) / 8) {
      throw MisuseError("packed bit buffer has " + std::to_string(bytes.size()) +
                        " bytes, expected " + std::to_string((nbits + 7) / 8));
    }
    BitVector v;
    v.bytes_.assign(bytes.begin(), bytes.end());
    v.size_ = nbits;
    if (nbits % 8 != 0 && (v.bytes_.back() >> (nbits % 8)) != 0) {
      throw MisuseError("packed bit buffer has non-zero padding bits");
    }
    return v;
  }

  static BitVector from_bools(std::span<const bool> bits) {
    BitVector v(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) v.set(i, bits[i]);
    return v;
  }

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }
  std::span<const std::uint8_t> bytes() const noexcept { return bytes_; }

  bool get(std::size_t i) const noexcept { return (bytes_[i >> 3] >> (i & 7)) & 1u; }

  void set(std::size_t i, bool v) noexcept {
    const auto bit = static_cast<std::uint8_t>(1u << (i & 7));
    if (v) {
      bytes_[i >> 3] |= bit;
    } else {
      bytes_[i >> 3] &= static_cast<std::uint8_t>(~bit);
    }
  }

  void flip(std::size_t i) noexcept { bytes_[i >> 3] ^= static_cast<std::uint8_t>(1u << (i & 7)); }

  void push_back(bool v) {
    if (size_ % 8 == 0) bytes_.push_back(0);
    ++size_;
    set(size_ - 1, v);
  }

  // Appends the low `width` bits of `value`, least significant first.
  void append_bits(std::uint64_t value, unsigned width) {
    for (unsigned b = 0; b < width; ++b) push_back((value >> b) & 1u);
  }

  void write_bits(std::size_t offset, std::uint64_t value, unsigned width) noexcept {
    for (unsigned b = 0; b < width; ++b) set(offset + b, (value >> b) & 1u);
  }

  std::uint64_t get_bits(std::size_t offset, unsigned width) const noexcept {
    std::uint64_t out = 0;
    for (unsigned b = 0; b < width; ++b) {
      out |= static_cast<std::uint64_t>(get(offset + b)) << b;
    }
    return out;
  }

  std::size_t popcount() const noexcept {
    std::size_t c = 0;
    for (auto byte : bytes_) c += static_cast<std::size_t>(std::popcount(byte));
    return c;
  }

  BitVector& operator^=(const BitVector& other) {
    if (other.size_ != size_) {
      throw MisuseError("bit vector length mismatch: " + std::to_string(size_) + " vs " +
                        std::to_string(other.size_));
    }
    for (std::size_t i = 0; i < bytes_.size(); ++i) bytes_[i] ^= other.bytes_[i];
    return *this;
  }

  friend BitVector operator^(BitVector a, const BitVector& b) {
    a ^= b;
    return a;
  }

  friend bool operator==(const BitVector&, const BitVector&) = default;

  std::string to_string() const {
    std::string s;
    s.reserve(size_);
    for (std::size_t i = 0; i < size_; ++i) s.push_back(get(i) ? '1' : '0');
    return s;
  }

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t size_ = 0;
};

class RingValue {
 public:
  RingValue(std::uint64_t value, unsigned width) : width_(width) {
    if (width < 1 || width > 64) {
      throw ConfigError("ring width must be in [1, 64], got " + std::to_string(width));
    }
    value_ = value & low_mask(width);
  }

  std::uint64_t value() const noexcept { return value_; }
  unsigned width() const noexcept { return width_; }

  friend bool operator==(const RingValue&, const RingValue&) = default;

 private:
  std::uint64_t value_ = 0;
  unsigned width_ = 0;
};

// q-bit chunks of a ring value, least significant chunk first.
struct ChunkVector {
  std::vector<std::uint8_t> chunks;
  unsigned chunk_bits = 0;

  std::size_t size() const noexcept { return chunks.size(); }
  unsigned total_bits() const noexcept {
    return static_cast<unsigned>(chunks.size()) * chunk_bits;
  }

  friend bool operator==(const ChunkVector&, const ChunkVector&) = default;
};

inline void check_chunk_bits(unsigned width, unsigned chunk_bits) {
  if (chunk_bits < 1 || chunk_bits > 8) {
    throw ConfigError("chunk width must be in [1, 8], got " + std::to_string(chunk_bits));
  }
  if (width % chunk_bits != 0) {
    throw ConfigError("chunk width " + std::to_string(chunk_bits) +
                      " does not divide ring width " + std::to_string(width));
  }
}

inline ChunkVector split_chunks(const RingValue& x, unsigned chunk_bits) {
  check_chunk_bits(x.width(), chunk_bits);
  ChunkVector out;
  out.chunk_bits = chunk_bits;
  const unsigned n = x.width() / chunk_bits;
  out.chunks.reserve(n);
  for (unsigned j = 0; j < n; ++j) {
    out.chunks.push_back(
        static_cast<std::uint8_t>((x.value() >> (j * chunk_bits)) & low_mask(chunk_bits)));
  }
  return out;
}

inline RingValue recompose(const ChunkVector& c) {
  std::uint64_t v = 0;
  for (std::size_t j = 0; j < c.chunks.size(); ++j) {
    if (c.chunks[j] > low_mask(c.chunk_bits)) {
      throw ConfigError("chunk " + std::to_string(j) + " exceeds its width");
    }
    v |= static_cast<std::uint64_t>(c.chunks[j]) << (j * c.chunk_bits);
  }
  return RingValue(v, c.total_bits());
}

// One party's XOR share of a bit vector.
struct BitShareVector {
  BitVector bits;
  Role owner = Role::Sender;

  std::size_t size() const noexcept { return bits.size(); }
};

// Returns (mask, secret ^ mask), owned by sender and receiver respectively.
inline std::pair<BitShareVector, BitShareVector> share_bits(const BitVector& secret,
                                                            const BitVector& mask) {
  if (secret.size() != mask.size()) {
    throw MisuseError("share_bits: secret and mask lengths differ");
  }
  return {BitShareVector{mask, Role::Sender}, BitShareVector{secret ^ mask, Role::Receiver}};
}

inline BitVector reconstruct(const BitShareVector& a, const BitShareVector& b) {
  if (a.owner == b.owner) {
    throw MisuseError(std::string("reconstruct: both shares are owned by the ") +
                      to_string(a.owner));
  }
  if (a.size() != b.size()) throw MisuseError("reconstruct: share lengths differ");
  return a.bits ^ b.bits;
}

// One party's additive share in Z_{2^width}.
struct ArithShare {
  std::uint64_t value = 0;
  unsigned width = 64;
};

inline std::uint64_t reconstruct(const ArithShare& a, const ArithShare& b) {
  if (a.width != b.width) throw MisuseError("reconstruct: arithmetic share widths differ");
  return (a.value + b.value) & low_mask(a.width);
}

}  // namespace millforge
