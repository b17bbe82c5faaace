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

#include <gtest/gtest.h>

#include <bit>
#include <set>

#include "millforge/merge.hpp"
#include "millforge/session.hpp"
#include "millforge/tape.hpp"

using namespace millforge;

namespace {

TapeSeed seed(std::uint64_t s, std::uint64_t session = 0) { return TapeSeed::from_u64(s, session); }

bool reconstruct_bit(bool a, bool b) { return a != b; }

}  // namespace

TEST(TapeDerivation, SameSeedGivesIdenticalStreams) {
  const auto a = derive_tape(seed(5), Role::Sender);
  const auto b = derive_tape(seed(5), Role::Sender);
  const auto c = derive_tape(seed(5), Role::Receiver);
  for (auto label : {StreamLabel::LeafPad, StreamLabel::MergeMask, StreamLabel::Triple}) {
    EXPECT_EQ(a.keystream(label, 3, 256), b.keystream(label, 3, 256));
    EXPECT_EQ(a.keystream(label, 3, 256), c.keystream(label, 3, 256));
  }
  EXPECT_NE(a.keystream(StreamLabel::LeafPad, 3, 64), a.keystream(StreamLabel::LeafPad, 4, 64));
  EXPECT_NE(a.keystream(StreamLabel::LeafPad, 3, 64), a.keystream(StreamLabel::LeafShare, 3, 64));
}

TEST(TapeDerivation, SessionIdSeparatesTapes) {
  const auto a = derive_tape(seed(5, 1), Role::Sender);
  const auto b = derive_tape(seed(5, 2), Role::Sender);
  EXPECT_NE(a.keystream(StreamLabel::LeafPad, 0, 64), b.keystream(StreamLabel::LeafPad, 0, 64));
}

TEST(TapeDerivation, Avalanche) {
  // Flip each of several single bits of the master seed; the first 1024 tape
  // bytes must differ in at least 400 bit positions.
  const TapeSeed base = seed(42);
  const auto ref = derive_tape(base, Role::Sender).keystream(StreamLabel::Header, 0, 1024);
  for (int bit : {0, 1, 7, 8, 100, 255}) {
    TapeSeed s = base;
    s.master[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    const auto other = derive_tape(s, Role::Sender).keystream(StreamLabel::Header, 0, 1024);
    std::size_t diff = 0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
      diff += static_cast<std::size_t>(std::popcount(static_cast<unsigned>(ref[i] ^ other[i])));
    }
    EXPECT_GE(diff, 400u) << "bit " << bit;
  }
}

TEST(TapeVisibility, ViewsArePartitioned) {
  auto s = derive_tape(seed(9), Role::Sender);
  auto r = derive_tape(seed(9), Role::Receiver);
  s.set_recording(true);
  r.set_recording(true);
  const InstanceId is = s.allocate(), ir = r.allocate();
  ASSERT_EQ(is, ir);
  leaf_offline(s, is, 4, 4, 16);
  leaf_offline(r, ir, 4, 4, 16);
  const auto plan = build_reuse_plan(comparison_merge_matrix(4));
  subset_product_shares(s, is, plan);
  subset_product_shares(r, ir, plan);
  bit_triples(s, is, 6);
  bit_triples(r, ir, 6);

  std::set<std::pair<StreamLabel, std::uint32_t>> both_s, both_r;
  for (const auto& rec : s.host_view()) {
    EXPECT_TRUE(rec.visibility == Visibility::SenderHost || rec.visibility == Visibility::BothHosts);
    if (rec.visibility == Visibility::BothHosts) both_s.insert({rec.label, rec.index});
  }
  for (const auto& rec : r.host_view()) {
    EXPECT_TRUE(rec.visibility == Visibility::ReceiverHost ||
                rec.visibility == Visibility::BothHosts);
    if (rec.visibility == Visibility::BothHosts) both_r.insert({rec.label, rec.index});
  }
  EXPECT_FALSE(both_s.empty());
  EXPECT_EQ(both_s, both_r);
  // BothHosts records carry identical values on the two sides.
  for (const auto& a : s.host_view()) {
    if (a.visibility != Visibility::BothHosts) continue;
    bool found = false;
    for (const auto& b : r.host_view()) found = found || a == b;
    EXPECT_TRUE(found);
  }
}

TEST(TapeVisibility, RefusesUnlicensedValues) {
  auto s = derive_tape(seed(1), Role::Sender);
  s.set_recording(true);
  EXPECT_THROW(s.emit(StreamLabel::LeafSelect, 0, 0, Visibility::TeeInternal, BitVector(4)),
               MisuseError);
  EXPECT_THROW(s.emit(StreamLabel::LeafMask, 0, 0, Visibility::ReceiverHost, BitVector(4)),
               MisuseError);
  auto r = derive_tape(seed(1), Role::Receiver);
  EXPECT_THROW(leaf_sender_shares(r, 0, 4), MisuseError);
  EXPECT_THROW(leaf_release(s, 0, 4), MisuseError);
  EXPECT_THROW(input_mask_msb(s, 0), MisuseError);
}

TEST(TapeVisibility, TeeInternalDiscard) {
  // Tape-assisted leaf material: c_j reaches neither view; x_j only the
  // receiver's; the sender's leaf shares only the sender's.
  auto s = derive_tape(seed(2), Role::Sender);
  auto r = derive_tape(seed(2), Role::Receiver);
  s.set_recording(true);
  r.set_recording(true);
  leaf_offline(s, s.allocate(), 8, 4, 32);
  leaf_offline(r, r.allocate(), 8, 4, 32);
  for (const auto& rec : s.host_view()) {
    EXPECT_NE(rec.label, StreamLabel::LeafSelect);
    EXPECT_NE(rec.label, StreamLabel::LeafMask);
    EXPECT_NE(rec.label, StreamLabel::LeafRelease);
  }
  for (const auto& rec : r.host_view()) {
    EXPECT_NE(rec.label, StreamLabel::LeafSelect);
    EXPECT_NE(rec.label, StreamLabel::LeafShare);
    EXPECT_NE(rec.label, StreamLabel::LeafTmp);
  }
}

TEST(TapeDump, RoundTrip) {
  auto r = derive_tape(seed(4), Role::Receiver);
  r.set_recording(true);
  leaf_offline(r, r.allocate(), 3, 2, 6);
  const auto bytes = encode_tape_dump(r.host_view());
  const auto back = decode_tape_dump(bytes);
  EXPECT_EQ(back, r.host_view());
  auto again = derive_tape(seed(4), Role::Receiver);
  again.set_recording(true);
  leaf_offline(again, again.allocate(), 3, 2, 6);
  EXPECT_EQ(encode_tape_dump(again.host_view()), bytes);

  auto broken = bytes;
  broken.pop_back();
  EXPECT_THROW(decode_tape_dump(broken), ProtocolError);
}

TEST(LeafOffline, ShapeForEightNibbles) {
  Session session(3);
  const InstanceId inst = session.allocate(1);
  const auto so = leaf_offline(session.sender_tape(), inst, 8, 4, 32);
  const auto ro = leaf_offline(session.receiver_tape(), inst, 8, 4, 32);
  EXPECT_EQ(so.size(), 8u);
  EXPECT_EQ(so.pads.size(), 8u * 16u * 2u);
  EXPECT_EQ(ro.size(), 8u);
  EXPECT_TRUE(ro.pads.empty());
  const auto st = session.stats();
  EXPECT_EQ(st.total_bytes(), 0u);
  EXPECT_EQ(st.rounds, 0u);
  EXPECT_EQ(st.messages, 0u);
}

TEST(LeafOffline, ReceiverPadMatchesSenderAtSelection) {
  for (std::uint64_t sd = 0; sd < 50; ++sd) {
    auto s = derive_tape(seed(sd), Role::Sender);
    auto r = derive_tape(seed(sd), Role::Receiver);
    for (unsigned q : {1u, 2u, 4u, 8u}) {
      const InstanceId inst = s.allocate();
      r.allocate();
      const auto so = leaf_offline(s, inst, 4, q, 4 * q);
      const auto ro = leaf_offline(r, inst, 4, q, 4 * q);
      for (unsigned j = 0; j < 4; ++j) {
        // c_j = tmp_j ^ x_j; the receiver keeps pad u_{c_j}.
        const unsigned c = so.chunks[j].tmp ^ ro.chunks[j].input_mask;
        EXPECT_EQ(so.pad(j, c), std::make_pair(ro.chunks[j].lt_pad, ro.chunks[j].eq_pad));
      }
    }
  }
}

TEST(LeafOffline, BaselineSelectionIsReceiverVisible) {
  auto s = derive_tape(seed(8), Role::Sender);
  auto r = derive_tape(seed(8), Role::Receiver);
  const auto so = baseline_leaf_offline(s, 0, 4, 4);
  const auto ro = baseline_leaf_offline(r, 0, 4, 4);
  for (unsigned j = 0; j < 4; ++j) {
    EXPECT_EQ(so.pad(j, ro.chunks[j].select),
              std::make_pair(ro.chunks[j].lt_pad, ro.chunks[j].eq_pad));
  }
}

TEST(LeafOffline, MaskWidthZeroesHighBits) {
  const auto r = derive_tape(seed(6), Role::Receiver);
  for (InstanceId i = 0; i < 200; ++i) {
    const auto m = leaf_masks(r, i, 5, 2, 9);
    EXPECT_LT(m[4], 2u);
  }
}

TEST(SubsetProducts, FullProductOfThree) {
  const auto plan = build_reuse_plan(ExponentMatrix({{1, 1, 1}}));
  ASSERT_EQ(plan.size(), 7u);
  const std::vector<SubsetMask> want{0b001, 0b010, 0b100, 0b011, 0b101, 0b110, 0b111};
  EXPECT_EQ(plan.subsets(), want);
}

TEST(SubsetProducts, SingletonsReconstructToMasks) {
  const std::vector<SubsetMask> singles{1, 2, 4, 8};
  for (std::uint64_t sd = 0; sd < 100; ++sd) {
    auto s = derive_tape(seed(sd), Role::Sender);
    auto r = derive_tape(seed(sd), Role::Receiver);
    const auto a = subset_product_shares(s, 0, singles, 4);
    const auto b = subset_product_shares(r, 0, singles, 4);
    const auto ms = merge_mask_shares(s, 0, 4);
    const auto mr = merge_mask_shares(r, 0, 4);
    for (std::size_t i = 0; i < 4; ++i) {
      EXPECT_EQ(reconstruct_bit(a.at(i), b.at(i)), reconstruct_bit(ms.get(i), mr.get(i)));
    }
  }
}

TEST(SubsetProducts, PairsAreProductsOfSingletons) {
  const std::vector<SubsetMask> subsets{0b01, 0b10, 0b11};
  for (std::uint64_t sd = 0; sd < 1000; ++sd) {
    auto s = derive_tape(seed(sd), Role::Sender);
    auto r = derive_tape(seed(sd), Role::Receiver);
    const auto a = subset_product_shares(s, 7, subsets, 2);
    const auto b = subset_product_shares(r, 7, subsets, 2);
    const bool r0 = reconstruct_bit(a.at(0), b.at(0));
    const bool r1 = reconstruct_bit(a.at(1), b.at(1));
    ASSERT_EQ(reconstruct_bit(a.at(2), b.at(2)), r0 && r1) << sd;
  }
}

TEST(SubsetProducts, PlanSharesConsistentAcrossAllSubsets) {
  const auto plan = build_reuse_plan(comparison_merge_matrix(4));
  for (std::uint64_t sd = 0; sd < 50; ++sd) {
    auto s = derive_tape(seed(sd), Role::Sender);
    auto r = derive_tape(seed(sd), Role::Receiver);
    const auto a = subset_product_shares(s, 0, plan);
    const auto b = subset_product_shares(r, 0, plan);
    const auto ms = merge_mask_shares(s, 0, 7);
    const auto mr = merge_mask_shares(r, 0, 7);
    for (std::size_t i = 0; i < plan.size(); ++i) {
      bool want = true;
      for (auto v : mask_indices(plan.subsets()[i])) want = want && (ms.get(v) != mr.get(v));
      ASSERT_EQ(a.at(i) != b.at(i), want);
    }
  }
}

TEST(SubsetProducts, DuplicateSubsetIsMisuse) {
  auto s = derive_tape(seed(1), Role::Sender);
  const std::vector<SubsetMask> dup{1, 3, 1};
  EXPECT_THROW(subset_product_shares(s, 0, dup, 2), MisuseError);
  EXPECT_THROW(ReusePlan(2, {1, 1}, {}), MisuseError);
}

TEST(BeaverTriples, GaloisTwo) {
  auto s = derive_tape(seed(12), Role::Sender);
  auto r = derive_tape(seed(12), Role::Receiver);
  const auto a = beaver_triples(s, 0, 10000, 1);
  const auto b = beaver_triples(r, 0, 10000, 1);
  std::size_t zero_a = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto x = a[i].a ^ b[i].a, y = a[i].b ^ b[i].b, z = a[i].c ^ b[i].c;
    ASSERT_EQ(z, x & y);
    if (x == 0) {
      ++zero_a;
      ASSERT_EQ(z, 0u);
    }
  }
  EXPECT_GT(zero_a, 4000u);
  EXPECT_LT(zero_a, 6000u);
}

TEST(BeaverTriples, Ring) {
  auto s = derive_tape(seed(13), Role::Sender);
  auto r = derive_tape(seed(13), Role::Receiver);
  for (unsigned w : {8u, 32u, 64u}) {
    const auto a = beaver_triples(s, w, 500, w);
    const auto b = beaver_triples(r, w, 500, w);
    const std::uint64_t m = low_mask(w);
    for (std::size_t i = 0; i < a.size(); ++i) {
      ASSERT_EQ((a[i].c + b[i].c) & m, ((a[i].a + b[i].a) * (a[i].b + b[i].b)) & m);
    }
  }
}

TEST(BeaverTriples, MergeConsumption) {
  EXPECT_EQ(merge_triples_needed(8), 14u);
  EXPECT_EQ(merge_triples_needed(4), 6u);
  EXPECT_EQ(merge_triples_needed(2), 2u);
  EXPECT_EQ(merge_triples_needed(1), 0u);
}

TEST(MuxTriples, Reconstruct) {
  auto s = derive_tape(seed(14), Role::Sender);
  auto r = derive_tape(seed(14), Role::Receiver);
  const auto a = mux_triples(s, 0, 2000, 16);
  const auto b = mux_triples(r, 0, 2000, 16);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool rho = a[i].rho_bit != b[i].rho_bit;
    ASSERT_EQ((a[i].rho + b[i].rho) & 0xffff, rho ? 1u : 0u);
    const std::uint64_t av = (a[i].a + b[i].a) & 0xffff;
    ASSERT_EQ((a[i].rho_a + b[i].rho_a) & 0xffff, rho ? av : 0u);
  }
}
