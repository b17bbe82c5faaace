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

// Merging per-chunk (lt, eq) shares into the comparison bit
//   lt = XOR_i lt_i AND eq_{i+1} AND ... AND eq_{n-1}
// and the general masked polynomial evaluation it is built on.
//
// Baseline: a binary tree of Beaver ANDs, one opening exchange per level.
// Tape-assisted: every variable v is opened once as d_v = v ^ r_v and each
// row prod_{v in A}(d_v ^ r_v) is expanded locally against shares of the
// subset products of the r_v's. With interleaving only the receiver sends;
// the sender's half of each opening comes from the tape release.

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "millforge/bits.hpp"
#include "millforge/errors.hpp"
#include "millforge/leaf.hpp"
#include "millforge/reuse.hpp"
#include "millforge/session.hpp"
#include "millforge/tape.hpp"
#include "millforge/task.hpp"
#include "millforge/transport.hpp"

namespace millforge {

// Both parties' XOR shares of one bit per item.
struct BitSharePair {
  BitVector sender;
  BitVector receiver;

  BitVector value() const { return sender ^ receiver; }
  std::size_t size() const noexcept { return sender.size(); }
};

// ---------------------------------------------------------------------------
// Baseline tree merge

inline unsigned merge_tree_width(unsigned n) {
  unsigned p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Beaver triples consumed per comparison: two ANDs per merge point of the
// padded tree (the root's eq product included).
inline std::size_t merge_triples_needed(unsigned n) { return 2 * (merge_tree_width(n) - 1); }

// Party routine. `triples` holds one BitTriples per item.
inline Task<BitVector> merge_baseline_party(Endpoint& ep, const LeafShares& leaf,
                                            std::span<const BitTriples> triples,
                                            PartyCounters* counters = nullptr) {
  const Role role = ep.role();
  if (leaf.owner != role) throw MisuseError("leaf shares belong to the other party");
  const unsigned n = leaf.n;
  const std::size_t count = leaf.count;
  const unsigned width = merge_tree_width(n);
  const std::size_t need = merge_triples_needed(n);
  if (triples.size() != count) throw ConfigError("one triple batch per comparison is required");
  for (const auto& t : triples) {
    if (t.size() < need) {
      throw ConfigError("insufficient Beaver triples: " + std::to_string(t.size()) + " < " +
                        std::to_string(need));
    }
  }
  const bool sender = role == Role::Sender;

  std::vector<std::uint8_t> lt(count * width), eq(count * width);
  for (std::size_t i = 0; i < count; ++i) {
    for (unsigned j = 0; j < width; ++j) {
      if (j < n) {
        lt[i * width + j] = leaf.lt_at(i, j);
        eq[i * width + j] = leaf.eq_at(i, j);
      } else {
        // Neutral leaf lt = 0, eq = 1, held by the sender.
        lt[i * width + j] = 0;
        eq[i * width + j] = sender ? 1 : 0;
      }
    }
  }

  std::size_t used = 0;  // triples consumed per item so far
  for (unsigned w = width; w > 1; w /= 2) {
    const unsigned points = w / 2;
    // Per item, per merge point: AND(eq_hi, lt_lo), AND(eq_hi, eq_lo); each
    // opening is (x ^ a, y ^ b).
    BitVector mine(count * points * 4);
    for (std::size_t i = 0; i < count; ++i) {
      const auto& t = triples[i];
      for (unsigned k = 0; k < points; ++k) {
        const std::size_t lo = i * width + 2 * k, hi = lo + 1;
        const std::size_t t0 = used + 2 * k, t1 = t0 + 1;
        const std::size_t at = (i * points + k) * 4;
        mine.set(at + 0, eq[hi] ^ t.a.get(t0));
        mine.set(at + 1, lt[lo] ^ t.b.get(t0));
        mine.set(at + 2, eq[hi] ^ t.a.get(t1));
        mine.set(at + 3, eq[lo] ^ t.b.get(t1));
      }
    }
    ep.send(FrameTag::MergeOpenBase, mine);
    const BitVector theirs = co_await ep.recv(FrameTag::MergeOpenBase, mine.size());
    const BitVector open = mine ^ theirs;
    for (std::size_t i = 0; i < count; ++i) {
      const auto& t = triples[i];
      for (unsigned k = 0; k < points; ++k) {
        const std::size_t lo = i * width + 2 * k, hi = lo + 1;
        const std::size_t t0 = used + 2 * k, t1 = t0 + 1;
        const std::size_t at = (i * points + k) * 4;
        auto and_share = [&](std::size_t ti, bool d, bool e) {
          bool z = t.c.get(ti) ^ (d && t.b.get(ti)) ^ (e && t.a.get(ti));
          if (sender) z ^= d && e;
          return z;
        };
        const bool z0 = and_share(t0, open.get(at + 0), open.get(at + 1));
        const bool z1 = and_share(t1, open.get(at + 2), open.get(at + 3));
        const std::size_t dst = i * width + k;
        lt[dst] = lt[hi] ^ z0;
        eq[dst] = z1;
      }
    }
    used += 2 * points;
    if (counters) counters->beaver_ands += count * 2 * points;
  }

  BitVector out(count);
  for (std::size_t i = 0; i < count; ++i) out.set(i, lt[i * width]);
  co_return out;
}

inline std::vector<BitTriples> merge_triples(TeeTape& tape, InstanceId first, std::size_t count,
                                             unsigned n) {
  std::vector<BitTriples> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(bit_triples(tape, first + static_cast<InstanceId>(i), merge_triples_needed(n)));
  }
  return out;
}

// Driver: merges a LeafResult with triples drawn under the leaf's instances.
inline BitSharePair merge_baseline(const LeafResult& leaf, Session& session) {
  const unsigned n = leaf.sender.n;
  const std::size_t count = leaf.sender.count;
  const auto ts = merge_triples(session.sender_tape(), leaf.instance, count, n);
  const auto tr = merge_triples(session.receiver_tape(), leaf.instance, count, n);
  auto out = session.run(merge_baseline_party(session.channel().sender(), leaf.sender, ts),
                         merge_baseline_party(session.channel().receiver(), leaf.receiver, tr));
  return {std::move(out.sender), std::move(out.receiver)};
}

// ---------------------------------------------------------------------------
// One-round masked polynomial evaluation over GF(2)

// Per-row lookup from local subsets of the active set to plan positions.
struct PolyRowTable {
  std::vector<unsigned> vars;              // active variables, ascending
  std::vector<std::uint32_t> plan_index;   // by local mask; entry 0 unused
};

struct PolyTables {
  std::size_t num_vars = 0;
  std::size_t plan_size = 0;
  std::vector<unsigned> opened;  // variables in some active set, ascending
  std::vector<PolyRowTable> rows;
};

// Fails if some subset a row's expansion needs is absent from the plan.
inline PolyTables build_poly_tables(const ReusePlan& plan) {
  PolyTables t;
  t.num_vars = plan.num_vars();
  t.plan_size = plan.size();
  SubsetMask used = 0;
  for (const auto& row : plan.rows()) {
    PolyRowTable r;
    r.vars = mask_indices(row.active);
    if (r.vars.size() > 24) throw ConfigError("polynomial row too wide to expand");
    const std::size_t local = std::size_t{1} << r.vars.size();
    r.plan_index.assign(local, 0);
    for (std::size_t l = 1; l < local; ++l) {
      SubsetMask s = 0;
      for (std::size_t b = 0; b < r.vars.size(); ++b) {
        if ((l >> b) & 1u) s |= SubsetMask{1} << r.vars[b];
      }
      const auto* idx = plan.find(s);
      if (!idx) {
        throw ProtocolError("randomness coverage gap: subset {" +
                            [&] {
                              std::string out;
                              for (auto v : mask_indices(s)) {
                                out += (out.empty() ? "" : ",") + std::to_string(v);
                              }
                              return out;
                            }() +
                            "} is missing from the plan");
      }
      r.plan_index[l] = *idx;
    }
    used |= row.active;
    t.rows.push_back(std::move(r));
  }
  t.opened = mask_indices(used);
  return t;
}

// Local share of one row given the opened differences d (bit v = d_v) and
// the party's subset-product shares. Only terms whose opened part is all
// ones contribute, so the loop runs over subsets of the row's ones.
inline bool poly_row_share(const PolyRowTable& row, SubsetMask d, const BitVector& rand,
                           bool add_public_term, std::uint64_t* terms = nullptr) {
  std::uint32_t dl = 0;
  for (std::size_t b = 0; b < row.vars.size(); ++b) {
    if ((d >> row.vars[b]) & 1u) dl |= 1u << b;
  }
  const std::uint32_t full = static_cast<std::uint32_t>(row.plan_index.size() - 1);
  const std::uint32_t base = full & ~dl;
  bool share = false;
  std::uint64_t evaluated = 0;
  for (std::uint32_t t = dl;; t = (t - 1) & dl) {
    const std::uint32_t s = base | t;
    if (s == 0) {
      if (add_public_term) share ^= true;
    } else {
      share ^= rand.get(row.plan_index[s]);
    }
    ++evaluated;
    if (t == 0) break;
  }
  if (terms) *terms += evaluated;
  return share;
}

using MaskShareSource = std::function<BitVector(std::size_t item)>;
using SubsetShareSource = std::function<SubsetProductShares(std::size_t item)>;

// Party routine. `vars` holds count * num_vars bits (item-major). Returns
// count * rows bits: this party's share of every row of every item.
// In interleaved mode the receiver must pass `release` (count * num_vars
// bits: the sender's variable share XOR its mask share) and only the
// receiver sends.
inline Task<BitVector> polymult_party(Endpoint& ep, const PolyTables& tables,
                                      const BitVector& vars, std::size_t count,
                                      MaskShareSource masks, SubsetShareSource randomness,
                                      const BitVector* release, bool interleaved,
                                      PartyCounters* counters = nullptr) {
  const Role role = ep.role();
  const bool sender = role == Role::Sender;
  const std::size_t nv = tables.num_vars;
  const std::size_t no = tables.opened.size();
  if (vars.size() != count * nv) throw ConfigError("variable share vector has the wrong length");
  if (interleaved && !sender && (!release || release->size() != count * nv)) {
    throw MisuseError("interleaved opening needs the tape release on the receiver");
  }

  // Masked shares <v> ^ <r_v>.
  BitVector masked(count * no);
  for (std::size_t i = 0; i < count; ++i) {
    const BitVector r = masks(i);
    if (r.size() != nv) throw ProtocolError("mask share vector does not match the plan");
    for (std::size_t k = 0; k < no; ++k) {
      const unsigned v = tables.opened[k];
      masked.set(i * no + k, vars.get(i * nv + v) ^ r.get(v));
    }
  }

  BitVector open;
  if (!interleaved) {
    ep.send(FrameTag::MergeOpenTami, masked);
    open = masked ^ co_await ep.recv(FrameTag::MergeOpenTami, masked.size());
  } else if (sender) {
    open = masked ^ co_await ep.recv(FrameTag::MergeOpenTami, masked.size());
  } else {
    ep.send(FrameTag::MergeOpenTami, masked);
    open = masked;
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t k = 0; k < no; ++k) {
        if (release->get(i * nv + tables.opened[k])) open.flip(i * no + k);
      }
    }
  }

  const std::size_t rows = tables.rows.size();
  BitVector out(count * rows);
  std::uint64_t terms = 0;
  for (std::size_t i = 0; i < count; ++i) {
    SubsetMask d = 0;
    for (std::size_t k = 0; k < no; ++k) {
      if (open.get(i * no + k)) d |= SubsetMask{1} << tables.opened[k];
    }
    const SubsetProductShares rand = randomness(i);
    if (rand.size() != tables.plan_size) {
      throw ProtocolError("subset-product shares do not match the reuse plan");
    }
    for (std::size_t r = 0; r < rows; ++r) {
      out.set(i * rows + r, poly_row_share(tables.rows[r], d, rand.shares, sender, &terms));
    }
  }
  if (counters) counters->poly_terms += terms;
  co_return out;
}

// XOR of each item's row shares.
inline BitVector sum_rows(const BitVector& rows, std::size_t count, std::size_t nrows) {
  BitVector out(count);
  for (std::size_t i = 0; i < count; ++i) {
    bool s = false;
    for (std::size_t r = 0; r < nrows; ++r) s ^= rows.get(i * nrows + r);
    out.set(i, s);
  }
  return out;
}

// Merge variables of one party's leaf shares: (lt_0..lt_{n-1}, eq_1..eq_{n-1}).
inline BitVector merge_variables(const LeafShares& leaf) {
  const unsigned n = leaf.n;
  const std::size_t nv = 2 * std::size_t{n} - 1;
  BitVector out(leaf.count * nv);
  for (std::size_t i = 0; i < leaf.count; ++i) {
    for (unsigned j = 0; j < n; ++j) {
      out.set(i * nv + merge_var_lt(n, j), leaf.lt_at(i, j));
      if (j > 0) out.set(i * nv + merge_var_eq(n, j), leaf.eq_at(i, j));
    }
  }
  return out;
}

// Receiver release for the interleaved opening, per item and merge variable.
inline BitVector merge_release(const TeeTape& receiver_tape, InstanceId first, std::size_t count,
                               unsigned n) {
  const std::size_t nv = 2 * std::size_t{n} - 1;
  BitVector out(count * nv);
  for (std::size_t i = 0; i < count; ++i) {
    const auto rel = leaf_release(receiver_tape, first + static_cast<InstanceId>(i), n);
    for (unsigned j = 0; j < n; ++j) {
      out.set(i * nv + merge_var_lt(n, j), rel[j].first);
      if (j > 0) out.set(i * nv + merge_var_eq(n, j), rel[j].second);
    }
  }
  return out;
}

// Comparison merge for one party over instances first..first+count-1 of
// its tape. The plan must come from comparison_merge_matrix(n).
inline Task<BitVector> merge_tami_party(Endpoint& ep, TeeTape& tape, InstanceId first,
                                        const LeafShares& leaf, const ReusePlan& plan,
                                        const PolyTables& tables, bool interleaved,
                                        PartyCounters* counters = nullptr) {
  if (leaf.owner != ep.role() || tape.role() != ep.role()) {
    throw MisuseError("merge inputs belong to the other party");
  }
  const unsigned n = leaf.n;
  const std::size_t count = leaf.count;
  const std::size_t nv = 2 * std::size_t{n} - 1;
  if (plan.num_vars() != nv) throw ConfigError("reuse plan does not match the chunk count");
  const BitVector vars = merge_variables(leaf);
  BitVector release;
  if (interleaved && ep.role() == Role::Receiver) release = merge_release(tape, first, count, n);
  auto masks = [&](std::size_t i) {
    return merge_mask_shares(tape, first + static_cast<InstanceId>(i), nv);
  };
  auto rand = [&](std::size_t i) {
    return subset_product_shares(tape, first + static_cast<InstanceId>(i), plan);
  };
  const BitVector rows = co_await polymult_party(ep, tables, vars, count, masks, rand,
                                                 interleaved ? &release : nullptr, interleaved,
                                                 counters);
  co_return sum_rows(rows, count, tables.rows.size());
}

// Driver: tape-assisted merge of a LeafResult (instances taken from it).
// Interleaving requires the sender's leaf shares to be the tape's own, as
// produced by the tape-assisted leaf comparison.
inline BitSharePair polymult_tami(const LeafResult& leaf, Session& session, bool interleaved) {
  const unsigned n = leaf.sender.n;
  const ReusePlan plan = build_reuse_plan(comparison_merge_matrix(n));
  const PolyTables tables = build_poly_tables(plan);
  auto out = session.run(
      merge_tami_party(session.channel().sender(), session.sender_tape(), leaf.instance,
                       leaf.sender, plan, tables, interleaved),
      merge_tami_party(session.channel().receiver(), session.receiver_tape(), leaf.instance,
                       leaf.receiver, plan, tables, interleaved));
  return {std::move(out.sender), std::move(out.receiver)};
}

// Builds a LeafResult whose sender shares are the tape's leaf output shares
// for instances first..first+count-1 and whose reconstruction is the given
// plaintext (lt/eq bits item-major, count * n each). For exercising the
// merge on chosen inputs.
inline LeafResult share_leaf_plaintext(const TeeTape& sender_tape, InstanceId first,
                                       std::size_t count, unsigned n, const BitVector& lt,
                                       const BitVector& eq) {
  if (lt.size() != count * n || eq.size() != count * n) {
    throw ConfigError("plaintext leaf vectors have the wrong length");
  }
  LeafResult out;
  out.instance = first;
  out.sender = LeafShares{Role::Sender, n, count, BitVector(count * n), BitVector(count * n)};
  out.receiver = LeafShares{Role::Receiver, n, count, BitVector(count * n), BitVector(count * n)};
  for (std::size_t i = 0; i < count; ++i) {
    const auto s = leaf_sender_shares(sender_tape, first + static_cast<InstanceId>(i), n);
    for (unsigned j = 0; j < n; ++j) {
      const std::size_t k = i * n + j;
      out.sender.lt.set(k, s[j].first);
      out.sender.eq.set(k, s[j].second);
      out.receiver.lt.set(k, lt.get(k) ^ s[j].first);
      out.receiver.eq.set(k, eq.get(k) ^ s[j].second);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// General polynomial F = sum_i prod_j v_j^{E_ij}, v_j = x_j + y_j

// Exponents collapsed to 0/1 (over GF(2), v^e = v for e >= 1).
inline ExponentMatrix collapse_exponents(const ExponentMatrix& e) {
  std::vector<std::vector<std::uint32_t>> rows;
  for (std::size_t i = 0; i < e.rows(); ++i) {
    std::vector<std::uint32_t> r(e.row(i));
    for (auto& x : r) x = x > 0 ? 1 : 0;
    rows.push_back(std::move(r));
  }
  return ExponentMatrix(std::move(rows));
}

inline std::uint64_t binomial(std::uint32_t n, std::uint32_t k) {
  std::uint64_t r = 1;
  for (std::uint32_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

inline std::uint64_t ring_pow(std::uint64_t b, std::uint32_t e, std::uint64_t mask) {
  std::uint64_t r = 1;
  while (e) {
    if (e & 1u) r *= b;
    b *= b;
    e >>= 1;
  }
  return r & mask;
}

// Ring party routine: opens d_j = v_j - r_j for every active column (one
// exchange, PolyOpen), then expands each row binomially against the
// monomial shares <r^k>.
inline Task<std::uint64_t> poly_ring_party(Endpoint& ep, const ExponentMatrix& e,
                                           std::span<const std::uint64_t> own,
                                           const MonomialShares& rand,
                                           PartyCounters* counters = nullptr) {
  const bool sender = ep.role() == Role::Sender;
  const unsigned w = rand.width;
  const std::uint64_t m = low_mask(w);
  if (own.size() != e.cols()) throw ConfigError("share vector does not match the matrix width");
  if (rand.holder != ep.role()) throw MisuseError("monomial shares belong to the other party");

  auto lookup = [&](const Monomial& k) -> std::uint64_t {
    auto it = rand.shares.find(k);
    if (it == rand.shares.end()) {
      std::string txt;
      for (auto v : k) txt += (txt.empty() ? "" : ",") + std::to_string(v);
      throw ProtocolError("randomness coverage gap: monomial r^(" + txt + ") is missing");
    }
    return it->second;
  };
  // Check coverage before any communication.
  for (const auto& k : required_monomials(e)) lookup(k);

  SubsetMask used = 0;
  for (std::size_t i = 0; i < e.rows(); ++i) used |= e.active_set(i);
  const auto opened = mask_indices(used);

  BitVector mine(opened.size() * w);
  for (std::size_t k = 0; k < opened.size(); ++k) {
    Monomial unit(e.cols(), 0);
    unit[opened[k]] = 1;
    mine.write_bits(k * w, (own[opened[k]] - lookup(unit)) & m, w);
  }
  ep.send(FrameTag::PolyOpen, mine);
  const BitVector theirs = co_await ep.recv(FrameTag::PolyOpen, mine.size());
  std::vector<std::uint64_t> d(e.cols(), 0);
  for (std::size_t k = 0; k < opened.size(); ++k) {
    d[opened[k]] = (mine.get_bits(k * w, w) + theirs.get_bits(k * w, w)) & m;
  }

  std::uint64_t share = 0;
  std::uint64_t terms = 0;
  for (std::size_t i = 0; i < e.rows(); ++i) {
    const auto& row = e.row(i);
    Monomial k(row.size(), 0);
    while (true) {
      std::uint64_t coeff = 1;
      bool zero = true;
      for (std::size_t j = 0; j < row.size(); ++j) {
        coeff *= binomial(row[j], k[j]) * ring_pow(d[j], row[j] - k[j], m);
        coeff &= m;
        if (k[j] != 0) zero = false;
      }
      if (zero) {
        if (sender) share += coeff;
      } else {
        share += coeff * lookup(k);
      }
      share &= m;
      ++terms;
      std::size_t j = 0;
      while (j < k.size() && k[j] == row[j]) {
        k[j] = 0;
        ++j;
      }
      if (j == k.size()) break;
      ++k[j];
    }
  }
  if (counters) counters->poly_terms += terms;
  co_return share;
}

// Evaluates F on v = x + y (x held by the sender, y by the receiver) in
// Z_{2^width}; width 1 is GF(2), where exponents collapse and the
// subset-product path is used. Randomness comes from the session tapes.
inline std::pair<ArithShare, ArithShare> eval_poly_general(const ExponentMatrix& e,
                                                           std::span<const std::uint64_t> x,
                                                           std::span<const std::uint64_t> y,
                                                           unsigned width, Session& session) {
  if (width < 1 || width > 64) throw ConfigError("ring width must be in [1, 64]");
  if (x.size() != e.cols() || y.size() != e.cols()) {
    throw ConfigError("share vectors do not match the matrix width");
  }
  const InstanceId inst = session.allocate(1);
  if (width == 1) {
    const ExponentMatrix collapsed = collapse_exponents(e);
    const ReusePlan plan = build_reuse_plan(collapsed);
    const PolyTables tables = build_poly_tables(plan);
    const std::size_t nv = e.cols();
    BitVector xs(nv), ys(nv);
    for (std::size_t j = 0; j < nv; ++j) {
      xs.set(j, x[j] & 1u);
      ys.set(j, y[j] & 1u);
    }
    auto party = [&](Role r, const BitVector& vars) {
      TeeTape& tape = session.tape(r);
      return polymult_party(
          session.channel().endpoint(r), tables, vars, 1,
          [&tape, inst, nv](std::size_t) { return merge_mask_shares(tape, inst, nv); },
          [&tape, inst, &plan](std::size_t) { return subset_product_shares(tape, inst, plan); },
          nullptr, false);
    };
    auto out = session.run(party(Role::Sender, xs), party(Role::Receiver, ys));
    const std::size_t rows = tables.rows.size();
    return {ArithShare{sum_rows(out.sender, 1, rows).get(0), 1},
            ArithShare{sum_rows(out.receiver, 1, rows).get(0), 1}};
  }
  const auto rs = monomial_shares(session.sender_tape(), inst, e, width);
  const auto rr = monomial_shares(session.receiver_tape(), inst, e, width);
  auto out = session.run(poly_ring_party(session.channel().sender(), e, x, rs),
                         poly_ring_party(session.channel().receiver(), e, y, rr));
  return {ArithShare{out.sender, width}, ArithShare{out.receiver, width}};
}

// Ring evaluation with caller-supplied monomial shares.
inline std::pair<ArithShare, ArithShare> eval_poly_general(const ExponentMatrix& e,
                                                           std::span<const std::uint64_t> x,
                                                           std::span<const std::uint64_t> y,
                                                           const MonomialShares& sender_rand,
                                                           const MonomialShares& receiver_rand,
                                                           Session& session) {
  if (sender_rand.width != receiver_rand.width) {
    throw MisuseError("monomial share widths differ");
  }
  auto out = session.run(poly_ring_party(session.channel().sender(), e, x, sender_rand),
                         poly_ring_party(session.channel().receiver(), e, y, receiver_rand));
  return {ArithShare{out.sender, sender_rand.width}, ArithShare{out.receiver, receiver_rand.width}};
}

}  // namespace millforge
