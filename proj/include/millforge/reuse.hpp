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

// Correlated-randomness accounting for one-round polynomial evaluation.
//
// A polynomial is described by an exponent matrix E (m rows, n columns). Row i
// is the product of the masked factors j with E[i][j] > 0 (its active set A_i).
// Evaluating row i from opened masked values needs shares of the product of
// the mask bits over every nonempty subset S of A_i. Rows that share columns
// can share those subset products; the ReusePlan is the deduplicated list.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "millforge/errors.hpp"

namespace millforge {

using SubsetMask = std::uint64_t;

inline std::vector<unsigned> mask_indices(SubsetMask s) {
  std::vector<unsigned> out;
  while (s != 0) {
    out.push_back(static_cast<unsigned>(std::countr_zero(s)));
    s &= s - 1;
  }
  return out;
}

inline SubsetMask mask_from_indices(const std::vector<unsigned>& idx) {
  SubsetMask s = 0;
  for (auto i : idx) s |= SubsetMask{1} << i;
  return s;
}

class ExponentMatrix {
 public:
  static constexpr unsigned kMaxColumns = 64;

  ExponentMatrix() = default;

  explicit ExponentMatrix(std::vector<std::vector<std::uint32_t>> rows) : rows_(std::move(rows)) {
    if (rows_.empty()) throw ConfigError("exponent matrix has no rows");
    cols_ = rows_.front().size();
    if (cols_ == 0) throw ConfigError("exponent matrix has no columns");
    if (cols_ > kMaxColumns) {
      throw ConfigError("exponent matrix has " + std::to_string(cols_) + " columns, limit is 64");
    }
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (rows_[i].size() != cols_) {
        throw ConfigError("exponent matrix row " + std::to_string(i) + " has " +
                          std::to_string(rows_[i].size()) + " entries, expected " +
                          std::to_string(cols_));
      }
      if (std::all_of(rows_[i].begin(), rows_[i].end(), [](auto e) { return e == 0; })) {
        throw ConfigError("exponent matrix row " + std::to_string(i) + " has no positive entry");
      }
    }
  }

  // Rows separated by newlines, entries by spaces or tabs. Blank lines and
  // lines starting with '#' are skipped.
  static ExponentMatrix parse(std::string_view text) {
    std::vector<std::vector<std::uint32_t>> rows;
    std::size_t line_no = 0;
    std::size_t expected_cols = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      auto end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(pos, end - pos);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      ++line_no;
      pos = end + 1;

      std::vector<std::uint32_t> row;
      std::size_t col = 0;
      bool comment = false;
      while (col < line.size()) {
        const char c = line[col];
        if (c == ' ' || c == '\t') {
          ++col;
          continue;
        }
        if (c == '#' && row.empty()) {
          comment = true;
          break;
        }
        if (c < '0' || c > '9') {
          throw ParseError(line_no, col + 1, std::string("unexpected character '") + c + "'");
        }
        const std::size_t start = col;
        std::uint64_t v = 0;
        while (col < line.size() && line[col] >= '0' && line[col] <= '9') {
          v = v * 10 + static_cast<std::uint64_t>(line[col] - '0');
          if (v > std::numeric_limits<std::uint32_t>::max()) {
            throw ParseError(line_no, start + 1, "exponent too large");
          }
          ++col;
        }
        if (col < line.size() && line[col] != ' ' && line[col] != '\t') {
          throw ParseError(line_no, col + 1,
                           std::string("unexpected character '") + line[col] + "'");
        }
        row.push_back(static_cast<std::uint32_t>(v));
      }
      if (comment || row.empty()) continue;
      if (rows.empty()) {
        expected_cols = row.size();
      } else if (row.size() != expected_cols) {
        throw ParseError(line_no, 1,
                         "row has " + std::to_string(row.size()) + " entries, expected " +
                             std::to_string(expected_cols));
      }
      if (row.size() > kMaxColumns) throw ParseError(line_no, 1, "more than 64 columns");
      if (std::all_of(row.begin(), row.end(), [](auto e) { return e == 0; })) {
        throw ParseError(line_no, 1, "row has no positive entry");
      }
      rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(line_no, 1, "matrix is empty");
    return ExponentMatrix(std::move(rows));
  }

  std::size_t rows() const noexcept { return rows_.size(); }
  std::size_t cols() const noexcept { return cols_; }
  std::uint32_t at(std::size_t i, std::size_t j) const { return rows_.at(i).at(j); }
  const std::vector<std::uint32_t>& row(std::size_t i) const { return rows_.at(i); }

  SubsetMask active_set(std::size_t i) const {
    SubsetMask s = 0;
    for (std::size_t j = 0; j < cols_; ++j) {
      if (rows_[i][j] > 0) s |= SubsetMask{1} << j;
    }
    return s;
  }

  std::string to_text() const {
    std::string out;
    for (const auto& r : rows_) {
      for (std::size_t j = 0; j < r.size(); ++j) {
        if (j) out.push_back(' ');
        out += std::to_string(r[j]);
      }
      out.push_back('\n');
    }
    return out;
  }

  friend bool operator==(const ExponentMatrix&, const ExponentMatrix&) = default;

 private:
  std::vector<std::vector<std::uint32_t>> rows_;
  std::size_t cols_ = 0;
};

inline std::vector<SubsetMask> active_sets(const ExponentMatrix& e) {
  std::vector<SubsetMask> out;
  out.reserve(e.rows());
  for (std::size_t i = 0; i < e.rows(); ++i) out.push_back(e.active_set(i));
  return out;
}

// Merge matrix for an n-chunk comparison over variables
// (lt_0..lt_{n-1}, eq_1..eq_{n-1}). Row k holds lt_{n-1-k} and eq_j for all
// j > n-1-k, so the XOR of all rows is lt_i AND eq_{i+1} AND ... AND eq_{n-1}
// summed over i.
inline std::size_t merge_var_lt(std::size_t, std::size_t j) { return j; }
inline std::size_t merge_var_eq(std::size_t n, std::size_t j) { return n + j - 1; }

inline ExponentMatrix comparison_merge_matrix(std::size_t n) {
  if (n < 1) throw ConfigError("comparison merge needs at least one chunk");
  const std::size_t vars = 2 * n - 1;
  if (vars > ExponentMatrix::kMaxColumns) {
    throw ConfigError("comparison merge with " + std::to_string(n) + " chunks exceeds 64 variables");
  }
  std::vector<std::vector<std::uint32_t>> rows;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = n - 1 - k;
    std::vector<std::uint32_t> row(vars, 0);
    row[merge_var_lt(n, i)] = 1;
    for (std::size_t j = i + 1; j < n; ++j) row[merge_var_eq(n, j)] = 1;
    rows.push_back(std::move(row));
  }
  return ExponentMatrix(std::move(rows));
}

// Sum over rows of (2^{sum of exponents} - 1).
inline std::uint64_t n_naive(const ExponentMatrix& e) {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < e.rows(); ++i) {
    std::uint64_t s = 0;
    for (auto x : e.row(i)) s += x;
    if (s > 62) {
      throw OverflowError("row " + std::to_string(i) + " exponent sum " + std::to_string(s) +
                          " exceeds 62");
    }
    const std::uint64_t term = (std::uint64_t{1} << s) - 1;
    if (total > std::numeric_limits<std::uint64_t>::max() - term) {
      throw OverflowError("n_naive total overflows 64 bits");
    }
    total += term;
  }
  return total;
}

// Sum over rows of (2^{|A_i|} - 1): exponents collapse over GF(2).
inline std::uint64_t n_opt(const ExponentMatrix& e) {
  std::uint64_t total = 0;
  for (auto a : active_sets(e)) {
    const int k = std::popcount(a);
    if (k > 62) throw OverflowError("active set larger than 62");
    total += (std::uint64_t{1} << k) - 1;
  }
  return total;
}

struct FinalCounts {
  std::vector<std::uint64_t> per_row;
  std::uint64_t total = 0;
};

// Inclusion-exclusion count of the subset products each row adds on top of
// the rows before it:
//   count_i = sum over T subset of {0..i-1} of (-1)^{|T|} (2^{|A_i ∩ A_T|} - 1)
// with A_∅ taken as the full column set, so T = ∅ contributes 2^{|A_i|} - 1.
inline FinalCounts n_final(const ExponentMatrix& e) {
  constexpr std::size_t kMaxRows = 24;
  if (e.rows() > kMaxRows) {
    throw ConfigError("n_final supports at most 24 rows (" + std::to_string(e.rows()) +
                      " given); use brute_force_count for larger matrices");
  }
  const auto sets = active_sets(e);
  FinalCounts out;
  out.per_row.reserve(sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (std::popcount(sets[i]) > 62) throw OverflowError("active set larger than 62");
    std::int64_t acc = 0;
    // Depth-first over subsets T of {0..i-1}; once the running intersection
    // is empty every extension contributes 2^0 - 1 = 0, so it is pruned.
    std::function<void(std::size_t, SubsetMask, int)> visit = [&](std::size_t next,
                                                                  SubsetMask inter, int sign) {
      acc += sign * static_cast<std::int64_t>((std::uint64_t{1} << std::popcount(inter)) - 1);
      for (std::size_t t = next; t < i; ++t) {
        const SubsetMask narrowed = inter & sets[t];
        if (narrowed != 0) visit(t + 1, narrowed, -sign);
      }
    };
    visit(0, sets[i], 1);
    out.per_row.push_back(static_cast<std::uint64_t>(acc));
    out.total += static_cast<std::uint64_t>(acc);
  }
  return out;
}

// |{S nonempty : S ⊆ A_i for some i}| by enumerating every subset of the
// column set.
inline std::uint64_t brute_force_count(const ExponentMatrix& e) {
  constexpr std::size_t kMaxCols = 20;
  if (e.cols() > kMaxCols) {
    throw ConfigError("brute_force_count supports at most 20 columns (" +
                      std::to_string(e.cols()) + " given)");
  }
  const auto sets = active_sets(e);
  std::uint64_t count = 0;
  const SubsetMask limit = SubsetMask{1} << e.cols();
  for (SubsetMask s = 1; s < limit; ++s) {
    for (auto a : sets) {
      if ((s & a) == s) {
        ++count;
        break;
      }
    }
  }
  return count;
}

// One term of a row's local-share expansion: the opened part multiplies the
// party's share of the subset product at `randomness`.
struct PlanTerm {
  std::uint32_t randomness = 0;
  SubsetMask opened = 0;

  friend bool operator==(const PlanTerm&, const PlanTerm&) = default;
};

struct PlanRow {
  SubsetMask active = 0;
  std::vector<PlanTerm> terms;

  friend bool operator==(const PlanRow&, const PlanRow&) = default;
};

// Subsets ordered by size, then lexicographically by their sorted indices.
inline bool subset_order(SubsetMask a, SubsetMask b) {
  const int pa = std::popcount(a), pb = std::popcount(b);
  if (pa != pb) return pa < pb;
  // Lexicographic on ascending index lists: the first index present in
  // exactly one of the two sets decides, and the set holding it sorts first.
  const SubsetMask diff = a ^ b;
  if (diff == 0) return false;
  const SubsetMask lowest = diff & (~diff + 1);
  return (a & lowest) != 0;
}

class ReusePlan {
 public:
  ReusePlan() = default;

  ReusePlan(std::size_t num_vars, std::vector<SubsetMask> subsets, std::vector<PlanRow> rows)
      : num_vars_(num_vars), subsets_(std::move(subsets)), rows_(std::move(rows)) {
    index_.reserve(subsets_.size());
    for (std::size_t i = 0; i < subsets_.size(); ++i) {
      if (!index_.emplace(subsets_[i], static_cast<std::uint32_t>(i)).second) {
        throw MisuseError("reuse plan lists subset " + std::to_string(subsets_[i]) + " twice");
      }
    }
  }

  std::size_t num_vars() const noexcept { return num_vars_; }
  std::size_t size() const noexcept { return subsets_.size(); }
  const std::vector<SubsetMask>& subsets() const noexcept { return subsets_; }
  const std::vector<PlanRow>& rows() const noexcept { return rows_; }

  const std::uint32_t* find(SubsetMask s) const {
    auto it = index_.find(s);
    return it == index_.end() ? nullptr : &it->second;
  }

  nlohmann::json to_json() const {
    nlohmann::json subsets = nlohmann::json::array();
    for (auto s : subsets_) subsets.push_back(mask_indices(s));
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : rows_) {
      nlohmann::json terms = nlohmann::json::array();
      for (const auto& t : r.terms) {
        terms.push_back({{"randomness", t.randomness}, {"opened", mask_indices(t.opened)}});
      }
      rows.push_back({{"active", mask_indices(r.active)}, {"terms", std::move(terms)}});
    }
    return {{"num_vars", num_vars_}, {"subsets", std::move(subsets)}, {"rows", std::move(rows)}};
  }

  friend bool operator==(const ReusePlan& a, const ReusePlan& b) {
    return a.num_vars_ == b.num_vars_ && a.subsets_ == b.subsets_ && a.rows_ == b.rows_;
  }

 private:
  std::size_t num_vars_ = 0;
  std::vector<SubsetMask> subsets_;
  std::vector<PlanRow> rows_;
  std::unordered_map<SubsetMask, std::uint32_t> index_;
};

inline ReusePlan build_reuse_plan(const ExponentMatrix& e) {
  constexpr int kMaxActive = 24;
  const auto sets = active_sets(e);
  std::vector<SubsetMask> all;
  for (auto a : sets) {
    if (std::popcount(a) > kMaxActive) {
      throw ConfigError("active set of size " + std::to_string(std::popcount(a)) +
                        " is too large to expand (limit 24)");
    }
    // Enumerate the nonempty submasks of a.
    for (SubsetMask s = a; s != 0; s = (s - 1) & a) all.push_back(s);
  }
  std::sort(all.begin(), all.end(), subset_order);
  all.erase(std::unique(all.begin(), all.end()), all.end());

  std::unordered_map<SubsetMask, std::uint32_t> index;
  index.reserve(all.size());
  for (std::size_t i = 0; i < all.size(); ++i) index.emplace(all[i], static_cast<std::uint32_t>(i));

  std::vector<PlanRow> rows;
  rows.reserve(sets.size());
  for (auto a : sets) {
    PlanRow row{a, {}};
    row.terms.reserve((std::size_t{1} << std::popcount(a)) - 1);
    for (SubsetMask s = a; s != 0; s = (s - 1) & a) {
      row.terms.push_back(PlanTerm{index.at(s), a & ~s});
    }
    std::sort(row.terms.begin(), row.terms.end(),
              [](const PlanTerm& x, const PlanTerm& y) { return x.randomness < y.randomness; });
    rows.push_back(std::move(row));
  }
  return ReusePlan(e.cols(), std::move(all), std::move(rows));
}

}  // namespace millforge
