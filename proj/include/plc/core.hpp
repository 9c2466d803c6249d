// Copyright 2026 The PLC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Domain types shared by the Plackett-Luce-with-consideration library:
// item universes, utilities, consideration probabilities, rankings,
// ranking datasets and top-l statistics.

#ifndef PLC_CORE_HPP_
#define PLC_CORE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace plc {

using Item = int;
using ItemSet = std::vector<Item>;

enum class ErrorCode {
  kDuplicateItem,
  kItemOutOfRange,
  kEmptyRanking,
  kInvalidArgument,
  kConsiderationSetTooSmall,
  kMissingConsiderationSet,
  kMaxIterationsExceeded,
  kItemNeverConsidered,
  kNormalizerZero,
  kRejectionCapExceeded,
  kUniverseTooLargeForExact,
  kNonPositiveUtility,
  kInfeasibleC,
  kAlphaNotGreaterThanOne,
  kBoundDegenerate,
  kDegenerateDenominator,
  kCycleDetected,
  kNonUniformK,
  kUnknownSeparator,
  kTooFewRatings,
  kEmptyDataset,
  kParseError,
  kIoError,
};

inline const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDuplicateItem: return "DuplicateItem";
    case ErrorCode::kItemOutOfRange: return "ItemOutOfRange";
    case ErrorCode::kEmptyRanking: return "EmptyRanking";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kConsiderationSetTooSmall: return "ConsiderationSetTooSmall";
    case ErrorCode::kMissingConsiderationSet: return "MissingConsiderationSet";
    case ErrorCode::kMaxIterationsExceeded: return "MaxIterationsExceeded";
    case ErrorCode::kItemNeverConsidered: return "ItemNeverConsidered";
    case ErrorCode::kNormalizerZero: return "NormalizerZero";
    case ErrorCode::kRejectionCapExceeded: return "RejectionCapExceeded";
    case ErrorCode::kUniverseTooLargeForExact: return "UniverseTooLargeForExact";
    case ErrorCode::kNonPositiveUtility: return "NonPositiveUtility";
    case ErrorCode::kInfeasibleC: return "InfeasibleC";
    case ErrorCode::kAlphaNotGreaterThanOne: return "AlphaNotGreaterThanOne";
    case ErrorCode::kBoundDegenerate: return "BoundDegenerate";
    case ErrorCode::kDegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::kCycleDetected: return "CycleDetected";
    case ErrorCode::kNonUniformK: return "NonUniformK";
    case ErrorCode::kUnknownSeparator: return "UnknownSeparator";
    case ErrorCode::kTooFewRatings: return "TooFewRatings";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

// All library failures are reported through this exception. `index()` carries
// the offending item index or (for file parsers) the 1-based line number.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message,
        std::optional<std::int64_t> index = std::nullopt)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code),
        index_(index) {}

  ErrorCode code() const { return code_; }
  std::optional<std::int64_t> index() const { return index_; }

 private:
  ErrorCode code_;
  std::optional<std::int64_t> index_;
};

// Item universe {0..n-1} with an optional bijective label map.
class Universe {
 public:
  explicit Universe(std::size_t n) : n_(n) {
    if (n == 0) throw Error(ErrorCode::kInvalidArgument, "universe must be non-empty");
  }

  explicit Universe(std::vector<std::string> labels) : n_(labels.size()), labels_(std::move(labels)) {
    if (n_ == 0) throw Error(ErrorCode::kInvalidArgument, "universe must be non-empty");
    for (std::size_t i = 0; i < n_; ++i) {
      if (labels_[i].empty()) {
        throw Error(ErrorCode::kInvalidArgument, "empty item label", static_cast<std::int64_t>(i));
      }
      if (!index_.emplace(labels_[i], static_cast<Item>(i)).second) {
        throw Error(ErrorCode::kDuplicateItem, "duplicate label '" + labels_[i] + "'",
                    static_cast<std::int64_t>(i));
      }
    }
  }

  std::size_t size() const { return n_; }
  bool has_labels() const { return !labels_.empty(); }
  const std::vector<std::string>& labels() const { return labels_; }

  std::string label(Item i) const {
    return has_labels() ? labels_.at(static_cast<std::size_t>(i)) : std::to_string(i);
  }

  std::optional<Item> index_of(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::size_t n_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, Item> index_;
};

// Per-item log-strengths. Only differences matter to Plackett-Luce.
class Utilities {
 public:
  Utilities() = default;
  explicit Utilities(std::vector<double> values) : values_(std::move(values)) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i])) {
        throw Error(ErrorCode::kInvalidArgument, "utility is not finite",
                    static_cast<std::int64_t>(i));
      }
    }
  }
  Utilities(std::initializer_list<double> values) : Utilities(std::vector<double>(values)) {}

  static Utilities Zeros(std::size_t n) { return Utilities(std::vector<double>(n, 0.0)); }

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }
  double max() const { return *std::max_element(values_.begin(), values_.end()); }

  friend bool operator==(const Utilities&, const Utilities&) = default;

 private:
  std::vector<double> values_;
};

// Independent consideration probabilities, each in (0, 1].
class ConsiderationProbs {
 public:
  ConsiderationProbs() = default;
  explicit ConsiderationProbs(std::vector<double> values) : values_(std::move(values)) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!(values_[i] > 0.0 && values_[i] <= 1.0)) {
        throw Error(ErrorCode::kInvalidArgument, "consideration probability outside (0, 1]",
                    static_cast<std::int64_t>(i));
      }
    }
  }
  ConsiderationProbs(std::initializer_list<double> values)
      : ConsiderationProbs(std::vector<double>(values)) {}

  static ConsiderationProbs Constant(std::size_t n, double p) {
    return ConsiderationProbs(std::vector<double>(n, p));
  }

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }
  double sum() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

  friend bool operator==(const ConsiderationProbs&, const ConsiderationProbs&) = default;

 private:
  std::vector<double> values_;
};

// An ordered list of distinct items, position 0 = top. Validity against a
// universe is checked by ValidateRanking.
class Ranking {
 public:
  Ranking() = default;
  explicit Ranking(std::vector<Item> items) : items_(std::move(items)) {}
  Ranking(std::initializer_list<Item> items) : items_(items) {}

  std::size_t size() const { return items_.size(); }
  Item operator[](std::size_t pos) const { return items_[pos]; }
  std::span<const Item> items() const { return items_; }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

  bool contains(Item i) const { return std::find(items_.begin(), items_.end(), i) != items_.end(); }

  friend bool operator==(const Ranking&, const Ranking&) = default;
  friend auto operator<=>(const Ranking&, const Ranking&) = default;

 private:
  std::vector<Item> items_;
};

inline void ValidateRanking(const Ranking& r, std::size_t n) {
  if (r.size() == 0) throw Error(ErrorCode::kEmptyRanking, "ranking has no entries");
  std::vector<char> seen(n, 0);
  for (Item i : r) {
    if (i < 0 || static_cast<std::size_t>(i) >= n) {
      throw Error(ErrorCode::kItemOutOfRange, "item " + std::to_string(i) + " out of range", i);
    }
    if (seen[static_cast<std::size_t>(i)]) {
      throw Error(ErrorCode::kDuplicateItem, "item " + std::to_string(i) + " repeated", i);
    }
    seen[static_cast<std::size_t>(i)] = 1;
  }
}

// Sorted, de-duplicated, range-checked copy of an item set.
inline ItemSet CanonicalItemSet(ItemSet set, std::size_t n) {
  std::sort(set.begin(), set.end());
  if (std::adjacent_find(set.begin(), set.end()) != set.end()) {
    Item dup = *std::adjacent_find(set.begin(), set.end());
    throw Error(ErrorCode::kDuplicateItem, "item set repeats " + std::to_string(dup), dup);
  }
  for (Item i : set) {
    if (i < 0 || static_cast<std::size_t>(i) >= n) {
      throw Error(ErrorCode::kItemOutOfRange, "item " + std::to_string(i) + " out of range", i);
    }
  }
  return set;
}

inline ItemSet FullItemSet(std::size_t n) {
  ItemSet all(n);
  std::iota(all.begin(), all.end(), 0);
  return all;
}

// Length-k rankings over a universe of n items, each optionally paired with
// the consideration set it was drawn from.
class RankingDataset {
 public:
  RankingDataset(std::size_t n, std::size_t k) : n_(n), k_(k) {
    if (n == 0) throw Error(ErrorCode::kInvalidArgument, "universe must be non-empty");
    if (k == 0 || k > n) throw Error(ErrorCode::kInvalidArgument, "ranking length must be in [1, n]");
  }

  void add(Ranking r, std::optional<ItemSet> considered = std::nullopt) {
    if (r.size() != k_) {
      throw Error(ErrorCode::kNonUniformK,
                  "ranking length " + std::to_string(r.size()) + " != " + std::to_string(k_),
                  static_cast<std::int64_t>(rankings_.size()));
    }
    ValidateRanking(r, n_);
    if (considered) {
      *considered = CanonicalItemSet(std::move(*considered), n_);
      for (Item i : r) {
        if (!std::binary_search(considered->begin(), considered->end(), i)) {
          throw Error(ErrorCode::kInvalidArgument,
                      "consideration set misses ranked item " + std::to_string(i), i);
        }
      }
    }
    rankings_.push_back(std::move(r));
    considered_.push_back(std::move(considered));
  }

  std::size_t n() const { return n_; }
  std::size_t k() const { return k_; }
  std::size_t size() const { return rankings_.size(); }
  bool empty() const { return rankings_.empty(); }
  const Ranking& ranking(std::size_t idx) const { return rankings_[idx]; }
  const std::optional<ItemSet>& considered(std::size_t idx) const { return considered_[idx]; }
  const std::vector<Ranking>& rankings() const { return rankings_; }

  bool all_have_consideration_sets() const {
    return std::all_of(considered_.begin(), considered_.end(),
                       [](const auto& c) { return c.has_value(); });
  }

 private:
  std::size_t n_;
  std::size_t k_;
  std::vector<Ranking> rankings_;
  std::vector<std::optional<ItemSet>> considered_;
};

enum class StatsSource { kExact, kEmpirical };

// pr_top(i, l) = Pr(item i appears within the first l positions), l in 1..k.
class TopLStats {
 public:
  TopLStats(std::size_t n, std::size_t k, StatsSource source, std::size_t sample_count = 0)
      : n_(n), k_(k), source_(source), sample_count_(sample_count), data_(n * k, 0.0) {}

  std::size_t n() const { return n_; }
  std::size_t k() const { return k_; }
  StatsSource source() const { return source_; }
  std::size_t sample_count() const { return sample_count_; }

  double at(Item i, std::size_t l) const { return data_[index(i, l)]; }
  void set(Item i, std::size_t l, double value) { data_[index(i, l)] = value; }

  // Largest deviation from the structural invariants: entries in [0,1],
  // monotone in l, column sums equal to l.
  double max_invariant_violation() const {
    double worst = 0.0;
    for (std::size_t l = 1; l <= k_; ++l) {
      double col = 0.0;
      for (std::size_t i = 0; i < n_; ++i) {
        double v = at(static_cast<Item>(i), l);
        col += v;
        worst = std::max({worst, -v, v - 1.0});
        if (l > 1) worst = std::max(worst, at(static_cast<Item>(i), l - 1) - v);
      }
      worst = std::max(worst, std::abs(col - static_cast<double>(l)));
    }
    return worst;
  }

 private:
  std::size_t index(Item i, std::size_t l) const {
    if (i < 0 || static_cast<std::size_t>(i) >= n_ || l < 1 || l > k_) {
      throw Error(ErrorCode::kInvalidArgument, "top-l index out of range", i);
    }
    return static_cast<std::size_t>(i) * k_ + (l - 1);
  }

  std::size_t n_;
  std::size_t k_;
  StatsSource source_;
  std::size_t sample_count_;
  std::vector<double> data_;
};

enum class NormalizeMode { kMeanZero, kMinZero };

inline Utilities NormalizeUtilities(const Utilities& u, NormalizeMode mode) {
  if (u.size() == 0) return u;
  auto v = u.values();
  double shift = mode == NormalizeMode::kMinZero
                     ? *std::min_element(v.begin(), v.end())
                     : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  std::vector<double> out(v.begin(), v.end());
  for (double& x : out) x -= shift;
  return Utilities(std::move(out));
}

}  // namespace plc

#endif  // PLC_CORE_HPP_
