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

// Bounds on unobserved consideration probabilities.
//
// Absolute bounds need an assumption sum_i p_i >= alpha * k (alpha > 1):
//   lower_i = Pr(i in top k) * (1 - q)
//   upper_i = (sum_j e^{u_j} / e^{u_i}) * (Pr(i first) + k q / (1 - q))
// with q = (alpha e^{1 - alpha})^k bounding Pr(|C| <= k).
//
// Relative bounds: when u_i > u_j yet c = Pr(i in top l) / Pr(j in top l)
// <= 1, the odds satisfy p_i / (1 - p_i) <= c p_j / (1 - p_j). These edges
// form a DAG (utility strictly decreases along each), and lower bounds are
// pushed forward along it while upper bounds are pulled backward.

#ifndef PLC_BOUNDS_HPP_
#define PLC_BOUNDS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <tuple>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "plc/core.hpp"

namespace plc {

struct AlphaAssumption {
  double alpha;
  std::size_t k;

  AlphaAssumption(double alpha_value, std::size_t k_value) : alpha(alpha_value), k(k_value) {
    if (!(alpha > 1.0)) {
      throw Error(ErrorCode::kAlphaNotGreaterThanOne, "alpha must exceed 1, got " + std::to_string(alpha));
    }
    if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
  }
};

// (alpha e^{1 - alpha})^k >= Pr(|C| <= k) before conditioning.
inline double ChernoffDiscardBound(const AlphaAssumption& a) {
  return std::pow(a.alpha * std::exp(1.0 - a.alpha), static_cast<double>(a.k));
}

inline double ExactlyKMassFromTail(double q) {
  if (!(q < 1.0) || q < 0.0) {
    throw Error(ErrorCode::kBoundDegenerate, "tail bound q=" + std::to_string(q) + " outside [0, 1)");
  }
  return q / (1.0 - q);
}

// Upper bound on the conditioned mass of size-exactly-k consideration sets.
inline double ExactlyKMassBound(const AlphaAssumption& a) {
  return ExactlyKMassFromTail(ChernoffDiscardBound(a));
}

// Interval view over top-l rates. Point mode uses the statistics as-is; the
// Wilson mode widens empirical rates to a two-sided confidence interval.
class TopLRates {
 public:
  static TopLRates Point(const TopLStats& stats) { return TopLRates(stats, std::nullopt); }

  static TopLRates Wilson(const TopLStats& stats, double level) {
    if (!(level > 0.0 && level < 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "confidence level must lie in (0, 1)");
    }
    if (stats.sample_count() == 0) {
      throw Error(ErrorCode::kInvalidArgument, "confidence intervals need a sample count");
    }
    return TopLRates(stats, level);
  }

  std::size_t n() const { return stats_.n(); }
  std::size_t k() const { return stats_.k(); }
  const TopLStats& stats() const { return stats_; }

  double point(Item i, std::size_t l) const { return stats_.at(i, l); }
  double lo(Item i, std::size_t l) const { return level_ ? Interval(point(i, l)).first : point(i, l); }
  double hi(Item i, std::size_t l) const { return level_ ? Interval(point(i, l)).second : point(i, l); }

 private:
  TopLRates(const TopLStats& stats, std::optional<double> level) : stats_(stats), level_(level) {
    if (level_) {
      boost::math::normal_distribution<double> standard;
      z_ = boost::math::quantile(standard, 0.5 + *level_ / 2.0);
    }
  }

  std::pair<double, double> Interval(double rate) const {
    const double m = static_cast<double>(stats_.sample_count());
    const double z2 = z_ * z_;
    const double denom = 1.0 + z2 / m;
    const double center = (rate + z2 / (2.0 * m)) / denom;
    const double half = z_ / denom * std::sqrt(rate * (1.0 - rate) / m + z2 / (4.0 * m * m));
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
  }

  TopLStats stats_;
  std::optional<double> level_;
  double z_ = 0.0;
};

inline std::vector<double> InitialLowerBounds(const TopLRates& rates, const AlphaAssumption& a) {
  if (rates.k() < a.k) throw Error(ErrorCode::kInvalidArgument, "statistics do not cover l = k");
  const double keep = 1.0 - ChernoffDiscardBound(a);
  std::vector<double> lower(rates.n());
  for (std::size_t i = 0; i < rates.n(); ++i) lower[i] = rates.lo(static_cast<Item>(i), a.k) * keep;
  return lower;
}

inline std::vector<double> InitialLowerBounds(const TopLStats& stats, const AlphaAssumption& a) {
  return InitialLowerBounds(TopLRates::Point(stats), a);
}

inline std::vector<double> InitialUpperBounds(const TopLRates& rates, const Utilities& u,
                                              const AlphaAssumption& a) {
  if (u.size() != rates.n()) throw Error(ErrorCode::kInvalidArgument, "utility vector size mismatch");
  const double slack = static_cast<double>(a.k) * ExactlyKMassBound(a);
  std::vector<double> upper(rates.n());
  for (std::size_t i = 0; i < rates.n(); ++i) {
    double ratio = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) ratio += std::exp(u[j] - u[i]);
    upper[i] = std::min(1.0, ratio * (rates.hi(static_cast<Item>(i), 1) + slack));
  }
  return upper;
}

inline std::vector<double> InitialUpperBounds(const TopLStats& stats, const Utilities& u,
                                              const AlphaAssumption& a) {
  return InitialUpperBounds(TopLRates::Point(stats), u, a);
}

// c = Pr(i in top l) / Pr(j in top l) when that is defined and <= 1.
inline std::optional<double> RelativeGapC(const TopLStats& stats, Item i, Item j, std::size_t l) {
  const double pj = stats.at(j, l);
  if (!(pj > 0.0)) return std::nullopt;
  const double c = stats.at(i, l) / pj;
  if (c > 1.0) return std::nullopt;
  return c;
}

namespace detail {
inline void CheckTransferInputs(double b, double c) {
  if (!(b >= 0.0 && b <= 1.0) || !(c >= 0.0 && c <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "transfer needs bound and ratio in [0, 1]");
  }
}
}  // namespace detail

// Lower bound on p_j from a lower bound b_i on p_i: b_i / (c - c b_i + b_i).
inline double LbTransfer(double b_i, double c) {
  detail::CheckTransferInputs(b_i, c);
  const double denom = c - c * b_i + b_i;
  if (!(denom > 0.0)) throw Error(ErrorCode::kDegenerateDenominator, "lower-bound transfer denominator is 0");
  return b_i / denom;
}

// Upper bound on p_i from an upper bound b_j on p_j: c b_j / (1 - b_j + c b_j).
inline double UbTransfer(double b_j, double c) {
  detail::CheckTransferInputs(b_j, c);
  const double denom = 1.0 - b_j + c * b_j;
  if (!(denom > 0.0)) throw Error(ErrorCode::kDegenerateDenominator, "upper-bound transfer denominator is 0");
  return c * b_j / denom;
}

struct FlipGap {
  std::size_t l;
  double c;

  friend bool operator==(const FlipGap&, const FlipGap&) = default;
};

// Edge i -> j: u_i > u_j but j reaches the top l strictly more often than i
// for some l. `gaps` lists every l whose ratio c lies in (0, 1].
struct FlipEdge {
  Item from;
  Item to;
  std::vector<FlipGap> gaps;

  friend bool operator==(const FlipEdge&, const FlipEdge&) = default;
};

class FlipDag {
 public:
  explicit FlipDag(std::size_t n) : n_(n) {}

  std::size_t n() const { return n_; }
  const std::vector<FlipEdge>& edges() const { return edges_; }
  bool empty() const { return edges_.empty(); }

  void AddEdge(FlipEdge e) {
    if (e.from < 0 || e.to < 0 || static_cast<std::size_t>(e.from) >= n_ ||
        static_cast<std::size_t>(e.to) >= n_ || e.from == e.to) {
      throw Error(ErrorCode::kInvalidArgument, "invalid DAG edge", e.from);
    }
    for (const FlipGap& g : e.gaps) {
      if (!(g.c > 0.0 && g.c <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "edge ratio outside (0, 1]");
    }
    edges_.push_back(std::move(e));
    std::sort(edges_.begin(), edges_.end(),
              [](const FlipEdge& a, const FlipEdge& b) { return std::tie(a.from, a.to) < std::tie(b.from, b.to); });
  }

  bool HasEdge(Item from, Item to) const {
    return std::any_of(edges_.begin(), edges_.end(),
                       [&](const FlipEdge& e) { return e.from == from && e.to == to; });
  }

  std::vector<std::vector<std::size_t>> OutEdges() const {
    std::vector<std::vector<std::size_t>> out(n_);
    for (std::size_t e = 0; e < edges_.size(); ++e) out[static_cast<std::size_t>(edges_[e].from)].push_back(e);
    return out;
  }

  std::vector<std::vector<std::size_t>> InEdges() const {
    std::vector<std::vector<std::size_t>> in(n_);
    for (std::size_t e = 0; e < edges_.size(); ++e) in[static_cast<std::size_t>(edges_[e].to)].push_back(e);
    return in;
  }

 private:
  std::size_t n_;
  std::vector<FlipEdge> edges_;
};

enum class TopoTieBreak { kSmallestIndex, kLargestIndex };

// Kahn's algorithm; among ready nodes the smallest (or largest) index goes
// first. Throws CycleDetected when no order exists.
inline std::vector<Item> TopologicalOrder(const FlipDag& dag,
                                          TopoTieBreak tie = TopoTieBreak::kSmallestIndex) {
  const std::size_t n = dag.n();
  std::vector<std::size_t> indegree(n, 0);
  for (const FlipEdge& e : dag.edges()) ++indegree[static_cast<std::size_t>(e.to)];
  auto out = dag.OutEdges();
  std::function<bool(Item, Item)> later = tie == TopoTieBreak::kSmallestIndex
                                              ? std::function<bool(Item, Item)>(std::greater<Item>())
                                              : std::function<bool(Item, Item)>(std::less<Item>());
  std::priority_queue<Item, std::vector<Item>, std::function<bool(Item, Item)>> ready(later);
  for (std::size_t i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.push(static_cast<Item>(i));
  }
  std::vector<Item> order;
  order.reserve(n);
  while (!ready.empty()) {
    Item i = ready.top();
    ready.pop();
    order.push_back(i);
    for (std::size_t e : out[static_cast<std::size_t>(i)]) {
      auto j = static_cast<std::size_t>(dag.edges()[e].to);
      if (--indegree[j] == 0) ready.push(static_cast<Item>(j));
    }
  }
  if (order.size() != n) throw Error(ErrorCode::kCycleDetected, "flip graph contains a cycle");
  return order;
}

inline void CheckTopologicalOrder(const FlipDag& dag, const std::vector<Item>& order) {
  const std::size_t n = dag.n();
  std::vector<std::size_t> position(n, n);
  if (order.size() != n) throw Error(ErrorCode::kInvalidArgument, "order must list every item once");
  for (std::size_t pos = 0; pos < n; ++pos) {
    auto i = static_cast<std::size_t>(order[pos]);
    if (order[pos] < 0 || i >= n || position[i] != n) {
      throw Error(ErrorCode::kInvalidArgument, "order must list every item once");
    }
    position[i] = pos;
  }
  for (const FlipEdge& e : dag.edges()) {
    if (position[static_cast<std::size_t>(e.from)] > position[static_cast<std::size_t>(e.to)]) {
      throw Error(ErrorCode::kInvalidArgument, "order is not topological");
    }
  }
}

// Flip DAG under interval rates: c uses the upper rate of i over the lower
// rate of j, which is the conservative choice for both transfers (each
// bound loosens as c grows).
inline FlipDag BuildFlipDag(const Utilities& u, const TopLRates& rates) {
  const std::size_t n = rates.n();
  if (u.size() != n) throw Error(ErrorCode::kInvalidArgument, "utility vector size mismatch");
  FlipDag dag(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!(u[i] > u[j])) continue;
      bool flipped = false;
      std::vector<FlipGap> gaps;
      for (std::size_t l = 1; l <= rates.k(); ++l) {
        const double hi_i = rates.hi(static_cast<Item>(i), l);
        const double lo_j = rates.lo(static_cast<Item>(j), l);
        if (hi_i < lo_j) flipped = true;
        if (lo_j > 0.0) {
          const double c = hi_i / lo_j;
          if (c > 0.0 && c <= 1.0) gaps.push_back({l, c});
        }
      }
      if (flipped) dag.AddEdge({static_cast<Item>(i), static_cast<Item>(j), std::move(gaps)});
    }
  }
  TopologicalOrder(dag);
  return dag;
}

inline FlipDag BuildFlipDag(const Utilities& u, const TopLStats& stats) {
  return BuildFlipDag(u, TopLRates::Point(stats));
}

// Pushes lower bounds along edges in the given topological order.
inline std::vector<double> TightenLowerBounds(std::vector<double> lower, const FlipDag& dag,
                                              const std::vector<Item>& order) {
  if (lower.size() != dag.n()) throw Error(ErrorCode::kInvalidArgument, "bound vector size mismatch");
  CheckTopologicalOrder(dag, order);
  auto out = dag.OutEdges();
  for (Item i : order) {
    for (std::size_t e : out[static_cast<std::size_t>(i)]) {
      const FlipEdge& edge = dag.edges()[e];
      double& b_j = lower[static_cast<std::size_t>(edge.to)];
      const double b_i = std::clamp(lower[static_cast<std::size_t>(i)], 0.0, 1.0);
      for (const FlipGap& g : edge.gaps) b_j = std::max(b_j, LbTransfer(b_i, g.c));
    }
  }
  return lower;
}

inline std::vector<double> TightenLowerBounds(std::vector<double> lower, const FlipDag& dag) {
  return TightenLowerBounds(std::move(lower), dag, TopologicalOrder(dag));
}

// Pulls upper bounds backward: each j is final before it bounds its
// in-neighbours, so the reversed topological order is used.
inline std::vector<double> TightenUpperBounds(std::vector<double> upper, const FlipDag& dag,
                                              const std::vector<Item>& order) {
  if (upper.size() != dag.n()) throw Error(ErrorCode::kInvalidArgument, "bound vector size mismatch");
  CheckTopologicalOrder(dag, order);
  auto in = dag.InEdges();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const Item j = *it;
    for (std::size_t e : in[static_cast<std::size_t>(j)]) {
      const FlipEdge& edge = dag.edges()[e];
      double& b_i = upper[static_cast<std::size_t>(edge.from)];
      const double b_j = std::clamp(upper[static_cast<std::size_t>(j)], 0.0, 1.0);
      for (const FlipGap& g : edge.gaps) b_i = std::min(b_i, UbTransfer(b_j, g.c));
    }
  }
  return upper;
}

inline std::vector<double> TightenUpperBounds(std::vector<double> upper, const FlipDag& dag) {
  return TightenUpperBounds(std::move(upper), dag, TopologicalOrder(dag));
}

// reach[i][j] != 0 iff a non-empty path i -> ... -> j exists.
inline std::vector<std::vector<char>> Reachability(const FlipDag& dag) {
  const std::size_t n = dag.n();
  std::vector<Item> order = TopologicalOrder(dag);
  auto out = dag.OutEdges();
  std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    auto i = static_cast<std::size_t>(*it);
    for (std::size_t e : out[i]) {
      auto j = static_cast<std::size_t>(dag.edges()[e].to);
      reach[i][j] = 1;
      for (std::size_t t = 0; t < n; ++t) reach[i][t] = static_cast<char>(reach[i][t] | reach[j][t]);
    }
  }
  return reach;
}

// Minimal edge subset with the same reachability: an edge i -> j survives
// unless j is reachable from another direct successor of i.
inline FlipDag TransitiveReduction(const FlipDag& dag) {
  auto reach = Reachability(dag);
  auto out = dag.OutEdges();
  FlipDag reduced(dag.n());
  for (const FlipEdge& e : dag.edges()) {
    bool redundant = false;
    for (std::size_t other : out[static_cast<std::size_t>(e.from)]) {
      auto w = static_cast<std::size_t>(dag.edges()[other].to);
      if (dag.edges()[other].to != e.to && reach[w][static_cast<std::size_t>(e.to)]) {
        redundant = true;
        break;
      }
    }
    if (!redundant) reduced.AddEdge(e);
  }
  return reduced;
}

enum class BoundStage { kInitial, kTightened };

struct BoundState {
  std::vector<double> lower;
  std::vector<double> upper;
  BoundStage stage = BoundStage::kInitial;
  // Items whose raw lower bound exceeded the raw upper bound. A non-empty
  // list means the assumptions (alpha, statistics or utility order) fail.
  std::vector<Item> inconsistent;

  bool consistent() const { return inconsistent.empty(); }
};

// Clamps into [0, 1] and records crossings instead of hiding them.
inline BoundState MakeBoundState(std::vector<double> lower, std::vector<double> upper, BoundStage stage) {
  if (lower.size() != upper.size()) throw Error(ErrorCode::kInvalidArgument, "bound vectors differ in size");
  BoundState state;
  state.stage = stage;
  for (std::size_t i = 0; i < lower.size(); ++i) {
    lower[i] = std::clamp(lower[i], 0.0, 1.0);
    upper[i] = std::clamp(upper[i], 0.0, 1.0);
    if (lower[i] > upper[i]) state.inconsistent.push_back(static_cast<Item>(i));
  }
  state.lower = std::move(lower);
  state.upper = std::move(upper);
  return state;
}

struct BoundsOptions {
  double alpha = 0.0;  // required; no default
  std::size_t k = 0;
  // Two-sided Wilson level for empirical rates; point estimates when unset.
  std::optional<double> conservative_ci;
};

struct BoundsResult {
  BoundState initial;
  BoundState tightened;
  FlipDag dag{0};
};

// Initial bounds, flip DAG and both propagation passes.
inline BoundsResult ComputeBounds(const TopLStats& stats, const Utilities& u, const BoundsOptions& opts) {
  AlphaAssumption a(opts.alpha, opts.k);
  TopLRates rates = opts.conservative_ci ? TopLRates::Wilson(stats, *opts.conservative_ci) : TopLRates::Point(stats);
  BoundsResult out;
  std::vector<double> lower = InitialLowerBounds(rates, a);
  std::vector<double> upper = InitialUpperBounds(rates, u, a);
  out.initial = MakeBoundState(lower, upper, BoundStage::kInitial);
  out.dag = BuildFlipDag(u, rates);
  out.tightened = MakeBoundState(TightenLowerBounds(std::move(lower), out.dag),
                                 TightenUpperBounds(std::move(upper), out.dag), BoundStage::kTightened);
  return out;
}

}  // namespace plc

#endif  // PLC_BOUNDS_HPP_
