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

// Plackett-Luce with consideration (PL+C): a consideration set is drawn by
// independent inclusion conditioned on |C| >= k, then a length-k ranking is
// drawn by Plackett-Luce over C.
//
// Three ways to get Pr_PL+C(r):
//   PlcProbExact   - sums over supersets of r, 2^(n-k) terms.
//   PlcProbMc      - averages Pr_PL(r | C) over rejection-sampled sets;
//                    additive error eps with probability 1 - delta.
//   PlcProbBinned  - groups sets by exp-utility mass on a geometric grid;
//                    deterministic multiplicative error 1 + eps.

#ifndef PLC_PLC_HPP_
#define PLC_PLC_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "plc/consideration.hpp"
#include "plc/core.hpp"
#include "plc/plackett_luce.hpp"
#include "plc/random.hpp"

namespace plc {

inline constexpr std::size_t kDefaultExactMaxItems = 25;

struct PlcParams {
  Utilities u;
  ConsiderationProbs p;

  std::size_t n() const { return u.size(); }
};

namespace detail {

inline void CheckModel(const Utilities& u, const ConsiderationProbs& p, std::size_t k) {
  if (u.size() != p.size()) {
    throw Error(ErrorCode::kInvalidArgument, "utilities and consideration probabilities differ in size");
  }
  if (u.size() == 0) throw Error(ErrorCode::kInvalidArgument, "empty universe");
  if (k == 0 || k > u.size()) {
    throw Error(ErrorCode::kInvalidArgument, "ranking length k must be in [1, n]");
  }
}

inline void CheckExactSize(std::size_t n, std::size_t max_items) {
  if (n > max_items) {
    throw Error(ErrorCode::kUniverseTooLargeForExact,
                "exact enumeration limited to " + std::to_string(max_items) + " items, got " +
                    std::to_string(n));
  }
}

// Sum over C containing `prefix` with |C| >= k of Pr_C(C) times the
// Plackett-Luce probability that the first |prefix| picks are `prefix`.
// Only sets extending the prefix with complement items are visited.
inline double PrefixProb(const Ranking& prefix, const Utilities& u, const ConsiderationProbs& p,
                         std::size_t k, double z) {
  const std::size_t n = u.size();
  const double shift = u.max();
  std::vector<char> in_prefix(n, 0);
  double base_mass = 1.0;
  for (Item i : prefix) {
    in_prefix[static_cast<std::size_t>(i)] = 1;
    base_mass *= p[static_cast<std::size_t>(i)];
  }
  std::vector<double> comp_w;
  std::vector<double> comp_p;
  for (std::size_t a = 0; a < n; ++a) {
    if (!in_prefix[a]) {
      comp_w.push_back(std::exp(u[a] - shift));
      comp_p.push_back(p[a]);
    }
  }
  // tails[t] = sum of weights of prefix items at positions >= t.
  const std::size_t m = prefix.size();
  std::vector<double> num(m);
  std::vector<double> tails(m + 1, 0.0);
  for (std::size_t t = m; t-- > 0;) {
    num[t] = std::exp(u[static_cast<std::size_t>(prefix[t])] - shift);
    tails[t] = tails[t + 1] + num[t];
  }
  auto pl_factor = [&](double extra) {
    double prob = 1.0;
    for (std::size_t t = 0; t < m; ++t) prob *= num[t] / (extra + tails[t]);
    return prob;
  };

  const std::size_t comp_n = comp_w.size();
  double total = 0.0;
  std::function<void(std::size_t, std::size_t, double, double)> visit =
      [&](std::size_t idx, std::size_t count, double mass, double extra) {
        if (mass == 0.0) return;
        if (count + (comp_n - idx) < k) return;
        if (idx == comp_n) {
          total += mass * pl_factor(extra);
          return;
        }
        visit(idx + 1, count + 1, mass * comp_p[idx], extra + comp_w[idx]);
        visit(idx + 1, count, mass * (1.0 - comp_p[idx]), extra);
      };
  visit(0, m, base_mass, 0.0);
  return total / z;
}

template <class Fn>
void ForEachSequence(std::size_t n, std::size_t length, Fn&& fn) {
  std::vector<Item> seq;
  std::vector<char> used(n, 0);
  std::function<void()> rec = [&]() {
    if (seq.size() == length) {
      fn(Ranking(seq));
      return;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      used[i] = 1;
      seq.push_back(static_cast<Item>(i));
      rec();
      seq.pop_back();
      used[i] = 0;
    }
  };
  rec();
}

}  // namespace detail

// Every length-k ranking over n items, in lexicographic order.
inline std::vector<Ranking> EnumerateRankings(std::size_t n, std::size_t k) {
  std::vector<Ranking> out;
  detail::ForEachSequence(n, k, [&](Ranking r) { out.push_back(std::move(r)); });
  return out;
}

inline double PlcProbExact(const Ranking& r, const Utilities& u, const ConsiderationProbs& p,
                           std::size_t k, std::size_t max_items = kDefaultExactMaxItems) {
  detail::CheckModel(u, p, k);
  detail::CheckExactSize(u.size(), max_items);
  ValidateRanking(r, u.size());
  if (r.size() != k) throw Error(ErrorCode::kInvalidArgument, "ranking length differs from k");
  return detail::PrefixProb(r, u, p, k, NormalizerZ(p, k));
}

// Pr_PL+C(item i within the first l positions), summing prefix
// probabilities over the length-l prefixes that contain i.
inline double PlcTopLProb(Item i, std::size_t l, const Utilities& u, const ConsiderationProbs& p,
                          std::size_t k, std::size_t max_items = kDefaultExactMaxItems) {
  detail::CheckModel(u, p, k);
  detail::CheckExactSize(u.size(), max_items);
  if (l < 1 || l > k) throw Error(ErrorCode::kInvalidArgument, "cutoff l must be in [1, k]");
  if (i < 0 || static_cast<std::size_t>(i) >= u.size()) {
    throw Error(ErrorCode::kItemOutOfRange, "item out of range", i);
  }
  const double z = NormalizerZ(p, k);
  double total = 0.0;
  detail::ForEachSequence(u.size(), l, [&](const Ranking& prefix) {
    if (prefix.contains(i)) total += detail::PrefixProb(prefix, u, p, k, z);
  });
  return total;
}

// Exact TopLStats for every item and every cutoff.
inline TopLStats ExactTopLStats(const Utilities& u, const ConsiderationProbs& p, std::size_t k,
                                std::size_t max_items = kDefaultExactMaxItems) {
  detail::CheckModel(u, p, k);
  detail::CheckExactSize(u.size(), max_items);
  const std::size_t n = u.size();
  const double z = NormalizerZ(p, k);
  TopLStats stats(n, k, StatsSource::kExact);
  for (std::size_t l = 1; l <= k; ++l) {
    std::vector<double> acc(n, 0.0);
    detail::ForEachSequence(n, l, [&](const Ranking& prefix) {
      double prob = detail::PrefixProb(prefix, u, p, k, z);
      for (Item i : prefix) acc[static_cast<std::size_t>(i)] += prob;
    });
    for (std::size_t i = 0; i < n; ++i) stats.set(static_cast<Item>(i), l, acc[i]);
  }
  return stats;
}

template <class URBG>
Ranking SamplePlcRanking(const Utilities& u, const ConsiderationProbs& p, std::size_t k, URBG& rng,
                         std::uint64_t max_attempts = kDefaultRejectionAttempts) {
  detail::CheckModel(u, p, k);
  ItemSet c = SampleConsiderationSet(p, k, rng, max_attempts);
  return PlSampleRanking(c, u, k, rng);
}

struct McConfig {
  double epsilon = 0.05;
  double delta = 0.05;
  std::uint64_t seed = 0;
  // Hard ceiling on consideration-set draws regardless of z.
  std::uint64_t max_attempts = 1'000'000'000;

  void Validate() const {
    if (!(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "epsilon and delta must lie in (0, 1)");
    }
  }
};

// Accepted samples needed for an eps-additive estimate with failure
// probability delta/2 by Hoeffding: ceil(log(4/delta) / (2 eps^2)).
inline std::uint64_t McSampleCount(double epsilon, double delta) {
  return static_cast<std::uint64_t>(std::ceil(std::log(4.0 / delta) / (2.0 * epsilon * epsilon)));
}

// Draw budget so that s accepted sets arrive with probability >= 1 - delta/2
// under the negative-binomial tail bound: c * s / z with c = 2 log(2/delta)/s + 2.
inline double McAttemptBudget(std::uint64_t samples, double delta, double z) {
  const double s = static_cast<double>(samples);
  const double c = 2.0 * std::log(2.0 / delta) / s + 2.0;
  return std::ceil(c * s / z);
}

struct McEstimate {
  double estimate = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t attempts = 0;
};

// Single-threaded; one engine seeded from cfg.seed, so results are
// reproducible.
inline McEstimate PlcProbMc(const Ranking& r, const Utilities& u, const ConsiderationProbs& p,
                            std::size_t k, const McConfig& cfg) {
  detail::CheckModel(u, p, k);
  cfg.Validate();
  const std::size_t n = u.size();
  ValidateRanking(r, n);
  if (r.size() != k) throw Error(ErrorCode::kInvalidArgument, "ranking length differs from k");
  const double z = NormalizerZ(p, k);
  if (!(z > 0.0)) throw Error(ErrorCode::kNormalizerZero, "z_{k,p} is zero");

  const std::uint64_t samples = McSampleCount(cfg.epsilon, cfg.delta);
  const double budget = McAttemptBudget(samples, cfg.delta, z);
  if (!(budget <= static_cast<double>(cfg.max_attempts))) {
    throw Error(ErrorCode::kRejectionCapExceeded,
                "z_{k,p}=" + std::to_string(z) + " needs ~" + std::to_string(budget) +
                    " draws, above the attempt ceiling");
  }
  const auto cap = static_cast<std::uint64_t>(budget);

  Rng rng(cfg.seed);
  McEstimate out;
  out.samples = samples;
  std::vector<char> in_set(n, 0);
  double sum = 0.0;
  for (std::uint64_t accepted = 0; accepted < samples;) {
    if (out.attempts >= cap) {
      throw Error(ErrorCode::kRejectionCapExceeded,
                  "rejection sampling exhausted " + std::to_string(cap) + " draws");
    }
    ++out.attempts;
    std::size_t size = 0;
    for (std::size_t i = 0; i < n; ++i) {
      in_set[i] = Bernoulli(rng, p[i]) ? 1 : 0;
      size += static_cast<std::size_t>(in_set[i]);
    }
    if (size < k) continue;
    ++accepted;
    bool covers = std::all_of(r.begin(), r.end(),
                              [&](Item i) { return in_set[static_cast<std::size_t>(i)] != 0; });
    if (covers) sum += std::exp(detail::PlLogProbMasked(r, in_set, u.values()));
  }
  out.estimate = sum / static_cast<double>(samples);
  return out;
}

// Consideration mass of subsets of the complement of r, grouped into bins
// j = -1..s on a (1 + delta) geometric grid of exp-utility sums. Bin -1
// holds the empty set. Each bin also tracks the largest exp-utility sum of
// the sets routed into it.
class BinnedAccumulator {
 public:
  struct Entry {
    double mass = 0.0;
    double max_exp_utility = 0.0;
  };

  BinnedAccumulator(double delta, std::size_t top) : delta_(delta), log_base_(std::log1p(delta)), entries_(top + 2) {
    entries_[0].mass = 1.0;
  }

  double delta() const { return delta_; }
  // Largest bin index s.
  std::size_t top() const { return entries_.size() - 2; }
  const Entry& bin(long j) const { return entries_.at(static_cast<std::size_t>(j + 1)); }

  // Bin index floor(log_{1+delta}(x)), clamped into [0, s] so that rounding
  // at a bin boundary lands in the adjacent bin.
  std::size_t BinOf(double x) const {
    double raw = std::floor(std::log(x) / log_base_);
    if (!(raw >= 0.0)) return 0;
    return std::min(static_cast<std::size_t>(raw), top());
  }

  void AddItem(double exp_utility, double p) {
    std::vector<Entry> next = entries_;
    for (Entry& e : next) e.mass *= (1.0 - p);
    for (std::size_t idx = 0; idx < entries_.size(); ++idx) {
      const Entry& e = entries_[idx];
      if (!(e.mass > 0.0)) continue;
      const double extended = e.max_exp_utility + exp_utility;
      Entry& dst = next[BinOf(extended) + 1];
      dst.mass += e.mass * p;
      dst.max_exp_utility = std::max(dst.max_exp_utility, extended);
    }
    entries_ = std::move(next);
  }

  double total_mass() const {
    double total = 0.0;
    for (const Entry& e : entries_) total += e.mass;
    return total;
  }

  // Representative exp-utility sum for bin j: (1 + delta)^j for j >= 0, and
  // exactly 0 for the empty-set bin.
  double representative(long j) const { return j < 0 ? 0.0 : std::exp(static_cast<double>(j) * log_base_); }

 private:
  double delta_;
  double log_base_;
  std::vector<Entry> entries_;
};

inline constexpr std::size_t kMaxBins = 100'000'000;

// Builds the accumulator over the complement of r for a given eps.
inline BinnedAccumulator BuildBinnedAccumulator(const Ranking& r, const Utilities& u,
                                                const ConsiderationProbs& p, std::size_t k,
                                                double epsilon) {
  const std::size_t n = u.size();
  const double delta = epsilon / (2.0 * static_cast<double>(k) * static_cast<double>(n));
  std::vector<char> ranked(n, 0);
  for (Item i : r) ranked[static_cast<std::size_t>(i)] = 1;
  double comp_sum = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    if (!ranked[a]) comp_sum += std::exp(u[a]);
  }
  const double top_raw = std::floor(std::log(comp_sum) / std::log1p(delta));
  if (!std::isfinite(top_raw) || top_raw + 2 > static_cast<double>(kMaxBins)) {
    throw Error(ErrorCode::kInvalidArgument, "binned accumulator would need too many bins");
  }
  BinnedAccumulator acc(delta, static_cast<std::size_t>(std::max(top_raw, 0.0)));
  for (std::size_t a = 0; a < n; ++a) {
    if (!ranked[a]) acc.AddItem(std::exp(u[a]), p[a]);
  }
  return acc;
}

// Deterministic estimate within a factor 1 + eps of Pr_PL+C(r). Requires
// strictly positive utilities.
inline double PlcProbBinned(const Ranking& r, const Utilities& u, const ConsiderationProbs& p,
                            std::size_t k, double epsilon) {
  detail::CheckModel(u, p, k);
  const std::size_t n = u.size();
  ValidateRanking(r, n);
  if (r.size() != k) throw Error(ErrorCode::kInvalidArgument, "ranking length differs from k");
  if (!(epsilon > 0.0)) throw Error(ErrorCode::kInvalidArgument, "epsilon must be positive");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(u[i] > 0.0)) {
      throw Error(ErrorCode::kNonPositiveUtility, "utility of item " + std::to_string(i) + " is not positive",
                  static_cast<std::int64_t>(i));
    }
  }
  if (k == n) return PlRankingProb(r, FullItemSet(n), u);

  BinnedAccumulator acc = BuildBinnedAccumulator(r, u, p, k, epsilon);
  std::vector<double> tails(k + 1, 0.0);
  std::vector<double> num(k);
  for (std::size_t t = k; t-- > 0;) {
    num[t] = std::exp(u[static_cast<std::size_t>(r[t])]);
    tails[t] = tails[t + 1] + num[t];
  }
  double sum = 0.0;
  for (long j = -1; j <= static_cast<long>(acc.top()); ++j) {
    const double mass = acc.bin(j).mass;
    if (!(mass > 0.0)) continue;
    const double rep = acc.representative(j);
    double prod = 1.0;
    for (std::size_t t = 0; t < k; ++t) prod *= num[t] / (rep + tails[t]);
    sum += mass * prod;
  }
  double ranked_mass = 1.0;
  for (Item i : r) ranked_mass *= p[static_cast<std::size_t>(i)];
  return ranked_mass / NormalizerZ(p, k) * sum;
}

// Total variation distance between the ranking distributions of two models.
inline double TotalVariationExact(const PlcParams& a, const PlcParams& b, std::size_t k,
                                  std::size_t max_items = kDefaultExactMaxItems) {
  if (a.n() != b.n()) throw Error(ErrorCode::kInvalidArgument, "models differ in size");
  double tv = 0.0;
  for (const Ranking& r : EnumerateRankings(a.n(), k)) {
    tv += std::abs(PlcProbExact(r, a.u, a.p, k, max_items) - PlcProbExact(r, b.u, b.p, k, max_items));
  }
  return 0.5 * tv;
}

struct WitnessOptions {
  double excellent_utility = 30.0;
  double good_utility = 1.0;
  double bad_utility = -30.0;
};

// Bad-item inclusion probability b giving bad-ranking mass c when each of
// the n-k good items is considered with probability g.
inline double WitnessBadProbability(std::size_t n, std::size_t k, double g, double c) {
  const double lambda = std::pow(1.0 - g, static_cast<double>(n - k));
  if (!(c > 0.0) || c > lambda) {
    throw Error(ErrorCode::kInfeasibleC,
                "c=" + std::to_string(c) + " must lie in (0, " + std::to_string(lambda) + "]");
  }
  const double b = c / (1.0 - c) * (1.0 - lambda) / lambda;
  if (!(b <= 1.0)) {
    throw Error(ErrorCode::kInfeasibleC, "c=" + std::to_string(c) + " needs a bad-item probability above 1");
  }
  return b;
}

// Two parameterizations with equal utilities and different consideration
// probabilities that induce the same ranking distribution. Items 0..k-2 are
// "excellent" (always considered), k-1..n-2 are "good" (considered w.p. g),
// and n-1 is "bad" (considered w.p. b).
inline std::pair<PlcParams, PlcParams> NonidentifiabilityWitness(std::size_t n, std::size_t k, double g1,
                                                                 double g2, double c,
                                                                 const WitnessOptions& opts = {}) {
  if (n < 2 || k < 1 || k >= n) throw Error(ErrorCode::kInvalidArgument, "witness needs n > 1 and 1 <= k < n");
  for (double g : {g1, g2}) {
    if (!(g > 0.0 && g < 1.0)) throw Error(ErrorCode::kInvalidArgument, "g must lie in (0, 1)");
  }
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = i + 1 < k ? opts.excellent_utility : (i + 1 < n ? opts.good_utility : opts.bad_utility);
  }
  auto make = [&](double g) {
    const double b = WitnessBadProbability(n, k, g, c);
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = i + 1 < k ? 1.0 : (i + 1 < n ? g : b);
    return PlcParams{Utilities(u), ConsiderationProbs(std::move(p))};
  };
  return {make(g1), make(g2)};
}

}  // namespace plc

#endif  // PLC_PLC_HPP_
