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

// Plackett-Luce over a fixed consideration set: ranking probabilities,
// sampling, the regularized negative log-likelihood and its gradient,
// Rprop fitting, and pairwise co-occurrence win counts.

#ifndef PLC_PLACKETT_LUCE_HPP_
#define PLC_PLACKETT_LUCE_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "plc/core.hpp"
#include "plc/random.hpp"

namespace plc {

namespace detail {

// log Pr_PL(r | C) where C is given as a membership mask that already
// contains every ranked item. Log-sum-exp per stage, so utilities of
// magnitude up to ~700 neither overflow nor underflow.
inline double PlLogProbMasked(const Ranking& r, std::vector<char>& in_set,
                              std::span<const double> u) {
  double shift = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < in_set.size(); ++j) {
    if (in_set[j]) shift = std::max(shift, u[j]);
  }
  double log_prob = 0.0;
  for (std::size_t t = 0; t < r.size(); ++t) {
    double denom = 0.0;
    for (std::size_t j = 0; j < in_set.size(); ++j) {
      if (in_set[j]) denom += std::exp(u[j] - shift);
    }
    Item chosen = r[t];
    log_prob += (u[static_cast<std::size_t>(chosen)] - shift) - std::log(denom);
    in_set[static_cast<std::size_t>(chosen)] = 0;
  }
  for (Item i : r) in_set[static_cast<std::size_t>(i)] = 1;
  return log_prob;
}

}  // namespace detail

// Pr_PL(r | C): 0 when some ranked item is outside C.
inline double PlRankingProb(const Ranking& r, const ItemSet& considered, const Utilities& u) {
  const std::size_t n = u.size();
  ValidateRanking(r, n);
  ItemSet c = CanonicalItemSet(considered, n);
  if (c.size() < r.size()) {
    throw Error(ErrorCode::kConsiderationSetTooSmall,
                "consideration set of size " + std::to_string(c.size()) + " < k=" +
                    std::to_string(r.size()));
  }
  std::vector<char> in_set(n, 0);
  for (Item i : c) in_set[static_cast<std::size_t>(i)] = 1;
  for (Item i : r) {
    if (!in_set[static_cast<std::size_t>(i)]) return 0.0;
  }
  return std::exp(detail::PlLogProbMasked(r, in_set, u.values()));
}

// Draws a length-k ranking from C by sequential softmax choices.
template <class URBG>
Ranking PlSampleRanking(const ItemSet& considered, const Utilities& u, std::size_t k, URBG& rng) {
  if (considered.size() < k || k == 0) {
    throw Error(ErrorCode::kConsiderationSetTooSmall,
                "cannot rank " + std::to_string(k) + " of " + std::to_string(considered.size()) +
                    " considered items");
  }
  std::vector<Item> remaining = considered;
  double shift = -std::numeric_limits<double>::infinity();
  for (Item i : remaining) shift = std::max(shift, u[static_cast<std::size_t>(i)]);
  std::vector<double> weight(remaining.size());
  for (std::size_t a = 0; a < remaining.size(); ++a) {
    weight[a] = std::exp(u[static_cast<std::size_t>(remaining[a])] - shift);
  }

  std::vector<Item> out;
  out.reserve(k);
  for (std::size_t t = 0; t < k; ++t) {
    double total = 0.0;
    for (double w : weight) total += w;
    double target = UniformUnit(rng) * total;
    std::size_t pick = weight.size() - 1;
    double acc = 0.0;
    for (std::size_t a = 0; a < weight.size(); ++a) {
      acc += weight[a];
      if (target < acc) {
        pick = a;
        break;
      }
    }
    out.push_back(remaining[pick]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
    weight.erase(weight.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return Ranking(std::move(out));
}

struct NllAndGradient {
  double nll = 0.0;
  std::vector<double> grad;
};

namespace detail {

// One distinct (ranking, consideration set) observation and its multiplicity.
struct WeightedObservation {
  std::vector<Item> ranking;
  std::vector<Item> considered;
  double weight = 1.0;
};

inline void RequireConsidered(const RankingDataset& data, std::size_t idx) {
  if (!data.considered(idx)) {
    throw Error(ErrorCode::kMissingConsiderationSet,
                "ranking " + std::to_string(idx) + " has no consideration set",
                static_cast<std::int64_t>(idx));
  }
}

inline std::vector<WeightedObservation> Compress(const RankingDataset& data) {
  std::map<std::pair<std::vector<Item>, std::vector<Item>>, std::size_t> index;
  std::vector<WeightedObservation> out;
  for (std::size_t idx = 0; idx < data.size(); ++idx) {
    RequireConsidered(data, idx);
    const Ranking& r = data.ranking(idx);
    std::vector<Item> rv(r.begin(), r.end());
    std::vector<Item> cv(data.considered(idx)->begin(), data.considered(idx)->end());
    auto [it, fresh] = index.try_emplace({rv, cv}, out.size());
    if (fresh) {
      out.push_back({std::move(rv), std::move(cv), 1.0});
    } else {
      out[it->second].weight += 1.0;
    }
  }
  return out;
}

// Weighted NLL and gradient. `scale` bounds the magnitude of the summed terms
// and lets callers judge how much of a difference is roundoff.
struct WeightedNll {
  double nll = 0.0;
  double scale = 0.0;
  std::vector<double> grad;
};

template <typename Obs>
WeightedNll EvaluateNll(std::size_t n, const std::vector<Obs>& obs, std::span<const double> uv, double l2) {
  WeightedNll out;
  out.grad.assign(n, 0.0);
  std::vector<double> w(n);
  std::vector<char> active(n, 0);
  for (const auto& o : obs) {
    const auto& considered = o.considered;
    double shift = -std::numeric_limits<double>::infinity();
    for (Item j : considered) {
      active[static_cast<std::size_t>(j)] = 1;
      shift = std::max(shift, uv[static_cast<std::size_t>(j)]);
    }
    for (Item j : considered) {
      w[static_cast<std::size_t>(j)] = std::exp(uv[static_cast<std::size_t>(j)] - shift);
    }
    for (Item chosen_item : o.ranking) {
      double denom = 0.0;
      for (Item j : considered) {
        if (active[static_cast<std::size_t>(j)]) denom += w[static_cast<std::size_t>(j)];
      }
      const auto chosen = static_cast<std::size_t>(chosen_item);
      const double term = (uv[chosen] - shift) - std::log(denom);
      out.nll -= o.weight * term;
      out.scale += o.weight * (std::abs(uv[chosen] - shift) + std::abs(std::log(denom)));
      out.grad[chosen] -= o.weight;
      for (Item j : considered) {
        const auto js = static_cast<std::size_t>(j);
        if (active[js]) out.grad[js] += o.weight * w[js] / denom;
      }
      active[chosen] = 0;
    }
    for (Item j : considered) active[static_cast<std::size_t>(j)] = 0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    out.nll += l2 * uv[i] * uv[i];
    out.scale += l2 * uv[i] * uv[i];
    out.grad[i] += 2.0 * l2 * uv[i];
  }
  return out;
}

// Adapts a dataset to the observation interface without copying.
struct DatasetView {
  const Ranking& ranking;
  const ItemSet& considered;
  double weight = 1.0;
};

}  // namespace detail

// Negative log-likelihood of a dataset with known consideration sets plus
// l2 * ||u||^2, and its exact gradient. Evaluated single-threaded in dataset
// order, so results are bit-stable.
inline NllAndGradient PlNllGradient(const RankingDataset& data, const Utilities& u, double l2) {
  const std::size_t n = data.n();
  if (u.size() != n) throw Error(ErrorCode::kInvalidArgument, "utility vector size mismatch");
  std::vector<detail::DatasetView> view;
  view.reserve(data.size());
  for (std::size_t idx = 0; idx < data.size(); ++idx) {
    detail::RequireConsidered(data, idx);
    view.push_back({data.ranking(idx), *data.considered(idx), 1.0});
  }
  detail::WeightedNll w = detail::EvaluateNll(n, view, u.values(), l2);
  return NllAndGradient{w.nll, std::move(w.grad)};
}

struct FitConfig {
  double learning_rate = 0.05;
  double l2_strength = 1e-6;
  double grad_sq_tolerance = 1e-8;
  int max_iterations = 20000;

  void Validate() const {
    if (!(learning_rate > 0.0) || !(l2_strength >= 0.0) || !(grad_sq_tolerance > 0.0) ||
        max_iterations < 0) {
      throw Error(ErrorCode::kInvalidArgument, "invalid fit configuration");
    }
  }
};

// Thrown when the iteration budget runs out; carries the best iterate.
class FitNotConverged : public Error {
 public:
  FitNotConverged(Utilities best, double grad_sq)
      : Error(ErrorCode::kMaxIterationsExceeded,
              "squared gradient " + std::to_string(grad_sq) + " above tolerance"),
        best_(std::move(best)),
        grad_sq_(grad_sq) {}

  const Utilities& best() const { return best_; }
  double grad_sq() const { return grad_sq_; }

 private:
  Utilities best_;
  double grad_sq_;
};

struct FitReport {
  Utilities utilities;
  double nll = 0.0;
  double grad_sq = 0.0;
  int iterations = 0;
};

inline double SquaredNorm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

// Maximum-likelihood utilities by sign-based adaptive steps (iRprop-). A step
// that would increase the objective is rejected and all step sizes halve.
// Differences below the summation roundoff of the objective cannot be ranked
// by value, so within that band a step is accepted only if it shrinks the
// gradient. Identical observations are merged and weighted.
inline FitReport PlFitDetailed(const RankingDataset& data, const FitConfig& cfg,
                               std::optional<Utilities> init = std::nullopt) {
  cfg.Validate();
  const std::size_t n = data.n();
  if (data.empty()) throw Error(ErrorCode::kEmptyDataset, "cannot fit an empty dataset");
  const std::vector<detail::WeightedObservation> obs = detail::Compress(data);
  std::vector<char> seen(n, 0);
  for (const auto& o : obs) {
    for (Item i : o.considered) seen[static_cast<std::size_t>(i)] = 1;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!seen[i]) {
      throw Error(ErrorCode::kItemNeverConsidered, "item " + std::to_string(i) + " never considered",
                  static_cast<std::int64_t>(i));
    }
  }

  constexpr double kGrow = 1.2;
  constexpr double kShrink = 0.5;
  constexpr double kMaxStep = 50.0;
  constexpr double kMinStep = 1e-15;
  constexpr double kRoundoff = 64.0 * std::numeric_limits<double>::epsilon();

  std::vector<double> u = init ? std::vector<double>(init->values().begin(), init->values().end())
                               : std::vector<double>(n, 0.0);
  if (u.size() != n) throw Error(ErrorCode::kInvalidArgument, "initial utility size mismatch");
  std::vector<double> step(n, cfg.learning_rate);
  std::vector<double> prev_grad(n, 0.0);
  detail::WeightedNll cur = detail::EvaluateNll(n, obs, u, cfg.l2_strength);
  double cur_gsq = SquaredNorm(cur.grad);

  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    if (cur_gsq <= cfg.grad_sq_tolerance) {
      return FitReport{Utilities(u), cur.nll, cur_gsq, iter};
    }
    std::vector<double> direction(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double agreement = cur.grad[i] * prev_grad[i];
      if (agreement > 0.0) {
        step[i] = std::min(step[i] * kGrow, kMaxStep);
        direction[i] = cur.grad[i];
      } else if (agreement < 0.0) {
        step[i] = std::max(step[i] * kShrink, kMinStep);
        direction[i] = 0.0;
      } else {
        direction[i] = cur.grad[i];
      }
    }
    std::vector<double> candidate = u;
    for (std::size_t i = 0; i < n; ++i) {
      if (direction[i] > 0.0) candidate[i] -= step[i];
      if (direction[i] < 0.0) candidate[i] += step[i];
    }
    detail::WeightedNll next = detail::EvaluateNll(n, obs, candidate, cfg.l2_strength);
    const double next_gsq = SquaredNorm(next.grad);
    const double noise = kRoundoff * std::max(cur.scale, next.scale);
    const bool accept = next.nll < cur.nll - noise ||
                        (next.nll <= cur.nll + noise && next_gsq < cur_gsq);
    if (accept) {
      u = std::move(candidate);
      for (std::size_t i = 0; i < n; ++i) prev_grad[i] = direction[i] == 0.0 ? 0.0 : cur.grad[i];
      cur = std::move(next);
      cur_gsq = next_gsq;
    } else {
      for (double& s : step) s = std::max(s * kShrink, kMinStep);
      std::fill(prev_grad.begin(), prev_grad.end(), 0.0);
    }
  }
  if (cur_gsq <= cfg.grad_sq_tolerance) return FitReport{Utilities(u), cur.nll, cur_gsq, cfg.max_iterations};
  throw FitNotConverged(Utilities(u), cur_gsq);
}

inline Utilities PlFit(const RankingDataset& data, const FitConfig& cfg,
                       std::optional<Utilities> init = std::nullopt) {
  return PlFitDetailed(data, cfg, std::move(init)).utilities;
}

// wins(i, j) = number of rankings containing both i and j with i above j.
class PairwiseWinStats {
 public:
  explicit PairwiseWinStats(std::size_t n) : n_(n), wins_(n * n, 0) {}

  std::size_t n() const { return n_; }
  long wins(Item i, Item j) const { return wins_[Index(i, j)]; }
  void increment(Item i, Item j) { ++wins_[Index(i, j)]; }

  // Fraction of co-occurrences won by i; empty when the pair never co-occurs.
  std::optional<double> win_rate(Item i, Item j) const {
    long total = wins(i, j) + wins(j, i);
    if (total == 0) return std::nullopt;
    return static_cast<double>(wins(i, j)) / static_cast<double>(total);
  }

 private:
  std::size_t Index(Item i, Item j) const {
    return static_cast<std::size_t>(i) * n_ + static_cast<std::size_t>(j);
  }
  std::size_t n_;
  std::vector<long> wins_;
};

inline PairwiseWinStats InferUtilityOrder(const RankingDataset& data) {
  PairwiseWinStats stats(data.n());
  for (const Ranking& r : data.rankings()) {
    for (std::size_t a = 0; a < r.size(); ++a) {
      for (std::size_t b = a + 1; b < r.size(); ++b) stats.increment(r[a], r[b]);
    }
  }
  return stats;
}

}  // namespace plc

#endif  // PLC_PLACKETT_LUCE_HPP_
