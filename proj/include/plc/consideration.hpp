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

// Independent consideration: each item i enters the set with probability
// p_i, and draws with fewer than k items are discarded.

#ifndef PLC_CONSIDERATION_HPP_
#define PLC_CONSIDERATION_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "plc/core.hpp"
#include "plc/random.hpp"

namespace plc {

// pmf[m] = Pr(exactly m of the independent Bernoulli(p_i) succeed), by
// folding in one trial at a time. O(n^2).
inline std::vector<double> PoissonBinomialPmf(std::span<const double> p) {
  std::vector<double> pmf{1.0};
  pmf.reserve(p.size() + 1);
  for (double pi : p) {
    pmf.push_back(0.0);
    for (std::size_t m = pmf.size() - 1; m > 0; --m) {
      pmf[m] = pmf[m] * (1.0 - pi) + pmf[m - 1] * pi;
    }
    pmf[0] *= (1.0 - pi);
  }
  return pmf;
}

inline std::vector<double> PoissonBinomialPmf(const ConsiderationProbs& p) {
  return PoissonBinomialPmf(p.values());
}

// z_{k,p} = Pr(|C| >= k) before conditioning.
inline double NormalizerZ(std::span<const double> p, std::size_t k) {
  if (k > p.size()) return 0.0;
  if (k == 0) return 1.0;
  std::vector<double> pmf = PoissonBinomialPmf(p);
  double tail = 0.0;
  for (std::size_t m = pmf.size(); m-- > k;) tail += pmf[m];
  return std::min(tail, 1.0);
}

inline double NormalizerZ(const ConsiderationProbs& p, std::size_t k) {
  return NormalizerZ(p.values(), k);
}

// Raw mass (prod_{i in C} p_i)(prod_{j not in C} (1 - p_j)) of one set.
inline double UnconditionedSetMass(const ItemSet& considered, const ConsiderationProbs& p) {
  std::vector<char> in_set(p.size(), 0);
  for (Item i : considered) in_set[static_cast<std::size_t>(i)] = 1;
  double mass = 1.0;
  for (std::size_t i = 0; i < p.size(); ++i) mass *= in_set[i] ? p[i] : (1.0 - p[i]);
  return mass;
}

// Pr_C(C) conditioned on |C| >= k; 0 for smaller sets.
inline double ConsiderationSetProb(const ItemSet& considered, const ConsiderationProbs& p,
                                   std::size_t k) {
  ItemSet c = CanonicalItemSet(considered, p.size());
  if (c.size() < k) return 0.0;
  double z = NormalizerZ(p, k);
  if (z <= 0.0) return 0.0;
  return UnconditionedSetMass(c, p) / z;
}

inline constexpr std::uint64_t kDefaultRejectionAttempts = 1'000'000;

// Independent Bernoulli draws, retried until at least k items are in.
template <class URBG>
ItemSet SampleConsiderationSet(const ConsiderationProbs& p, std::size_t k, URBG& rng,
                               std::uint64_t max_attempts = kDefaultRejectionAttempts) {
  if (k > p.size()) {
    throw Error(ErrorCode::kNormalizerZero,
                "no set of size >= " + std::to_string(k) + " exists over " +
                    std::to_string(p.size()) + " items");
  }
  ItemSet c;
  c.reserve(p.size());
  for (std::uint64_t attempt = 0; attempt < max_attempts; ++attempt) {
    c.clear();
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (Bernoulli(rng, p[i])) c.push_back(static_cast<Item>(i));
    }
    if (c.size() >= k) return c;
  }
  throw Error(ErrorCode::kRejectionCapExceeded,
              "no consideration set of size >= " + std::to_string(k) + " after " +
                  std::to_string(max_attempts) + " attempts");
}

}  // namespace plc

#endif  // PLC_CONSIDERATION_HPP_
