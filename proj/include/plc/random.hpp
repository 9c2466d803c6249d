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

#ifndef PLC_RANDOM_HPP_
#define PLC_RANDOM_HPP_

#include <cstdint>
#include <random>

namespace plc {

// Engine used by the CLI and tests. mt19937_64 output is fully specified by
// the standard, so seeded runs are reproducible across platforms.
using Rng = std::mt19937_64;

// Uniform double in [0, 1). The standard distributions are
// implementation-defined, so sampling code draws through this instead.
template <class URBG>
double UniformUnit(URBG& rng) {
  static_assert(URBG::max() - URBG::min() >= 0xFFFFFFFFFFFFFull, "need at least 53 random bits");
  std::uint64_t bits = static_cast<std::uint64_t>(rng() - URBG::min());
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

template <class URBG>
bool Bernoulli(URBG& rng, double p) {
  return UniformUnit(rng) < p;
}

}  // namespace plc

#endif  // PLC_RANDOM_HPP_
