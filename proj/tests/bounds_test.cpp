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

#include "plc/bounds.hpp"

#include <cmath>
#include <functional>
#include <random>

#include <gtest/gtest.h>

#include "plc/plc.hpp"
#include "test_util.hpp"

namespace plc {
namespace {

using testing::AlphaInstance;
using testing::RandomAlphaInstance;
using testing::UniformVector;

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no plc::Error thrown";
  return ErrorCode::kInvalidArgument;
}

TEST(ChernoffTest, SpotValues) {
  // (5 e^{-4})^3 and 2 e^{-1}, evaluated independently in double precision.
  EXPECT_NEAR(ChernoffDiscardBound(AlphaAssumption(5, 3)), 7.68026544166026e-4, 1e-15);
  EXPECT_NEAR(ChernoffDiscardBound(AlphaAssumption(2, 1)), 0.7357588823428847, 1e-15);
}

TEST(ChernoffTest, DecreasesInK) {
  for (double alpha : {1.1, 1.5, 3.0}) {
    double prev = 1.0;
    for (std::size_t k = 1; k < 40; ++k) {
      double q = ChernoffDiscardBound(AlphaAssumption(alpha, k));
      EXPECT_LT(q, prev);
      prev = q;
    }
    EXPECT_NEAR(prev, std::pow(alpha * std::exp(1.0 - alpha), 39.0), 1e-12);
  }
}

TEST(ChernoffTest, AlphaMustExceedOne) {
  EXPECT_EQ(CodeOf([] { AlphaAssumption(1.0, 2); }), ErrorCode::kAlphaNotGreaterThanOne);
  EXPECT_EQ(CodeOf([] { AlphaAssumption(0.5, 2); }), ErrorCode::kAlphaNotGreaterThanOne);
}

TEST(ExactlyKMassTest, SpotValues) {
  EXPECT_NEAR(ExactlyKMassBound(AlphaAssumption(5, 3)), 7.686168623185803e-4, 1e-15);
  EXPECT_DOUBLE_EQ(ExactlyKMassFromTail(0.5), 1.0);
  EXPECT_EQ(CodeOf([] { ExactlyKMassFromTail(1.0); }), ErrorCode::kBoundDegenerate);
}

TEST(ExactlyKMassTest, BoundsEnumeratedConditionalMass) {
  std::mt19937_64 g(101);
  for (int trial = 0; trial < 200; ++trial) {
    testing::Instance inst = RandomAlphaInstance(g, 10, 3);
    auto pv = testing::Values(inst.p);
    auto pmf = testing::BrutePmf(pv);
    const double z = testing::BruteZ(pv, inst.k);
    const double bound = ExactlyKMassBound(AlphaAssumption(inst.alpha, inst.k));
    EXPECT_LE(pmf[inst.k] / z, bound + 1e-12) << "trial " << trial;
  }
}

TEST(InitialBoundsTest, SpotValues) {
  AlphaAssumption a(5, 3);
  TopLStats s(5, 3, StatsSource::kExact);
  for (Item i = 0; i < 5; ++i) {
    s.set(i, 1, 0.2);
    s.set(i, 2, 0.4);
    s.set(i, 3, 0.6);
  }
  s.set(4, 3, 0.0);
  s.set(3, 3, 0.2);
  auto lower = InitialLowerBounds(s, a);
  EXPECT_NEAR(lower[3], 0.1998463946911668, 1e-12);
  EXPECT_EQ(lower[4], 0.0);
  // 5 * (0.2 + 3 q/(1-q)) exceeds one and is clamped.
  EXPECT_NEAR(5 * (0.2 + 3 * ExactlyKMassBound(a)), 1.0115292529347788, 1e-12);
  auto upper = InitialUpperBounds(s, Utilities::Zeros(5), a);
  for (double b : upper) EXPECT_EQ(b, 1.0);
}

TEST(InitialBoundsTest, DominantItemIsVacuous) {
  TopLStats s(2, 1, StatsSource::kExact);
  s.set(0, 1, 1.0);
  auto upper = InitialUpperBounds(s, Utilities{50, -50}, AlphaAssumption(2, 1));
  EXPECT_EQ(upper[0], 1.0);
}

TEST(RelativeGapTest, Cases) {
  TopLStats s(3, 1, StatsSource::kExact);
  s.set(0, 1, 0.1);
  s.set(1, 1, 0.2);
  s.set(2, 1, 0.3);
  EXPECT_NEAR(*RelativeGapC(s, 0, 1, 1), 0.5, 1e-15);
  EXPECT_FALSE(RelativeGapC(s, 2, 1, 1).has_value());
  TopLStats zero(2, 1, StatsSource::kExact);
  EXPECT_FALSE(RelativeGapC(zero, 0, 1, 1).has_value());
}

TEST(TransferTest, LowerBound) {
  EXPECT_NEAR(LbTransfer(0.3, 1.0), 0.3, 1e-15);
  EXPECT_NEAR(LbTransfer(0.5, 0.5), 2.0 / 3.0, 1e-12);
  for (double c : {0.01, 0.3, 1.0}) EXPECT_EQ(LbTransfer(0.0, c), 0.0);
}

TEST(TransferTest, UpperBound) {
  EXPECT_NEAR(UbTransfer(0.7, 1.0), 0.7, 1e-15);
  EXPECT_NEAR(UbTransfer(0.5, 0.5), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(UbTransfer(1.0, 0.5), 1.0, 1e-15);
}

TEST(TransferTest, OddsRelationIsTight) {
  // Both transfers solve p_i/(1-p_i) = c p_j/(1-p_j) for the other side.
  for (double b : {0.05, 0.3, 0.77}) {
    for (double c : {0.1, 0.5, 0.9}) {
      double hi = LbTransfer(b, c);
      EXPECT_NEAR(b / (1 - b), c * hi / (1 - hi), 1e-12);
      double lo = UbTransfer(b, c);
      EXPECT_NEAR(lo / (1 - lo), c * b / (1 - b), 1e-12);
    }
  }
}

TEST(TransferTest, RejectsOutOfRange) {
  EXPECT_EQ(CodeOf([] { LbTransfer(1.2, 0.5); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { UbTransfer(0.5, -0.1); }), ErrorCode::kInvalidArgument);
}

TEST(FlipDagTest, UniformStatsHaveNoEdges) {
  TopLStats s(4, 2, StatsSource::kExact);
  for (Item i = 0; i < 4; ++i) {
    s.set(i, 1, 0.25);
    s.set(i, 2, 0.5);
  }
  EXPECT_TRUE(BuildFlipDag(Utilities{3, 2, 1, 0}, s).empty());
}

TEST(FlipDagTest, SingleFlip) {
  TopLStats s(2, 1, StatsSource::kExact);
  s.set(0, 1, 0.4);
  s.set(1, 1, 0.6);
  FlipDag dag = BuildFlipDag(Utilities{2, 1}, s);
  ASSERT_EQ(dag.edges().size(), 1u);
  EXPECT_EQ(dag.edges()[0].from, 0);
  EXPECT_EQ(dag.edges()[0].to, 1);
  ASSERT_EQ(dag.edges()[0].gaps.size(), 1u);
  EXPECT_NEAR(dag.edges()[0].gaps[0].c, 0.4 / 0.6, 1e-15);
}

TEST(FlipDagTest, EqualRatesAreNotFlips) {
  TopLStats s(2, 1, StatsSource::kExact);
  s.set(0, 1, 0.5);
  s.set(1, 1, 0.5);
  EXPECT_TRUE(BuildFlipDag(Utilities{2, 1}, s).empty());
}

TEST(FlipDagTest, EdgesRespectGeneratingProbabilities) {
  std::mt19937_64 g(103);
  int edges = 0;
  for (int trial = 0; trial < 40; ++trial) {
    auto uv = UniformVector(g, 6, -2, 2);
    std::vector<double> pv(6);
    for (std::size_t i = 0; i < 6; ++i) pv[i] = std::clamp(0.55 - 0.2 * uv[i] + 0.1 * (UniformVector(g, 1, -1, 1)[0]), 0.05, 1.0);
    Utilities u(uv);
    ConsiderationProbs p(pv);
    FlipDag dag = BuildFlipDag(u, ExactTopLStats(u, p, 2));
    for (const FlipEdge& e : dag.edges()) {
      ++edges;
      EXPECT_LE(pv[static_cast<std::size_t>(e.from)], pv[static_cast<std::size_t>(e.to)]);
      EXPECT_GT(uv[static_cast<std::size_t>(e.from)], uv[static_cast<std::size_t>(e.to)]);
    }
  }
  EXPECT_GT(edges, 0);
}

TEST(FlipDagTest, RejectsCycles) {
  FlipDag dag(3);
  dag.AddEdge({0, 1, {{1, 0.5}}});
  dag.AddEdge({1, 2, {{1, 0.5}}});
  dag.AddEdge({2, 0, {{1, 0.5}}});
  EXPECT_EQ(CodeOf([&] { TopologicalOrder(dag); }), ErrorCode::kCycleDetected);
}

TEST(TightenTest, EmptyDagIsIdentity) {
  FlipDag dag(3);
  std::vector<double> lo{0.1, 0.2, 0.3}, hi{0.4, 0.5, 0.6};
  EXPECT_EQ(TightenLowerBounds(lo, dag), lo);
  EXPECT_EQ(TightenUpperBounds(hi, dag), hi);
}

TEST(TightenTest, IdentityTransferAlongChain) {
  FlipDag dag(3);
  dag.AddEdge({0, 1, {{1, 1.0}}});
  auto lo = TightenLowerBounds({0.5, 0.1, 0.2}, dag);
  EXPECT_NEAR(lo[1], 0.5, 1e-15);
  EXPECT_NEAR(lo[2], 0.2, 1e-15);
}

TEST(TightenTest, UpperBoundFlowsBackward) {
  FlipDag dag(2);
  dag.AddEdge({0, 1, {{1, 0.5}}});
  auto hi = TightenUpperBounds({0.9, 0.5}, dag);
  EXPECT_NEAR(hi[0], 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(hi[1], 0.5, 1e-15);
  auto keep = TightenUpperBounds({0.2, 0.5}, dag);
  EXPECT_NEAR(keep[0], 0.2, 1e-15);
}

TEST(TightenTest, BestGapWins) {
  FlipDag dag(2);
  dag.AddEdge({0, 1, {{1, 0.8}, {2, 0.5}}});
  EXPECT_NEAR(TightenLowerBounds({0.5, 0.0}, dag)[1], LbTransfer(0.5, 0.5), 1e-15);
  EXPECT_NEAR(TightenUpperBounds({1.0, 0.5}, dag)[0], UbTransfer(0.5, 0.5), 1e-15);
}

TEST(TightenTest, SecondPassIsAFixpoint) {
  std::mt19937_64 g(107);
  for (int trial = 0; trial < 50; ++trial) {
    testing::Instance inst = RandomAlphaInstance(g);
    TopLStats s = ExactTopLStats(inst.u, inst.p, inst.k);
    AlphaAssumption a(inst.alpha, inst.k);
    FlipDag dag = BuildFlipDag(inst.u, s);
    auto lo = TightenLowerBounds(InitialLowerBounds(s, a), dag);
    auto hi = TightenUpperBounds(InitialUpperBounds(s, inst.u, a), dag);
    EXPECT_EQ(TightenLowerBounds(lo, dag), lo);
    EXPECT_EQ(TightenUpperBounds(hi, dag), hi);
  }
}

FlipDag RandomDag(std::mt19937_64& g, std::size_t n) {
  FlipDag dag(n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (unit(g) < 0.35) dag.AddEdge({static_cast<Item>(i), static_cast<Item>(j), {{1, 0.05 + 0.95 * unit(g)}}});
    }
  }
  return dag;
}

TEST(TightenTest, OrderInvariance) {
  std::mt19937_64 g(109);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + trial % 8;
    FlipDag dag = RandomDag(g, n);
    auto a = TopologicalOrder(dag, TopoTieBreak::kSmallestIndex);
    auto b = TopologicalOrder(dag, TopoTieBreak::kLargestIndex);
    auto lo0 = UniformVector(g, n, 0.0, 0.6);
    auto hi0 = UniformVector(g, n, 0.4, 1.0);
    auto la = TightenLowerBounds(lo0, dag, a), lb = TightenLowerBounds(lo0, dag, b);
    auto ha = TightenUpperBounds(hi0, dag, a), hb = TightenUpperBounds(hi0, dag, b);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(la[i], lb[i], 1e-12);
      EXPECT_NEAR(ha[i], hb[i], 1e-12);
    }
  }
}

TEST(TightenTest, RejectsNonTopologicalOrder) {
  FlipDag dag(2);
  dag.AddEdge({0, 1, {{1, 0.5}}});
  EXPECT_ANY_THROW(TightenLowerBounds({0.1, 0.1}, dag, {1, 0}));
}

TEST(TransitiveReductionTest, Triangle) {
  FlipDag dag(3);
  dag.AddEdge({0, 1, {{1, 0.5}}});
  dag.AddEdge({1, 2, {{1, 0.5}}});
  dag.AddEdge({0, 2, {{1, 0.5}}});
  FlipDag red = TransitiveReduction(dag);
  ASSERT_EQ(red.edges().size(), 2u);
  EXPECT_TRUE(red.HasEdge(0, 1));
  EXPECT_TRUE(red.HasEdge(1, 2));
  EXPECT_FALSE(red.HasEdge(0, 2));
  EXPECT_EQ(TransitiveReduction(red).edges().size(), 2u);
}

TEST(TransitiveReductionTest, PreservesReachability) {
  std::mt19937_64 g(113);
  for (int trial = 0; trial < 40; ++trial) {
    FlipDag dag = RandomDag(g, 2 + trial % 9);
    FlipDag red = TransitiveReduction(dag);
    EXPECT_EQ(Reachability(red), Reachability(dag));
    for (const FlipEdge& e : red.edges()) {
      FlipDag without(red.n());
      for (const FlipEdge& f : red.edges()) {
        if (f.from != e.from || f.to != e.to) without.AddEdge(f);
      }
      EXPECT_NE(Reachability(without), Reachability(dag)) << "redundant edge kept";
    }
  }
}

TEST(ComputeBoundsTest, SoundOnRandomInstances) {
  std::mt19937_64 g(127);
  for (int trial = 0; trial < 200; ++trial) {
    testing::Instance inst = RandomAlphaInstance(g);
    TopLStats s = ExactTopLStats(inst.u, inst.p, inst.k);
    BoundsResult res = ComputeBounds(s, inst.u, {inst.alpha, inst.k, std::nullopt});
    EXPECT_TRUE(res.tightened.consistent());
    for (std::size_t i = 0; i < inst.u.size(); ++i) {
      EXPECT_LE(res.initial.lower[i], inst.p[i] + 1e-12);
      EXPECT_GE(res.initial.upper[i], inst.p[i] - 1e-12);
      EXPECT_LE(res.tightened.lower[i], inst.p[i] + 1e-12) << "trial " << trial << " item " << i;
      EXPECT_GE(res.tightened.upper[i], inst.p[i] - 1e-12) << "trial " << trial << " item " << i;
      EXPECT_GE(res.tightened.lower[i], res.initial.lower[i]);
      EXPECT_LE(res.tightened.upper[i], res.initial.upper[i]);
    }
  }
}

TEST(ComputeBoundsTest, FlagsInconsistency) {
  BoundState st = MakeBoundState({0.8, 0.1}, {0.5, 0.2}, BoundStage::kTightened);
  EXPECT_FALSE(st.consistent());
  ASSERT_EQ(st.inconsistent.size(), 1u);
  EXPECT_EQ(st.inconsistent[0], 0);
}

TEST(ConservativeCiTest, WilsonIntervalsContainPoint) {
  TopLStats s(3, 2, StatsSource::kEmpirical, 400);
  s.set(0, 1, 0.5);
  s.set(0, 2, 0.9);
  s.set(1, 1, 0.0);
  s.set(1, 2, 0.1);
  TopLRates r = TopLRates::Wilson(s, 0.95);
  EXPECT_LE(r.lo(0, 1), 0.5);
  EXPECT_GE(r.hi(0, 1), 0.5);
  EXPECT_EQ(r.lo(1, 1), 0.0);
  EXPECT_GT(r.hi(1, 1), 0.0);
  // Wilson half-width at p=0.5, m=400, z=1.959964: about 0.0486.
  EXPECT_NEAR(r.hi(0, 1) - r.lo(0, 1), 2 * 1.959964 / (1 + 1.959964 * 1.959964 / 400) *
                                           std::sqrt(0.25 / 400 + 1.959964 * 1.959964 / (4.0 * 400 * 400)),
              1e-5);
}

TEST(ConservativeCiTest, NeedsSampleCount) {
  TopLStats s(2, 1, StatsSource::kExact);
  EXPECT_ANY_THROW(TopLRates::Wilson(s, 0.95));
}

TEST(ConservativeCiTest, WiderThanPointBounds) {
  std::mt19937_64 g(131);
  testing::Instance inst = AlphaInstance(g, 6, 2, 2.0);
  TopLStats exact = ExactTopLStats(inst.u, inst.p, inst.k);
  TopLStats emp(exact.n(), exact.k(), StatsSource::kEmpirical, 5000);
  for (Item i = 0; i < 6; ++i) {
    for (std::size_t l = 1; l <= 2; ++l) emp.set(i, l, exact.at(i, l));
  }
  BoundsResult point = ComputeBounds(emp, inst.u, {2.0, 2, std::nullopt});
  BoundsResult ci = ComputeBounds(emp, inst.u, {2.0, 2, 0.95});
  EXPECT_LE(ci.dag.edges().size(), point.dag.edges().size());
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_LE(ci.initial.lower[i], point.initial.lower[i] + 1e-15);
    EXPECT_GE(ci.initial.upper[i], point.initial.upper[i] - 1e-15);
  }
}

}  // namespace
}  // namespace plc
