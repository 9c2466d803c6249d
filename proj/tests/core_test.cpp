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

#include "plc/core.hpp"

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "plc/random.hpp"

namespace plc {
namespace {

template <class Fn>
ErrorCode CodeOf(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no plc::Error thrown";
  return ErrorCode::kInvalidArgument;
}

TEST(ValidateRankingTest, AcceptsWellFormed) { EXPECT_NO_THROW(ValidateRanking(Ranking{0, 1, 2}, 5)); }

TEST(ValidateRankingTest, RejectsDuplicate) {
  try {
    ValidateRanking(Ranking{0, 0}, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDuplicateItem);
    EXPECT_EQ(e.index(), 0);
  }
}

TEST(ValidateRankingTest, RejectsOutOfRange) {
  try {
    ValidateRanking(Ranking{0, 7}, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kItemOutOfRange);
    EXPECT_EQ(e.index(), 7);
  }
}

TEST(ValidateRankingTest, RejectsEmpty) {
  EXPECT_EQ(CodeOf([] { ValidateRanking(Ranking(std::vector<Item>{}), 3); }), ErrorCode::kEmptyRanking);
}

TEST(NormalizeTest, MinZero) {
  Utilities out = NormalizeUtilities(Utilities{1, 2, 3}, NormalizeMode::kMinZero);
  EXPECT_DOUBLE_EQ(out[0], 0.0);
  EXPECT_DOUBLE_EQ(out[1], 1.0);
  EXPECT_DOUBLE_EQ(out[2], 2.0);
}

TEST(NormalizeTest, MeanZero) {
  Utilities out = NormalizeUtilities(Utilities{1, 2, 3}, NormalizeMode::kMeanZero);
  EXPECT_DOUBLE_EQ(out[0], -1.0);
  EXPECT_DOUBLE_EQ(out[1], 0.0);
  EXPECT_DOUBLE_EQ(out[2], 1.0);
}

TEST(NormalizeTest, AlreadyNormalized) {
  for (auto mode : {NormalizeMode::kMinZero, NormalizeMode::kMeanZero}) {
    Utilities out = NormalizeUtilities(Utilities{0, 0}, mode);
    EXPECT_EQ(out[0], 0.0);
    EXPECT_EQ(out[1], 0.0);
  }
}

TEST(NormalizeTest, PreservesDifferences) {
  Utilities u{0.3, -1.2, 4.0, 2.5};
  for (auto mode : {NormalizeMode::kMinZero, NormalizeMode::kMeanZero}) {
    Utilities out = NormalizeUtilities(u, mode);
    for (std::size_t i = 1; i < u.size(); ++i) EXPECT_NEAR(out[i] - out[0], u[i] - u[0], 1e-12);
  }
}

TEST(UtilitiesTest, RejectsNonFinite) {
  EXPECT_EQ(CodeOf([] { Utilities{1.0, std::numeric_limits<double>::infinity()}; }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { Utilities{std::nan("")}; }), ErrorCode::kInvalidArgument);
}

TEST(ConsiderationProbsTest, RangeIsHalfOpen) {
  EXPECT_NO_THROW(ConsiderationProbs({1.0, 0.01}));
  EXPECT_EQ(CodeOf([] { ConsiderationProbs({0.0}); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { ConsiderationProbs({1.5}); }), ErrorCode::kInvalidArgument);
  EXPECT_DOUBLE_EQ(ConsiderationProbs::Constant(4, 0.25).sum(), 1.0);
}

TEST(UniverseTest, LabelsRoundTrip) {
  Universe uni(std::vector<std::string>{"MA", "VA", "NY"});
  EXPECT_EQ(uni.size(), 3u);
  EXPECT_EQ(uni.index_of("VA"), 1);
  EXPECT_EQ(uni.label(2), "NY");
  EXPECT_FALSE(uni.index_of("PA").has_value());
}

TEST(UniverseTest, RejectsDuplicateLabels) {
  EXPECT_EQ(CodeOf([] { Universe(std::vector<std::string>{"A", "A"}); }), ErrorCode::kDuplicateItem);
}

TEST(RankingDatasetTest, EnforcesUniformK) {
  RankingDataset d(4, 2);
  d.add(Ranking{0, 1});
  EXPECT_EQ(CodeOf([&] { d.add(Ranking{0, 1, 2}); }), ErrorCode::kNonUniformK);
  EXPECT_EQ(d.size(), 1u);
}

TEST(RankingDatasetTest, ConsiderationSetMustContainRanking) {
  RankingDataset d(4, 2);
  EXPECT_NO_THROW(d.add(Ranking{0, 1}, ItemSet{3, 1, 0}));
  EXPECT_EQ(*d.considered(0), (ItemSet{0, 1, 3}));
  EXPECT_ANY_THROW(d.add(Ranking{0, 2}, ItemSet{0, 1}));
  EXPECT_TRUE(d.all_have_consideration_sets());
  d.add(Ranking{2, 3});
  EXPECT_FALSE(d.all_have_consideration_sets());
}

TEST(CanonicalItemSetTest, SortsAndChecks) {
  EXPECT_EQ(CanonicalItemSet({2, 0, 1}, 3), (ItemSet{0, 1, 2}));
  EXPECT_EQ(CodeOf([] { CanonicalItemSet({0, 0}, 3); }), ErrorCode::kDuplicateItem);
  EXPECT_EQ(CodeOf([] { CanonicalItemSet({4}, 3); }), ErrorCode::kItemOutOfRange);
}

TEST(TopLStatsTest, IndexingIsOneBased) {
  TopLStats s(2, 2, StatsSource::kExact);
  s.set(1, 2, 0.75);
  EXPECT_EQ(s.at(1, 2), 0.75);
  EXPECT_EQ(CodeOf([&] { s.at(0, 0); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([&] { s.at(0, 3); }), ErrorCode::kInvalidArgument);
}

TEST(TopLStatsTest, InvariantViolationMeasure) {
  TopLStats s(2, 2, StatsSource::kExact);
  s.set(0, 1, 0.6);
  s.set(1, 1, 0.4);
  s.set(0, 2, 1.0);
  s.set(1, 2, 1.0);
  EXPECT_NEAR(s.max_invariant_violation(), 0.0, 1e-15);
  s.set(1, 2, 0.3);
  EXPECT_GT(s.max_invariant_violation(), 0.5);
}

TEST(RandomTest, UniformUnitRangeAndDeterminism) {
  Rng a(42), b(42);
  for (int t = 0; t < 1000; ++t) {
    double x = UniformUnit(a);
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
    EXPECT_EQ(x, UniformUnit(b));
  }
}

TEST(ErrorTest, MessageCarriesCodeName) {
  Error e(ErrorCode::kNonUniformK, "line 2", 2);
  EXPECT_NE(std::string(e.what()).find(ErrorCodeName(ErrorCode::kNonUniformK)), std::string::npos);
  EXPECT_EQ(e.index(), 2);
}

}  // namespace
}  // namespace plc
