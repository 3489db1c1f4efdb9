//
// Copyright 2026 The StablePriv Authors
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
//

#include "stablepriv/subsample.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "stablepriv/noise.h"

namespace stablepriv {
namespace {

Dataset MakeDataset(int64_t n) {
  Dataset d;
  for (int64_t i = 0; i < n; ++i) {
    d.examples.push_back({{static_cast<double>(i)}, 0});
  }
  return d;
}

TEST(ComputeChunkCountTest, PinnedFormulaValues) {
  // epsilon chosen to cancel the formula to exactly 1.
  const double eps_cancel = 1573.4994447976799;
  auto unit = ComputeChunkCount(1, 1, eps_cancel, 0.1, 0.01);
  ASSERT_TRUE(unit.ok());
  EXPECT_EQ(*unit, 1);

  // Hand-calculator pin of the full-scale formula.
  auto big = ComputeChunkCount(1000, 60, 1.0, 1e-5, 0.05);
  ASSERT_TRUE(big.ok());
  EXPECT_EQ(*big, 87968);
}

TEST(ComputeChunkCountTest, MinBranchUsesDeltaWhenBetaLarge) {
  // With beta/2 > delta the log argument uses delta, so beta stops
  // mattering.
  auto a = ComputeChunkCount(100, 5, 1.0, 1e-6, 0.5);
  auto b = ComputeChunkCount(100, 5, 1.0, 1e-6, 0.9);
  ASSERT_TRUE(a.ok());
  ASSERT_TRUE(b.ok());
  EXPECT_EQ(*a, *b);
}

TEST(ComputeChunkCountTest, ParameterErrors) {
  EXPECT_FALSE(ComputeChunkCount(0, 1, 1.0, 0.1, 0.1).ok());
  EXPECT_FALSE(ComputeChunkCount(1, 0, 1.0, 0.1, 0.1).ok());
  EXPECT_FALSE(ComputeChunkCount(1, 1, 0.0, 0.1, 0.1).ok());
}

TEST(SplitIntoChunksTest, EqualSizedIntervals) {
  auto plan = SplitIntoChunks(10, 5);
  ASSERT_TRUE(plan.ok());
  EXPECT_EQ(plan->num_chunks, 5);
  EXPECT_EQ(plan->chunk_size, 2);

  auto uneven = SplitIntoChunks(11, 5);
  ASSERT_TRUE(uneven.ok());
  EXPECT_EQ(uneven->chunk_size, 2);  // example index 10 is unused

  EXPECT_FALSE(SplitIntoChunks(4, 5).ok());
}

TEST(SplitIntoChunksTest, ChunkViewsAreDisjointIntervals) {
  const Dataset dataset = MakeDataset(11);
  auto plan = SplitIntoChunks(dataset.size(), 5);
  ASSERT_TRUE(plan.ok());
  for (int64_t j = 0; j < plan->num_chunks; ++j) {
    const auto chunk = ChunkView(dataset, *plan, j);
    ASSERT_EQ(chunk.size(), 2u);
    EXPECT_EQ(chunk[0].features[0], static_cast<double>(2 * j));
    EXPECT_EQ(chunk[1].features[0], static_cast<double>(2 * j + 1));
  }
}

TEST(ModeAndStabilityDistanceTest, SpecCases) {
  const std::vector<int64_t> skewed = {7, 2, 1, 0};
  auto a = ModeAndStabilityDistance(absl::MakeConstSpan(skewed));
  ASSERT_TRUE(a.ok());
  EXPECT_EQ(a->mode, 0);
  EXPECT_EQ(a->distance, 4);

  const std::vector<int64_t> tied = {3, 3};
  auto tie = ModeAndStabilityDistance(absl::MakeConstSpan(tied));
  ASSERT_TRUE(tie.ok());
  EXPECT_EQ(tie->mode, 0);  // ties break to the lowest index
  EXPECT_EQ(tie->distance, 0);

  const std::vector<int64_t> lone = {10};
  auto single = ModeAndStabilityDistance(absl::MakeConstSpan(lone));
  ASSERT_TRUE(single.ok());
  EXPECT_EQ(single->mode, 0);
  EXPECT_EQ(single->distance, 9);

  EXPECT_FALSE(ModeAndStabilityDistance(absl::Span<const int64_t>()).ok());
}

// Exhaustive cross-check against an independent top-two computation for
// every vote vector with k <= 6 voters over ranges of size <= 3.
TEST(ModeAndStabilityDistanceTest, BruteForceOracle) {
  for (int range = 1; range <= 3; ++range) {
    for (int k = 1; k <= 6; ++k) {
      int64_t total = 1;
      for (int i = 0; i < k; ++i) total *= range;
      for (int64_t code = 0; code < total; ++code) {
        std::vector<int> votes(k);
        int64_t rest = code;
        for (int i = 0; i < k; ++i) {
          votes[i] = static_cast<int>(rest % range);
          rest /= range;
        }
        auto hist = VoteHistogram::FromVotes(votes, range);
        ASSERT_TRUE(hist.ok());
        auto got = ModeAndStabilityDistance(*hist);
        ASSERT_TRUE(got.ok());

        // Oracle: sort a copy of the counts to find top and second.
        std::vector<int64_t> sorted = hist->counts;
        std::sort(sorted.begin(), sorted.end(), std::greater<int64_t>());
        const int64_t top = sorted[0];
        const int64_t second = sorted.size() > 1 ? sorted[1] : 0;
        EXPECT_EQ(got->distance, std::max<int64_t>(0, top - second - 1));
        EXPECT_EQ(hist->counts[got->mode], top);
        for (int r = 0; r < got->mode; ++r) {
          EXPECT_LT(hist->counts[r], top);  // lowest-index tie break
        }
      }
    }
  }
}

// Agreement above two thirds forces a distance of at least k/3: with
// top >= 2k/3 + 1 votes, the runner-up has at most k/3 - 1.
TEST(ModeAndStabilityDistanceTest, TwoThirdsAgreementForcesLargeDistance) {
  NoiseSource rng = NoiseSource::SeededUniform(3);
  for (int rep = 0; rep < 2000; ++rep) {
    const int k = 3 + static_cast<int>(rng.NextUniform() * 30);
    const int range = 2 + static_cast<int>(rng.NextUniform() * 4);
    std::vector<int> votes(k);
    for (int& v : votes) v = static_cast<int>(rng.NextUniform() * range);
    auto hist = VoteHistogram::FromVotes(votes, range);
    ASSERT_TRUE(hist.ok());
    auto got = ModeAndStabilityDistance(*hist);
    ASSERT_TRUE(got.ok());
    const int64_t top = hist->counts[got->mode];
    if (3 * top >= 2 * k + 3) {
      EXPECT_GE(3 * got->distance, k)
          << "k=" << k << " top=" << top << " dist=" << got->distance;
    }
  }
}

TEST(SubsampleSessionTest, ZeroNoiseReleaseAndBottom) {
  const Dataset dataset = MakeDataset(10);
  auto params = *PrivacyParams::Create(1.0, 0.01, 2, 10);

  // All five chunks vote token 0: distance 4 beats the test threshold 2.
  auto unanimous = SubsampleSession::Create(
      &dataset, 5, params, NoiseSource::ZeroNoise(), std::nullopt, 2.0);
  ASSERT_TRUE(unanimous.ok());
  auto answer = unanimous->AnswerQuery(
      2, [](int64_t, absl::Span<const LabeledExample>, int64_t) {
        return 0;
      });
  ASSERT_TRUE(answer.ok());
  EXPECT_EQ(*answer, DiscreteAnswer::Value(0));

  // 3-2 split: distance 0 <= 2, bottom.
  auto split = SubsampleSession::Create(
      &dataset, 5, params, NoiseSource::ZeroNoise(), std::nullopt, 2.0);
  ASSERT_TRUE(split.ok());
  auto bottom = split->AnswerQuery(
      2, [](int64_t, absl::Span<const LabeledExample>, int64_t chunk) {
        return chunk < 3 ? 0 : 1;
      });
  ASSERT_TRUE(bottom.ok());
  EXPECT_TRUE(bottom->is_bottom());
}

TEST(SubsampleSessionTest, VoteFailureSurfacesWithoutSpendingBudget) {
  const Dataset dataset = MakeDataset(10);
  auto params = *PrivacyParams::Create(1.0, 0.01, 2, 10);
  auto session = SubsampleSession::Create(
      &dataset, 5, params, NoiseSource::ZeroNoise(), std::nullopt, 2.0);
  ASSERT_TRUE(session.ok());
  auto failed = session->AnswerQuery(
      2, [](int64_t, absl::Span<const LabeledExample>, int64_t) {
        return absl::InternalError("chunk training failed");
      });
  EXPECT_FALSE(failed.ok());
  EXPECT_EQ(session->oqr().unstable_count(), 0);
}

TEST(SubsampleSessionTest, HistogramCountsArePermutationInvariant) {
  // Re-running with permuted chunk order leaves every vote histogram, and
  // so every answer, unchanged.
  const Dataset dataset = MakeDataset(12);
  auto params = *PrivacyParams::Create(1.0, 0.01, 2, 10);
  const std::vector<int> base_votes = {0, 1, 0, 0, 1, 0};
  const std::vector<int> permuted_votes = {0, 0, 1, 0, 0, 1};

  for (int which = 0; which < 2; ++which) {
    const auto& votes = which == 0 ? base_votes : permuted_votes;
    auto session = SubsampleSession::Create(
        &dataset, 6, params, NoiseSource::SeededUniform(41), std::nullopt,
        std::nullopt);
    ASSERT_TRUE(session.ok());
    auto answer = session->AnswerQuery(
        2, [&votes](int64_t, absl::Span<const LabeledExample>,
                    int64_t chunk) { return votes[chunk]; });
    ASSERT_TRUE(answer.ok());
    // Identical seeds and identical counts: identical outcome.
    EXPECT_TRUE(answer->is_bottom());
  }
}

TEST(AnswerWithSubsampleVotesTest, MonteCarloSubsampleUtility) {
  // Queries whose chunk answers match a fixed token with probability >= 3/4
  // are answered with that token w.p. >= 1 - beta once k >= 72 log(2m/beta).
  // Desk scale: epsilon is raised until the required stability level
  // k/3 clears the session threshold; all other constants stay at their
  // formula values.
  const double beta = 0.2;
  const int64_t m = 20;
  const double epsilon = 15.0;
  const double delta = 0.01;
  const auto k = static_cast<int64_t>(
      std::ceil(72.0 * std::log(2.0 * m / beta)));
  auto params = *PrivacyParams::Create(epsilon, delta, 2, m);
  const Dataset dataset = MakeDataset(k);

  int good_runs = 0;
  const int runs = 100;
  for (int run = 0; run < runs; ++run) {
    NoiseSource vote_rng = NoiseSource::SeededUniform(9000 + run);
    // Pre-draw votes: each chunk hits token 1 w.p. exactly 3/4.
    std::vector<std::vector<int>> votes(m, std::vector<int>(k));
    for (auto& row : votes) {
      for (int& v : row) v = vote_rng.NextUniform() < 0.75 ? 1 : 0;
    }
    std::vector<int> ranges(m, 2);
    auto answers = AnswerWithSubsampleVotes(
        dataset, k, ranges,
        [&votes](int64_t query, absl::Span<const LabeledExample>,
                 int64_t chunk) { return votes[query][chunk]; },
        params, NoiseSource::SeededUniform(100 + run));
    bool all_match = true;
    for (const auto& answer : answers) {
      ASSERT_TRUE(answer.ok());
      if (!(answer->is_value() && answer->value == 1)) all_match = false;
    }
    good_runs += all_match;
  }
  // Per-run failure probability is well under beta; 90/100 is loose.
  EXPECT_GE(good_runs, 90);
}

}  // namespace
}  // namespace stablepriv
