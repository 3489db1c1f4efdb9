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

#include "stablepriv/oqr.h"

#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "stablepriv/noise.h"
#include "stablepriv/types.h"

namespace stablepriv {
namespace {

PrivacyParams SmallParams() {
  return *PrivacyParams::Create(1.0, 0.01, 4, 10);
}

TEST(OnlineQuerySessionTest, FormulaConstantsAtZeroNoise) {
  auto session = OnlineQuerySession::Open(SmallParams(),
                                          NoiseSource::ZeroNoise());
  ASSERT_TRUE(session.ok());
  // lambda = sqrt(32*4*log(200)), w = 2 lambda log(2000), hand-evaluated.
  EXPECT_NEAR(session->lambda(), 26.04197809149967, 1e-9 * 26.04);
  EXPECT_NEAR(session->threshold(), 395.8850706540417, 1e-9 * 395.9);
  EXPECT_DOUBLE_EQ(session->noisy_threshold(), session->threshold());
  EXPECT_EQ(session->unstable_count(), 0);
}

TEST(OnlineQuerySessionTest, GoldenNoisyThresholdAtSeed3) {
  auto session = OnlineQuerySession::Open(SmallParams(),
                                          NoiseSource::SeededUniform(3));
  ASSERT_TRUE(session.ok());
  // w + Laplace(lambda) at the pinned first uniform of the seed-3 stream.
  EXPECT_NEAR(session->noisy_threshold(), 399.14117021571366, 1e-9 * 399.1);
}

TEST(OnlineQuerySessionTest, InvalidParamsRejected) {
  auto params = PrivacyParams{1.0, 0.01, 0, 10};  // cutoff below 1
  EXPECT_FALSE(
      OnlineQuerySession::Open(params, NoiseSource::ZeroNoise()).ok());
  EXPECT_FALSE(OnlineQuerySession::OpenWithOverrides(
                   SmallParams(), -1.0, std::nullopt, NoiseSource::ZeroNoise())
                   .ok());
}

TEST(OnlineQuerySessionTest, ZeroNoiseAnswerCases) {
  auto session = OnlineQuerySession::Open(SmallParams(),
                                          NoiseSource::ZeroNoise());
  ASSERT_TRUE(session.ok());
  const double w = session->threshold();

  // Far above the threshold: the exact candidate comes back.
  auto above = session->Answer(1, static_cast<int64_t>(w) + 1000);
  ASSERT_TRUE(above.ok());
  EXPECT_EQ(*above, DiscreteAnswer::Value(1));
  EXPECT_EQ(session->unstable_count(), 0);

  // Distance zero: bottom, counter moves.
  auto bottom = session->Answer(1, 0);
  ASSERT_TRUE(bottom.ok());
  EXPECT_TRUE(bottom->is_bottom());
  EXPECT_EQ(session->unstable_count(), 1);
}

TEST(OnlineQuerySessionTest, ThresholdRefreshOnlyOnBottom) {
  // Draw accounting: opening takes 1 draw; a released answer takes 1 (the
  // distance noise); a bottom takes 2 (distance noise + refresh).
  auto session = OnlineQuerySession::Open(
      SmallParams(), NoiseSource::SeededUniform(5));
  ASSERT_TRUE(session.ok());
  const double w = session->threshold();
  ASSERT_TRUE(session->Answer(1, static_cast<int64_t>(w) + 100000).ok());
  ASSERT_TRUE(session->Answer(1, 0).ok());
  EXPECT_EQ(session->unstable_count(), 1);
}

TEST(OnlineQuerySessionTest, BudgetExhaustionAfterCutoff) {
  auto params = *PrivacyParams::Create(1.0, 0.01, 2, 10);
  auto session =
      OnlineQuerySession::Open(params, NoiseSource::ZeroNoise());
  ASSERT_TRUE(session.ok());
  int64_t bottoms = 0;
  int64_t exhausted = 0;
  for (int i = 0; i < 10; ++i) {
    auto answer = session->Answer(0, 0);
    ASSERT_TRUE(answer.ok());
    bottoms += answer->is_bottom();
    exhausted += answer->is_exhausted();
  }
  EXPECT_EQ(bottoms, params.cutoff + 1);
  EXPECT_EQ(exhausted, 10 - params.cutoff - 1);
}

TEST(OnlineQuerySessionTest, ZeroNoiseOracleProperty) {
  // Zero noise: the answer is the candidate iff distance > w.
  NoiseSource meta = NoiseSource::SeededUniform(9);
  for (int rep = 0; rep < 1000; ++rep) {
    auto params = *PrivacyParams::Create(0.5 + meta.NextUniform(), 0.01, 3, 50);
    const double w_override = meta.NextUniform() * 20;
    auto session = OnlineQuerySession::OpenWithOverrides(
        params, std::nullopt, w_override, NoiseSource::ZeroNoise());
    ASSERT_TRUE(session.ok());
    for (int q = 0; q < 5; ++q) {
      const auto distance = static_cast<int64_t>(meta.NextUniform() * 40);
      if (session->unstable_count() > params.cutoff) break;
      auto answer = session->Answer(1, distance);
      ASSERT_TRUE(answer.ok());
      if (static_cast<double>(distance) > w_override) {
        EXPECT_EQ(*answer, DiscreteAnswer::Value(1));
      } else {
        EXPECT_TRUE(answer->is_bottom());
      }
    }
  }
}

TEST(OnlineQuerySessionTest, AccuracyMonteCarlo) {
  // Streams with at most T low-distance queries release every
  // high-distance query in at least 90% of seeded runs, at the corollary's
  // distance level alpha = 32 log(4mT/min(delta,beta)) sqrt(2T log(2/delta))
  // / epsilon with beta = 0.1.
  const int64_t m = 200;
  const int64_t cutoff = 10;
  const double epsilon = 1.0;
  const double delta = 1e-4;
  const double beta = 0.1;
  auto params = *PrivacyParams::Create(epsilon, delta, cutoff, m);
  const double alpha = 32.0 *
                       std::log(4.0 * m * cutoff / std::min(delta, beta)) *
                       std::sqrt(2.0 * cutoff * std::log(2.0 / delta)) /
                       epsilon;
  const auto high = static_cast<int64_t>(std::ceil(alpha));

  int good_runs = 0;
  for (int run = 0; run < 100; ++run) {
    auto session = OnlineQuerySession::Open(
        params, NoiseSource::SeededUniform(505 + run));
    ASSERT_TRUE(session.ok());
    bool all_released = true;
    for (int64_t i = 0; i < m; ++i) {
      const bool low = i % 20 == 19;  // 10 low queries out of 200
      auto answer = session->Answer(1, low ? 0 : high);
      ASSERT_TRUE(answer.ok());
      if (!low && !answer->is_value()) all_released = false;
    }
    good_runs += all_released;
  }
  EXPECT_GE(good_runs, 90);
}

}  // namespace
}  // namespace stablepriv
