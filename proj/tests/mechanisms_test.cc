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

#include "stablepriv/mechanisms.h"

#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "stablepriv/noise.h"

namespace stablepriv {
namespace {

TEST(SparseVectorConfigTest, LambdaFormula) {
  auto config = SparseVectorConfig::Create(10, 1.0, 1e-6, 0.0);
  ASSERT_TRUE(config.ok());
  // sqrt(32 * 10 * log(1e6)) / 1, hand-evaluated.
  EXPECT_NEAR(config->lambda, 66.4903254507644, 1e-9 * 66.49);
  EXPECT_FALSE(SparseVectorConfig::Create(0, 1.0, 1e-6, 0.0).ok());
  EXPECT_FALSE(SparseVectorConfig::Create(10, -1.0, 1e-6, 0.0).ok());
  EXPECT_FALSE(SparseVectorConfig::Create(10, 1.0, 2.0, 0.0).ok());
  EXPECT_FALSE(
      SparseVectorConfig::CreateWithLambda(10, 1.0, 1e-6, 0.0, -1.0).ok());
}

TEST(SparseVectorTest, EmptyStreamYieldsEmptyOutput) {
  auto config = SparseVectorConfig::Create(3, 1.0, 0.01, 5.0);
  ASSERT_TRUE(config.ok());
  NoiseSource noise = NoiseSource::SeededUniform(1);
  EXPECT_TRUE(RunSparseVector({}, *config, noise).empty());
}

TEST(SparseVectorTest, ZeroNoiseReducesToPlainThreshold) {
  auto config = SparseVectorConfig::Create(1, 1.0, 0.01, 10.0);
  ASSERT_TRUE(config.ok());
  NoiseSource noise = NoiseSource::ZeroNoise();
  const std::vector<double> stream = {15.0, 5.0, 15.0};
  const auto out = RunSparseVector(stream, *config, noise);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0], ThresholdOutcome::kAbove);
  EXPECT_EQ(out[1], ThresholdOutcome::kBelow);
  EXPECT_EQ(out[2], ThresholdOutcome::kAbove);
}

TEST(SparseVectorTest, ZeroNoiseEquivalenceProperty) {
  // With zero noise the run equals the pure predicate q > w elementwise,
  // until the below-budget runs out.
  NoiseSource stream_rng = NoiseSource::SeededUniform(42);
  for (int rep = 0; rep < 1000; ++rep) {
    const int64_t cutoff = 1 + static_cast<int64_t>(stream_rng.NextUniform() * 5);
    const double w = stream_rng.NextUniform() * 10 - 5;
    auto config = SparseVectorConfig::Create(cutoff, 1.0, 0.01, w);
    ASSERT_TRUE(config.ok());
    std::vector<double> queries(20);
    for (double& q : queries) q = stream_rng.NextUniform() * 10 - 5;

    NoiseSource noise = NoiseSource::ZeroNoise();
    const auto out = RunSparseVector(queries, *config, noise);
    int64_t below = 0;
    for (size_t i = 0; i < queries.size(); ++i) {
      if (below > cutoff) {
        EXPECT_EQ(out[i], ThresholdOutcome::kBudgetExhausted);
        continue;
      }
      if (queries[i] > w) {
        EXPECT_EQ(out[i], ThresholdOutcome::kAbove);
      } else {
        EXPECT_EQ(out[i], ThresholdOutcome::kBelow);
        ++below;
      }
    }
  }
}

TEST(SparseVectorTest, BelowCountNeverExceedsCutoffPlusOne) {
  NoiseSource meta = NoiseSource::SeededUniform(7);
  for (int rep = 0; rep < 200; ++rep) {
    const int64_t cutoff = 1 + static_cast<int64_t>(meta.NextUniform() * 4);
    auto config = SparseVectorConfig::CreateWithLambda(
        cutoff, 1.0, 0.01, /*threshold=*/0.0, /*lambda=*/2.0);
    ASSERT_TRUE(config.ok());
    std::vector<double> queries(50);
    for (double& q : queries) q = meta.NextUniform() * 4 - 2;
    NoiseSource noise = NoiseSource::SeededUniform(1000 + rep);
    const auto out = RunSparseVector(queries, *config, noise);
    int64_t below = 0;
    bool exhausted_seen = false;
    for (const auto outcome : out) {
      below += outcome == ThresholdOutcome::kBelow;
      if (exhausted_seen) {
        EXPECT_EQ(outcome, ThresholdOutcome::kBudgetExhausted);
      }
      exhausted_seen |= outcome == ThresholdOutcome::kBudgetExhausted;
    }
    EXPECT_LE(below, cutoff + 1);
  }
}

TEST(ReleaseIfStableTest, ZeroNoiseCases) {
  NoiseSource noise = NoiseSource::ZeroNoise();
  auto released = ReleaseIfStable(7, 100, 5.0, 1.0, noise);
  ASSERT_TRUE(released.ok());
  ASSERT_TRUE(released->released());
  EXPECT_EQ(*released->value, 7);

  auto bottom = ReleaseIfStable(7, 0, 5.0, 1.0, noise);
  ASSERT_TRUE(bottom.ok());
  EXPECT_FALSE(bottom->released());
}

TEST(ReleaseIfStableTest, NegativeDistanceRejected) {
  NoiseSource noise = NoiseSource::ZeroNoise();
  EXPECT_FALSE(ReleaseIfStable(7, -1, 5.0, 1.0, noise).ok());
  EXPECT_FALSE(ReleaseIfStable(7, 1, 5.0, 0.0, noise).ok());
}

TEST(ReleaseIfStableTest, BottomFrequencyAtZeroDistance) {
  // With distance 0 and Gamma = log(1/delta)/eps, Pr[bottom] =
  // Pr[Lap(1/eps) <= Gamma] >= 1 - delta; at delta = 0.01 the exact value
  // is 1 - delta/2 = 0.995.
  const double epsilon = 1.0;
  const double delta = 0.01;
  const double gamma = *StandaloneStabilityThreshold(epsilon, delta);
  const int64_t trials = 100000;
  NoiseSource noise = NoiseSource::SeededUniform(31337);
  int64_t bottoms = 0;
  for (int64_t t = 0; t < trials; ++t) {
    auto out = ReleaseIfStable(1, 0, gamma, epsilon, noise);
    ASSERT_TRUE(out.ok());
    bottoms += out->released() ? 0 : 1;
  }
  const double freq = static_cast<double>(bottoms) / trials;
  const double sigma = std::sqrt(0.01 * 0.99 / trials);
  EXPECT_GE(freq, 0.99 - 3 * sigma);
}

TEST(ReleaseIfStableTest, UtilityAtStableDistance) {
  // distance >= (log(1/delta) + log(1/beta))/eps releases w.p. >= 1 - beta.
  const double epsilon = 1.0;
  const double delta = 0.01;
  const double gamma = *StandaloneStabilityThreshold(epsilon, delta);
  for (const double beta : {0.1, 0.01}) {
    const auto distance = static_cast<int64_t>(
        std::ceil((std::log(1.0 / delta) + std::log(1.0 / beta)) / epsilon));
    const int64_t trials = 10000;
    NoiseSource noise = NoiseSource::SeededUniform(777);
    int64_t released = 0;
    for (int64_t t = 0; t < trials; ++t) {
      auto out = ReleaseIfStable(1, distance, gamma, epsilon, noise);
      ASSERT_TRUE(out.ok());
      released += out->released() ? 1 : 0;
    }
    const double freq = static_cast<double>(released) / trials;
    const double sigma = std::sqrt(beta * (1 - beta) / trials);
    EXPECT_GE(freq, 1.0 - beta - 3 * sigma) << "beta=" << beta;
  }
}

TEST(ReleaseIfStableTest, PrivacySmokeOnIdenticalNeighbors) {
  // Both neighbors have distance 0, so the bottom frequencies must agree
  // up to sampling error; the (eps, delta) inequality then holds trivially
  // within 3 sigma.
  const double epsilon = 0.5;
  const double gamma = *StandaloneStabilityThreshold(epsilon, 0.05);
  const int64_t trials = 100000;
  auto frequency = [&](uint64_t seed) {
    NoiseSource noise = NoiseSource::SeededUniform(seed);
    int64_t bottoms = 0;
    for (int64_t t = 0; t < trials; ++t) {
      bottoms += ReleaseIfStable(1, 0, gamma, epsilon, noise)->released() ? 0 : 1;
    }
    return static_cast<double>(bottoms) / trials;
  };
  const double p = frequency(11);
  const double q = frequency(22);
  const double sigma =
      std::sqrt(p * (1 - p) / trials) + std::sqrt(q * (1 - q) / trials);
  EXPECT_LE(std::log(p) - std::log(q), epsilon + 3 * sigma);
  EXPECT_LE(std::log(q) - std::log(p), epsilon + 3 * sigma);
}

}  // namespace
}  // namespace stablepriv
