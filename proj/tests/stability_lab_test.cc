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

#include "stablepriv/stability_lab.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "stablepriv/learners.h"

namespace stablepriv {
namespace {

const std::vector<double> kProbe = {0.0};

Learner ConstantLearner(double score) {
  return Learner{"constant",
                 [score](absl::Span<const LabeledExample>, uint64_t) {
                   return Classifier(
                       [score](absl::Span<const double>) { return score; });
                 }};
}

TEST(EstimateOnAverageStabilityTest, LabelMeanMatchesClosedForm) {
  // Replace-one gap of the label mean is (y_j - y'_j)/n, so alpha^2 =
  // 2p(1-p)/n^2 under Bernoulli(p) labels.
  auto learner = LearnerByName("label-mean");
  ASSERT_TRUE(learner.ok());
  const struct {
    double p;
    int64_t n;
  } cases[] = {{0.5, 50}, {0.25, 100}};
  for (const auto& c : cases) {
    auto estimate = EstimateOnAverageStability(
        *learner, BernoulliLabelSampler(c.p), c.n, kProbe, /*trials=*/100000,
        /*seed=*/21, /*threads=*/4);
    ASSERT_TRUE(estimate.ok());
    const double expected = 2.0 * c.p * (1.0 - c.p) / (c.n * c.n);
    EXPECT_NEAR(estimate->alpha_sq_hat, expected, 3.0 * estimate->std_error)
        << "p=" << c.p << " n=" << c.n;
    EXPECT_GT(estimate->std_error, 0.0);
  }
}

TEST(EstimateOnAverageStabilityTest, ConstantLearnerIsExactlyZero) {
  auto estimate = EstimateOnAverageStability(
      ConstantLearner(0.7), BernoulliLabelSampler(0.5), 50, kProbe, 200, 3);
  ASSERT_TRUE(estimate.ok());
  EXPECT_EQ(estimate->alpha_sq_hat, 0.0);
}

TEST(EstimateOnAverageStabilityTest, LabelMeanShrinksWithSampleSize) {
  auto learner = LearnerByName("label-mean");
  ASSERT_TRUE(learner.ok());
  auto small = EstimateOnAverageStability(
      *learner, BernoulliLabelSampler(0.5), 100, kProbe, 20000, 5, 4);
  auto large = EstimateOnAverageStability(
      *learner, BernoulliLabelSampler(0.5), 200, kProbe, 20000, 6, 4);
  ASSERT_TRUE(small.ok());
  ASSERT_TRUE(large.ok());
  EXPECT_LE(large->alpha_sq_hat, small->alpha_sq_hat);
}

TEST(EstimateOnAverageStabilityTest, OnePassSgdShrinksWithSampleSize) {
  SgdConfig config;
  Learner sgd{"logistic-sgd",
              [config](absl::Span<const LabeledExample> data, uint64_t seed) {
                return TrainLogisticSgd(data, config, seed);
              }};
  auto sampler = ThresholdSampler(0.5, 0.1);
  auto small = EstimateOnAverageStability(sgd, sampler, 100,
                                          std::vector<double>{0.7}, 2000, 7, 4);
  auto large = EstimateOnAverageStability(sgd, sampler, 200,
                                          std::vector<double>{0.7}, 2000, 8, 4);
  ASSERT_TRUE(small.ok());
  ASSERT_TRUE(large.ok());
  EXPECT_LE(large->alpha_sq_hat, small->alpha_sq_hat * 1.25);
}

TEST(EstimateOnAverageStabilityTest, TooFewTrialsRejected) {
  auto learner = LearnerByName("label-mean");
  ASSERT_TRUE(learner.ok());
  EXPECT_FALSE(EstimateOnAverageStability(*learner, BernoulliLabelSampler(0.5),
                                          50, kProbe, 99, 1)
                   .ok());
}

TEST(ConcentrationCheckTest, LabelMeanPassesAtExactAlpha) {
  // alpha = 1/(n' sqrt(2)) is the exact closed form at p = 1/2; the band
  // 4 alpha sqrt(2n') = 4/sqrt(n') spans 8 standard deviations of the
  // sample mean, so nearly every draw is inside.
  auto learner = LearnerByName("label-mean");
  ASSERT_TRUE(learner.ok());
  const int64_t n = 100;
  const double alpha = 1.0 / (n * std::sqrt(2.0));
  auto fraction = ConcentrationCheck(*learner, BernoulliLabelSampler(0.5), n,
                                     kProbe, alpha, 2000, 33, 4);
  ASSERT_TRUE(fraction.ok());
  const double sigma = std::sqrt(0.75 * 0.25 / 2000);
  EXPECT_GE(*fraction, 0.75 - 3 * sigma);
}

TEST(ConcentrationCheckTest, ConstantLearnerAlwaysInside) {
  auto fraction = ConcentrationCheck(ConstantLearner(0.4),
                                     BernoulliLabelSampler(0.5), 50, kProbe,
                                     0.01, 500, 12);
  ASSERT_TRUE(fraction.ok());
  EXPECT_EQ(*fraction, 1.0);
}

TEST(ConcentrationCheckTest, ZeroAlphaNonConstantLearnerFails) {
  auto learner = LearnerByName("label-mean");
  ASSERT_TRUE(learner.ok());
  auto fraction = ConcentrationCheck(*learner, BernoulliLabelSampler(0.5), 50,
                                     kProbe, 0.0, 500, 13);
  ASSERT_TRUE(fraction.ok());
  EXPECT_LT(*fraction, 1.0);
}

double MeanLabel(const Dataset& dataset) {
  double sum = 0;
  for (const auto& example : dataset.examples) sum += example.label;
  return dataset.empty() ? 0.0 : sum / dataset.size();
}

TEST(EfronSteinCheckTest, MeanOfThreeBernoulliAchievesEquality) {
  // Var = p(1-p)/3 = 1/12 and the replace-one bound is also 1/12: the
  // mean meets the variance bound with equality.
  auto result = EfronSteinCheck(MeanLabel, BernoulliLabelSampler(0.5), 3,
                                100000, 44);
  ASSERT_TRUE(result.ok());
  EXPECT_NEAR(result->empirical_variance, 1.0 / 12.0, 0.05 / 12.0);
  EXPECT_NEAR(result->empirical_bound, 1.0 / 12.0, 0.05 / 12.0);
}

TEST(EfronSteinCheckTest, ConstantEstimatorGivesZeroZero) {
  auto result = EfronSteinCheck(
      [](const Dataset&) { return 0.25; }, BernoulliLabelSampler(0.5), 3,
      1000, 45);
  ASSERT_TRUE(result.ok());
  EXPECT_EQ(result->empirical_variance, 0.0);
  EXPECT_EQ(result->empirical_bound, 0.0);
}

TEST(EfronSteinCheckTest, MaxOfThreeRespectsTheBound) {
  // Brute-force closed forms over the 2^3 label vectors at p = 1/2:
  // max = 1 unless all labels are 0, so Var = (7/8)(1/8) = 7/64. The
  // replace-one sum: max changes only between 000 and one-hot swaps;
  // E[(f(D)-f(D^(j)))^2] = Pr[exactly one of the pair flips the max]
  // = 2/16 per coordinate, so bound = (3/2)(2/16) = 3/16 >= 7/64.
  const auto max_label = [](const Dataset& dataset) {
    int max_y = 0;
    for (const auto& example : dataset.examples) {
      max_y = std::max(max_y, example.label);
    }
    return static_cast<double>(max_y);
  };
  auto result = EfronSteinCheck(max_label, BernoulliLabelSampler(0.5), 3,
                                100000, 46);
  ASSERT_TRUE(result.ok());
  EXPECT_NEAR(result->empirical_variance, 7.0 / 64.0, 0.01);
  EXPECT_NEAR(result->empirical_bound, 3.0 / 16.0, 0.01);
  // Monte-Carlo slack: three sigma of the variance estimate, loosely 0.01.
  EXPECT_LE(result->empirical_variance, result->empirical_bound + 0.01);
}

TEST(EfronSteinCheckTest, InequalityHoldsForEstimatorPanel) {
  // The variance bound is a theorem; the panel sweep is a regression
  // guard for the estimator plumbing.
  const std::vector<std::function<double(const Dataset&)>> panel = {
      MeanLabel,
      [](const Dataset& d) {
        int max_y = 0;
        for (const auto& e : d.examples) max_y = std::max(max_y, e.label);
        return static_cast<double>(max_y);
      },
      [](const Dataset& d) {
        // Fraction of adjacent equal-label pairs.
        if (d.size() < 2) return 0.0;
        int64_t equal = 0;
        for (int64_t i = 0; i + 1 < d.size(); ++i) {
          equal += d.examples[i].label == d.examples[i + 1].label;
        }
        return static_cast<double>(equal) / (d.size() - 1);
      },
  };
  for (size_t i = 0; i < panel.size(); ++i) {
    auto result = EfronSteinCheck(panel[i], BernoulliLabelSampler(0.3), 10,
                                  20000, 47 + i);
    ASSERT_TRUE(result.ok());
    EXPECT_LE(result->empirical_variance, result->empirical_bound + 0.01)
        << "estimator " << i;
  }
}

TEST(QualityProbeTest, ConstantOneLearner) {
  auto estimate = QualityProbe(ConstantLearner(1.0),
                               BernoulliLabelSampler(0.5), 20, kProbe, 200, 3);
  ASSERT_TRUE(estimate.ok());
  EXPECT_DOUBLE_EQ(estimate->mean_score, 1.0);
  EXPECT_DOUBLE_EQ(estimate->nu_hat, 0.0);
}

TEST(QualityProbeTest, BalancedLabelsHaveNoQuality) {
  auto learner = LearnerByName("label-mean");
  ASSERT_TRUE(learner.ok());
  auto estimate = QualityProbe(*learner, BernoulliLabelSampler(0.5), 100,
                               kProbe, 2000, 9);
  ASSERT_TRUE(estimate.ok());
  EXPECT_NEAR(estimate->mean_score, 0.5, 0.01);
  EXPECT_NEAR(estimate->nu_hat, 0.5, 0.01);
}

TEST(QualityProbeTest, MarginDataGivesHighQuality) {
  // Label means over the positive band concentrate near the average
  // conditional, comfortably above 0.98.
  auto learner = LearnerByName("label-mean");
  ASSERT_TRUE(learner.ok());
  auto estimate =
      QualityProbe(*learner, MarginSampler(1.0, /*positive_side_only=*/true),
                   400, std::vector<double>{2.0}, 2000, 10, /*strong_nu=*/0.1);
  ASSERT_TRUE(estimate.ok());
  EXPECT_GT(estimate->mean_score, 0.98);
  EXPECT_LT(estimate->nu_hat, 0.02);
  EXPECT_LT(estimate->strong_beta_hat, 0.05);
}

TEST(SgdReductionProbeTest, ZeroStepsGiveZeroes) {
  SgdConfig config;
  config.passes = 0;
  auto result =
      SgdReductionProbe(ThresholdSampler(0.5, 0.1), config, 50,
                        std::vector<double>{0.5}, 200, 11, 5, 10);
  ASSERT_TRUE(result.ok());
  EXPECT_EQ(result->on_avg_alpha_sq_deterministic, 0.0);
  EXPECT_EQ(result->uniform_alpha_sq_permuted, 0.0);
}

TEST(SgdReductionProbeTest, SingleExampleDegenerateCase) {
  // n = 1: the only replace-one pair and the only permutation coincide, so
  // both estimates measure the same gap distribution.
  SgdConfig config;
  auto result = SgdReductionProbe(ThresholdSampler(0.5, 0.1), config, 1,
                                  std::vector<double>{0.5}, 2000, 12, 20, 1);
  ASSERT_TRUE(result.ok());
  EXPECT_GT(result->uniform_alpha_sq_permuted, 0.0);
  // Same order of magnitude is all determinism guarantees across
  // different draws; use a generous factor.
  EXPECT_LE(result->on_avg_alpha_sq_deterministic,
            result->uniform_alpha_sq_permuted * 10.0);
}

TEST(SgdReductionProbeTest, OnAverageBoundedByPermutationUniform) {
  SgdConfig config;
  config.step_constant = 0.5;
  auto result = SgdReductionProbe(ThresholdSampler(0.5, 0.1), config, 200,
                                  std::vector<double>{0.5}, 200, 13,
                                  /*panel_size=*/20,
                                  /*permutations_per_pair=*/100,
                                  /*threads=*/4);
  ASSERT_TRUE(result.ok());
  // Finite-panel max under-reports the sup; the 1.25 slack plus a loose
  // additive term absorbs it.
  EXPECT_LE(result->on_avg_alpha_sq_deterministic,
            result->uniform_alpha_sq_permuted * 1.25 + 1e-6);
}

}  // namespace
}  // namespace stablepriv
