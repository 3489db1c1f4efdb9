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
#include <numeric>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "stablepriv/noise.h"
#include "stablepriv/parallel.h"

namespace stablepriv {

namespace {

// Batch-means standard error over 10 batches.
double BatchMeansStdError(absl::Span<const double> values) {
  constexpr int kBatches = 10;
  const int64_t n = static_cast<int64_t>(values.size());
  if (n < kBatches) return 0.0;
  const int64_t per_batch = n / kBatches;
  std::vector<double> batch_means(kBatches, 0.0);
  for (int b = 0; b < kBatches; ++b) {
    double sum = 0;
    for (int64_t i = b * per_batch; i < (b + 1) * per_batch; ++i) {
      sum += values[i];
    }
    batch_means[b] = sum / static_cast<double>(per_batch);
  }
  const double grand =
      std::accumulate(batch_means.begin(), batch_means.end(), 0.0) / kBatches;
  double var = 0;
  for (const double m : batch_means) var += (m - grand) * (m - grand);
  var /= (kBatches - 1);
  return std::sqrt(var / kBatches);
}

double Mean(absl::Span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

absl::Status ValidateTrialArgs(int64_t n, int64_t trials) {
  if (n < 1) return absl::InvalidArgumentError("n must be positive");
  if (trials < 100) {
    return absl::InvalidArgumentError(
        absl::StrFormat("need at least 100 trials, got %d", trials));
  }
  return absl::OkStatus();
}

// One replace-one squared prediction gap. The learner's coins are shared
// between the two trainings (the replace-one definitions couple them).
absl::StatusOr<double> ReplaceOneGapSq(const Learner& learner,
                                       const DistributionSampler& sampler,
                                       int64_t n,
                                       absl::Span<const double> probe_x,
                                       uint64_t trial_seed) {
  auto dataset = sampler.sample(n, DeriveSeed(trial_seed, 1));
  if (!dataset.ok()) return dataset.status();
  auto replacement = sampler.sample(1, DeriveSeed(trial_seed, 2));
  if (!replacement.ok()) return replacement.status();
  if (replacement->empty()) {
    return absl::InvalidArgumentError("sampler returned no replacement draw");
  }
  NoiseSource index_rng =
      NoiseSource::SeededUniform(DeriveSeed(trial_seed, 3));
  const int64_t j = std::min<int64_t>(
      static_cast<int64_t>(index_rng.NextUniform() * n), n - 1);

  Dataset perturbed = *dataset;
  perturbed.examples[j] = replacement->examples[0];

  const uint64_t coins = DeriveSeed(trial_seed, 4);
  auto base = learner.train(dataset->view(), coins);
  if (!base.ok()) return base.status();
  auto swapped = learner.train(perturbed.view(), coins);
  if (!swapped.ok()) return swapped.status();

  const double gap =
      base->PredictSoft(probe_x) - swapped->PredictSoft(probe_x);
  return gap * gap;
}

}  // namespace

DistributionSampler BernoulliLabelSampler(double p) {
  return DistributionSampler{
      absl::StrFormat("bernoulli(%g)", p),
      [p](int64_t n, uint64_t seed) -> absl::StatusOr<Dataset> {
        if (n < 0) return absl::InvalidArgumentError("n must be nonnegative");
        if (p < 0 || p > 1) {
          return absl::InvalidArgumentError("p must lie in [0,1]");
        }
        NoiseSource rng = NoiseSource::SeededUniform(seed);
        Dataset out;
        out.examples.reserve(n);
        for (int64_t i = 0; i < n; ++i) {
          out.examples.push_back({{0.0}, rng.NextUniform() < p ? 1 : 0});
        }
        return out;
      },
      /*label_conditional=*/nullptr};
}

DistributionSampler ThresholdSampler(double theta_star, double noise_rate) {
  return DistributionSampler{
      absl::StrFormat("threshold(%g,%g)", theta_star, noise_rate),
      [theta_star, noise_rate](int64_t n, uint64_t seed) {
        return GenThresholdData(n, theta_star, noise_rate, seed);
      },
      /*label_conditional=*/nullptr};
}

DistributionSampler MarginSampler(double margin, bool positive_side_only) {
  return DistributionSampler{
      absl::StrFormat("margin(%g%s)", margin,
                      positive_side_only ? ",positive" : ""),
      [margin, positive_side_only](int64_t n, uint64_t seed) {
        return GenMarginData(n, margin, seed, positive_side_only);
      },
      [margin](absl::Span<const double> x) {
        return MarginLabelConditional(x.empty() ? 0.0 : x[0], margin);
      }};
}

absl::StatusOr<StabilityEstimate> EstimateOnAverageStability(
    const Learner& learner, const DistributionSampler& sampler, int64_t n,
    absl::Span<const double> probe_x, int64_t trials, uint64_t seed,
    int threads) {
  if (auto status = ValidateTrialArgs(n, trials); !status.ok()) return status;

  std::vector<double> gaps(trials, 0.0);
  std::vector<absl::Status> failures(trials, absl::OkStatus());
  ParallelFor(trials, threads, [&](int64_t t) {
    auto gap =
        ReplaceOneGapSq(learner, sampler, n, probe_x, DeriveSeed(seed, t));
    if (gap.ok()) {
      gaps[t] = *gap;
    } else {
      failures[t] = gap.status();
    }
  });
  for (const auto& status : failures) {
    if (!status.ok()) return status;
  }

  StabilityEstimate estimate;
  estimate.alpha_sq_hat = Mean(gaps);
  estimate.std_error = BatchMeansStdError(gaps);
  estimate.n = n;
  estimate.trials = trials;
  estimate.probe_x.assign(probe_x.begin(), probe_x.end());
  return estimate;
}

absl::StatusOr<double> ConcentrationCheck(const Learner& learner,
                                          const DistributionSampler& sampler,
                                          int64_t n_prime,
                                          absl::Span<const double> probe_x,
                                          double alpha, int64_t trials,
                                          uint64_t seed, int threads) {
  if (auto status = ValidateTrialArgs(n_prime, trials); !status.ok()) {
    return status;
  }
  if (alpha < 0) {
    return absl::InvalidArgumentError("alpha must be nonnegative");
  }

  const auto predict_at_probe =
      [&](uint64_t draw_seed) -> absl::StatusOr<double> {
    auto dataset = sampler.sample(n_prime, draw_seed);
    if (!dataset.ok()) return dataset.status();
    auto model = learner.train(dataset->view(), DeriveSeed(draw_seed, 11));
    if (!model.ok()) return model.status();
    return model->PredictSoft(probe_x);
  };

  // Pilot estimate of the expected prediction (10x the fresh draws).
  const int64_t pilot = 10 * trials;
  std::vector<double> pilot_scores(pilot, 0.0);
  std::vector<absl::Status> failures(pilot, absl::OkStatus());
  ParallelFor(pilot, threads, [&](int64_t t) {
    auto score = predict_at_probe(DeriveSeed(seed, 0xb00 + t));
    if (score.ok()) {
      pilot_scores[t] = *score;
    } else {
      failures[t] = score.status();
    }
  });
  for (const auto& status : failures) {
    if (!status.ok()) return status;
  }
  const double expected = Mean(pilot_scores);

  const double band = 4.0 * alpha * std::sqrt(2.0 * n_prime);
  std::vector<double> inside(trials, 0.0);
  failures.assign(trials, absl::OkStatus());
  ParallelFor(trials, threads, [&](int64_t t) {
    auto score = predict_at_probe(DeriveSeed(seed, 0xf00000 + t));
    if (score.ok()) {
      inside[t] = std::fabs(*score - expected) <= band ? 1.0 : 0.0;
    } else {
      failures[t] = score.status();
    }
  });
  for (const auto& status : failures) {
    if (!status.ok()) return status;
  }
  return Mean(inside);
}

absl::StatusOr<EfronSteinResult> EfronSteinCheck(
    const std::function<double(const Dataset&)>& estimator,
    const DistributionSampler& sampler, int64_t n, int64_t trials,
    uint64_t seed) {
  if (auto status = ValidateTrialArgs(n, trials); !status.ok()) return status;
  if (n > 1000) {
    return absl::InvalidArgumentError(
        "replace-one variance check is limited to n <= 1000");
  }

  std::vector<double> values(trials, 0.0);
  std::vector<double> replace_one_sq(trials, 0.0);
  for (int64_t t = 0; t < trials; ++t) {
    const uint64_t trial_seed = DeriveSeed(seed, t);
    auto dataset = sampler.sample(n, DeriveSeed(trial_seed, 1));
    if (!dataset.ok()) return dataset.status();
    auto replacement = sampler.sample(1, DeriveSeed(trial_seed, 2));
    if (!replacement.ok()) return replacement.status();
    NoiseSource index_rng =
        NoiseSource::SeededUniform(DeriveSeed(trial_seed, 3));
    const int64_t j = std::min<int64_t>(
        static_cast<int64_t>(index_rng.NextUniform() * n), n - 1);
    Dataset perturbed = *dataset;
    perturbed.examples[j] = replacement->examples[0];

    values[t] = estimator(*dataset);
    const double diff = values[t] - estimator(perturbed);
    replace_one_sq[t] = diff * diff;
  }

  const double mean = Mean(values);
  double var = 0;
  for (const double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(trials - 1);

  // Uniform-j sampling estimates the average over positions; the bound
  // sums over all n of them, hence the n/2 factor.
  const double bound = 0.5 * static_cast<double>(n) * Mean(replace_one_sq);
  return EfronSteinResult{var, bound};
}

absl::StatusOr<QualityEstimate> QualityProbe(const Learner& learner,
                                             const DistributionSampler& sampler,
                                             int64_t n,
                                             absl::Span<const double> probe_x,
                                             int64_t trials, uint64_t seed,
                                             double strong_nu, int threads) {
  if (auto status = ValidateTrialArgs(n, trials); !status.ok()) return status;
  if (strong_nu < 0 || strong_nu > 0.5) {
    return absl::InvalidArgumentError("strong nu must lie in [0, 1/2]");
  }

  std::vector<double> scores(trials, 0.0);
  std::vector<absl::Status> failures(trials, absl::OkStatus());
  ParallelFor(trials, threads, [&](int64_t t) {
    const uint64_t trial_seed = DeriveSeed(seed, 0x9a + t);
    auto dataset = sampler.sample(n, DeriveSeed(trial_seed, 1));
    if (!dataset.ok()) {
      failures[t] = dataset.status();
      return;
    }
    auto model = learner.train(dataset->view(), DeriveSeed(trial_seed, 2));
    if (!model.ok()) {
      failures[t] = model.status();
      return;
    }
    scores[t] = model->PredictSoft(probe_x);
  });
  for (const auto& status : failures) {
    if (!status.ok()) return status;
  }

  QualityEstimate estimate;
  estimate.mean_score = Mean(scores);
  estimate.nu_hat = std::min(estimate.mean_score, 1.0 - estimate.mean_score);
  if (strong_nu > 0) {
    int64_t middling = 0;
    for (const double s : scores) {
      if (s >= strong_nu && s <= 1.0 - strong_nu) ++middling;
    }
    estimate.strong_beta_hat =
        static_cast<double>(middling) / static_cast<double>(trials);
  }
  return estimate;
}

absl::StatusOr<SgdReductionResult> SgdReductionProbe(
    const DistributionSampler& sampler, const SgdConfig& config, int64_t n,
    absl::Span<const double> probe_x, int64_t trials, uint64_t seed,
    int64_t panel_size, int64_t permutations_per_pair, int threads) {
  if (auto status = ValidateTrialArgs(n, trials); !status.ok()) return status;
  if (panel_size < 1 || permutations_per_pair < 1) {
    return absl::InvalidArgumentError(
        "panel size and permutation count must be positive");
  }

  SgdConfig deterministic = config;
  deterministic.mode = SgdConfig::Mode::kOnePassDeterministic;
  SgdConfig permuted = config;
  permuted.mode = SgdConfig::Mode::kPermutationShuffled;

  Learner one_pass{"logistic-sgd",
                   [deterministic](absl::Span<const LabeledExample> data,
                                   uint64_t s) {
                     return TrainLogisticSgd(data, deterministic, s);
                   }};

  auto on_avg = EstimateOnAverageStability(one_pass, sampler, n, probe_x,
                                           trials, seed, threads);
  if (!on_avg.ok()) return on_avg.status();

  // Permutation-uniform stability on a fixed panel of neighbor pairs: for
  // each pair, average the squared gap over shared random permutations,
  // then take the worst pair. A finite max under-reports the sup, which
  // callers absorb with slack.
  std::vector<double> pair_means(panel_size, 0.0);
  std::vector<absl::Status> failures(panel_size, absl::OkStatus());
  ParallelFor(panel_size, threads, [&](int64_t p) {
    const uint64_t pair_seed = DeriveSeed(seed, 0xA11E + p);
    auto dataset = sampler.sample(n, DeriveSeed(pair_seed, 1));
    if (!dataset.ok()) {
      failures[p] = dataset.status();
      return;
    }
    auto replacement = sampler.sample(1, DeriveSeed(pair_seed, 2));
    if (!replacement.ok()) {
      failures[p] = replacement.status();
      return;
    }
    NoiseSource index_rng =
        NoiseSource::SeededUniform(DeriveSeed(pair_seed, 3));
    const int64_t j = std::min<int64_t>(
        static_cast<int64_t>(index_rng.NextUniform() * n), n - 1);
    Dataset perturbed = *dataset;
    perturbed.examples[j] = replacement->examples[0];

    double sum = 0;
    for (int64_t r = 0; r < permutations_per_pair; ++r) {
      const uint64_t sigma = DeriveSeed(pair_seed, 100 + r);
      auto base = TrainLogisticSgd(dataset->view(), permuted, sigma);
      if (!base.ok()) {
        failures[p] = base.status();
        return;
      }
      auto swapped = TrainLogisticSgd(perturbed.view(), permuted, sigma);
      if (!swapped.ok()) {
        failures[p] = swapped.status();
        return;
      }
      const double gap =
          base->PredictSoft(probe_x) - swapped->PredictSoft(probe_x);
      sum += gap * gap;
    }
    pair_means[p] = sum / static_cast<double>(permutations_per_pair);
  });
  for (const auto& status : failures) {
    if (!status.ok()) return status;
  }

  const double worst =
      *std::max_element(pair_means.begin(), pair_means.end());
  return SgdReductionResult{on_avg->alpha_sq_hat, worst};
}

}  // namespace stablepriv
