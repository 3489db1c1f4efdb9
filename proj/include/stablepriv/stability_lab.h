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

#ifndef STABLEPRIV_STABILITY_LAB_H_
#define STABLEPRIV_STABILITY_LAB_H_

#include <cstdint>
#include <functional>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/types/span.h"
#include "stablepriv/learners.h"
#include "stablepriv/types.h"

namespace stablepriv {

// An i.i.d. data source for the lab's Monte-Carlo estimators. `sample`
// must be deterministic given the seed. `label_conditional` (p(y=1|x)) is
// optional and only set when a closed form exists.
struct DistributionSampler {
  std::string name;
  std::function<absl::StatusOr<Dataset>(int64_t n, uint64_t seed)> sample;
  std::function<double(absl::Span<const double>)> label_conditional;  // may be null
};

DistributionSampler BernoulliLabelSampler(double p);
DistributionSampler ThresholdSampler(double theta_star, double noise_rate);
DistributionSampler MarginSampler(double margin,
                                  bool positive_side_only = false);

struct StabilityEstimate {
  double alpha_sq_hat = 0;  // mean squared replace-one prediction gap
  double std_error = 0;     // batch-means standard error (10 batches)
  int64_t n = 0;
  int64_t trials = 0;
  std::vector<double> probe_x;
};

// Monte-Carlo estimate of the on-average replace-one stability at a probe
// point: per trial, draw a dataset, replace a uniformly random entry by a
// fresh draw, train on both with shared coins, and record the squared
// prediction gap at the probe. Uniform index sampling matches the
// average-over-positions definition in expectation.
absl::StatusOr<StabilityEstimate> EstimateOnAverageStability(
    const Learner& learner, const DistributionSampler& sampler, int64_t n,
    absl::Span<const double> probe_x, int64_t trials, uint64_t seed,
    int threads = 1);

// Estimates the mean prediction at the probe with a pilot of
// 10 * trials draws, then returns the fraction of fresh draws whose
// prediction lies within 4 alpha sqrt(2 n') of that mean.
absl::StatusOr<double> ConcentrationCheck(const Learner& learner,
                                          const DistributionSampler& sampler,
                                          int64_t n_prime,
                                          absl::Span<const double> probe_x,
                                          double alpha, int64_t trials,
                                          uint64_t seed, int threads = 1);

struct EfronSteinResult {
  double empirical_variance = 0;
  double empirical_bound = 0;  // (n/2) E[(f(D) - f(D^(j)))^2], j uniform
};

// Monte-Carlo estimate of both sides of the replace-one variance bound
// Var(f(D)) <= (1/2) sum_j E[(f(D) - f(D^(j)))^2] for a real statistic f.
absl::StatusOr<EfronSteinResult> EfronSteinCheck(
    const std::function<double(const Dataset&)>& estimator,
    const DistributionSampler& sampler, int64_t n, int64_t trials,
    uint64_t seed);

struct QualityEstimate {
  double mean_score = 0;       // Monte-Carlo E over (coins, data) of h_D(x)
  double nu_hat = 0;           // min(mean_score, 1 - mean_score)
  double strong_beta_hat = 0;  // fraction of trials with score in [nu, 1-nu]
};

// Probes how close the learner's expected soft prediction at the probe is
// to 0 or 1. When strong_nu > 0, also reports the empirical failure rate
// of the corresponding high-probability version.
absl::StatusOr<QualityEstimate> QualityProbe(const Learner& learner,
                                             const DistributionSampler& sampler,
                                             int64_t n,
                                             absl::Span<const double> probe_x,
                                             int64_t trials, uint64_t seed,
                                             double strong_nu = 0.0,
                                             int threads = 1);

struct SgdReductionResult {
  double on_avg_alpha_sq_deterministic = 0;
  double uniform_alpha_sq_permuted = 0;  // worst over a fixed neighbor panel
};

// Compares the on-average stability of deterministic one-pass SGD with the
// permutation-uniform stability measured on a fixed panel of neighboring
// dataset pairs (a finite-panel max, hence a lower bound on the sup).
absl::StatusOr<SgdReductionResult> SgdReductionProbe(
    const DistributionSampler& sampler, const SgdConfig& config, int64_t n,
    absl::Span<const double> probe_x, int64_t trials, uint64_t seed,
    int64_t panel_size = 20, int64_t permutations_per_pair = 100,
    int threads = 1);

}  // namespace stablepriv

#endif  // STABLEPRIV_STABILITY_LAB_H_
