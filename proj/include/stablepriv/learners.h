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

#ifndef STABLEPRIV_LEARNERS_H_
#define STABLEPRIV_LEARNERS_H_

#include <cstdint>
#include <functional>
#include <string>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "absl/types/span.h"
#include "stablepriv/types.h"

namespace stablepriv {

// A trained classifier with a soft score in [0,1] and the induced hard
// label. For every built-in learner, PredictHard(x) == 1 iff
// PredictSoft(x) >= 0.5.
class Classifier {
 public:
  using SoftFn = std::function<double(absl::Span<const double>)>;

  explicit Classifier(SoftFn soft) : soft_(std::move(soft)) {}

  double PredictSoft(absl::Span<const double> x) const;  // clamped to [0,1]
  int PredictHard(absl::Span<const double> x) const;

 private:
  SoftFn soft_;
};

struct SgdConfig {
  enum class Mode {
    kOnePassDeterministic,  // exactly n steps in data order, seed unused
    kPermutationShuffled,   // per-pass permutation drawn from the seed
  };

  double step_constant = 0.5;  // step size at step t is step_constant / t
  int64_t passes = 1;
  Mode mode = Mode::kOnePassDeterministic;
  double l2_regularization = 0.0;
  double feature_clip_norm = 1.0;  // inputs are rescaled to this L2 ball
};

// A pluggable non-private learner. `train` must be deterministic given
// (data, seed); callers parallelize trials freely on that basis.
struct Learner {
  std::string name;
  std::function<absl::StatusOr<Classifier>(absl::Span<const LabeledExample>,
                                           uint64_t seed)>
      train;
};

// Empirical-risk-minimizing threshold rule h(x) = 1{x >= theta} over
// 1-D features. Ties prefer the smallest candidate theta, with -inf (always
// predict 1) as the smallest candidate. The seed is unused.
absl::StatusOr<Classifier> TrainThresholdErm(
    absl::Span<const LabeledExample> data, uint64_t seed);

// Logistic regression by SGD with step schedule c/t; the soft score is
// sigmoid(w . x) with a bias term. Feature vectors are clipped to the
// configured L2 norm before every use.
absl::StatusOr<Classifier> TrainLogisticSgd(
    absl::Span<const LabeledExample> data, const SgdConfig& config,
    uint64_t seed);

// Constant classifier equal to the mean training label. Its replace-one
// stability has the closed form 2p(1-p)/n^2 under Bernoulli(p) labels,
// which makes it the analytic reference for the stability lab.
absl::StatusOr<Classifier> TrainLabelMean(absl::Span<const LabeledExample> data,
                                          uint64_t seed);

// Learner registry: "threshold-erm" | "logistic-sgd" | "label-mean".
absl::StatusOr<Learner> LearnerByName(absl::string_view name,
                                      const SgdConfig& sgd_config = {});

// x uniform on [0,1]; y = 1{x >= theta_star}, flipped w.p. noise_rate.
absl::StatusOr<Dataset> GenThresholdData(int64_t n, double theta_star,
                                         double noise_rate, uint64_t seed);

// x uniform on [-2c,-c] u [c,2c] (or [c,2c] alone when positive_side_only);
// y = 1{x + z >= 0} with z zero-mean Gaussian of variance c^2/8. The
// excluded band (-c,c) keeps every conditional p(y=1|x) bounded away
// from 1/2.
absl::StatusOr<Dataset> GenMarginData(int64_t n, double margin, uint64_t seed,
                                      bool positive_side_only = false);

// Closed-form p(y=1|x) for the margin generator.
double MarginLabelConditional(double x, double margin);

}  // namespace stablepriv

#endif  // STABLEPRIV_LEARNERS_H_
