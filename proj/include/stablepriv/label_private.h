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

#ifndef STABLEPRIV_LABEL_PRIVATE_H_
#define STABLEPRIV_LABEL_PRIVATE_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/types/span.h"
#include "stablepriv/binary.h"
#include "stablepriv/learners.h"
#include "stablepriv/noise.h"
#include "stablepriv/types.h"

namespace stablepriv {

// Fresh i.i.d. sample supplier for holdout evaluation.
struct HoldoutSpec {
  std::function<absl::StatusOr<Dataset>(int64_t n, uint64_t seed)> sample;
  int64_t size = 10000;
  uint64_t seed = 0;
};

struct LabelTransferReport {
  // The m public feature vectors paired with their privately generated
  // labels. Bottom and budget-exhausted answers were replaced by fair
  // coins drawn from the relabel seed.
  Dataset relabeled;
  int64_t bottom_count = 0;  // answers that had to be randomized
  Classifier final_classifier;
  std::optional<double> holdout_error;
};

// Relabel-and-train stage on its own. This function sees only the output
// label stream of the private mechanism, never the private dataset, which
// is what makes the whole pipeline a post-processing of the private
// answers.
absl::StatusOr<LabelTransferReport> RelabelAndTrain(
    absl::Span<const DiscreteAnswer> answers,
    absl::Span<const std::vector<double>> unlabeled, const Learner& learner,
    uint64_t relabel_seed);

// Full pipeline: privately label the m public points via the binary-query
// mechanism, replace bottoms with fair coins, train a fresh non-private
// learner on the relabeled set, and (optionally) estimate its error on a
// fresh holdout sample.
absl::StatusOr<LabelTransferReport> TransferLabelsAndTrain(
    const Dataset& private_data, const Learner& learner,
    absl::Span<const std::vector<double>> unlabeled,
    const BinaryQueryPlan& plan, const PrivacyParams& params,
    NoiseSource noise, uint64_t train_seed, uint64_t relabel_seed,
    int threads = 1, const TestOverrides& overrides = {},
    const std::optional<HoldoutSpec>& holdout = std::nullopt);

}  // namespace stablepriv

#endif  // STABLEPRIV_LABEL_PRIVATE_H_
