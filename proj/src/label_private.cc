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

#include "stablepriv/label_private.h"

#include <utility>

#include "absl/status/status.h"

namespace stablepriv {

absl::StatusOr<LabelTransferReport> RelabelAndTrain(
    absl::Span<const DiscreteAnswer> answers,
    absl::Span<const std::vector<double>> unlabeled, const Learner& learner,
    uint64_t relabel_seed) {
  if (answers.size() != unlabeled.size()) {
    return absl::InvalidArgumentError(
        "answer stream and unlabeled set disagree in length");
  }
  NoiseSource coin = NoiseSource::SeededUniform(relabel_seed);
  Dataset relabeled;
  relabeled.examples.reserve(answers.size());
  int64_t randomized = 0;
  for (size_t i = 0; i < answers.size(); ++i) {
    int label;
    if (answers[i].is_value()) {
      label = answers[i].value;
    } else {
      // Bottom and budget-exhausted answers become fair coins; degraded
      // but defined behavior keeps the pipeline total.
      label = coin.Coin();
      ++randomized;
    }
    relabeled.examples.push_back({unlabeled[i], label});
  }

  auto classifier =
      learner.train(relabeled.view(), DeriveSeed(relabel_seed, 0x7261696e));
  if (!classifier.ok()) return classifier.status();
  return LabelTransferReport{std::move(relabeled), randomized,
                             *std::move(classifier), std::nullopt};
}

absl::StatusOr<LabelTransferReport> TransferLabelsAndTrain(
    const Dataset& private_data, const Learner& learner,
    absl::Span<const std::vector<double>> unlabeled,
    const BinaryQueryPlan& plan, const PrivacyParams& params,
    NoiseSource noise, uint64_t train_seed, uint64_t relabel_seed,
    int threads, const TestOverrides& overrides,
    const std::optional<HoldoutSpec>& holdout) {
  auto answers =
      AnswerBinaryQueries(private_data, learner, unlabeled, plan, params,
                          std::move(noise), train_seed, threads, overrides);
  if (!answers.ok()) return answers.status();

  // Everything below is post-processing of the private answer stream: the
  // private dataset is out of scope from here on.
  auto report = RelabelAndTrain(*answers, unlabeled, learner, relabel_seed);
  if (!report.ok()) return report.status();

  if (holdout.has_value()) {
    auto sample = holdout->sample(holdout->size, holdout->seed);
    if (!sample.ok()) return sample.status();
    int64_t wrong = 0;
    for (const auto& example : sample->examples) {
      wrong += report->final_classifier.PredictHard(example.features) !=
               example.label;
    }
    report->holdout_error =
        sample->empty() ? 0.0
                        : static_cast<double>(wrong) /
                              static_cast<double>(sample->size());
  }
  return report;
}

}  // namespace stablepriv
