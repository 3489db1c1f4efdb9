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

#include "stablepriv/binary.h"

#include <cmath>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "stablepriv/parallel.h"
#include "stablepriv/subsample.h"

namespace stablepriv {

absl::StatusOr<BinaryQueryPlan> BinaryQueryPlan::Create(
    int64_t num_queries, double learner_alpha, double best_error, double beta,
    double epsilon, double delta) {
  if (num_queries < 1) {
    return absl::InvalidArgumentError("num_queries must be positive");
  }
  if (learner_alpha < 0 || best_error < 0 || learner_alpha + best_error >= 1) {
    return absl::InvalidArgumentError(
        "alpha and gamma must be nonnegative with alpha + gamma < 1");
  }
  if (!(beta > 0) || !(beta < 1)) {
    return absl::InvalidArgumentError("beta must lie in (0,1)");
  }

  const double m = static_cast<double>(num_queries);
  const double t_raw =
      3.0 * ((best_error + learner_alpha) * m +
             std::sqrt(m * std::log(m / beta) / 2.0));
  const auto cutoff = static_cast<int64_t>(std::ceil(t_raw));
  if (cutoff < 1) {
    return absl::InvalidArgumentError(
        "degenerate plan: cutoff must be at least 1");
  }
  if (cutoff >= num_queries) {
    return absl::OutOfRangeError(absl::StrFormat(
        "plan infeasible: cutoff %d >= num_queries %d leaves no utility "
        "guarantee",
        cutoff, num_queries));
  }

  auto chunk_count =
      ComputeChunkCount(num_queries, cutoff, epsilon, delta, beta);
  if (!chunk_count.ok()) return chunk_count.status();

  bool meets_floor = false;
  if (learner_alpha > 0) {
    const double floor =
        4.0 * std::log(1.0 / (learner_alpha * beta)) /
        (learner_alpha * learner_alpha);
    meets_floor = m >= floor;
  }
  return BinaryQueryPlan{num_queries, learner_alpha, best_error,
                         beta,        cutoff,        *chunk_count,
                         meets_floor};
}

absl::StatusOr<std::vector<DiscreteAnswer>> AnswerBinaryQueries(
    const Dataset& dataset, const Learner& learner,
    absl::Span<const std::vector<double>> queries, const BinaryQueryPlan& plan,
    const PrivacyParams& params, NoiseSource noise, uint64_t train_seed,
    int threads, const TestOverrides& overrides) {
  if (params.cutoff != plan.cutoff ||
      params.num_queries < static_cast<int64_t>(queries.size())) {
    return absl::InvalidArgumentError(
        "privacy params disagree with the plan (cutoff or query budget)");
  }
  const int64_t k = overrides.chunk_count.value_or(plan.chunk_count);

  auto chunk_plan = SplitIntoChunks(dataset.size(), k);
  if (!chunk_plan.ok()) return chunk_plan.status();

  // Train the k chunk classifiers once, in parallel. Training is pure per
  // chunk, so scheduling cannot change the result.
  std::vector<absl::StatusOr<Classifier>> classifiers(
      k, absl::FailedPreconditionError("not trained"));
  ParallelFor(k, threads, [&](int64_t j) {
    classifiers[j] = learner.train(ChunkView(dataset, *chunk_plan, j),
                                   DeriveSeed(train_seed, j));
  });
  for (const auto& c : classifiers) {
    if (!c.ok()) return c.status();
  }

  auto session =
      SubsampleSession::Create(&dataset, k, params, std::move(noise),
                               overrides.lambda, overrides.threshold);
  if (!session.ok()) return session.status();

  std::vector<DiscreteAnswer> answers;
  answers.reserve(queries.size());
  for (int64_t i = 0; i < static_cast<int64_t>(queries.size()); ++i) {
    const auto& x = queries[i];
    auto answer = session->AnswerQuery(
        /*range_size=*/2,
        [&](int64_t, absl::Span<const LabeledExample>, int64_t chunk_index)
            -> absl::StatusOr<int> {
          return classifiers[chunk_index]->PredictHard(x);
        },
        i);
    if (!answer.ok()) return answer.status();
    answers.push_back(*answer);
  }
  return answers;
}

absl::StatusOr<CountingCheck> CheckMistakeCountingBound(
    const std::vector<std::vector<int>>& predictions,
    absl::Span<const int> truth, int64_t row_budget, double xi) {
  if (predictions.empty()) {
    return absl::InvalidArgumentError("prediction matrix is empty");
  }
  if (!(xi > 0) || xi > 0.5) {
    return absl::InvalidArgumentError("xi must lie in (0, 1/2]");
  }
  if (row_budget < 1) {
    return absl::InvalidArgumentError("row budget must be positive");
  }
  const int64_t k = static_cast<int64_t>(predictions.size());
  const int64_t m = static_cast<int64_t>(truth.size());
  for (const auto& row : predictions) {
    if (static_cast<int64_t>(row.size()) != m) {
      return absl::InvalidArgumentError(
          "prediction matrix width disagrees with the truth vector");
    }
  }

  CountingCheck result;
  result.rows_within_budget = true;
  for (const auto& row : predictions) {
    int64_t mistakes = 0;
    for (int64_t i = 0; i < m; ++i) mistakes += row[i] != truth[i];
    if (mistakes > row_budget) result.rows_within_budget = false;
  }
  for (int64_t i = 0; i < m; ++i) {
    int64_t wrong = 0;
    for (int64_t j = 0; j < k; ++j) wrong += predictions[j][i] != truth[i];
    if (static_cast<double>(wrong) > xi * static_cast<double>(k)) {
      ++result.bad_columns;
    }
  }
  result.bound_holds = static_cast<double>(result.bad_columns) <
                       static_cast<double>(row_budget) / xi;
  return result;
}

}  // namespace stablepriv
