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

#ifndef STABLEPRIV_BINARY_H_
#define STABLEPRIV_BINARY_H_

#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/types/span.h"
#include "stablepriv/learners.h"
#include "stablepriv/noise.h"
#include "stablepriv/types.h"

namespace stablepriv {

// Derived plan for answering m binary classification queries:
// cutoff T = ceil(3((gamma + alpha) m + sqrt(m log(m/beta)/2))) and the
// chunk count from ComputeChunkCount. The realizable case is
// best_error = 0.
struct BinaryQueryPlan {
  int64_t num_queries = 0;
  double learner_alpha = 0;  // target accuracy of the learner on n/k samples
  double best_error = 0;     // gamma: best in-class error
  double beta = 0;
  int64_t cutoff = 0;
  int64_t chunk_count = 0;
  // Whether m >= 4 log(1/(alpha beta)) / alpha^2. Advisory: planning below
  // the floor is allowed but the utility statement no longer applies.
  bool meets_query_floor = false;

  static absl::StatusOr<BinaryQueryPlan> Create(int64_t num_queries,
                                                double learner_alpha,
                                                double best_error, double beta,
                                                double epsilon, double delta);
};

// Trains one classifier per chunk, then streams the queries through the
// subsample-and-aggregate session with range {0,1}.
//
// `threads` bounds the parallelism of chunk training (training must be pure
// per chunk); query answering is sequential. Test overrides replace the
// chunk count and/or the session constants.
absl::StatusOr<std::vector<DiscreteAnswer>> AnswerBinaryQueries(
    const Dataset& dataset, const Learner& learner,
    absl::Span<const std::vector<double>> queries, const BinaryQueryPlan& plan,
    const PrivacyParams& params, NoiseSource noise, uint64_t train_seed,
    int threads = 1, const TestOverrides& overrides = {});

struct CountingCheck {
  bool rows_within_budget = false;  // every row makes <= row_budget mistakes
  int64_t bad_columns = 0;  // queries misclassified by more than xi*k rows
  bool bound_holds = false;  // bad_columns < row_budget / xi
};

// Checks the mistake-counting bound for a k x m prediction matrix against
// the truth vector: if every row errs on at most `row_budget` columns, then
// fewer than row_budget/xi columns can be wrong in more than xi*k rows.
absl::StatusOr<CountingCheck> CheckMistakeCountingBound(
    const std::vector<std::vector<int>>& predictions,
    absl::Span<const int> truth, int64_t row_budget, double xi);

}  // namespace stablepriv

#endif  // STABLEPRIV_BINARY_H_
