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

#ifndef STABLEPRIV_SUBSAMPLE_H_
#define STABLEPRIV_SUBSAMPLE_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/types/span.h"
#include "stablepriv/noise.h"
#include "stablepriv/oqr.h"
#include "stablepriv/types.h"

namespace stablepriv {

// Chunk count k = ceil(136 log(4 m T / min(delta, beta/2))
//                      * sqrt(T log(2/delta)) / epsilon).
absl::StatusOr<int64_t> ComputeChunkCount(int64_t num_queries, int64_t cutoff,
                                          double epsilon, double delta,
                                          double beta);

// k equal-sized, non-overlapping, index-interval chunks. Chunk j covers
// [j * floor(n/k), (j+1) * floor(n/k)); the n mod k tail examples are
// unused so the chunks stay equal-sized.
struct ChunkPlan {
  int64_t num_chunks = 0;
  int64_t chunk_size = 0;

  std::pair<int64_t, int64_t> ChunkRange(int64_t chunk_index) const {
    return {chunk_index * chunk_size, (chunk_index + 1) * chunk_size};
  }
};

absl::StatusOr<ChunkPlan> SplitIntoChunks(int64_t dataset_size, int64_t k);

absl::Span<const LabeledExample> ChunkView(const Dataset& dataset,
                                           const ChunkPlan& plan,
                                           int64_t chunk_index);

// Counts of chunk votes over a finite answer range; counts[r] is the number
// of chunks that voted for range token r.
struct VoteHistogram {
  std::vector<int64_t> counts;

  static absl::StatusOr<VoteHistogram> FromVotes(absl::Span<const int> votes,
                                                 int range_size);
};

struct ModeDist {
  int mode = 0;          // range token with maximal count, ties -> lowest
  int64_t distance = 0;  // max(0, top - second - 1)
};

// Shared top-two-gap computation for vote and score histograms. A
// single-bin histogram uses second = 0, so its distance is count - 1.
absl::StatusOr<ModeDist> ModeAndStabilityDistance(
    absl::Span<const int64_t> counts);

inline absl::StatusOr<ModeDist> ModeAndStabilityDistance(
    const VoteHistogram& histogram) {
  return ModeAndStabilityDistance(absl::MakeConstSpan(histogram.counts));
}

// Supplies chunk `chunk_index`'s vote on query `query_index`. Must be a
// pure function of the chunk contents; the sensitivity-1 argument for the
// distance relies on one record edit touching exactly one vote.
using ChunkVoteFn = std::function<absl::StatusOr<int>(
    int64_t query_index, absl::Span<const LabeledExample> chunk,
    int64_t chunk_index)>;

// Subsample-and-aggregate session: chunk the dataset, vote per query,
// compute the plurality mode and its stability distance, and feed the
// online query release session.
class SubsampleSession {
 public:
  static absl::StatusOr<SubsampleSession> Create(
      const Dataset* dataset, int64_t k, const PrivacyParams& params,
      NoiseSource noise, std::optional<double> lambda_override = std::nullopt,
      std::optional<double> threshold_override = std::nullopt);

  // Answers one query with `range_size` possible tokens.
  absl::StatusOr<DiscreteAnswer> AnswerQuery(int range_size,
                                             const ChunkVoteFn& vote_fn,
                                             int64_t query_index = 0);

  const ChunkPlan& plan() const { return plan_; }
  OnlineQuerySession& oqr() { return oqr_; }

 private:
  SubsampleSession(const Dataset* dataset, ChunkPlan plan,
                   OnlineQuerySession oqr);

  const Dataset* dataset_;  // not owned
  ChunkPlan plan_;
  OnlineQuerySession oqr_;
};

// Streams `num_queries` queries through a fresh subsample session.
// `range_sizes` has one entry per query. Chunk-vote failures surface as
// per-query errors without consuming budget.
std::vector<absl::StatusOr<DiscreteAnswer>> AnswerWithSubsampleVotes(
    const Dataset& dataset, int64_t k, absl::Span<const int> range_sizes,
    const ChunkVoteFn& vote_fn, const PrivacyParams& params, NoiseSource noise,
    std::optional<double> lambda_override = std::nullopt,
    std::optional<double> threshold_override = std::nullopt);

}  // namespace stablepriv

#endif  // STABLEPRIV_SUBSAMPLE_H_
