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

#include "stablepriv/subsample.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"

namespace stablepriv {

absl::StatusOr<int64_t> ComputeChunkCount(int64_t num_queries, int64_t cutoff,
                                          double epsilon, double delta,
                                          double beta) {
  if (num_queries < 1 || cutoff < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("num_queries and cutoff must be positive, got m=%d "
                        "T=%d",
                        num_queries, cutoff));
  }
  if (!(epsilon > 0) || !(delta > 0) || !(delta < 1) || !(beta > 0) ||
      !(beta < 1)) {
    return absl::InvalidArgumentError(
        "epsilon must be positive and delta, beta must lie in (0,1)");
  }
  const double m = static_cast<double>(num_queries);
  const double t = static_cast<double>(cutoff);
  const double raw = 136.0 * std::log(4.0 * m * t / std::min(delta, beta / 2)) *
                     std::sqrt(t * std::log(2.0 / delta)) / epsilon;
  return static_cast<int64_t>(std::ceil(raw));
}

absl::StatusOr<ChunkPlan> SplitIntoChunks(int64_t dataset_size, int64_t k) {
  if (k < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("chunk count must be positive, got %d", k));
  }
  if (dataset_size < k) {
    return absl::FailedPreconditionError(
        absl::StrFormat("dataset of %d examples cannot fill %d chunks",
                        dataset_size, k));
  }
  return ChunkPlan{k, dataset_size / k};
}

absl::Span<const LabeledExample> ChunkView(const Dataset& dataset,
                                           const ChunkPlan& plan,
                                           int64_t chunk_index) {
  const auto [begin, end] = plan.ChunkRange(chunk_index);
  return absl::MakeConstSpan(dataset.examples)
      .subspan(begin, end - begin);
}

absl::StatusOr<VoteHistogram> VoteHistogram::FromVotes(
    absl::Span<const int> votes, int range_size) {
  if (range_size < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("range size must be positive, got %d", range_size));
  }
  VoteHistogram hist;
  hist.counts.assign(range_size, 0);
  for (const int vote : votes) {
    if (vote < 0 || vote >= range_size) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "vote %d outside range of size %d", vote, range_size));
    }
    ++hist.counts[vote];
  }
  return hist;
}

absl::StatusOr<ModeDist> ModeAndStabilityDistance(
    absl::Span<const int64_t> counts) {
  if (counts.empty()) {
    return absl::InvalidArgumentError("histogram has no bins");
  }
  int mode = 0;
  int64_t top = counts[0];
  for (int i = 1; i < static_cast<int>(counts.size()); ++i) {
    if (counts[i] > top) {  // strict: ties keep the lowest index
      top = counts[i];
      mode = i;
    }
  }
  int64_t second = 0;  // single-bin histograms use second = 0
  bool seen_other = false;
  for (int i = 0; i < static_cast<int>(counts.size()); ++i) {
    if (i == mode) continue;
    if (!seen_other || counts[i] > second) {
      second = counts[i];
      seen_other = true;
    }
  }
  return ModeDist{mode, std::max<int64_t>(0, top - second - 1)};
}

SubsampleSession::SubsampleSession(const Dataset* dataset, ChunkPlan plan,
                                   OnlineQuerySession oqr)
    : dataset_(dataset), plan_(plan), oqr_(std::move(oqr)) {}

absl::StatusOr<SubsampleSession> SubsampleSession::Create(
    const Dataset* dataset, int64_t k, const PrivacyParams& params,
    NoiseSource noise, std::optional<double> lambda_override,
    std::optional<double> threshold_override) {
  auto plan = SplitIntoChunks(dataset->size(), k);
  if (!plan.ok()) return plan.status();
  auto oqr = OnlineQuerySession::OpenWithOverrides(
      params, lambda_override, threshold_override, std::move(noise));
  if (!oqr.ok()) return oqr.status();
  return SubsampleSession(dataset, *plan, *std::move(oqr));
}

absl::StatusOr<DiscreteAnswer> SubsampleSession::AnswerQuery(
    int range_size, const ChunkVoteFn& vote_fn, int64_t query_index) {
  // All votes are collected before the release session is touched, so a
  // failed vote consumes no budget.
  std::vector<int> votes;
  votes.reserve(plan_.num_chunks);
  for (int64_t j = 0; j < plan_.num_chunks; ++j) {
    auto vote = vote_fn(query_index, ChunkView(*dataset_, plan_, j), j);
    if (!vote.ok()) return vote.status();
    votes.push_back(*vote);
  }
  auto hist = VoteHistogram::FromVotes(votes, range_size);
  if (!hist.ok()) return hist.status();
  auto mode_dist = ModeAndStabilityDistance(*hist);
  if (!mode_dist.ok()) return mode_dist.status();
  return oqr_.Answer(mode_dist->mode, mode_dist->distance);
}

std::vector<absl::StatusOr<DiscreteAnswer>> AnswerWithSubsampleVotes(
    const Dataset& dataset, int64_t k, absl::Span<const int> range_sizes,
    const ChunkVoteFn& vote_fn, const PrivacyParams& params, NoiseSource noise,
    std::optional<double> lambda_override,
    std::optional<double> threshold_override) {
  std::vector<absl::StatusOr<DiscreteAnswer>> out;
  out.reserve(range_sizes.size());
  auto session = SubsampleSession::Create(&dataset, k, params,
                                          std::move(noise), lambda_override,
                                          threshold_override);
  if (!session.ok()) {
    out.assign(range_sizes.size(), session.status());
    return out;
  }
  for (int64_t i = 0; i < static_cast<int64_t>(range_sizes.size()); ++i) {
    out.push_back(session->AnswerQuery(range_sizes[i], vote_fn, i));
  }
  return out;
}

}  // namespace stablepriv
