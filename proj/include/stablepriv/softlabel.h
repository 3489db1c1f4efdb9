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

#ifndef STABLEPRIV_SOFTLABEL_H_
#define STABLEPRIV_SOFTLABEL_H_

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/types/span.h"
#include "stablepriv/learners.h"
#include "stablepriv/noise.h"
#include "stablepriv/subsample.h"
#include "stablepriv/types.h"

namespace stablepriv {

// Rounds a requested width down to the nearest value whose reciprocal is an
// integer: 1 / ceil(1/requested). Requires requested in (0, 1/2].
absl::StatusOr<double> SnapGamma(double requested);

// Equal-width discretization of [0,1] into bins of width gamma, either
// plain (1/gamma bins covering [0,1], last bin closed at 1) or half-shifted
// (1/gamma - 1 bins covering [gamma/2, 1 - gamma/2) with the two boundary
// half-intervals removed).
class GammaPartition {
 public:
  static absl::StatusOr<GammaPartition> Create(double gamma, bool shifted);

  double gamma() const { return gamma_; }
  bool shifted() const { return shifted_; }
  int num_bins() const { return num_bins_; }

  // 0-based bin for a score in [0,1]; nullopt when a shifted partition
  // does not cover the score.
  std::optional<int> BinIndex(double score) const;

  // Center of a 0-based bin: (2j+1) gamma/2 for plain, (j+1) gamma for
  // shifted.
  double Midpoint(int bin) const;

  // [lo, hi) of a 0-based bin (the last plain bin is closed at 1).
  std::pair<double, double> BinRange(int bin) const;

 private:
  GammaPartition(double gamma, bool shifted, int num_bins);

  double gamma_;
  bool shifted_;
  int num_bins_;
};

// Score histogram over a gamma-partition. For shifted partitions the
// scores falling in the removed boundary half-intervals land in
// `uncounted` and take no part in the stability distance.
struct GammaHistogram {
  GammaPartition partition;
  std::vector<int64_t> counts;
  int64_t uncounted = 0;
};

// Bins a multiset of scores; every score must lie in [0,1].
absl::StatusOr<GammaHistogram> BuildHistogram(absl::Span<const double> scores,
                                              const GammaPartition& partition);

// Top-two-gap stability distance: max(0, top - second - 1), with second
// defined as 0 for a single-bin partition.
absl::StatusOr<ModeDist> HistogramModeAndDistance(const GammaHistogram& hist);

// One soft-label answer. Stage 0 scores are plain-bin midpoints, stage 1
// scores are shifted-bin midpoints.
struct SoftAnswer {
  enum class Kind { kScore, kBottom, kBudgetExhausted };

  Kind kind = Kind::kBottom;
  double score = 0;  // meaningful iff kind == kScore
  int stage = 0;     // 0 = plain partition, 1 = shifted partition

  bool is_score() const { return kind == Kind::kScore; }
};

struct SlcTraceEntry {
  int64_t query_index = 0;
  int stage = 0;
  int cost = 0;  // 0 first-stage score, 1 second-stage score, 2 bottom
  int64_t counter_after = 0;
};

// A_SLC constants: lambda = sqrt(64 T log(2/delta)) / epsilon and
// w = lambda log(4m/delta).
absl::StatusOr<double> SlcNoiseScale(int64_t cutoff, double epsilon,
                                     double delta);
absl::StatusOr<double> SlcThreshold(double lambda, int64_t num_queries,
                                    double delta);

// Chunk count for the soft-label pipeline:
// ceil(136 log(8 m T / min(beta, delta)) sqrt(2 T log(2/delta)) / epsilon).
absl::StatusOr<int64_t> SlcChunkCount(int64_t num_queries, int64_t cutoff,
                                      double epsilon, double delta,
                                      double beta);

// Two-stage shifted-histogram soft-label classifier over an ensemble of k
// chunk-trained soft classifiers.
//
// The noisy threshold is one logical variable shared between the per-query
// classifier (which refreshes it when the plain-histogram test fails) and
// the query loop (which refreshes it again after a bottom); it lives here.
// The cost counter charges 0 for a first-stage score, 1 for a second-stage
// score and 2 for a bottom.
class SoftLabelSession {
 public:
  struct Aux {
    double gamma = 0;
    double lambda = 0;
    double threshold = 0;
  };

  // Trains k soft classifiers on equal-sized chunks and opens a session
  // with a freshly noised threshold.
  static absl::StatusOr<SoftLabelSession> Train(const Dataset& dataset,
                                                const Learner& learner,
                                                int64_t k, const Aux& aux,
                                                NoiseSource noise,
                                                uint64_t train_seed,
                                                int threads = 1);

  // Answers one query with the two-stage histogram test. Does not touch
  // the cost counter; the stage-1 failure path refreshes the shared noisy
  // threshold before the shifted test runs.
  absl::StatusOr<SoftAnswer> AnswerOne(absl::Span<const double> x);

  struct RunResult {
    std::vector<SoftAnswer> answers;
    std::vector<SlcTraceEntry> trace;
    int64_t final_cost = 0;
  };

  // Answers a query stream under cutoff accounting: queries arriving after
  // the counter exceeds the cutoff get kBudgetExhausted.
  absl::StatusOr<RunResult> AnswerAll(
      absl::Span<const std::vector<double>> queries, int64_t cutoff);

  const Aux& aux() const { return aux_; }
  double noisy_threshold() const { return noisy_threshold_; }
  int64_t cost() const { return cost_; }
  const std::vector<Classifier>& chunk_classifiers() const {
    return classifiers_;
  }
  int64_t chunk_size() const { return chunk_size_; }

 private:
  SoftLabelSession(Aux aux, std::vector<Classifier> classifiers,
                   int64_t chunk_size, NoiseSource noise);

  Aux aux_;
  GammaPartition plain_;
  GammaPartition shifted_;
  std::vector<Classifier> classifiers_;
  int64_t chunk_size_;
  double noisy_threshold_;
  int64_t cost_ = 0;
  NoiseSource noise_;
};

}  // namespace stablepriv

#endif  // STABLEPRIV_SOFTLABEL_H_
