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

#ifndef STABLEPRIV_MECHANISMS_H_
#define STABLEPRIV_MECHANISMS_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/types/span.h"
#include "stablepriv/noise.h"
#include "stablepriv/types.h"

namespace stablepriv {

// Outcome of one threshold comparison in the sparse-vector loop.
enum class ThresholdOutcome { kAbove, kBelow, kBudgetExhausted };

// Configuration for the sparse-vector run. The production constructor
// derives lambda = sqrt(32 T log(1/delta)) / epsilon; the override
// constructor exists for test-scaled runs only.
struct SparseVectorConfig {
  int64_t cutoff = 0;
  double epsilon = 0;
  double delta = 0;
  double threshold = 0;
  double lambda = 0;

  static absl::StatusOr<SparseVectorConfig> Create(int64_t cutoff,
                                                   double epsilon,
                                                   double delta,
                                                   double threshold);
  static absl::StatusOr<SparseVectorConfig> CreateWithLambda(int64_t cutoff,
                                                             double epsilon,
                                                             double delta,
                                                             double threshold,
                                                             double lambda);
};

// Runs the sparse-vector loop over a stream of sensitivity-1 query values.
//
// Maintains a noisy threshold what = threshold + Lap(lambda). Each query q
// is compared as q + Lap(2 lambda) > what. Every below answer increments
// the unstable counter and refreshes the noisy threshold; once the counter
// exceeds the cutoff, all remaining entries come back kBudgetExhausted.
// At most cutoff + 1 entries are kBelow.
std::vector<ThresholdOutcome> RunSparseVector(absl::Span<const double> queries,
                                              const SparseVectorConfig& config,
                                              NoiseSource& noise);

// Result of a distance-to-instability release test: the candidate value if
// it was released, empty for bottom.
struct StableRelease {
  std::optional<int> value;

  bool released() const { return value.has_value(); }
};

// Releases `candidate` iff distance + Lap(1/epsilon) > threshold_gamma.
//
// `distance` is the caller-computed instability distance of the candidate
// on the private data (clip negatives upstream; they are rejected here).
// For standalone use take threshold_gamma = log(1/delta)/epsilon.
absl::StatusOr<StableRelease> ReleaseIfStable(int candidate, int64_t distance,
                                              double threshold_gamma,
                                              double epsilon,
                                              NoiseSource& noise);

// threshold_gamma for the standalone release test: log(1/delta)/epsilon.
absl::StatusOr<double> StandaloneStabilityThreshold(double epsilon,
                                                    double delta);

}  // namespace stablepriv

#endif  // STABLEPRIV_MECHANISMS_H_
