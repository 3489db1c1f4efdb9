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

#include "stablepriv/mechanisms.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"

namespace stablepriv {

namespace {

absl::Status ValidateCommon(int64_t cutoff, double epsilon, double delta) {
  if (cutoff < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("cutoff must be at least 1, got %d", cutoff));
  }
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("epsilon must be finite and positive, got %g",
                        epsilon));
  }
  if (!(delta > 0) || !(delta < 1)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta must lie in (0,1), got %g", delta));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<SparseVectorConfig> SparseVectorConfig::Create(
    int64_t cutoff, double epsilon, double delta, double threshold) {
  if (auto status = ValidateCommon(cutoff, epsilon, delta); !status.ok()) {
    return status;
  }
  const double lambda =
      std::sqrt(32.0 * static_cast<double>(cutoff) * std::log(1.0 / delta)) /
      epsilon;
  return SparseVectorConfig{cutoff, epsilon, delta, threshold, lambda};
}

absl::StatusOr<SparseVectorConfig> SparseVectorConfig::CreateWithLambda(
    int64_t cutoff, double epsilon, double delta, double threshold,
    double lambda) {
  if (auto status = ValidateCommon(cutoff, epsilon, delta); !status.ok()) {
    return status;
  }
  if (!(lambda > 0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("lambda must be positive, got %g", lambda));
  }
  return SparseVectorConfig{cutoff, epsilon, delta, threshold, lambda};
}

std::vector<ThresholdOutcome> RunSparseVector(absl::Span<const double> queries,
                                              const SparseVectorConfig& config,
                                              NoiseSource& noise) {
  std::vector<ThresholdOutcome> out;
  out.reserve(queries.size());
  double noisy_threshold = config.threshold + noise.Laplace(config.lambda);
  int64_t below_count = 0;
  for (const double query : queries) {
    if (below_count > config.cutoff) {
      out.push_back(ThresholdOutcome::kBudgetExhausted);
      continue;
    }
    const double noisy_query = query + noise.Laplace(2.0 * config.lambda);
    if (noisy_query > noisy_threshold) {
      out.push_back(ThresholdOutcome::kAbove);
    } else {
      out.push_back(ThresholdOutcome::kBelow);
      ++below_count;
      noisy_threshold = config.threshold + noise.Laplace(config.lambda);
    }
  }
  return out;
}

absl::StatusOr<StableRelease> ReleaseIfStable(int candidate, int64_t distance,
                                              double threshold_gamma,
                                              double epsilon,
                                              NoiseSource& noise) {
  if (distance < 0) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "instability distance must be nonnegative, got %d", distance));
  }
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("epsilon must be finite and positive, got %g",
                        epsilon));
  }
  const double noisy_distance =
      static_cast<double>(distance) + noise.Laplace(1.0 / epsilon);
  if (noisy_distance > threshold_gamma) {
    return StableRelease{candidate};
  }
  return StableRelease{std::nullopt};
}

absl::StatusOr<double> StandaloneStabilityThreshold(double epsilon,
                                                    double delta) {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("epsilon must be finite and positive, got %g",
                        epsilon));
  }
  if (!(delta > 0) || !(delta < 1)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta must lie in (0,1), got %g", delta));
  }
  return std::log(1.0 / delta) / epsilon;
}

}  // namespace stablepriv
