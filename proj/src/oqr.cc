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

#include "stablepriv/oqr.h"

#include <cmath>
#include <utility>

#include "absl/status/status.h"
#include "stablepriv/mechanisms.h"

namespace stablepriv {

OnlineQuerySession::OnlineQuerySession(const PrivacyParams& params,
                                       double lambda, double threshold,
                                       NoiseSource noise)
    : params_(params),
      lambda_(lambda),
      threshold_(threshold),
      noisy_threshold_(0),
      noise_(std::move(noise)) {
  noisy_threshold_ = threshold_ + noise_.Laplace(lambda_);
}

absl::StatusOr<OnlineQuerySession> OnlineQuerySession::Open(
    const PrivacyParams& params, NoiseSource noise) {
  return OpenWithOverrides(params, std::nullopt, std::nullopt,
                           std::move(noise));
}

absl::StatusOr<OnlineQuerySession> OnlineQuerySession::OpenWithOverrides(
    const PrivacyParams& params, std::optional<double> lambda_override,
    std::optional<double> threshold_override, NoiseSource noise) {
  // Revalidate: sessions are also opened from configs assembled by hand.
  auto validated = PrivacyParams::Create(params.epsilon, params.delta,
                                         params.cutoff, params.num_queries);
  if (!validated.ok()) return validated.status();

  const double lambda =
      lambda_override.value_or(std::sqrt(32.0 *
                                         static_cast<double>(params.cutoff) *
                                         std::log(2.0 / params.delta)) /
                               params.epsilon);
  if (!(lambda > 0)) {
    return absl::InvalidArgumentError("lambda override must be positive");
  }
  const double threshold = threshold_override.value_or(
      2.0 * lambda *
      std::log(2.0 * static_cast<double>(params.num_queries) / params.delta));
  return OnlineQuerySession(*validated, lambda, threshold, std::move(noise));
}

absl::StatusOr<DiscreteAnswer> OnlineQuerySession::Answer(int candidate,
                                                          int64_t distance) {
  if (unstable_count_ > params_.cutoff) {
    return DiscreteAnswer::Exhausted();
  }
  // The inner release test runs at noise scale 2*lambda, i.e. epsilon of
  // 1/(2*lambda), against the current noisy threshold.
  auto release = ReleaseIfStable(candidate, distance, noisy_threshold_,
                                 1.0 / (2.0 * lambda_), noise_);
  if (!release.ok()) return release.status();
  if (release->released()) {
    return DiscreteAnswer::Value(*release->value);
  }
  ++unstable_count_;
  noisy_threshold_ = threshold_ + noise_.Laplace(lambda_);
  return DiscreteAnswer::Bottom();
}

}  // namespace stablepriv
