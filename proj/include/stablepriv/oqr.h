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

#ifndef STABLEPRIV_OQR_H_
#define STABLEPRIV_OQR_H_

#include <cstdint>
#include <optional>

#include "absl/status/statusor.h"
#include "stablepriv/noise.h"
#include "stablepriv/types.h"

namespace stablepriv {

// Online query release: sparse vector over distance-to-instability.
//
// A session owns one noisy threshold and one unstable counter; answers are
// order-dependent, so a session must be driven from a single thread.
// Released values are always exactly the caller's candidate; the mechanism
// never perturbs them.
class OnlineQuerySession {
 public:
  // Opens a session with lambda = sqrt(32 T log(2/delta)) / epsilon and
  // threshold w = 2 lambda log(2m/delta), then noises the threshold once.
  static absl::StatusOr<OnlineQuerySession> Open(const PrivacyParams& params,
                                                 NoiseSource noise);

  // Test-mode variant; any unset override falls back to the formula value.
  static absl::StatusOr<OnlineQuerySession> OpenWithOverrides(
      const PrivacyParams& params, std::optional<double> lambda_override,
      std::optional<double> threshold_override, NoiseSource noise);

  // Answers one query. `distance` is the caller-computed instability
  // distance (nonnegative). On bottom the unstable counter is incremented
  // and the noisy threshold refreshed; once the counter exceeds the cutoff
  // every later call returns kBudgetExhausted.
  absl::StatusOr<DiscreteAnswer> Answer(int candidate, int64_t distance);

  double lambda() const { return lambda_; }
  double threshold() const { return threshold_; }
  double noisy_threshold() const { return noisy_threshold_; }
  int64_t unstable_count() const { return unstable_count_; }
  const PrivacyParams& params() const { return params_; }

 private:
  OnlineQuerySession(const PrivacyParams& params, double lambda,
                     double threshold, NoiseSource noise);

  PrivacyParams params_;
  double lambda_;
  double threshold_;
  double noisy_threshold_;
  int64_t unstable_count_ = 0;
  NoiseSource noise_;
};

}  // namespace stablepriv

#endif  // STABLEPRIV_OQR_H_
