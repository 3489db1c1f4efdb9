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

#include "stablepriv/types.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"

namespace stablepriv {

absl::StatusOr<PrivacyParams> PrivacyParams::Create(double epsilon,
                                                    double delta,
                                                    int64_t cutoff,
                                                    int64_t num_queries) {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("epsilon must be finite and positive, got %g",
                        epsilon));
  }
  if (!(delta > 0) || !(delta < 1)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta must lie in (0,1), got %g", delta));
  }
  if (cutoff < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("cutoff must be at least 1, got %d", cutoff));
  }
  if (num_queries < cutoff) {
    return absl::InvalidArgumentError(
        absl::StrFormat("num_queries (%d) must be at least cutoff (%d)",
                        num_queries, cutoff));
  }
  return PrivacyParams{epsilon, delta, cutoff, num_queries};
}

}  // namespace stablepriv
