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

#ifndef STABLEPRIV_TYPES_H_
#define STABLEPRIV_TYPES_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/types/span.h"

namespace stablepriv {

inline constexpr char kLibraryVersion[] = "0.1.0";

// The (epsilon, delta) budget plus the unstable-query cutoff T and the
// number of online queries m. Every mechanism derives its noise scale and
// threshold from these four numbers.
struct PrivacyParams {
  double epsilon = 0;
  double delta = 0;
  int64_t cutoff = 0;       // T: unstable queries paid for before halting
  int64_t num_queries = 0;  // m

  // Validates epsilon > 0, 0 < delta < 1, 1 <= cutoff <= num_queries.
  static absl::StatusOr<PrivacyParams> Create(double epsilon, double delta,
                                              int64_t cutoff,
                                              int64_t num_queries);
};

struct LabeledExample {
  std::vector<double> features;
  int label = 0;  // hard label in {0,1}
};

// Ordered list of examples. Order matters: chunking is index-based, so a
// single record edit touches exactly one chunk.
struct Dataset {
  std::vector<LabeledExample> examples;

  int64_t size() const { return static_cast<int64_t>(examples.size()); }
  bool empty() const { return examples.empty(); }
  absl::Span<const LabeledExample> view() const { return examples; }
};

// Answer to one online query: a token from the query's finite range,
// bottom (the mechanism declined an unstable query), or the marker for
// queries arriving after the cutoff was spent.
struct DiscreteAnswer {
  enum class Kind { kValue, kBottom, kBudgetExhausted };

  Kind kind = Kind::kBottom;
  int value = 0;  // meaningful iff kind == kValue

  static DiscreteAnswer Value(int v) { return {Kind::kValue, v}; }
  static DiscreteAnswer Bottom() { return {Kind::kBottom, 0}; }
  static DiscreteAnswer Exhausted() { return {Kind::kBudgetExhausted, 0}; }

  bool is_value() const { return kind == Kind::kValue; }
  bool is_bottom() const { return kind == Kind::kBottom; }
  bool is_exhausted() const { return kind == Kind::kBudgetExhausted; }

  friend bool operator==(const DiscreteAnswer& a, const DiscreteAnswer& b) {
    return a.kind == b.kind && (a.kind != Kind::kValue || a.value == b.value);
  }
};

// Overridable constants for test-mode runs. Production runs leave these
// unset and use the paper formulas; runs with overrides are not
// privacy-calibrated and reports must say so.
struct TestOverrides {
  std::optional<int64_t> chunk_count;
  std::optional<double> lambda;
  std::optional<double> threshold;
};

}  // namespace stablepriv

#endif  // STABLEPRIV_TYPES_H_
