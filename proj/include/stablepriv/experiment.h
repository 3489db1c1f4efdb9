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

#ifndef STABLEPRIV_EXPERIMENT_H_
#define STABLEPRIV_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <string>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "stablepriv/types.h"

namespace stablepriv {

enum class Pipeline {
  kBinaryQueries,
  kLabelTransfer,
  kSoftLabel,
  kStabilityProbe,
};

// One experiment run, fully determined by this config plus the seed. Runs
// with test-mode overrides are not privacy-calibrated; the report echoes
// them prominently.
struct ExperimentConfig {
  Pipeline pipeline = Pipeline::kBinaryQueries;

  // Data source: a CSV path or a named generator.
  std::string data_path;        // empty -> use generator
  std::string generator;        // "threshold" | "margin" | "margin-pos" | "bernoulli"
  int64_t generator_n = 10000;  // private dataset size when generating
  double theta_star = 0.5;      // threshold generator
  double noise_rate = 0.0;      // threshold generator label noise
  double margin = 1.0;          // margin generator band parameter
  double bernoulli_p = 0.5;     // bernoulli label generator

  // Queries: a CSV path or a count drawn from the generator's marginal.
  std::string queries_path;
  int64_t num_queries = 100;

  std::string learner = "threshold-erm";

  // Privacy and planning inputs.
  double epsilon = 1.0;
  double delta = 1e-6;
  std::optional<int64_t> cutoff;  // T; planned from alpha/beta when unset
  double alpha = 0.05;            // target learner accuracy on n/k samples
  double gamma_opt = 0.0;         // best-in-class error (agnostic plans)
  double beta = 0.05;
  std::optional<double> gamma_disc;  // soft-label bin width; auto when unset
  double nu = 0.05;                  // weak-quality level for soft-label

  // Stability-probe knobs.
  int64_t trials = 1000;
  int64_t probe_n = 100;
  double probe_x = 0.0;

  uint64_t seed = 0;
  int threads = 1;

  // Test mode gates every formula override; zero_noise implies test mode.
  bool test_mode = false;
  bool zero_noise = false;
  TestOverrides overrides;

  // Label-transfer: optional path for exporting the relabeled set.
  std::string export_relabeled_path;
};

struct RunReport {
  std::string json;     // machine-readable report (schema 1)
  std::string summary;  // one-paragraph human summary for stderr
};

// Executes the configured pipeline and renders the JSON report. The report
// is self-contained for reproduction: it echoes the seed and every
// resolved parameter, and never contains private record values, only
// aggregates, answers, and parameters.
absl::StatusOr<RunReport> RunExperiment(const ExperimentConfig& config);

// Process exit code for a failed run: 1 config, 2 data, 3 plan.
int ExitCodeForStatus(const absl::Status& status);

// Error constructors used across the library so that the CLI can map
// failures onto stable exit codes.
absl::Status PlanInfeasibleError(absl::string_view message);
absl::Status InsufficientDataError(absl::string_view message);

}  // namespace stablepriv

#endif  // STABLEPRIV_EXPERIMENT_H_
