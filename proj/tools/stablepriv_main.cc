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

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "stablepriv/experiment.h"

namespace {

using stablepriv::ExperimentConfig;
using stablepriv::Pipeline;

// Flags whose mere presence matters; resolved into the config after parse.
struct OptionalFlags {
  int64_t cutoff = 0;
  double gamma_disc = 0;
  int64_t override_k = 0;
  double override_lambda = 0;
  double override_w = 0;
  uint64_t seed = 0;
};

void AddCommonFlags(CLI::App* cmd, ExperimentConfig* config,
                    OptionalFlags* opt, std::string* out_path) {
  cmd->add_option("--data", config->data_path,
                  "CSV with features and a trailing {0,1} label column");
  cmd->add_option("--generator", config->generator,
                  "synthetic source: threshold | margin | margin-pos | "
                  "bernoulli");
  cmd->add_option("--n", config->generator_n,
                  "private dataset size when generating");
  cmd->add_option("--theta-star", config->theta_star,
                  "threshold generator concept");
  cmd->add_option("--noise-rate", config->noise_rate,
                  "threshold generator label-flip rate");
  cmd->add_option("--margin", config->margin, "margin generator band c");
  cmd->add_option("--bernoulli-p", config->bernoulli_p,
                  "bernoulli generator label probability");
  cmd->add_option("--queries", config->queries_path,
                  "CSV of query feature rows (no label column)");
  cmd->add_option("--num-queries", config->num_queries,
                  "queries to draw from the generator marginal");
  cmd->add_option("--learner", config->learner,
                  "threshold-erm | logistic-sgd | label-mean");
  cmd->add_option("--epsilon", config->epsilon, "privacy loss");
  cmd->add_option("--delta", config->delta, "privacy failure probability");
  cmd->add_option("--cutoff", opt->cutoff,
                  "unstable query cutoff T (planned from --alpha/--beta when "
                  "omitted)");
  cmd->add_option("--alpha", config->alpha,
                  "target learner accuracy on n/k samples");
  cmd->add_option("--gamma-opt", config->gamma_opt,
                  "best-in-class error (agnostic planning)");
  cmd->add_option("--beta", config->beta, "failure probability");
  cmd->add_option("--gamma-disc", opt->gamma_disc, "soft-label bin width");
  cmd->add_option("--nu", config->nu, "weak-quality level");
  cmd->add_option("--trials", config->trials, "stability-probe trials");
  cmd->add_option("--probe-n", config->probe_n,
                  "stability-probe sample size");
  cmd->add_option("--probe-x", config->probe_x, "stability-probe point");
  cmd->add_option("--seed", opt->seed,
                  "run seed (STABLEPRIV_SEED as fallback)");
  cmd->add_option("--out", *out_path, "write the JSON report here");
  cmd->add_option("--threads", config->threads, "worker bound");
  cmd->add_flag("--test-mode", config->test_mode,
                "enable formula overrides (NOT privacy-calibrated)");
  cmd->add_flag("--zero-noise", config->zero_noise,
                "test mode: replace all noise with zero");
  cmd->add_option("--override-k", opt->override_k, "test mode: chunk count");
  cmd->add_option("--override-lambda", opt->override_lambda,
                  "test mode: noise scale");
  cmd->add_option("--override-w", opt->override_w, "test mode: threshold");
  cmd->add_option("--export-relabeled", config->export_relabeled_path,
                  "label-transfer: write the relabeled set as CSV");
}

// Copies presence-sensitive flags from the parsed subcommand.
void ResolveOptionalFlags(const CLI::App& cmd, const OptionalFlags& opt,
                          ExperimentConfig* config, bool* seed_given) {
  if (cmd.count("--cutoff") > 0) config->cutoff = opt.cutoff;
  if (cmd.count("--gamma-disc") > 0) config->gamma_disc = opt.gamma_disc;
  if (cmd.count("--override-k") > 0) {
    config->overrides.chunk_count = opt.override_k;
  }
  if (cmd.count("--override-lambda") > 0) {
    config->overrides.lambda = opt.override_lambda;
  }
  if (cmd.count("--override-w") > 0) {
    config->overrides.threshold = opt.override_w;
  }
  if (cmd.count("--seed") > 0) {
    config->seed = opt.seed;
    *seed_given = true;
  }
}

int RunAndReport(const ExperimentConfig& config, const std::string& out_path) {
  auto report = stablepriv::RunExperiment(config);
  if (!report.ok()) {
    std::cerr << "error: " << report.status().message() << "\n";
    return stablepriv::ExitCodeForStatus(report.status());
  }
  std::cerr << report->summary << "\n";
  if (out_path.empty()) {
    std::cout << report->json;
  } else {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "error: cannot write \"" << out_path << "\"\n";
      return 2;
    }
    out << report->json;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "stablepriv: differentially private prediction via subsample "
      "aggregation and stability"};
  app.require_subcommand(1);

  ExperimentConfig config;
  config.threads =
      static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  OptionalFlags opt;
  std::string out_path;

  auto* binary = app.add_subcommand(
      "binary-queries", "answer binary classification queries privately");
  auto* transfer = app.add_subcommand(
      "label-transfer",
      "privately label public points, then train a fresh classifier");
  auto* soft =
      app.add_subcommand("soft-label", "answer soft-label queries privately");
  auto* probe = app.add_subcommand(
      "stability-probe", "estimate stability, concentration and quality");
  for (CLI::App* cmd : {binary, transfer, soft, probe}) {
    AddCommonFlags(cmd, &config, &opt, &out_path);
  }

  CLI11_PARSE(app, argc, argv);

  const CLI::App* parsed = nullptr;
  if (binary->parsed()) {
    config.pipeline = Pipeline::kBinaryQueries;
    parsed = binary;
  } else if (transfer->parsed()) {
    config.pipeline = Pipeline::kLabelTransfer;
    parsed = transfer;
  } else if (soft->parsed()) {
    config.pipeline = Pipeline::kSoftLabel;
    parsed = soft;
  } else {
    config.pipeline = Pipeline::kStabilityProbe;
    parsed = probe;
  }

  bool seed_given = false;
  ResolveOptionalFlags(*parsed, opt, &config, &seed_given);
  if (!seed_given) {
    if (const char* env = std::getenv("STABLEPRIV_SEED"); env != nullptr) {
      config.seed = std::strtoull(env, nullptr, 10);
    }
  }
  return RunAndReport(config, out_path);
}
