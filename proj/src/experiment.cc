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

#include "stablepriv/experiment.h"

#include <chrono>
#include <cmath>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "json.hpp"
#include "stablepriv/binary.h"
#include "stablepriv/csv.h"
#include "stablepriv/label_private.h"
#include "stablepriv/learners.h"
#include "stablepriv/noise.h"
#include "stablepriv/softlabel.h"
#include "stablepriv/stability_lab.h"
#include "stablepriv/subsample.h"
#include "stablepriv/types.h"

namespace stablepriv {

namespace {

using Json = nlohmann::ordered_json;

// Seed streams, one per randomness consumer.
enum SeedStream : uint64_t {
  kDataStream = 1,
  kQueryStream = 2,
  kMechanismStream = 3,
  kTrainStream = 4,
  kRelabelStream = 5,
  kHoldoutStream = 6,
  kLabStream = 7,
};

const char* PipelineName(Pipeline pipeline) {
  switch (pipeline) {
    case Pipeline::kBinaryQueries:
      return "binary-queries";
    case Pipeline::kLabelTransfer:
      return "label-transfer";
    case Pipeline::kSoftLabel:
      return "soft-label";
    case Pipeline::kStabilityProbe:
      return "stability-probe";
  }
  return "unknown";
}

absl::Status ValidateConfig(const ExperimentConfig& config) {
  if (!config.test_mode &&
      (config.zero_noise || config.overrides.chunk_count.has_value() ||
       config.overrides.lambda.has_value() ||
       config.overrides.threshold.has_value())) {
    return absl::InvalidArgumentError(
        "formula overrides and zero-noise require test mode");
  }
  if (config.data_path.empty() && config.generator.empty()) {
    return absl::InvalidArgumentError(
        "either a data path or a generator must be given");
  }
  if (config.threads < 1) {
    return absl::InvalidArgumentError("threads must be at least 1");
  }
  return absl::OkStatus();
}

absl::StatusOr<Dataset> LoadData(const ExperimentConfig& config,
                                 uint64_t seed) {
  if (!config.data_path.empty()) return ReadLabeledCsv(config.data_path);
  if (config.generator == "threshold") {
    return GenThresholdData(config.generator_n, config.theta_star,
                            config.noise_rate, seed);
  }
  if (config.generator == "margin") {
    return GenMarginData(config.generator_n, config.margin, seed);
  }
  if (config.generator == "margin-pos") {
    return GenMarginData(config.generator_n, config.margin, seed,
                         /*positive_side_only=*/true);
  }
  if (config.generator == "bernoulli") {
    return BernoulliLabelSampler(config.bernoulli_p)
        .sample(config.generator_n, seed);
  }
  return absl::InvalidArgumentError(absl::StrFormat(
      "unknown generator \"%s\"; expected threshold, margin, margin-pos or "
      "bernoulli",
      config.generator));
}

absl::StatusOr<DistributionSampler> SamplerFor(
    const ExperimentConfig& config) {
  if (config.generator == "threshold") {
    return ThresholdSampler(config.theta_star, config.noise_rate);
  }
  if (config.generator == "margin") return MarginSampler(config.margin);
  if (config.generator == "margin-pos") {
    return MarginSampler(config.margin, /*positive_side_only=*/true);
  }
  if (config.generator == "bernoulli") {
    return BernoulliLabelSampler(config.bernoulli_p);
  }
  return absl::InvalidArgumentError(absl::StrFormat(
      "pipeline needs a generator, got \"%s\"", config.generator));
}

struct QuerySet {
  std::vector<std::vector<double>> features;
  std::vector<int> truth;  // concept labels; empty when unknown
};

// Queries come from a CSV or are drawn from the generator's feature
// marginal; generated queries carry their concept labels so the report can
// include error metrics.
absl::StatusOr<QuerySet> LoadQueries(const ExperimentConfig& config,
                                     uint64_t seed) {
  QuerySet queries;
  if (!config.queries_path.empty()) {
    auto rows = ReadFeatureCsv(config.queries_path);
    if (!rows.ok()) return rows.status();
    queries.features = *std::move(rows);
    return queries;
  }
  if (config.num_queries < 1) {
    return absl::InvalidArgumentError("query count must be positive");
  }
  NoiseSource rng = NoiseSource::SeededUniform(seed);
  for (int64_t i = 0; i < config.num_queries; ++i) {
    if (config.generator == "threshold") {
      const double x = rng.NextUniform();
      queries.features.push_back({x});
      queries.truth.push_back(x >= config.theta_star ? 1 : 0);
    } else if (config.generator == "margin" ||
               config.generator == "margin-pos") {
      double x = config.margin * (1.0 + rng.NextUniform());
      if (config.generator == "margin" && rng.Coin() == 0) x = -x;
      queries.features.push_back({x});
      queries.truth.push_back(x >= 0 ? 1 : 0);  // Bayes label
    } else {
      return absl::InvalidArgumentError(absl::StrFormat(
          "generator \"%s\" cannot draw queries", config.generator));
    }
  }
  return queries;
}

NoiseSource MechanismNoise(const ExperimentConfig& config) {
  if (config.zero_noise) return NoiseSource::ZeroNoise();
  return NoiseSource::SeededUniform(DeriveSeed(config.seed, kMechanismStream));
}

Json ConfigEcho(const ExperimentConfig& config) {
  Json echo;
  echo["pipeline"] = PipelineName(config.pipeline);
  echo["data_path"] = config.data_path;
  echo["generator"] = config.generator;
  echo["generator_n"] = config.generator_n;
  echo["theta_star"] = config.theta_star;
  echo["noise_rate"] = config.noise_rate;
  echo["margin"] = config.margin;
  echo["bernoulli_p"] = config.bernoulli_p;
  echo["queries_path"] = config.queries_path;
  echo["num_queries"] = config.num_queries;
  echo["learner"] = config.learner;
  echo["epsilon"] = config.epsilon;
  echo["delta"] = config.delta;
  if (config.cutoff.has_value()) {
    echo["cutoff"] = *config.cutoff;
  } else {
    echo["cutoff"] = nullptr;
  }
  echo["alpha"] = config.alpha;
  echo["gamma_opt"] = config.gamma_opt;
  echo["beta"] = config.beta;
  if (config.gamma_disc.has_value()) {
    echo["gamma_disc"] = *config.gamma_disc;
  } else {
    echo["gamma_disc"] = nullptr;
  }
  echo["nu"] = config.nu;
  echo["trials"] = config.trials;
  echo["probe_n"] = config.probe_n;
  echo["probe_x"] = config.probe_x;
  echo["seed"] = config.seed;
  echo["threads"] = config.threads;
  // Overridden runs are not privacy-calibrated; say so first thing.
  if (config.test_mode) {
    Json overrides;
    overrides["warning"] = "test mode: run is NOT privacy-calibrated";
    overrides["zero_noise"] = config.zero_noise;
    if (config.overrides.chunk_count.has_value()) {
      overrides["chunk_count"] = *config.overrides.chunk_count;
    }
    if (config.overrides.lambda.has_value()) {
      overrides["lambda"] = *config.overrides.lambda;
    }
    if (config.overrides.threshold.has_value()) {
      overrides["threshold_w"] = *config.overrides.threshold;
    }
    echo["test_mode"] = overrides;
  } else {
    echo["test_mode"] = nullptr;
  }
  return echo;
}

Json AnswerToJson(const DiscreteAnswer& answer) {
  switch (answer.kind) {
    case DiscreteAnswer::Kind::kValue:
      return Json(answer.value);
    case DiscreteAnswer::Kind::kBottom:
      return Json("bottom");
    case DiscreteAnswer::Kind::kBudgetExhausted:
      return Json("budget-exhausted");
  }
  return Json();
}

struct AnswerCounts {
  int64_t answered = 0;
  int64_t bottom = 0;
  int64_t exhausted = 0;
};

AnswerCounts CountAnswers(absl::Span<const DiscreteAnswer> answers) {
  AnswerCounts counts;
  for (const auto& answer : answers) {
    if (answer.is_value()) {
      ++counts.answered;
    } else if (answer.is_bottom()) {
      ++counts.bottom;
    } else {
      ++counts.exhausted;
    }
  }
  return counts;
}

// Builds the plan, honoring an explicit cutoff from the config.
absl::StatusOr<BinaryQueryPlan> ResolvePlan(const ExperimentConfig& config,
                                            int64_t num_queries) {
  if (config.cutoff.has_value()) {
    if (*config.cutoff < 1 || *config.cutoff >= num_queries) {
      return PlanInfeasibleError(absl::StrFormat(
          "explicit cutoff %d must lie in [1, %d)", *config.cutoff,
          num_queries));
    }
    auto chunk_count = ComputeChunkCount(num_queries, *config.cutoff,
                                         config.epsilon, config.delta,
                                         config.beta);
    if (!chunk_count.ok()) return chunk_count.status();
    BinaryQueryPlan plan;
    plan.num_queries = num_queries;
    plan.learner_alpha = config.alpha;
    plan.best_error = config.gamma_opt;
    plan.beta = config.beta;
    plan.cutoff = *config.cutoff;
    plan.chunk_count = *chunk_count;
    plan.meets_query_floor = false;
    return plan;
  }
  return BinaryQueryPlan::Create(num_queries, config.alpha, config.gamma_opt,
                                 config.beta, config.epsilon, config.delta);
}

absl::Status RunBinaryLike(const ExperimentConfig& config, Json& report) {
  auto dataset = LoadData(config, DeriveSeed(config.seed, kDataStream));
  if (!dataset.ok()) return dataset.status();
  auto queries = LoadQueries(config, DeriveSeed(config.seed, kQueryStream));
  if (!queries.ok()) return queries.status();
  auto learner = LearnerByName(config.learner);
  if (!learner.ok()) return learner.status();

  const int64_t m = static_cast<int64_t>(queries->features.size());
  auto plan = ResolvePlan(config, m);
  if (!plan.ok()) return plan.status();
  auto params = PrivacyParams::Create(config.epsilon, config.delta,
                                      plan->cutoff, m);
  if (!params.ok()) return params.status();

  Json resolved;
  resolved["cutoff"] = plan->cutoff;
  resolved["chunk_count"] =
      config.overrides.chunk_count.value_or(plan->chunk_count);
  resolved["meets_query_floor"] = plan->meets_query_floor;
  report["resolved"] = resolved;

  if (config.pipeline == Pipeline::kBinaryQueries) {
    auto answers = AnswerBinaryQueries(
        *dataset, *learner, queries->features, *plan, *params,
        MechanismNoise(config), DeriveSeed(config.seed, kTrainStream),
        config.threads, config.overrides);
    if (!answers.ok()) return answers.status();

    Json answers_json = Json::array();
    for (const auto& answer : *answers) {
      answers_json.push_back(AnswerToJson(answer));
    }
    const AnswerCounts counts = CountAnswers(*answers);
    Json results;
    results["answers"] = answers_json;
    results["counts"] = {{"answered", counts.answered},
                         {"bottom", counts.bottom},
                         {"exhausted", counts.exhausted}};
    if (!queries->truth.empty()) {
      int64_t wrong_answered = 0;
      int64_t wrong_total = 0;  // bottoms count as errors for the rate
      for (int64_t i = 0; i < m; ++i) {
        if ((*answers)[i].is_value()) {
          const bool wrong = (*answers)[i].value != queries->truth[i];
          wrong_answered += wrong;
          wrong_total += wrong;
        } else {
          ++wrong_total;
        }
      }
      Json metrics;
      metrics["misclassification_rate"] =
          static_cast<double>(wrong_total) / static_cast<double>(m);
      metrics["answered_error_rate"] =
          counts.answered == 0
              ? 0.0
              : static_cast<double>(wrong_answered) /
                    static_cast<double>(counts.answered);
      results["metrics"] = metrics;
    }
    report["results"] = results;
    return absl::OkStatus();
  }

  // Label transfer.
  std::optional<HoldoutSpec> holdout;
  if (!config.generator.empty()) {
    auto sampler = SamplerFor(config);
    if (!sampler.ok()) return sampler.status();
    holdout = HoldoutSpec{sampler->sample, 10000,
                          DeriveSeed(config.seed, kHoldoutStream)};
  }
  auto transfer = TransferLabelsAndTrain(
      *dataset, *learner, queries->features, *plan, *params,
      MechanismNoise(config), DeriveSeed(config.seed, kTrainStream),
      DeriveSeed(config.seed, kRelabelStream), config.threads,
      config.overrides, holdout);
  if (!transfer.ok()) return transfer.status();

  Json results;
  results["relabeled_size"] = transfer->relabeled.size();
  results["bottom_count"] = transfer->bottom_count;
  if (transfer->holdout_error.has_value()) {
    results["holdout_error"] = *transfer->holdout_error;
  } else {
    results["holdout_error"] = nullptr;
  }
  if (!queries->truth.empty()) {
    int64_t disagreements = 0;
    for (int64_t i = 0; i < m; ++i) {
      disagreements +=
          transfer->relabeled.examples[i].label != queries->truth[i];
    }
    results["relabel_disagreement_rate"] =
        static_cast<double>(disagreements) / static_cast<double>(m);
  }
  report["results"] = results;

  if (!config.export_relabeled_path.empty()) {
    auto written =
        WriteLabeledCsv(transfer->relabeled, config.export_relabeled_path);
    if (!written.ok()) return written;
  }
  return absl::OkStatus();
}

absl::Status RunSoftLabel(const ExperimentConfig& config, Json& report) {
  auto dataset = LoadData(config, DeriveSeed(config.seed, kDataStream));
  if (!dataset.ok()) return dataset.status();
  auto queries = LoadQueries(config, DeriveSeed(config.seed, kQueryStream));
  if (!queries.ok()) return queries.status();
  auto learner = LearnerByName(config.learner);
  if (!learner.ok()) return learner.status();

  const int64_t m = static_cast<int64_t>(queries->features.size());
  const int64_t cutoff = config.cutoff.value_or(
      std::max<int64_t>(1, static_cast<int64_t>(std::ceil(0.1 * m))));

  auto lambda = SlcNoiseScale(cutoff, config.epsilon, config.delta);
  if (!lambda.ok()) return lambda.status();
  double lam = config.overrides.lambda.value_or(*lambda);
  auto threshold = SlcThreshold(lam, m, config.delta);
  if (!threshold.ok()) return threshold.status();
  double w = config.overrides.threshold.value_or(*threshold);

  int64_t k;
  if (config.overrides.chunk_count.has_value()) {
    k = *config.overrides.chunk_count;
  } else {
    auto chunk_count = SlcChunkCount(m, cutoff, config.epsilon, config.delta,
                                     config.beta);
    if (!chunk_count.ok()) return chunk_count.status();
    k = *chunk_count;
  }
  if (dataset->size() < k) {
    return InsufficientDataError(absl::StrFormat(
        "dataset of %d examples cannot fill %d chunks (grow n or use "
        "--test-mode --override-k)",
        dataset->size(), k));
  }
  const int64_t n_prime = dataset->size() / k;

  // Discretization width: explicit, or derived from the measured
  // stability of the learner at the probe point.
  double gamma;
  if (config.gamma_disc.has_value()) {
    auto snapped = SnapGamma(*config.gamma_disc);
    if (!snapped.ok()) return snapped.status();
    gamma = *snapped;
  } else {
    if (config.generator.empty()) {
      return absl::InvalidArgumentError(
          "--gamma-disc is required when data comes from a file");
    }
    auto sampler = SamplerFor(config);
    if (!sampler.ok()) return sampler.status();
    const std::vector<double> probe = {config.probe_x};
    auto stability = EstimateOnAverageStability(
        *learner, *sampler, n_prime, probe, /*trials=*/200,
        DeriveSeed(config.seed, kLabStream), config.threads);
    if (!stability.ok()) return stability.status();
    const double alpha_hat = std::sqrt(stability->alpha_sq_hat);
    auto snapped = SnapGamma(std::min(
        0.5, 16.0 * alpha_hat * std::sqrt(2.0 * n_prime) + config.nu));
    if (!snapped.ok()) return snapped.status();
    gamma = *snapped;
  }

  Json resolved;
  resolved["cutoff"] = cutoff;
  resolved["chunk_count"] = k;
  resolved["chunk_size"] = n_prime;
  resolved["lambda"] = lam;
  resolved["threshold_w"] = w;
  resolved["gamma_disc"] = gamma;
  report["resolved"] = resolved;

  auto session = SoftLabelSession::Train(
      *dataset, *learner, k, SoftLabelSession::Aux{gamma, lam, w},
      MechanismNoise(config), DeriveSeed(config.seed, kTrainStream),
      config.threads);
  if (!session.ok()) return session.status();
  auto run = session->AnswerAll(queries->features, cutoff);
  if (!run.ok()) return run.status();

  Json answers = Json::array();
  for (const auto& answer : run->answers) {
    Json entry;
    switch (answer.kind) {
      case SoftAnswer::Kind::kScore:
        entry["score"] = answer.score;
        break;
      case SoftAnswer::Kind::kBottom:
        entry["score"] = "bottom";
        break;
      case SoftAnswer::Kind::kBudgetExhausted:
        entry["score"] = "budget-exhausted";
        break;
    }
    entry["stage"] = answer.stage;
    answers.push_back(entry);
  }
  Json trace = Json::array();
  for (const auto& step : run->trace) {
    trace.push_back({{"query", step.query_index},
                     {"stage", step.stage},
                     {"cost", step.cost},
                     {"counter", step.counter_after}});
  }
  int64_t scores = 0;
  int64_t bottoms = 0;
  int64_t exhausted = 0;
  for (const auto& answer : run->answers) {
    scores += answer.kind == SoftAnswer::Kind::kScore;
    bottoms += answer.kind == SoftAnswer::Kind::kBottom;
    exhausted += answer.kind == SoftAnswer::Kind::kBudgetExhausted;
  }
  Json results;
  results["answers"] = answers;
  results["counts"] = {
      {"answered", scores}, {"bottom", bottoms}, {"exhausted", exhausted}};
  results["budget_trace"] = trace;
  results["final_cost"] = run->final_cost;
  report["results"] = results;
  return absl::OkStatus();
}

absl::Status RunStabilityProbe(const ExperimentConfig& config, Json& report) {
  auto learner = LearnerByName(config.learner);
  if (!learner.ok()) return learner.status();
  auto sampler = SamplerFor(config);
  if (!sampler.ok()) return sampler.status();
  const std::vector<double> probe = {config.probe_x};

  auto stability = EstimateOnAverageStability(
      *learner, *sampler, config.probe_n, probe, config.trials,
      DeriveSeed(config.seed, kLabStream), config.threads);
  if (!stability.ok()) return stability.status();

  auto concentration = ConcentrationCheck(
      *learner, *sampler, config.probe_n, probe,
      std::sqrt(stability->alpha_sq_hat),
      std::max<int64_t>(100, config.trials / 10),
      DeriveSeed(config.seed, kLabStream + 1), config.threads);
  if (!concentration.ok()) return concentration.status();

  auto quality = QualityProbe(*learner, *sampler, config.probe_n, probe,
                              config.trials,
                              DeriveSeed(config.seed, kLabStream + 2),
                              config.nu, config.threads);
  if (!quality.ok()) return quality.status();

  Json results;
  results["alpha_sq_hat"] = stability->alpha_sq_hat;
  results["alpha_sq_std_error"] = stability->std_error;
  results["concentration_fraction"] = *concentration;
  results["mean_score"] = quality->mean_score;
  results["nu_hat"] = quality->nu_hat;
  results["strong_beta_hat"] = quality->strong_beta_hat;
  report["results"] = results;

  Json resolved;
  resolved["n"] = config.probe_n;
  resolved["trials"] = config.trials;
  resolved["probe_x"] = config.probe_x;
  report["resolved"] = resolved;
  return absl::OkStatus();
}

std::string Summarize(const Json& report) {
  std::string out = absl::StrFormat(
      "stablepriv %s: pipeline=%s seed=%s",
      report["library_version"].get<std::string>(),
      report["config"]["pipeline"].get<std::string>(),
      report["config"]["seed"].dump());
  if (report.contains("results") && report["results"].contains("counts")) {
    out += absl::StrFormat(
        " answered=%s bottom=%s exhausted=%s",
        report["results"]["counts"]["answered"].dump(),
        report["results"]["counts"]["bottom"].dump(),
        report["results"]["counts"]["exhausted"].dump());
  }
  if (!report["config"]["test_mode"].is_null()) {
    out += " [TEST MODE: not privacy-calibrated]";
  }
  return out;
}

}  // namespace

absl::StatusOr<RunReport> RunExperiment(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  if (auto status = ValidateConfig(config); !status.ok()) return status;

  Json report;
  report["schema"] = 1;
  report["library_version"] = kLibraryVersion;
  report["config"] = ConfigEcho(config);

  absl::Status status = absl::OkStatus();
  switch (config.pipeline) {
    case Pipeline::kBinaryQueries:
    case Pipeline::kLabelTransfer:
      status = RunBinaryLike(config, report);
      break;
    case Pipeline::kSoftLabel:
      status = RunSoftLabel(config, report);
      break;
    case Pipeline::kStabilityProbe:
      status = RunStabilityProbe(config, report);
      break;
  }
  if (!status.ok()) return status;

  const auto elapsed = std::chrono::duration<double, std::milli>(
      std::chrono::steady_clock::now() - start);
  report["wall_time_ms"] = elapsed.count();

  RunReport out;
  out.summary = Summarize(report);
  out.json = report.dump(2) + "\n";
  return out;
}

int ExitCodeForStatus(const absl::Status& status) {
  if (status.ok()) return 0;
  switch (status.code()) {
    case absl::StatusCode::kNotFound:
    case absl::StatusCode::kFailedPrecondition:
    case absl::StatusCode::kDataLoss:
      return 2;  // data
    case absl::StatusCode::kOutOfRange:
      return 3;  // plan
    default:
      return 1;  // config
  }
}

absl::Status PlanInfeasibleError(absl::string_view message) {
  return absl::OutOfRangeError(message);
}

absl::Status InsufficientDataError(absl::string_view message) {
  return absl::FailedPreconditionError(message);
}

}  // namespace stablepriv
