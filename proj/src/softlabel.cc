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

#include "stablepriv/softlabel.h"

#include <cmath>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "stablepriv/parallel.h"

namespace stablepriv {

namespace {

constexpr double kGammaTolerance = 1e-9;

// Number of width-gamma bins in [0,1]; fails unless 1/gamma is an integer
// (up to rounding slack) and gamma lies in (0, 1/2].
absl::StatusOr<int> BinsForGamma(double gamma) {
  if (!(gamma > 0) || gamma > 0.5) {
    return absl::InvalidArgumentError(
        absl::StrFormat("gamma must lie in (0, 1/2], got %g", gamma));
  }
  const double inverse = 1.0 / gamma;
  const double rounded = std::round(inverse);
  if (std::fabs(inverse - rounded) > kGammaTolerance * rounded) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "1/gamma must be an integer, got 1/%g = %.12g", gamma, inverse));
  }
  return static_cast<int>(rounded);
}

}  // namespace

absl::StatusOr<double> SnapGamma(double requested) {
  if (!(requested > 0) || requested > 0.5) {
    return absl::InvalidArgumentError(
        absl::StrFormat("requested width must lie in (0, 1/2], got %g",
                        requested));
  }
  return 1.0 / std::ceil(1.0 / requested);
}

GammaPartition::GammaPartition(double gamma, bool shifted, int num_bins)
    : gamma_(gamma), shifted_(shifted), num_bins_(num_bins) {}

absl::StatusOr<GammaPartition> GammaPartition::Create(double gamma,
                                                      bool shifted) {
  auto bins = BinsForGamma(gamma);
  if (!bins.ok()) return bins.status();
  const int num_bins = shifted ? *bins - 1 : *bins;
  if (num_bins < 1) {
    return absl::InvalidArgumentError(
        "shifted partition needs 1/gamma >= 2");
  }
  return GammaPartition(gamma, shifted, num_bins);
}

std::optional<int> GammaPartition::BinIndex(double score) const {
  const double offset = shifted_ ? gamma_ / 2.0 : 0.0;
  if (score < offset) return std::nullopt;
  int bin = static_cast<int>(std::floor((score - offset) / gamma_));
  if (bin >= num_bins_) {
    // The last plain bin is closed at 1; everything past the shifted
    // coverage is out of band.
    if (!shifted_ && score <= 1.0) return num_bins_ - 1;
    return std::nullopt;
  }
  return bin;
}

double GammaPartition::Midpoint(int bin) const {
  if (shifted_) return static_cast<double>(bin + 1) * gamma_;
  return (2.0 * static_cast<double>(bin) + 1.0) * gamma_ / 2.0;
}

std::pair<double, double> GammaPartition::BinRange(int bin) const {
  const double offset = shifted_ ? gamma_ / 2.0 : 0.0;
  const double lo = offset + static_cast<double>(bin) * gamma_;
  return {lo, lo + gamma_};
}

absl::StatusOr<GammaHistogram> BuildHistogram(absl::Span<const double> scores,
                                              const GammaPartition& partition) {
  GammaHistogram hist{partition, std::vector<int64_t>(partition.num_bins(), 0),
                      0};
  for (const double score : scores) {
    if (!(score >= 0.0) || !(score <= 1.0)) {
      return absl::InvalidArgumentError(
          absl::StrFormat("score %g outside [0,1]", score));
    }
    if (auto bin = partition.BinIndex(score); bin.has_value()) {
      ++hist.counts[*bin];
    } else {
      ++hist.uncounted;
    }
  }
  return hist;
}

absl::StatusOr<ModeDist> HistogramModeAndDistance(const GammaHistogram& hist) {
  return ModeAndStabilityDistance(absl::MakeConstSpan(hist.counts));
}

absl::StatusOr<double> SlcNoiseScale(int64_t cutoff, double epsilon,
                                     double delta) {
  if (cutoff < 1 || !(epsilon > 0) || !(delta > 0) || !(delta < 1)) {
    return absl::InvalidArgumentError(
        "need cutoff >= 1, epsilon > 0 and delta in (0,1)");
  }
  return std::sqrt(64.0 * static_cast<double>(cutoff) *
                   std::log(2.0 / delta)) /
         epsilon;
}

absl::StatusOr<double> SlcThreshold(double lambda, int64_t num_queries,
                                    double delta) {
  if (!(lambda > 0) || num_queries < 1 || !(delta > 0) || !(delta < 1)) {
    return absl::InvalidArgumentError(
        "need lambda > 0, num_queries >= 1 and delta in (0,1)");
  }
  return lambda *
         std::log(4.0 * static_cast<double>(num_queries) / delta);
}

absl::StatusOr<int64_t> SlcChunkCount(int64_t num_queries, int64_t cutoff,
                                      double epsilon, double delta,
                                      double beta) {
  if (num_queries < 1 || cutoff < 1 || !(epsilon > 0) || !(delta > 0) ||
      !(delta < 1) || !(beta > 0) || !(beta < 1)) {
    return absl::InvalidArgumentError(
        "need positive m, T, epsilon and delta, beta in (0,1)");
  }
  const double m = static_cast<double>(num_queries);
  const double t = static_cast<double>(cutoff);
  const double raw = 136.0 * std::log(8.0 * m * t / std::min(beta, delta)) *
                     std::sqrt(2.0 * t * std::log(2.0 / delta)) / epsilon;
  return static_cast<int64_t>(std::ceil(raw));
}

SoftLabelSession::SoftLabelSession(Aux aux, std::vector<Classifier> classifiers,
                                   int64_t chunk_size, NoiseSource noise)
    : aux_(aux),
      plain_(*GammaPartition::Create(aux.gamma, /*shifted=*/false)),
      shifted_(*GammaPartition::Create(aux.gamma, /*shifted=*/true)),
      classifiers_(std::move(classifiers)),
      chunk_size_(chunk_size),
      noisy_threshold_(0),
      noise_(std::move(noise)) {
  // The query loop never initializes the noisy threshold before the first
  // per-query test; noise it once at session open, as the online release
  // session does.
  noisy_threshold_ = aux_.threshold + noise_.Laplace(aux_.lambda);
}

absl::StatusOr<SoftLabelSession> SoftLabelSession::Train(
    const Dataset& dataset, const Learner& learner, int64_t k, const Aux& aux,
    NoiseSource noise, uint64_t train_seed, int threads) {
  if (!(aux.lambda > 0) || !(aux.threshold > 0)) {
    return absl::InvalidArgumentError(
        "session needs positive lambda and threshold");
  }
  // Validate gamma for both discretizations up front.
  auto plain = GammaPartition::Create(aux.gamma, /*shifted=*/false);
  if (!plain.ok()) return plain.status();
  auto shifted = GammaPartition::Create(aux.gamma, /*shifted=*/true);
  if (!shifted.ok()) return shifted.status();

  auto plan = SplitIntoChunks(dataset.size(), k);
  if (!plan.ok()) return plan.status();

  std::vector<absl::StatusOr<Classifier>> trained(
      k, absl::FailedPreconditionError("not trained"));
  ParallelFor(k, threads, [&](int64_t j) {
    trained[j] = learner.train(ChunkView(dataset, *plan, j),
                               DeriveSeed(train_seed, j));
  });
  std::vector<Classifier> classifiers;
  classifiers.reserve(k);
  for (auto& c : trained) {
    if (!c.ok()) return c.status();
    classifiers.push_back(*std::move(c));
  }
  return SoftLabelSession(aux, std::move(classifiers), plan->chunk_size,
                          std::move(noise));
}

absl::StatusOr<SoftAnswer> SoftLabelSession::AnswerOne(
    absl::Span<const double> x) {
  std::vector<double> scores;
  scores.reserve(classifiers_.size());
  for (const auto& classifier : classifiers_) {
    scores.push_back(classifier.PredictSoft(x));
  }

  // Stage one: plain discretization.
  auto plain_hist = BuildHistogram(scores, plain_);
  if (!plain_hist.ok()) return plain_hist.status();
  auto plain_mode = HistogramModeAndDistance(*plain_hist);
  if (!plain_mode.ok()) return plain_mode.status();
  double noisy_distance = static_cast<double>(plain_mode->distance) +
                          noise_.Laplace(2.0 * aux_.lambda);
  if (noisy_distance > noisy_threshold_) {
    return SoftAnswer{SoftAnswer::Kind::kScore,
                      plain_.Midpoint(plain_mode->mode), /*stage=*/0};
  }

  // Stage two: refresh the shared threshold, then test the shifted
  // discretization with fresh noise.
  noisy_threshold_ = aux_.threshold + noise_.Laplace(aux_.lambda);
  auto shifted_hist = BuildHistogram(scores, shifted_);
  if (!shifted_hist.ok()) return shifted_hist.status();
  auto shifted_mode = HistogramModeAndDistance(*shifted_hist);
  if (!shifted_mode.ok()) return shifted_mode.status();
  noisy_distance = static_cast<double>(shifted_mode->distance) +
                   noise_.Laplace(2.0 * aux_.lambda);
  if (noisy_distance > noisy_threshold_) {
    return SoftAnswer{SoftAnswer::Kind::kScore,
                      shifted_.Midpoint(shifted_mode->mode), /*stage=*/1};
  }
  return SoftAnswer{SoftAnswer::Kind::kBottom, 0.0, /*stage=*/1};
}

absl::StatusOr<SoftLabelSession::RunResult> SoftLabelSession::AnswerAll(
    absl::Span<const std::vector<double>> queries, int64_t cutoff) {
  if (cutoff < 1) {
    return absl::InvalidArgumentError("cutoff must be at least 1");
  }
  RunResult result;
  result.answers.reserve(queries.size());
  for (int64_t i = 0; i < static_cast<int64_t>(queries.size()); ++i) {
    if (cost_ > cutoff) {
      result.answers.push_back(
          SoftAnswer{SoftAnswer::Kind::kBudgetExhausted, 0.0, 0});
      continue;
    }
    auto answer = AnswerOne(queries[i]);
    if (!answer.ok()) return answer.status();
    int cost = 0;
    if (answer->stage == 1) {
      if (answer->kind == SoftAnswer::Kind::kBottom) {
        cost = 2;
        noisy_threshold_ = aux_.threshold + noise_.Laplace(aux_.lambda);
      } else {
        cost = 1;
      }
    }
    cost_ += cost;
    result.answers.push_back(*answer);
    result.trace.push_back(SlcTraceEntry{i, answer->stage, cost, cost_});
  }
  result.final_cost = cost_;
  return result;
}

}  // namespace stablepriv
