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

#include "stablepriv/learners.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "stablepriv/noise.h"

namespace stablepriv {

namespace {

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Rescales x into the L2 ball of radius `bound` (no-op inside the ball).
std::vector<double> ClipToNorm(absl::Span<const double> x, double bound) {
  double norm_sq = 0;
  for (const double v : x) norm_sq += v * v;
  std::vector<double> out(x.begin(), x.end());
  const double norm = std::sqrt(norm_sq);
  if (norm > bound) {
    const double scale = bound / norm;
    for (double& v : out) v *= scale;
  }
  return out;
}

// Fisher-Yates from a seeded source; deterministic across platforms.
std::vector<int64_t> DrawPermutation(int64_t n, NoiseSource& rng) {
  std::vector<int64_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (int64_t i = n - 1; i > 0; --i) {
    const int64_t j =
        std::min<int64_t>(static_cast<int64_t>(rng.NextUniform() * (i + 1)), i);
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

}  // namespace

double Classifier::PredictSoft(absl::Span<const double> x) const {
  return std::clamp(soft_(x), 0.0, 1.0);
}

int Classifier::PredictHard(absl::Span<const double> x) const {
  return PredictSoft(x) >= 0.5 ? 1 : 0;
}

absl::StatusOr<Classifier> TrainThresholdErm(
    absl::Span<const LabeledExample> data, uint64_t seed) {
  (void)seed;  // ERM over thresholds is deterministic
  if (data.empty()) {
    return absl::InvalidArgumentError("cannot train on an empty dataset");
  }
  std::vector<std::pair<double, int>> points;
  points.reserve(data.size());
  for (const auto& example : data) {
    if (example.features.size() != 1) {
      return absl::InvalidArgumentError(
          "threshold ERM requires 1-dimensional features");
    }
    points.emplace_back(example.features[0], example.label);
  }
  std::sort(points.begin(), points.end());

  const int64_t n = static_cast<int64_t>(points.size());
  int64_t total_ones = 0;
  for (const auto& [x, y] : points) total_ones += y;

  // Candidate thresholds are -inf (predict all ones), each distinct
  // feature value, and +inf (predict all zeros). With points sorted, the
  // error of theta = x_(i) is (#ones before i) + (#zeros from i on);
  // sweep once, strict comparison keeps the smallest theta on ties.
  const int64_t total_zeros = n - total_ones;
  double best_theta = -std::numeric_limits<double>::infinity();
  int64_t best_errors = total_zeros;  // all-ones rule errs on each zero
  int64_t ones_before = 0;
  int64_t zeros_before = 0;
  for (int64_t i = 0; i < n; ++i) {
    if (i > 0) {
      ones_before += points[i - 1].second;
      zeros_before += 1 - points[i - 1].second;
      if (points[i].first == points[i - 1].first) continue;
    }
    const int64_t errors = ones_before + (total_zeros - zeros_before);
    if (errors < best_errors) {
      best_errors = errors;
      best_theta = points[i].first;
    }
  }
  if (total_ones < best_errors) {  // all-zeros rule errs on each one
    best_errors = total_ones;
    best_theta = std::numeric_limits<double>::infinity();
  }

  const double theta = best_theta;
  return Classifier([theta](absl::Span<const double> x) {
    return x.empty() ? 0.0 : (x[0] >= theta ? 1.0 : 0.0);
  });
}

absl::StatusOr<Classifier> TrainLogisticSgd(
    absl::Span<const LabeledExample> data, const SgdConfig& config,
    uint64_t seed) {
  if (!(config.step_constant > 0)) {
    return absl::InvalidArgumentError("step constant must be positive");
  }
  if (config.passes < 0) {
    return absl::InvalidArgumentError("pass count must be nonnegative");
  }
  if (!(config.feature_clip_norm > 0)) {
    return absl::InvalidArgumentError("feature clip bound must be positive");
  }
  if (config.l2_regularization < 0) {
    return absl::InvalidArgumentError("l2 regularization must be nonnegative");
  }
  if (config.mode == SgdConfig::Mode::kOnePassDeterministic &&
      config.passes > 1) {
    return absl::InvalidArgumentError(
        "one-pass mode runs exactly one pass in data order");
  }

  const int64_t n = static_cast<int64_t>(data.size());
  const size_t dim = data.empty() ? 0 : data[0].features.size();
  for (const auto& example : data) {
    if (example.features.size() != dim) {
      return absl::InvalidArgumentError(
          "feature vector length must be constant within a dataset");
    }
  }

  // Weights hold [w_1..w_d, bias].
  std::vector<double> weights(dim + 1, 0.0);
  NoiseSource rng = NoiseSource::SeededUniform(seed);
  const double clip = config.feature_clip_norm;

  int64_t step = 0;
  for (int64_t pass = 0; pass < std::max<int64_t>(config.passes, 0); ++pass) {
    std::vector<int64_t> order;
    if (config.mode == SgdConfig::Mode::kPermutationShuffled) {
      order = DrawPermutation(n, rng);
    } else {
      order.resize(n);
      std::iota(order.begin(), order.end(), 0);
    }
    for (const int64_t idx : order) {
      ++step;
      const double eta = config.step_constant / static_cast<double>(step);
      const auto x = ClipToNorm(data[idx].features, clip);
      double margin = weights[dim];  // bias
      for (size_t d = 0; d < dim; ++d) margin += weights[d] * x[d];
      const double y_signed = data[idx].label == 1 ? 1.0 : -1.0;
      // d/dw log(1 + exp(-y w.x)) = -y x sigmoid(-y w.x)
      const double g = -y_signed * Sigmoid(-y_signed * margin);
      for (size_t d = 0; d < dim; ++d) {
        weights[d] -=
            eta * (g * x[d] + config.l2_regularization * weights[d]);
      }
      weights[dim] -=
          eta * (g + config.l2_regularization * weights[dim]);
    }
  }

  return Classifier([weights, dim, clip](absl::Span<const double> x) {
    const auto clipped = ClipToNorm(x, clip);
    double margin = weights[dim];
    for (size_t d = 0; d < dim && d < clipped.size(); ++d) {
      margin += weights[d] * clipped[d];
    }
    return Sigmoid(margin);
  });
}

absl::StatusOr<Classifier> TrainLabelMean(absl::Span<const LabeledExample> data,
                                          uint64_t seed) {
  (void)seed;
  if (data.empty()) {
    return absl::InvalidArgumentError("cannot train on an empty dataset");
  }
  double sum = 0;
  for (const auto& example : data) sum += example.label;
  const double mean = sum / static_cast<double>(data.size());
  return Classifier([mean](absl::Span<const double>) { return mean; });
}

absl::StatusOr<Learner> LearnerByName(absl::string_view name,
                                      const SgdConfig& sgd_config) {
  if (name == "threshold-erm") {
    return Learner{"threshold-erm",
                   [](absl::Span<const LabeledExample> data, uint64_t seed) {
                     return TrainThresholdErm(data, seed);
                   }};
  }
  if (name == "logistic-sgd") {
    return Learner{"logistic-sgd",
                   [sgd_config](absl::Span<const LabeledExample> data,
                                uint64_t seed) {
                     return TrainLogisticSgd(data, sgd_config, seed);
                   }};
  }
  if (name == "label-mean") {
    return Learner{"label-mean",
                   [](absl::Span<const LabeledExample> data, uint64_t seed) {
                     return TrainLabelMean(data, seed);
                   }};
  }
  return absl::InvalidArgumentError(absl::StrFormat(
      "unknown learner \"%s\"; expected threshold-erm, logistic-sgd or "
      "label-mean",
      name));
}

absl::StatusOr<Dataset> GenThresholdData(int64_t n, double theta_star,
                                         double noise_rate, uint64_t seed) {
  if (n < 0) {
    return absl::InvalidArgumentError("sample count must be nonnegative");
  }
  if (noise_rate < 0 || noise_rate >= 0.5) {
    return absl::InvalidArgumentError(
        absl::StrFormat("noise rate must lie in [0, 0.5), got %g",
                        noise_rate));
  }
  NoiseSource rng = NoiseSource::SeededUniform(seed);
  Dataset out;
  out.examples.reserve(n);
  for (int64_t i = 0; i < n; ++i) {
    const double x = rng.NextUniform();
    int y = x >= theta_star ? 1 : 0;
    if (noise_rate > 0 && rng.NextUniform() < noise_rate) y = 1 - y;
    out.examples.push_back({{x}, y});
  }
  return out;
}

absl::StatusOr<Dataset> GenMarginData(int64_t n, double margin, uint64_t seed,
                                      bool positive_side_only) {
  if (n < 0) {
    return absl::InvalidArgumentError("sample count must be nonnegative");
  }
  if (!(margin > 0)) {
    return absl::InvalidArgumentError("margin must be positive");
  }
  NoiseSource rng = NoiseSource::SeededUniform(seed);
  const double sigma = margin / std::sqrt(8.0);
  Dataset out;
  out.examples.reserve(n);
  for (int64_t i = 0; i < n; ++i) {
    // x uniform over the band [margin, 2*margin], mirrored to the negative
    // band with probability 1/2 unless restricted to the positive side.
    double x = margin * (1.0 + rng.NextUniform());
    if (!positive_side_only && rng.Coin() == 0) x = -x;
    const double z = rng.Gaussian(sigma);
    out.examples.push_back({{x}, x + z >= 0 ? 1 : 0});
  }
  return out;
}

double MarginLabelConditional(double x, double margin) {
  // Pr[x + z >= 0] for z ~ N(0, margin^2/8).
  const double sigma = margin / std::sqrt(8.0);
  return 0.5 * std::erfc(-x / (sigma * std::sqrt(2.0)));
}

}  // namespace stablepriv
