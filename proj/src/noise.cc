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

#include "stablepriv/noise.h"

#include <cassert>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"

namespace stablepriv {

namespace {

// SplitMix64 finalizer; decorrelates nearby seeds.
uint64_t Mix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

NoiseSource::NoiseSource(bool zero_noise, uint64_t seed)
    : zero_noise_(zero_noise), seed_(seed), engine_(seed) {}

NoiseSource NoiseSource::SeededUniform(uint64_t seed) {
  return NoiseSource(false, seed);
}

NoiseSource NoiseSource::ZeroNoise() { return NoiseSource(true, 0); }

double NoiseSource::NextUniform() {
  ++draws_;
  if (zero_noise_) return 0.5;
  // Top 53 bits, offset to the bin center: open interval (0,1) with a
  // platform-independent mapping (mt19937_64 output is fully specified).
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double NoiseSource::Laplace(double scale) {
  assert(scale > 0);
  if (zero_noise_) {
    ++draws_;
    return 0.0;
  }
  return internal::LaplaceFromUniform(NextUniform(), scale);
}

double NoiseSource::Gaussian(double stddev) {
  assert(stddev >= 0);
  const double u1 = NextUniform();
  const double u2 = NextUniform();
  return stddev * std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * M_PI * u2);
}

int NoiseSource::Coin() { return NextUniform() < 0.5 ? 0 : 1; }

NoiseSource NoiseSource::Child(uint64_t stream) const {
  if (zero_noise_) return ZeroNoise();
  return SeededUniform(DeriveSeed(seed_, stream));
}

uint64_t DeriveSeed(uint64_t seed, uint64_t stream) {
  return Mix64(seed ^ Mix64(stream));
}

absl::StatusOr<double> SampleLaplace(double scale, NoiseSource& noise) {
  if (!(scale > 0) || !std::isfinite(scale)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("Laplace scale must be finite and positive, got %g",
                        scale));
  }
  return noise.Laplace(scale);
}

absl::StatusOr<double> LaplaceCdf(double x, double scale) {
  if (!(scale > 0) || !std::isfinite(scale)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("Laplace scale must be finite and positive, got %g",
                        scale));
  }
  if (x < 0) return 0.5 * std::exp(x / scale);
  return 1.0 - 0.5 * std::exp(-x / scale);
}

namespace internal {

double LaplaceFromUniform(double u, double scale) {
  // Inverse CDF, symmetric around u = 1/2. log1p keeps precision for u
  // near the median.
  const double centered = u - 0.5;
  const double sign = centered < 0 ? -1.0 : 1.0;
  return -scale * sign * std::log1p(-2.0 * std::fabs(centered));
}

}  // namespace internal

}  // namespace stablepriv
