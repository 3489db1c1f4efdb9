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

#ifndef STABLEPRIV_NOISE_H_
#define STABLEPRIV_NOISE_H_

#include <cstdint>
#include <random>

#include "absl/status/statusor.h"

namespace stablepriv {

// Deterministic randomness supplier injected into every mechanism.
//
// Two kinds exist: a seeded uniform source, which yields a bit-identical
// draw sequence for the same seed on every platform, and a zero-noise
// source used by oracle tests, which pins every uniform draw to the
// distribution median so that all additive noise vanishes.
//
// Instances are single-owner; hand each session or trial its own source
// (use Child() to derive independent streams from one master seed).
class NoiseSource {
 public:
  static NoiseSource SeededUniform(uint64_t seed);
  static NoiseSource ZeroNoise();

  bool zero_noise() const { return zero_noise_; }
  uint64_t seed() const { return seed_; }
  // Number of uniform draws consumed so far.
  uint64_t draws() const { return draws_; }

  // Next uniform draw in the open interval (0,1). Zero-noise returns 0.5.
  double NextUniform();

  // Laplace(0, scale) draw via the inverse CDF; one uniform consumed.
  // Zero-noise returns exactly 0. Requires scale > 0.
  double Laplace(double scale);

  // Zero-mean Gaussian draw via Box-Muller; two uniforms consumed.
  double Gaussian(double stddev);

  // Fair coin in {0,1}.
  int Coin();

  // Deterministic child source for stream `stream`. Independent of the
  // parent's draw position. Zero-noise children stay zero-noise.
  NoiseSource Child(uint64_t stream) const;

 private:
  NoiseSource(bool zero_noise, uint64_t seed);

  bool zero_noise_;
  uint64_t seed_;
  std::mt19937_64 engine_;
  uint64_t draws_ = 0;
};

// Draws one sample from Laplace(0, scale). Fails on non-positive scale.
absl::StatusOr<double> SampleLaplace(double scale, NoiseSource& noise);

// CDF of Laplace(0, scale) at x. Fails on non-positive scale.
absl::StatusOr<double> LaplaceCdf(double x, double scale);

// Derives a decorrelated 64-bit seed from (seed, stream).
uint64_t DeriveSeed(uint64_t seed, uint64_t stream);

namespace internal {

// Inverse-CDF transform: u in (0,1) -> Laplace(0, scale).
double LaplaceFromUniform(double u, double scale);

}  // namespace internal

}  // namespace stablepriv

#endif  // STABLEPRIV_NOISE_H_
