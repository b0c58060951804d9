/*
 * Copyright (c) 2026, The VanishKit Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace vanishkit {

/// SplitMix64 finalizer. Used to spread user-provided seeds (which are often
/// small consecutive integers) over the whole 64-bit state space before they
/// reach an engine, and to derive decorrelated per-stream seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Deterministic random source.
///
/// Wraps std::mt19937_64 (whose raw output sequence is fully specified by the
/// standard) and hand-rolls the variate transforms, because the standard
/// library's distribution objects are implementation-defined and would break
/// bit-reproducibility across toolchains. Every stochastic component of the
/// library draws exclusively through this class.
class Rng
{
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix_seed(seed)) {}

  /// Independent stream derived from a base seed, e.g. one per RANSAC
  /// restart or per synthetic instance. Streams with different indices are
  /// decorrelated by the SplitMix64 finalizer.
  static Rng derived(std::uint64_t seed, std::uint64_t stream)
  {
    return Rng(seed + 0x9e3779b97f4a7c15ull * (stream + 1));
  }

  /// Raw 64 engine bits.
  std::uint64_t bits() { return engine_(); }

  /// Uniform double in [0, 1) with 53 significant bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). Requires n > 0.
  int uniform_int(int n)
  {
    const int v = static_cast<int>(uniform() * static_cast<double>(n));
    return v < n ? v : n - 1;
  }

  /// Standard normal variate (Box-Muller, pairwise cached).
  double normal()
  {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // 1 - u maps [0,1) to (0,1] so the log argument is never zero.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    constexpr double two_pi = 6.283185307179586476925286766559;
    spare_ = r * std::sin(two_pi * u2);
    has_spare_ = true;
    return r * std::cos(two_pi * u2);
  }

  /// Normal variate with the given mean and standard deviation.
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace vanishkit
