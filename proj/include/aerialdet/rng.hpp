// Copyright 2026 The aerialdet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., Random123).
//
// Every random draw is a pure function of (key, counter), so simulated
// outcomes do not depend on iteration order or thread scheduling.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace aerialdet {

class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t(kMul0) * ctr[0];
      const std::uint64_t p1 = std::uint64_t(kMul1) * ctr[2];
      ctr = {std::uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], std::uint32_t(p1),
             std::uint32_t(p0 >> 32) ^ ctr[3] ^ key[1], std::uint32_t(p0)};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85;
};

/// Random stream addressed by (seed, frame, entity, purpose). Draw `i` of a
/// stream is reproducible in isolation.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint32_t frame, std::uint32_t entity, std::uint32_t purpose)
      : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)}, frame_(frame), entity_(entity),
        purpose_(purpose) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform(std::uint32_t draw) const noexcept {
    const auto out = Philox4x32::generate({frame_, entity_, purpose_, draw}, key_);
    const std::uint64_t bits = (std::uint64_t(out[0]) << 32 | out[1]) >> 11;
    return double(bits) * 0x1.0p-53;
  }

  double uniform(std::uint32_t draw, double lo, double hi) const noexcept {
    return lo + (hi - lo) * uniform(draw);
  }

  /// Standard normal via Box-Muller over draws (2*draw, 2*draw+1).
  double normal(std::uint32_t draw) const noexcept {
    const double u1 = 1.0 - uniform(2 * draw);  // (0, 1]
    const double u2 = uniform(2 * draw + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Poisson variate by inversion; adequate for the small means used here.
  int poisson(std::uint32_t draw, double mean) const noexcept {
    if (mean <= 0.0) return 0;
    const double u = uniform(draw);
    double p = std::exp(-mean), cdf = p;
    int k = 0;
    while (u >= cdf && k < 1000) {
      ++k;
      p *= mean / k;
      cdf += p;
    }
    return k;
  }

 private:
  Philox4x32::Key key_;
  std::uint32_t frame_, entity_, purpose_;
};

}  // namespace aerialdet
