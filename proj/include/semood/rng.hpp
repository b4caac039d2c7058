// Copyright 2026 The semood Authors.
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

#ifndef SEMOOD_RNG_HPP
#define SEMOOD_RNG_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

namespace semood {

/// SplitMix64 counter generator.
///
/// The state is a 64-bit counter advanced by the golden gamma
/// 0x9E3779B97F4A7C15 on every draw; the output is the counter passed through
/// the murmur-style finalizer (xor-shift 30, multiply 0xBF58476D1CE4E5B9,
/// xor-shift 27, multiply 0x94D049BB133111EB, xor-shift 31). Streams are
/// therefore a pure function of the seed and the draw index.
///
/// `derive(k)` returns an independent stream keyed by the current counter and
/// `k` without advancing this one; `split()` consumes one draw to seed a child.
/// Every sampler below is built only from `next_u64`, so all distributions are
/// bit-reproducible across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) noexcept : state_(seed) {}

  static std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next_u64() noexcept {
    state_ += kGamma;
    return mix(state_);
  }

  Rng derive(std::uint64_t stream) const noexcept {
    return Rng(mix(state_ ^ mix(stream + kGamma)));
  }

  Rng split() noexcept { return Rng(next_u64()); }

  std::uint64_t state() const noexcept { return state_; }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform on the open interval (0, 1).
  double uniform_open() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n), unbiased (Lemire's multiply-and-reject).
  std::size_t below(std::size_t n) noexcept;

  /// Standard normal via Box-Muller, two uniforms per draw, no caching.
  double normal() noexcept;

  /// Gamma(shape, 1) via Marsaglia-Tsang; shape < 1 uses the boost trick.
  double gamma(double shape) noexcept;

  /// Beta(a, b) as X/(X+Y) with independent gammas.
  double beta(double a, double b) noexcept;

  /// Fisher-Yates shuffle.
  template <class T>
  void shuffle(std::span<T> items) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
  std::uint64_t state_;
};

}  // namespace semood

#endif  // SEMOOD_RNG_HPP
