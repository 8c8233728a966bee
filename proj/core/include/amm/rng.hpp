// Copyright 2026 The amm-align Authors
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

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace amm {

/// Counter-based generator: the n-th draw is a pure function of (seed, n),
/// computed with the SplitMix64 finalizer. Streams are identical on every
/// platform because no std:: distribution is involved.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) noexcept : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }

  std::uint64_t next_u64() noexcept;
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) noexcept;
  /// Unbiased integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept;
  /// Standard normal via Box-Muller; the spare value is cached.
  double normal() noexcept;

  /// Independent child stream keyed by a label; does not advance this stream.
  Rng fork(std::string_view label) const noexcept;
  Rng fork(std::uint64_t index) const noexcept;

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// k indices in [0, n). Without replacement this is a partial Fisher-Yates
/// shuffle, so all k are distinct; throws ArgumentError if k > n.
std::vector<std::size_t> sample_indices(Rng& rng, std::size_t n, std::size_t k,
                                        bool with_replacement);

/// Uniformly random permutation of [0, n).
std::vector<std::size_t> permutation(Rng& rng, std::size_t n);

}  // namespace amm
