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
#include <optional>

#include "amm/embedding_store.hpp"
#include "amm/rng.hpp"

namespace amm {

/// Paired features sharing a Gaussian latent:
///   z_i ~ N(0, I),  x_i = A z_i + sigma e_i,  y_i = C z_i + sigma e'_i
/// A and C have orthonormal columns and are drawn once per seed. Item i is
/// generated from its own sub-stream, so the first n items of a larger draw
/// match a smaller draw with the same seed.
struct SyntheticSpec {
  std::size_t n_pairs = 2000;
  std::size_t d_latent = 16;
  std::size_t d_x = 64;
  std::size_t d_y = 48;
  double noise_sigma = 0.5;
  std::uint64_t seed = 7;
  /// Forces A = C = I; needs d_x == d_y == d_latent.
  bool identity_maps = false;
  /// When > 0, each caption also gets 1..(2*caption_words - 1) word vectors
  /// C z_i + sigma e'_ik, and y_i is their mean.
  std::size_t caption_words = 0;

  void validate() const;
};

struct SyntheticData {
  EmbeddingStore x;
  EmbeddingStore y;
  PairManifest manifest;
  std::optional<EmbeddingStore> y_words;
};

/// Splits are 80/10/10 train/eval/test by index order.
SyntheticData synth_generate(const SyntheticSpec& spec);

/// Random d x k matrix with orthonormal columns (modified Gram-Schmidt).
Matrix random_orthonormal_columns(std::size_t d, std::size_t k, Rng& rng);

}  // namespace amm
