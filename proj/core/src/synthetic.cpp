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

#include "amm/synthetic.hpp"

#include <cmath>
#include <string>

#include "amm/captions.hpp"
#include "amm/errors.hpp"
#include "amm/rng.hpp"

namespace amm {
namespace {

std::vector<double> mix(const Matrix& map, std::span<const double> z) {
  std::vector<double> out(map.rows(), 0.0);
  for (std::size_t r = 0; r < map.rows(); ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < z.size(); ++c) acc += map(r, c) * z[c];
    out[r] = acc;
  }
  return out;
}

Split split_for(std::size_t i, std::size_t n) {
  if (i < n * 8 / 10) return Split::train;
  if (i < n * 9 / 10) return Split::eval;
  return Split::test;
}

}  // namespace

void SyntheticSpec::validate() const {
  if (n_pairs < 1 || d_latent < 1 || d_x < 1 || d_y < 1)
    throw ArgumentError("synthetic spec: n_pairs, d_latent, d_x and d_y must all be >= 1");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma))
    throw ArgumentError("synthetic spec: noise_sigma must be finite and >= 0");
  if (identity_maps) {
    if (d_x != d_latent || d_y != d_latent)
      throw ArgumentError("synthetic spec: identity maps need d_x == d_y == d_latent");
  } else if (d_x < d_latent || d_y < d_latent) {
    throw ArgumentError("synthetic spec: orthonormal mixing needs d_x and d_y >= d_latent");
  }
}

Matrix random_orthonormal_columns(std::size_t d, std::size_t k, Rng& rng) {
  if (k > d) throw ArgumentError("random_orthonormal_columns: k > d");
  Matrix q(d, k);
  for (double& v : q.values()) v = rng.normal();
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t prev = 0; prev < c; ++prev) {
      double dot = 0.0;
      for (std::size_t r = 0; r < d; ++r) dot += q(r, c) * q(r, prev);
      for (std::size_t r = 0; r < d; ++r) q(r, c) -= dot * q(r, prev);
    }
    double norm = 0.0;
    for (std::size_t r = 0; r < d; ++r) norm += q(r, c) * q(r, c);
    norm = std::sqrt(norm);
    if (norm < 1e-12) throw NumericError("random_orthonormal_columns: rank-deficient draw");
    for (std::size_t r = 0; r < d; ++r) q(r, c) /= norm;
  }
  return q;
}

SyntheticData synth_generate(const SyntheticSpec& spec) {
  spec.validate();
  const Rng root(spec.seed);
  Matrix a, c;
  if (spec.identity_maps) {
    a = Matrix::identity(spec.d_latent);
    c = Matrix::identity(spec.d_latent);
  } else {
    Rng maps = root.fork("mixing");
    a = random_orthonormal_columns(spec.d_x, spec.d_latent, maps);
    c = random_orthonormal_columns(spec.d_y, spec.d_latent, maps);
  }

  const std::size_t n = spec.n_pairs;
  const double sigma = spec.noise_sigma;
  SyntheticData data;
  data.x.matrix = Matrix(n, spec.d_x);
  data.y.matrix = Matrix(n, spec.d_y);
  std::vector<Matrix> words;
  const Rng items = root.fork("samples");
  std::vector<double> z(spec.d_latent);

  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = items.fork(static_cast<std::uint64_t>(i));
    for (double& v : z) v = rng.normal();

    const auto ax = mix(a, z);
    auto xrow = data.x.matrix.row(i);
    for (std::size_t r = 0; r < ax.size(); ++r) xrow[r] = ax[r] + sigma * rng.normal();

    const auto cy = mix(c, z);
    auto yrow = data.y.matrix.row(i);
    if (spec.caption_words == 0) {
      for (std::size_t r = 0; r < cy.size(); ++r) yrow[r] = cy[r] + sigma * rng.normal();
    } else {
      const std::size_t count = 1 + rng.below(2 * spec.caption_words - 1);
      Matrix w(count, spec.d_y);
      for (std::size_t k = 0; k < count; ++k)
        for (std::size_t r = 0; r < cy.size(); ++r) w(k, r) = cy[r] + sigma * rng.normal();
      Rng unused(0);
      const auto mean = pool_caption_words(w, count, unused, PoolingMode::eval);
      std::copy(mean.begin(), mean.end(), yrow.begin());
      words.push_back(std::move(w));
    }

    const auto suffix = std::to_string(i);
    data.x.ids.push_back("v" + suffix);
    data.y.ids.push_back("c" + suffix);
    data.manifest.pairs.push_back({"p" + suffix, "v" + suffix, "c" + suffix, split_for(i, n)});
  }
  if (spec.caption_words > 0) data.y_words = flatten_caption_words(data.y.ids, words);
  return data;
}

}  // namespace amm
