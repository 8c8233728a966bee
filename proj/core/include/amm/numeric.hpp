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
#include <span>
#include <string>
#include <vector>

namespace amm {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  /// Takes ownership of `data`; throws ShapeError if its size is not rows*cols.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  /// Nested-list constructor for literals in tests and examples.
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

  /// "RxC" for error messages.
  std::string shape_string() const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// One modality's batch of feature vectors, one item per row.
using EmbeddingBatch = Matrix;

Matrix matmul(const Matrix& a, const Matrix& b);
/// a * b^T without materializing the transpose.
Matrix matmul_transposed(const Matrix& a, const Matrix& b);
/// a^T * b without materializing the transpose.
Matrix transposed_matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

/// Selects rows of `m` in the given order.
Matrix gather_rows(const Matrix& m, std::span<const std::size_t> indices);

/// log(sum(exp(v))) with max-shift. Throws ArgumentError on empty input.
double log_sum_exp(std::span<const double> v);

double sigmoid(double x) noexcept;

bool all_finite(std::span<const double> v) noexcept;

}  // namespace amm
