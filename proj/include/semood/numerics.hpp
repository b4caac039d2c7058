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

#ifndef SEMOOD_NUMERICS_HPP
#define SEMOOD_NUMERICS_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "semood/tensor.hpp"

namespace semood {

/// log(sum(exp(v))) with max-shift. Throws on empty input.
double logsumexp(std::span<const double> v);
double logsumexp(std::span<const float> v);

/// Tolerates -inf entries (an all -inf input yields -inf). Internal use by the
/// mixture code where a component weight may be exactly zero.
double logsumexp_extended(std::span<const double> v) noexcept;

/// exp(l_i / T) / sum_j exp(l_j / T). Throws on T <= 0 or empty input.
std::vector<double> softmax_temp(std::span<const double> logits, double temperature);
std::vector<double> softmax_temp(std::span<const float> logits, double temperature);

/// Symmetric matrix; construction symmetrizes so entries[i][j] == entries[j][i].
class SymMatrix {
 public:
  static constexpr std::size_t kMaxDim = 4096;

  SymMatrix() = default;
  explicit SymMatrix(std::size_t dim) : dim_(dim), entries_(dim * dim, 0.0) {}

  /// Takes a dim×dim row-major array and stores (A + Aᵀ)/2.
  static SymMatrix from_dense(std::size_t dim, std::span<const double> entries);

  std::size_t dim() const noexcept { return dim_; }
  double operator()(std::size_t i, std::size_t j) const noexcept {
    return entries_[i * dim_ + j];
  }
  /// Writes both (i, j) and (j, i).
  void set(std::size_t i, std::size_t j, double value) noexcept {
    entries_[i * dim_ + j] = value;
    entries_[j * dim_ + i] = value;
  }
  void add(std::size_t i, std::size_t j, double value) noexcept {
    entries_[i * dim_ + j] += value;
    if (i != j) entries_[j * dim_ + i] += value;
  }
  std::span<const double> entries() const noexcept { return entries_; }

 private:
  std::size_t dim_ = 0;
  std::vector<double> entries_;
};

struct EigenDecomposition {
  std::vector<double> values;  // descending
  Matrix vectors;              // dim×dim, eigenvector k in column k
};

/// Cyclic Jacobi eigensolver. Eigenvalues are sorted descending and each
/// eigenvector is oriented so its first entry with magnitude above 1e-12 is
/// nonnegative.
EigenDecomposition sym_eigen(const SymMatrix& m);

}  // namespace semood

#endif  // SEMOOD_NUMERICS_HPP
