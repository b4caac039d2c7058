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

// Shared test helpers: brute-force metric oracles, random inputs drawn from
// the standard library generator (independent of the library's own RNG), and
// finite-difference utilities.

#ifndef SEMOOD_TESTS_SUPPORT_HPP
#define SEMOOD_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "semood/tensor.hpp"

namespace semood::testing {

/// Mean over all (id, ood) pairs of 1 / 0.5 / 0.
inline double oracle_auroc(std::span<const double> id, std::span<const double> ood) {
  double sum = 0.0;
  for (double a : id) {
    for (double b : ood) sum += a > b ? 1.0 : (a == b ? 0.5 : 0.0);
  }
  return sum / (static_cast<double>(id.size()) * static_cast<double>(ood.size()));
}

inline std::size_t count_at_least(std::span<const double> v, double t) {
  return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [&](double s) { return s >= t; }));
}

/// Sweeps every observed score as a threshold and keeps the largest one whose
/// TPR reaches `level`.
inline double oracle_fpr(std::span<const double> id, std::span<const double> ood, double level) {
  std::set<double> candidates(id.begin(), id.end());
  candidates.insert(ood.begin(), ood.end());
  double best = -INFINITY;
  for (double t : candidates) {
    const double tpr = static_cast<double>(count_at_least(id, t)) / static_cast<double>(id.size());
    if (tpr >= level) best = std::max(best, t);
  }
  return static_cast<double>(count_at_least(ood, best)) / static_cast<double>(ood.size());
}

/// Enumerates every distinct threshold from high to low, recounting the
/// confusion matrix from scratch at each, and sums ΔR·P.
inline double oracle_aupr(std::span<const double> id, std::span<const double> ood) {
  std::set<double, std::greater<>> thresholds(id.begin(), id.end());
  thresholds.insert(ood.begin(), ood.end());
  double area = 0.0, prev_recall = 0.0;
  for (double t : thresholds) {
    const double tp = static_cast<double>(count_at_least(id, t));
    const double fp = static_cast<double>(count_at_least(ood, t));
    const double recall = tp / static_cast<double>(id.size());
    area += (recall - prev_recall) * (tp / (tp + fp));
    prev_recall = recall;
  }
  return area;
}

inline std::vector<double> normal_vector(std::mt19937_64& gen, std::size_t n, double mean = 0.0,
                                         double sd = 1.0) {
  std::normal_distribution<double> d(mean, sd);
  std::vector<double> v(n);
  for (double& x : v) x = d(gen);
  return v;
}

inline Matrix normal_matrix(std::mt19937_64& gen, std::size_t rows, std::size_t cols,
                            double sd = 1.0) {
  Matrix m(rows, cols);
  m.values = normal_vector(gen, rows * cols, 0.0, sd);
  return m;
}

/// |a − b| relative to the larger magnitude; exact agreement near zero is
/// required down to `floor`.
inline double rel_error(double a, double b, double floor = 1e-10) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

/// Number of eigenvalues of the symmetric n×n matrix `a` below `sigma`: the
/// count of negative pivots in the LDLᵀ factorization of a − σI (Sylvester's
/// law of inertia). Zero pivots are nudged, which only matters on exact ties.
inline std::size_t count_below(const std::vector<double>& a, std::size_t n, double sigma) {
  std::vector<double> m = a;
  for (std::size_t i = 0; i < n; ++i) m[i * n + i] -= sigma;
  std::size_t negative = 0;
  for (std::size_t k = 0; k < n; ++k) {
    double pivot = m[k * n + k];
    if (pivot == 0.0) pivot = -1e-300;
    if (pivot < 0.0) ++negative;
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = m[i * n + k] / pivot;
      for (std::size_t j = k + 1; j < n; ++j) m[i * n + j] -= f * m[k * n + j];
    }
  }
  return negative;
}

/// Eigenvalues in descending order by bisection on inertia counts; an
/// eigensolver sharing nothing with the library's rotation method.
inline std::vector<double> oracle_eigenvalues(const std::vector<double>& a, std::size_t n) {
  double bound = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += std::abs(a[i * n + j]);
    bound = std::max(bound, row);
  }
  std::vector<double> out;
  for (std::size_t k = 0; k < n; ++k) {
    // k-th smallest: the least x with count_below(x) > k.
    double lo = -bound - 1.0, hi = bound + 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
      const double mid = 0.5 * (lo + hi);
      (count_below(a, n, mid) > k ? hi : lo) = mid;
    }
    out.push_back(0.5 * (lo + hi));
  }
  std::reverse(out.begin(), out.end());
  return out;
}

/// Unique scratch directory below the system temp dir, emptied on creation.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("semood_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace semood::testing

#endif  // SEMOOD_TESTS_SUPPORT_HPP
