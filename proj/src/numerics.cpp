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

#include "semood/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "semood/rng.hpp"

namespace semood {

std::string shape_to_string(const Shape& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

Matrix to_matrix(const Tensor& t) {
  require(t.rank() == 1 || t.rank() == 2, ErrorCode::kShapeMismatch,
          "expected a rank-1 or rank-2 tensor, got shape " + shape_to_string(t.shape()));
  const std::size_t rows = t.dim(0);
  const std::size_t cols = t.rank() == 2 ? t.dim(1) : 1;
  Matrix m(rows, cols);
  std::copy(t.storage().begin(), t.storage().end(), m.values.begin());
  return m;
}

Tensor to_tensor(const Matrix& m) {
  std::vector<float> data(m.values.size());
  std::transform(m.values.begin(), m.values.end(), data.begin(),
                 [](double v) { return static_cast<float>(v); });
  return Tensor({m.rows, m.cols}, std::move(data));
}

// ---------------------------------------------------------------------------
// Rng samplers

std::size_t Rng::below(std::size_t n) noexcept {
  if (n <= 1) return 0;
  const auto bound = static_cast<std::uint64_t>(n);
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const unsigned __int128 product =
        static_cast<unsigned __int128>(next_u64()) * bound;
    if (static_cast<std::uint64_t>(product) >= threshold) {
      return static_cast<std::size_t>(product >> 64);
    }
  }
}

double Rng::normal() noexcept {
  const double u1 = uniform_open();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double Rng::gamma(double shape) noexcept {
  if (shape < 1.0) {
    // Gamma(a) = Gamma(a + 1) * U^(1/a)
    const double g = gamma(shape + 1.0);
    return g * std::pow(uniform_open(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_open();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double Rng::beta(double a, double b) noexcept {
  const double x = gamma(a);
  const double y = gamma(b);
  return x / (x + y);
}

// ---------------------------------------------------------------------------
// Reductions

namespace {

template <class T>
double logsumexp_impl(std::span<const T> v) {
  require(!v.empty(), ErrorCode::kInvalidArgument, "logsumexp: empty input");
  double hi = -std::numeric_limits<double>::infinity();
  for (T x : v) hi = std::max(hi, static_cast<double>(x));
  require(std::isfinite(hi), ErrorCode::kNumeric, "logsumexp: non-finite input");
  double sum = 0.0;
  for (T x : v) sum += std::exp(static_cast<double>(x) - hi);
  return hi + std::log(sum);
}

template <class T>
std::vector<double> softmax_impl(std::span<const T> logits, double temperature) {
  require(temperature > 0.0, ErrorCode::kInvalidArgument,
          "softmax_temp: nonpositive temperature");
  require(!logits.empty(), ErrorCode::kInvalidArgument, "softmax_temp: empty input");
  std::vector<double> out(logits.size());
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = static_cast<double>(logits[i]) / temperature;
    hi = std::max(hi, out[i]);
  }
  double sum = 0.0;
  for (double& x : out) {
    x = std::exp(x - hi);
    sum += x;
  }
  for (double& x : out) x /= sum;
  return out;
}

}  // namespace

double logsumexp(std::span<const double> v) { return logsumexp_impl(v); }
double logsumexp(std::span<const float> v) { return logsumexp_impl(v); }

double logsumexp_extended(std::span<const double> v) noexcept {
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : v) hi = std::max(hi, x);
  if (!std::isfinite(hi)) return hi;
  double sum = 0.0;
  for (double x : v) sum += std::exp(x - hi);
  return hi + std::log(sum);
}

std::vector<double> softmax_temp(std::span<const double> logits, double temperature) {
  return softmax_impl(logits, temperature);
}

std::vector<double> softmax_temp(std::span<const float> logits, double temperature) {
  return softmax_impl(logits, temperature);
}

// ---------------------------------------------------------------------------
// Symmetric eigendecomposition

SymMatrix SymMatrix::from_dense(std::size_t dim, std::span<const double> entries) {
  require(entries.size() == dim * dim, ErrorCode::kShapeMismatch,
          "SymMatrix: expected " + std::to_string(dim * dim) + " entries");
  SymMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    m.entries_[i * dim + i] = entries[i * dim + i];
    for (std::size_t j = i + 1; j < dim; ++j) {
      m.set(i, j, 0.5 * (entries[i * dim + j] + entries[j * dim + i]));
    }
  }
  return m;
}

EigenDecomposition sym_eigen(const SymMatrix& m) {
  const std::size_t n = m.dim();
  require(n <= SymMatrix::kMaxDim, ErrorCode::kInvalidArgument,
          "sym_eigen: dimension " + std::to_string(n) + " exceeds cap");
  for (double x : m.entries()) {
    require(std::isfinite(x), ErrorCode::kNumeric, "sym_eigen: non-finite entry");
  }

  std::vector<double> a(m.entries().begin(), m.entries().end());
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  double total = 0.0;
  for (double x : a) total += x * x;

  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
    if (off <= 1e-30 * total || off == 0.0) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double app = a[p * n + p];
        const double aqq = a[q * n + q];
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p];
          const double akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k];
          const double aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        a[p * n + q] = 0.0;
        a[q * n + p] = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k * n + p];
          const double vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a[i * n + i] > a[j * n + j];
  });

  EigenDecomposition out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    out.values[k] = a[src * n + src];
    double sign = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = v[i * n + src];
      if (std::abs(x) > 1e-12) {
        sign = x < 0.0 ? -1.0 : 1.0;
        break;
      }
    }
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = sign * v[i * n + src];
  }
  return out;
}

}  // namespace semood
