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

#ifndef SEMOOD_DENSITY_HPP
#define SEMOOD_DENSITY_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "semood/numerics.hpp"
#include "semood/tensor.hpp"

namespace semood {

enum class ProjectionKind {
  kWithinClass,  // top eigenvectors of the pooled within-class scatter
  kPca,          // top eigenvectors of the total scatter
};

/// x ↦ Wᵀ(x − mean), W with orthonormal columns.
struct ProjectionModel {
  std::size_t input_dim = 0;
  std::size_t target_dim = 0;
  std::vector<double> mean;
  Matrix basis;                         // input_dim × target_dim
  std::vector<double> captured;         // eigenvalues kept, descending

  bool operator==(const ProjectionModel&) const = default;
};

/// S_W = Σ_k Σ_{i∈k} (x_i − m_k)(x_i − m_k)ᵀ / N.
SymMatrix within_class_scatter(const Matrix& x, std::span<const int> labels);

ProjectionModel fit_within_class_projection(const Matrix& x, std::span<const int> labels,
                                            std::size_t target_dim);

/// Ordinary PCA: the within-class fit with every sample in one class.
ProjectionModel fit_pca_projection(const Matrix& x, std::size_t target_dim);

std::vector<double> project(const ProjectionModel& p, std::span<const double> x);

/// Diagonal-covariance Gaussian mixture. Per-component normalisers are
/// precomputed at construction, so instances are immutable.
class GmmModel {
 public:
  GmmModel() = default;
  GmmModel(std::vector<double> weights, Matrix means, Matrix variances);

  std::size_t components() const noexcept { return weights_.size(); }
  std::size_t dim() const noexcept { return means_.cols; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const Matrix& means() const noexcept { return means_; }
  const Matrix& variances() const noexcept { return variances_; }

  /// log λ_m + log N(x; α_m, β_m) for every component.
  void component_log_densities(std::span<const double> x, std::span<double> out) const;

  bool operator==(const GmmModel& other) const {
    return weights_ == other.weights_ && means_ == other.means_ &&
           variances_ == other.variances_;
  }

 private:
  std::vector<double> weights_;
  Matrix means_;
  Matrix variances_;
  std::vector<double> log_norm_;  // log λ_m − ½Σ_j log(2πβ_mj)
  Matrix inv_var_;
};

enum class GmmInit {
  kKmeansPlusPlus,  // D²-weighted seeding
  kRandomPoints,    // M distinct uniformly chosen samples
};

struct GmmOptions {
  std::size_t max_iter = 200;
  double rel_tol = 1e-6;
  std::uint64_t seed = 0;
  double variance_floor = 1e-6;
  std::size_t restarts = 1;
  GmmInit init = GmmInit::kKmeansPlusPlus;
};

struct GmmFit {
  GmmModel model;
  std::vector<double> log_likelihood;  // mean per-sample, one entry per E-step
  std::size_t iterations = 0;
  bool converged = false;
};

/// Expectation-maximisation with diagonal covariances, variance floor applied
/// in every M-step. Stops when the relative change of the mean log-likelihood
/// drops below rel_tol, or after max_iter iterations.
GmmFit fit_gmm(const Matrix& x, std::size_t components, const GmmOptions& options = {});

double gmm_log_density(const GmmModel& g, std::span<const double> x);

/// ∇ₓ log p(x) = Σ_m r_m(x)·(−(x − α_m)/β_m).
std::vector<double> gmm_log_density_grad(const GmmModel& g, std::span<const double> x);

/// Mean of gmm_log_density over the rows.
double gmm_mean_log_likelihood(const GmmModel& g, const Matrix& x);

/// Optional projection followed by a mixture.
struct DensityPipeline {
  std::optional<ProjectionModel> projection;
  GmmModel gmm;

  std::size_t input_dim() const noexcept {
    return projection ? projection->input_dim : gmm.dim();
  }
  bool operator==(const DensityPipeline&) const = default;
};

/// Fits a mixture on `x`, first reducing to `max_dim` dimensions with the
/// chosen projection when the input is wider than that.
DensityPipeline fit_pipeline(const Matrix& x, std::span<const int> labels,
                             std::size_t components, std::size_t max_dim, ProjectionKind kind,
                             const GmmOptions& gmm);

double pipeline_log_density(const DensityPipeline& p, std::span<const double> x);
std::vector<double> pipeline_log_density_grad(const DensityPipeline& p,
                                              std::span<const double> x);

}  // namespace semood

#endif  // SEMOOD_DENSITY_HPP
