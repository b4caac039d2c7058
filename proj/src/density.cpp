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

#include "semood/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "semood/rng.hpp"

namespace semood {

// ---------------------------------------------------------------------------
// Projection

SymMatrix within_class_scatter(const Matrix& x, std::span<const int> labels) {
  require(labels.size() == x.rows, ErrorCode::kShapeMismatch,
          "within_class_scatter: " + std::to_string(labels.size()) + " labels for " +
              std::to_string(x.rows) + " samples");
  const std::size_t d = x.cols;
  std::map<int, std::size_t> slot;
  for (int y : labels) slot.emplace(y, slot.size());
  Matrix means(slot.size(), d);
  std::vector<std::size_t> counts(slot.size(), 0);
  for (std::size_t i = 0; i < x.rows; ++i) {
    const std::size_t k = slot[labels[i]];
    ++counts[k];
    for (std::size_t j = 0; j < d; ++j) means(k, j) += x(i, j);
  }
  for (std::size_t k = 0; k < counts.size(); ++k)
    for (std::size_t j = 0; j < d; ++j) means(k, j) /= static_cast<double>(counts[k]);

  std::vector<double> acc(d * d, 0.0);
  std::vector<double> centered(d);
  for (std::size_t i = 0; i < x.rows; ++i) {
    const std::size_t k = slot[labels[i]];
    for (std::size_t j = 0; j < d; ++j) centered[j] = x(i, j) - means(k, j);
    for (std::size_t a = 0; a < d; ++a) {
      const double ca = centered[a];
      if (ca == 0.0) continue;
      double* row = acc.data() + a * d;
      for (std::size_t b = a; b < d; ++b) row[b] += ca * centered[b];
    }
  }
  SymMatrix s(d);
  const double inv_n = 1.0 / static_cast<double>(x.rows);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a; b < d; ++b) s.set(a, b, acc[a * d + b] * inv_n);
  return s;
}

ProjectionModel fit_within_class_projection(const Matrix& x, std::span<const int> labels,
                                            std::size_t target_dim) {
  require(x.rows >= 2, ErrorCode::kInvalidArgument, "projection: need at least 2 samples");
  require(target_dim >= 1 && target_dim <= x.cols, ErrorCode::kInvalidArgument,
          "projection: target dim " + std::to_string(target_dim) + " must be in [1, " +
              std::to_string(x.cols) + "]");
  for (double v : x.values) {
    require(std::isfinite(v), ErrorCode::kNumeric, "projection: non-finite data");
  }
  const SymMatrix scatter = within_class_scatter(x, labels);
  double trace = 0.0;
  for (std::size_t j = 0; j < scatter.dim(); ++j) trace += scatter(j, j);
  require(trace > 0.0, ErrorCode::kNumeric, "projection: degenerate scatter");

  const EigenDecomposition eig = sym_eigen(scatter);
  ProjectionModel p;
  p.input_dim = x.cols;
  p.target_dim = target_dim;
  p.mean.assign(x.cols, 0.0);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t j = 0; j < x.cols; ++j) p.mean[j] += x(i, j);
  for (double& m : p.mean) m /= static_cast<double>(x.rows);
  p.basis = Matrix(x.cols, target_dim);
  for (std::size_t j = 0; j < x.cols; ++j)
    for (std::size_t k = 0; k < target_dim; ++k) p.basis(j, k) = eig.vectors(j, k);
  p.captured.assign(eig.values.begin(), eig.values.begin() + static_cast<std::ptrdiff_t>(target_dim));
  return p;
}

ProjectionModel fit_pca_projection(const Matrix& x, std::size_t target_dim) {
  const std::vector<int> one_class(x.rows, 0);
  return fit_within_class_projection(x, one_class, target_dim);
}

std::vector<double> project(const ProjectionModel& p, std::span<const double> x) {
  require(x.size() == p.input_dim, ErrorCode::kShapeMismatch,
          "project: input has dimension " + std::to_string(x.size()) + ", expected " +
              std::to_string(p.input_dim));
  std::vector<double> out(p.target_dim, 0.0);
  for (std::size_t j = 0; j < p.input_dim; ++j) {
    const double c = x[j] - p.mean[j];
    if (c == 0.0) continue;
    for (std::size_t k = 0; k < p.target_dim; ++k) out[k] += p.basis(j, k) * c;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Mixture model

GmmModel::GmmModel(std::vector<double> weights, Matrix means, Matrix variances)
    : weights_(std::move(weights)), means_(std::move(means)), variances_(std::move(variances)) {
  const std::size_t m = weights_.size();
  require(m >= 1, ErrorCode::kInvalidArgument, "gmm: need at least one component");
  require(means_.rows == m && variances_.rows == m && means_.cols == variances_.cols,
          ErrorCode::kShapeMismatch, "gmm: inconsistent parameter shapes");
  log_norm_.resize(m);
  inv_var_ = Matrix(m, means_.cols);
  for (std::size_t k = 0; k < m; ++k) {
    require(std::isfinite(weights_[k]) && weights_[k] >= 0.0, ErrorCode::kNumeric,
            "gmm: invalid mixture weight");
    double s = weights_[k] > 0.0 ? std::log(weights_[k])
                                 : -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < means_.cols; ++j) {
      const double v = variances_(k, j);
      require(std::isfinite(v) && v > 0.0 && std::isfinite(means_(k, j)), ErrorCode::kNumeric,
              "gmm: invalid mean or variance");
      s -= 0.5 * std::log(2.0 * M_PI * v);
      inv_var_(k, j) = 1.0 / v;
    }
    log_norm_[k] = s;
  }
}

void GmmModel::component_log_densities(std::span<const double> x, std::span<double> out) const {
  const std::size_t d = dim();
  for (std::size_t k = 0; k < components(); ++k) {
    const double* mu = means_.values.data() + k * d;
    const double* iv = inv_var_.values.data() + k * d;
    double q = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = x[j] - mu[j];
      q += diff * diff * iv[j];
    }
    out[k] = log_norm_[k] - 0.5 * q;
  }
}

double gmm_log_density(const GmmModel& g, std::span<const double> x) {
  require(x.size() == g.dim(), ErrorCode::kShapeMismatch,
          "gmm_log_density: input has dimension " + std::to_string(x.size()) +
              ", expected " + std::to_string(g.dim()));
  std::vector<double> comp(g.components());
  g.component_log_densities(x, comp);
  return logsumexp_extended(comp);
}

std::vector<double> gmm_log_density_grad(const GmmModel& g, std::span<const double> x) {
  require(x.size() == g.dim(), ErrorCode::kShapeMismatch,
          "gmm_log_density_grad: input has dimension " + std::to_string(x.size()) +
              ", expected " + std::to_string(g.dim()));
  std::vector<double> comp(g.components());
  g.component_log_densities(x, comp);
  const double total = logsumexp_extended(comp);
  require(std::isfinite(total), ErrorCode::kNumeric, "gmm_log_density_grad: zero density");
  std::vector<double> grad(g.dim(), 0.0);
  for (std::size_t k = 0; k < g.components(); ++k) {
    const double r = std::exp(comp[k] - total);
    if (r == 0.0) continue;
    for (std::size_t j = 0; j < g.dim(); ++j) {
      grad[j] -= r * (x[j] - g.means()(k, j)) / g.variances()(k, j);
    }
  }
  return grad;
}

double gmm_mean_log_likelihood(const GmmModel& g, const Matrix& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) s += gmm_log_density(g, x.row(i));
  return s / static_cast<double>(x.rows);
}

namespace {

std::vector<std::size_t> seed_centers(const Matrix& x, std::size_t m, GmmInit init, Rng& rng) {
  std::vector<std::size_t> centers;
  if (init == GmmInit::kRandomPoints) {
    std::vector<std::size_t> idx(x.rows);
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    rng.shuffle(std::span<std::size_t>(idx));
    centers.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(m));
    return centers;
  }
  centers.push_back(rng.below(x.rows));
  std::vector<double> d2(x.rows, std::numeric_limits<double>::infinity());
  while (centers.size() < m) {
    const auto c = x.row(centers.back());
    double total = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) {
      const auto r = x.row(i);
      double s = 0.0;
      for (std::size_t j = 0; j < x.cols; ++j) s += (r[j] - c[j]) * (r[j] - c[j]);
      d2[i] = std::min(d2[i], s);
      total += d2[i];
    }
    if (!(total > 0.0)) {
      centers.push_back(rng.below(x.rows));
      continue;
    }
    double target = rng.uniform() * total;
    std::size_t pick = x.rows - 1;
    for (std::size_t i = 0; i < x.rows; ++i) {
      target -= d2[i];
      if (target < 0.0 && d2[i] > 0.0) {
        pick = i;
        break;
      }
    }
    centers.push_back(pick);
  }
  return centers;
}

GmmFit fit_once(const Matrix& x, std::size_t m, const GmmOptions& opt, Rng rng) {
  const std::size_t n = x.rows;
  const std::size_t d = x.cols;
  const double floor = opt.variance_floor;

  std::vector<double> global_mean(d, 0.0), global_var(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) global_mean[j] += x(i, j);
  for (double& v : global_mean) v /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const double c = x(i, j) - global_mean[j];
      global_var[j] += c * c;
    }
  for (double& v : global_var) v = std::max(v / static_cast<double>(n), floor);

  std::vector<double> weights(m, 1.0 / static_cast<double>(m));
  Matrix means(m, d), vars(m, d);
  const auto centers = seed_centers(x, m, opt.init, rng);
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t j = 0; j < d; ++j) {
      means(k, j) = x(centers[k], j);
      vars(k, j) = global_var[j];
    }

  GmmFit fit;
  fit.model = GmmModel(weights, means, vars);
  Matrix resp(n, m);
  std::vector<double> comp(m);
  for (std::size_t iter = 0;; ++iter) {
    // E-step.
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      fit.model.component_log_densities(x.row(i), comp);
      const double lse = logsumexp_extended(comp);
      ll += lse;
      for (std::size_t k = 0; k < m; ++k) resp(i, k) = std::exp(comp[k] - lse);
    }
    ll /= static_cast<double>(n);
    require(std::isfinite(ll), ErrorCode::kNumeric, "fit_gmm: non-finite log-likelihood");
    if (!fit.log_likelihood.empty()) {
      const double prev = fit.log_likelihood.back();
      const double change = std::abs(ll - prev) / (prev != 0.0 ? std::abs(prev) : 1.0);
      fit.log_likelihood.push_back(ll);
      if (change < opt.rel_tol) {
        fit.converged = true;
        break;
      }
    } else {
      fit.log_likelihood.push_back(ll);
    }
    if (iter >= opt.max_iter) break;

    // M-step.
    for (std::size_t k = 0; k < m; ++k) {
      double nk = 0.0;
      for (std::size_t i = 0; i < n; ++i) nk += resp(i, k);
      weights[k] = nk / static_cast<double>(n);
      if (nk <= 1e-12 * static_cast<double>(n)) continue;  // keep a starved component in place
      for (std::size_t j = 0; j < d; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += resp(i, k) * x(i, j);
        means(k, j) = s / nk;
      }
      for (std::size_t j = 0; j < d; ++j) {
        double s = 0.0;
        const double mu = means(k, j);
        for (std::size_t i = 0; i < n; ++i) {
          const double c = x(i, j) - mu;
          s += resp(i, k) * c * c;
        }
        vars(k, j) = std::max(s / nk, floor);
      }
    }
    fit.model = GmmModel(weights, means, vars);
    fit.iterations = iter + 1;
  }
  return fit;
}

}  // namespace

GmmFit fit_gmm(const Matrix& x, std::size_t components, const GmmOptions& options) {
  require(components >= 1, ErrorCode::kInvalidArgument, "fit_gmm: need at least 1 component");
  require(x.rows >= components, ErrorCode::kInvalidArgument,
          "fit_gmm: " + std::to_string(x.rows) + " samples for " +
              std::to_string(components) + " components");
  require(x.cols >= 1, ErrorCode::kInvalidArgument, "fit_gmm: zero-dimensional data");
  require(options.variance_floor > 0.0, ErrorCode::kInvalidArgument,
          "fit_gmm: variance floor must be positive");
  for (double v : x.values) {
    require(std::isfinite(v), ErrorCode::kNumeric, "fit_gmm: non-finite data");
  }
  const Rng root(options.seed);
  GmmFit best;
  bool have = false;
  for (std::size_t r = 0; r < std::max<std::size_t>(options.restarts, 1); ++r) {
    GmmFit fit = fit_once(x, components, options, root.derive(r));
    if (!have || fit.log_likelihood.back() > best.log_likelihood.back()) {
      best = std::move(fit);
      have = true;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Pipeline

DensityPipeline fit_pipeline(const Matrix& x, std::span<const int> labels,
                             std::size_t components, std::size_t max_dim, ProjectionKind kind,
                             const GmmOptions& gmm) {
  DensityPipeline p;
  if (x.cols <= max_dim) {
    p.gmm = fit_gmm(x, components, gmm).model;
    return p;
  }
  p.projection = kind == ProjectionKind::kWithinClass
                     ? fit_within_class_projection(x, labels, max_dim)
                     : fit_pca_projection(x, max_dim);
  Matrix z(x.rows, max_dim);
  for (std::size_t i = 0; i < x.rows; ++i) {
    const auto zi = project(*p.projection, x.row(i));
    std::copy(zi.begin(), zi.end(), z.row(i).begin());
  }
  p.gmm = fit_gmm(z, components, gmm).model;
  return p;
}

double pipeline_log_density(const DensityPipeline& p, std::span<const double> x) {
  if (!p.projection) return gmm_log_density(p.gmm, x);
  const std::vector<double> z = project(*p.projection, x);
  return gmm_log_density(p.gmm, z);
}

std::vector<double> pipeline_log_density_grad(const DensityPipeline& p,
                                              std::span<const double> x) {
  if (!p.projection) return gmm_log_density_grad(p.gmm, x);
  const ProjectionModel& proj = *p.projection;
  const std::vector<double> gz = gmm_log_density_grad(p.gmm, project(proj, x));
  std::vector<double> gx(proj.input_dim, 0.0);
  for (std::size_t j = 0; j < proj.input_dim; ++j)
    for (std::size_t k = 0; k < proj.target_dim; ++k) gx[j] += proj.basis(j, k) * gz[k];
  return gx;
}

}  // namespace semood
