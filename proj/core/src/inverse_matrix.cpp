// Copyright 2026 The Inverse QRE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "qre/inverse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace qre {

namespace {

double rank_threshold(const Vector& sigma, Eigen::Index rows,
                      Eigen::Index cols) {
  if (sigma.size() == 0) return 0.0;
  return sigma[0] * static_cast<double>(std::max(rows, cols)) * 1e-12;
}

void check_positive(const Vector& p, const char* who) {
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!(p[i] > 0.0)) {
      throw NumericalError(std::string("nonpositive probability in ") + who +
                           " at index " + std::to_string(i) +
                           "; floor the estimate first");
    }
  }
}

Vector uniform_on_sphere(Eigen::Index dim, CounterRng& rng) {
  Vector z(dim);
  double norm = 0.0;
  do {
    for (Eigen::Index i = 0; i < dim; ++i) z[i] = rng.normal();
    norm = z.norm();
  } while (norm == 0.0);
  return z / norm;
}

}  // namespace

Vector floor_distribution(const Vector& p, double floor) {
  return p.cwiseMax(floor);
}

PolicyPair floor_policies(const PolicyPair& policies, double floor) {
  return {floor_distribution(policies.mu, floor),
          floor_distribution(policies.nu, floor)};
}

LinearSystem build_linear_system(const MatrixFeatures& features,
                                 const PolicyPair& policies, double eta) {
  const int m = features.m;
  const int n = features.n;
  const int d = features.d;
  if (policies.mu.size() != m || policies.nu.size() != n) {
    throw DimensionError("policy lengths do not match the feature table");
  }
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  check_positive(policies.mu, "mu");
  check_positive(policies.nu, "nu");

  LinearSystem sys;
  sys.eta = eta;
  sys.X = Matrix::Zero(m + n - 2, d);
  sys.y = Vector::Zero(m + n - 2);
  for (int a = 1; a < m; ++a) {
    for (int b = 0; b < n; ++b) {
      sys.X.row(a - 1) += policies.nu[b] *
                          (features.table.row(features.index(a, b)) -
                           features.table.row(features.index(0, b)));
    }
    sys.y[a - 1] = std::log(policies.mu[a] / policies.mu[0]) / eta;
  }
  for (int b = 1; b < n; ++b) {
    const Eigen::Index row = m - 1 + b - 1;
    for (int a = 0; a < m; ++a) {
      sys.X.row(row) += policies.mu[a] *
                        (features.table.row(features.index(a, b)) -
                         features.table.row(features.index(a, 0)));
    }
    sys.y[row] = -std::log(policies.nu[b] / policies.nu[0]) / eta;
  }
  return sys;
}

RankReport rank_condition(const Matrix& X, int d) {
  RankReport out;
  if (X.size() == 0) return out;
  Eigen::JacobiSVD<Matrix> svd(X);
  out.singular_values = svd.singularValues();
  const double thr = rank_threshold(out.singular_values, X.rows(), X.cols());
  for (Eigen::Index i = 0; i < out.singular_values.size(); ++i) {
    if (out.singular_values[i] > thr) ++out.rank;
  }
  out.full_rank = out.rank == d;
  return out;
}

Vector least_squares_theta(const LinearSystem& system) {
  const int d = static_cast<int>(system.dim());
  const RankReport rank = rank_condition(system.X, d);
  if (!rank.full_rank) {
    throw SingularSystemError("normal matrix is singular (rank " +
                              std::to_string(rank.rank) + " < " +
                              std::to_string(d) +
                              "); the parameter is only partially identified");
  }
  const Matrix gram = system.X.transpose() * system.X;
  Eigen::LDLT<Matrix> ldlt(gram);
  if (ldlt.info() != Eigen::Success) {
    throw SingularSystemError("LDLT factorization of the normal matrix failed");
  }
  return ldlt.solve(system.X.transpose() * system.y);
}

Matrix pseudo_inverse(const Matrix& X) {
  Eigen::JacobiSVD<Matrix> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sigma = svd.singularValues();
  const double thr = rank_threshold(sigma, X.rows(), X.cols());
  Vector inv = Vector::Zero(sigma.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma[i] > thr) inv[i] = 1.0 / sigma[i];
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Vector min_norm_theta(const LinearSystem& system) {
  return pseudo_inverse(system.X) * system.y;
}

Matrix null_space_basis(const Matrix& X) {
  const Eigen::Index d = X.cols();
  if (X.rows() == 0) return Matrix::Identity(d, d);
  Eigen::JacobiSVD<Matrix> svd(X, Eigen::ComputeFullV);
  const Vector& sigma = svd.singularValues();
  const double thr = rank_threshold(sigma, X.rows(), X.cols());
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma[i] > thr) ++rank;
  }
  return svd.matrixV().rightCols(d - rank);
}

// ---------------------------------------------------------------------------
// ConfidenceSet

ConfidenceSet::ConfidenceSet(Matrix X, Vector y, double kappa, double radius)
    : X_(std::move(X)), y_(std::move(y)), kappa_(kappa), radius_(radius) {
  if (X_.rows() != y_.size()) {
    throw DimensionError("confidence set: X and y row counts differ");
  }
  if (!(kappa_ >= 0.0)) throw std::invalid_argument("kappa must be >= 0");
  if (!(radius_ > 0.0)) throw std::invalid_argument("bound must be > 0");
  const Eigen::Index d = X_.cols();
  singular_ = Vector::Zero(d);  // padded with zeros when rows < d
  if (X_.rows() == 0) {
    basis_ = Matrix::Identity(d, d);
    rotated_y_ = Vector::Zero(d);
    return;
  }
  Eigen::JacobiSVD<Matrix> svd(X_, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const Vector& sigma = svd.singularValues();
  basis_ = svd.matrixV();
  singular_.head(sigma.size()) = sigma;
  rotated_y_ = Vector::Zero(d);
  const Vector w = svd.matrixU().transpose() * y_;
  rotated_y_.head(w.size()) = w;
}

double ConfidenceSet::residual_sq(const Vector& theta) const {
  if (theta.size() != X_.cols()) {
    throw DimensionError("confidence set: parameter dimension mismatch");
  }
  return (X_ * theta - y_).squaredNorm();
}

bool ConfidenceSet::contains(const Vector& theta, double tol) const {
  return residual_sq(theta) <= kappa_ + tol && theta.norm() <= radius_ + tol;
}

Projection ConfidenceSet::project_ellipsoid(const Vector& point) const {
  if (residual_sq(point) <= kappa_) return {point, false};

  const Eigen::Index d = X_.cols();
  const Vector& sigma = singular_;
  const Vector& w = rotated_y_;
  const Vector q = basis_.transpose() * point;
  const double thr = rank_threshold(sigma, X_.rows(), d);
  const double unexplained =
      std::max(0.0, y_.squaredNorm() - w.squaredNorm());

  auto coords = [&](double lambda) {
    Vector t(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      t[i] = (q[i] + lambda * sigma[i] * w[i]) /
             (1.0 + lambda * sigma[i] * sigma[i]);
    }
    return t;
  };
  auto residual = [&](const Vector& t) {
    double r = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      const double e = sigma[i] * t[i] - w[i];
      r += e * e;
    }
    return r + unexplained;
  };

  Vector limit(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    limit[i] = sigma[i] > thr ? w[i] / sigma[i] : q[i];
  }
  const double limit_residual = residual(limit);
  if (limit_residual >= kappa_) {
    const double slack = 1e-14 * (1.0 + y_.squaredNorm());
    return {basis_ * limit, limit_residual > kappa_ + slack};
  }

  const double scale = sigma[0] > 0.0 ? 1.0 / (sigma[0] * sigma[0]) : 1.0;
  double lo = 0.0;
  double hi = scale;
  while (residual(coords(hi)) > kappa_) {
    lo = hi;
    hi *= 10.0;
    if (hi > 1e40 * scale) return {basis_ * limit, false};
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = lo > 0.0 ? std::sqrt(lo * hi) : 0.5 * hi;
    if (mid <= lo || mid >= hi) break;
    if (residual(coords(mid)) > kappa_) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-15 * hi) break;
  }
  return {basis_ * coords(hi), false};
}

Projection ConfidenceSet::project(const Vector& point) const {
  if (point.size() != X_.cols()) {
    throw DimensionError("confidence set: point dimension mismatch");
  }
  Projection full = project_ellipsoid(point);
  if (full.empty || full.point.norm() <= radius_) return full;

  Projection origin = project_ellipsoid(Vector::Zero(point.size()));
  if (origin.empty || origin.point.norm() > radius_ * (1.0 + 1e-12)) {
    origin.empty = true;
    return origin;
  }
  // theta(t) = Proj_E(t p) meets the sphere for some t in (0, 1).
  double lo = 0.0;
  double hi = 1.0;
  Projection best = origin;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    Projection cand = project_ellipsoid(mid * point);
    if (cand.point.norm() <= radius_) {
      lo = mid;
      best = std::move(cand);
    } else {
      hi = mid;
    }
  }
  return best;
}

double ConfidenceSet::distance(const Vector& point) const {
  return (point - project(point).point).norm();
}

std::vector<Vector> ConfidenceSet::sample(std::size_t count,
                                          CounterRng& rng) const {
  if (empty()) throw NumericalError("confidence set is empty");
  std::vector<Vector> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const Vector far = 4.0 * radius_ * uniform_on_sphere(dim(), rng);
    out.push_back(project(far).point);
  }
  return out;
}

ConfidenceSet build_confidence_set(const MatrixFeatures& features,
                                   const PolicyPair& empirical, double eta,
                                   double kappa, double norm_bound_sq) {
  LinearSystem sys =
      build_linear_system(features, floor_policies(empirical), eta);
  return ConfidenceSet(std::move(sys.X), std::move(sys.y), kappa,
                       std::sqrt(norm_bound_sq));
}

// ---------------------------------------------------------------------------
// FeasibleSet

FeasibleSet::FeasibleSet(const Matrix& X, const Vector& y, double radius)
    : X_(X), y_(y), radius_(radius) {
  if (X.rows() != y.size()) {
    throw DimensionError("feasible set: X and y row counts differ");
  }
  if (!(radius > 0.0)) throw std::invalid_argument("bound must be > 0");
  particular_ = pseudo_inverse(X) * y;
  null_basis_ = null_space_basis(X);
}

bool FeasibleSet::empty() const { return particular_.norm() > radius_; }

double FeasibleSet::slack_radius() const {
  return std::sqrt(
      std::max(0.0, radius_ * radius_ - particular_.squaredNorm()));
}

bool FeasibleSet::contains(const Vector& theta, double tol) const {
  return (X_ * theta - y_).lpNorm<Eigen::Infinity>() <= tol &&
         theta.norm() <= radius_ + tol;
}

Vector FeasibleSet::project(const Vector& point) const {
  if (empty()) throw NumericalError("feasible set is empty");
  Vector z = null_basis_.transpose() * (point - particular_);
  const double slack = slack_radius();
  const double norm = z.norm();
  if (norm > slack) z *= slack / norm;
  return particular_ + null_basis_ * z;
}

double FeasibleSet::distance(const Vector& point) const {
  return (point - project(point)).norm();
}

std::vector<Vector> FeasibleSet::sample(std::size_t count, CounterRng& rng,
                                        bool boundary) const {
  if (empty()) {
    throw NumericalError("feasible set is empty: |X^+ y| exceeds the bound");
  }
  const Eigen::Index k = null_basis_.cols();
  const double slack = slack_radius();
  std::vector<Vector> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (k == 0) {
      out.push_back(particular_);
      continue;
    }
    const Vector dir = uniform_on_sphere(k, rng);
    const double r =
        boundary ? slack
                 : slack * std::pow(rng.uniform(), 1.0 / static_cast<double>(k));
    out.push_back(particular_ + null_basis_ * (r * dir));
  }
  return out;
}

FeasibleSet build_feasible_set(const MatrixFeatures& features,
                               const PolicyPair& exact, double eta,
                               double norm_bound_sq) {
  const LinearSystem sys = build_linear_system(features, exact, eta);
  return FeasibleSet(sys.X, sys.y, std::sqrt(norm_bound_sq));
}

std::vector<Vector> sample_feasible(const FeasibleSet& set, std::size_t count,
                                    std::uint64_t seed) {
  CounterRng rng(seed);
  return set.sample(count, rng);
}

double hausdorff(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("hausdorff: point clouds must be nonempty");
  }
  auto directed = [](const std::vector<Vector>& from,
                     const std::vector<Vector>& to) {
    double worst = 0.0;
    for (const Vector& p : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const Vector& q : to) {
        best = std::min(best, (p - q).squaredNorm());
        if (best <= worst) break;
      }
      worst = std::max(worst, best);
    }
    return std::sqrt(worst);
  };
  return std::max(directed(a, b), directed(b, a));
}

double hausdorff_estimate(const FeasibleSet& truth, const ConfidenceSet& est,
                          std::size_t count, CounterRng& rng) {
  if (count == 0) throw std::invalid_argument("hausdorff: count must be >= 1");
  std::vector<Vector> from_truth = truth.sample(count / 2, rng, true);
  const std::vector<Vector> interior = truth.sample(count - count / 2, rng);
  from_truth.insert(from_truth.end(), interior.begin(), interior.end());

  double forward = 0.0;
  for (const Vector& p : from_truth) {
    forward = std::max(forward, est.distance(p));
  }
  std::vector<Vector> from_est = est.sample(count, rng);
  from_est.push_back(est.min_norm_member().point);
  double backward = 0.0;
  for (const Vector& p : from_est) {
    backward = std::max(backward, truth.distance(p));
  }
  return std::max(forward, backward);
}

Matrix reconstruct_payoff(const Vector& theta, const MatrixFeatures& features) {
  return payoff_from_features(features, theta);
}

double surrogate_kappa(std::size_t samples, double scale) {
  if (samples == 0) throw std::invalid_argument("sample size must be >= 1");
  return scale / static_cast<double>(samples);
}

double plugin_tv_radius(int support, std::size_t samples, double delta) {
  const double n = static_cast<double>(samples);
  return 2.0 * (0.5 * std::sqrt(support / n) +
                std::sqrt(std::log(2.0 / delta) / (2.0 * n)));
}

DifferencedFeatureNorms differenced_feature_norms(
    const std::vector<MatrixFeatures>& per_state) {
  if (per_state.empty()) return {};
  const int m = per_state[0].m;
  const int n = per_state[0].n;
  const int d = per_state[0].d;
  const Eigen::Index S = static_cast<Eigen::Index>(per_state.size());
  Matrix phi1(d, S * (m - 1) * n);
  Matrix phi2(d, S * (n - 1) * m);
  Eigen::Index c1 = 0;
  Eigen::Index c2 = 0;
  for (const MatrixFeatures& f : per_state) {
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < n; ++b) {
        if (a > 0) phi1.col(c1++) = f.phi(a, b) - f.phi(0, b);
        if (b > 0) phi2.col(c2++) = f.phi(a, b) - f.phi(a, 0);
      }
    }
  }
  auto op_norm = [](const Matrix& M) {
    if (M.size() == 0) return 0.0;
    return Eigen::JacobiSVD<Matrix>(M).singularValues()[0];
  };
  return {op_norm(phi1), op_norm(phi2)};
}

double theoretical_kappa_matrix(const MatrixFeatures& features,
                                const PolicyPair& empirical, double eta,
                                double norm_bound_sq, std::size_t samples,
                                double delta) {
  const int m = features.m;
  const int n = features.n;
  const double eps1 = plugin_tv_radius(m, samples, delta);
  const double eps2 = plugin_tv_radius(n, samples, delta);
  const double gap1 = empirical.mu.minCoeff() - eps1;
  const double gap2 = empirical.nu.minCoeff() - eps2;
  if (gap1 <= 0.0 || gap2 <= 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  const DifferencedFeatureNorms norms = differenced_feature_norms({features});
  const double e2 = eta * eta;
  return 2.0 * (norm_bound_sq * norms.phi1 * norms.phi1 +
                n / (e2 * gap2 * gap2)) *
             eps2 * eps2 +
         2.0 * (norm_bound_sq * norms.phi2 * norms.phi2 +
                m / (e2 * gap1 * gap1)) *
             eps1 * eps1;
}

}  // namespace qre
