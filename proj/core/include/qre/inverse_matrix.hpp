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
#ifndef QRE_INVERSE_MATRIX_HPP_
#define QRE_INVERSE_MATRIX_HPP_

#include <cstddef>
#include <vector>

#include "qre/matrix_game.hpp"
#include "qre/rng.hpp"
#include "qre/types.hpp"

namespace qre {

inline constexpr double kProbabilityFloor = 1e-12;

// Stacked QRE constraints X theta = y. Rows 0 .. m-2 come from the row
// player (actions 1 .. m-1 against baseline 0), rows m-1 .. m+n-3 from the
// column player.
struct LinearSystem {
  Matrix X;
  Vector y;
  double eta = 1.0;

  Eigen::Index rows() const { return X.rows(); }
  Eigen::Index dim() const { return X.cols(); }
};

// Entrywise max(p, floor). No renormalization: the log-ratios only need
// positive entries.
Vector floor_distribution(const Vector& p, double floor = kProbabilityFloor);
PolicyPair floor_policies(const PolicyPair& policies,
                          double floor = kProbabilityFloor);

// A-block rows (phi(a, .) - phi(0, .)) nu, B-block rows
// (phi(., b) - phi(., 0))' mu, c = log(mu(a) / mu(0)) / eta and
// d = -log(nu(b) / nu(0)) / eta. Throws NumericalError on a nonpositive
// probability.
LinearSystem build_linear_system(const MatrixFeatures& features,
                                 const PolicyPair& policies, double eta);

struct RankReport {
  bool full_rank = false;
  int rank = 0;
  Vector singular_values;
};

// Numerical rank with threshold sigma_1 * max(rows, cols) * 1e-12.
RankReport rank_condition(const Matrix& X, int d);

// argmin |X theta - y|^2 through the normal equations. Throws
// SingularSystemError when X does not have full column rank.
Vector least_squares_theta(const LinearSystem& system);

Matrix pseudo_inverse(const Matrix& X);
// X^+ y.
Vector min_norm_theta(const LinearSystem& system);

// Orthonormal basis (d x k) of the numerical null space of X.
Matrix null_space_basis(const Matrix& X);

struct Projection {
  Vector point;
  // The set is empty; point is the limit of the projection as the
  // constraints are approached (closest candidate).
  bool empty = false;
};

// {theta : |X theta - y|^2 <= kappa, |theta| <= radius}.
class ConfidenceSet {
 public:
  ConfidenceSet(Matrix X, Vector y, double kappa, double radius);

  const Matrix& X() const { return X_; }
  const Vector& y() const { return y_; }
  double kappa() const { return kappa_; }
  double radius() const { return radius_; }
  Eigen::Index dim() const { return X_.cols(); }

  double residual_sq(const Vector& theta) const;
  // Membership with an absolute slack on both constraints.
  bool contains(const Vector& theta, double tol = 0.0) const;

  // Euclidean projection. The ellipsoid part works in the SVD basis of X
  // with a bisection on the Lagrange multiplier; the ball is handled by a
  // second bisection on the scaling of the query point.
  Projection project(const Vector& point) const;
  double distance(const Vector& point) const;
  // Projection of the origin: the minimum-norm member.
  Projection min_norm_member() const { return project(Vector::Zero(dim())); }
  bool empty() const { return min_norm_member().empty; }

  // Members obtained by projecting random points drawn uniformly on a
  // sphere of radius 4 * radius. They concentrate on the boundary.
  std::vector<Vector> sample(std::size_t count, CounterRng& rng) const;

 private:
  Projection project_ellipsoid(const Vector& point) const;

  Matrix X_;
  Vector y_;
  double kappa_;
  double radius_;
  Vector singular_;   // singular values of X, length d
  Matrix basis_;      // right singular vectors, d x d
  Vector rotated_y_;  // U' y, length d
};

// Matrix-game confidence set with the bound M on |theta|^2.
ConfidenceSet build_confidence_set(const MatrixFeatures& features,
                                   const PolicyPair& empirical, double eta,
                                   double kappa, double norm_bound_sq);

// {theta : X theta = y, |theta| <= radius} described as X^+ y plus a ball
// in the null space of X.
class FeasibleSet {
 public:
  FeasibleSet(const Matrix& X, const Vector& y, double radius);

  const Vector& particular() const { return particular_; }
  const Matrix& null_basis() const { return null_basis_; }
  double radius() const { return radius_; }
  Eigen::Index dim() const { return particular_.size(); }
  bool empty() const;
  // Radius of the ball left inside the affine subspace.
  double slack_radius() const;

  bool contains(const Vector& theta, double tol = 1e-10) const;
  Vector project(const Vector& point) const;
  double distance(const Vector& point) const;

  // Uniform in the (null-space) ball. boundary == true draws on its sphere.
  // Throws NumericalError when the set is empty.
  std::vector<Vector> sample(std::size_t count, CounterRng& rng,
                             bool boundary = false) const;

 private:
  Matrix X_;
  Vector y_;
  Vector particular_;
  Matrix null_basis_;
  double radius_;
};

FeasibleSet build_feasible_set(const MatrixFeatures& features,
                               const PolicyPair& exact, double eta,
                               double norm_bound_sq);

std::vector<Vector> sample_feasible(const FeasibleSet& set, std::size_t count,
                                    std::uint64_t seed);

// max(sup_a inf_b |a - b|, sup_b inf_a |a - b|) over two finite clouds.
double hausdorff(const std::vector<Vector>& a, const std::vector<Vector>& b);

// Sampled estimate between a feasible set and a confidence set. Each
// directed distance is the max over count sampled points of one set of the
// exact distance to the other. Half the feasible-set samples are taken on
// its boundary sphere.
double hausdorff_estimate(const FeasibleSet& truth, const ConfidenceSet& est,
                          std::size_t count, CounterRng& rng);

Matrix reconstruct_payoff(const Vector& theta, const MatrixFeatures& features);

// kappa = scale / N.
double surrogate_kappa(std::size_t samples, double scale = 1e3);

// Plug-in TV radius: 2 (sqrt(k / N) / 2 + sqrt(log(2 / delta) / (2 N))).
double plugin_tv_radius(int support, std::size_t samples, double delta);

// Operator norms of the baseline-differenced feature matrices. phi1 stacks
// phi(a, b) - phi(0, b) over a >= 1 and all b; phi2 stacks
// phi(a, b) - phi(a, 0) over b >= 1 and all a.
struct DifferencedFeatureNorms {
  double phi1 = 0.0;
  double phi2 = 0.0;
};
DifferencedFeatureNorms differenced_feature_norms(
    const std::vector<MatrixFeatures>& per_state);

// Threshold guaranteeing containment of the feasible set, with the true
// minimum probabilities replaced by empirical ones. Returns +infinity when
// a plug-in minimum does not exceed its TV radius.
double theoretical_kappa_matrix(const MatrixFeatures& features,
                                const PolicyPair& empirical, double eta,
                                double norm_bound_sq, std::size_t samples,
                                double delta = 0.05);

}  // namespace qre

#endif  // QRE_INVERSE_MATRIX_HPP_
