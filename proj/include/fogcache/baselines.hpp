#ifndef FOGCACHE_BASELINES_HPP
#define FOGCACHE_BASELINES_HPP

// Reference solvers used to cross-check ADMM: projected gradient descent,
// an exhaustive scan over the hit ratio, and an exact small-instance
// projection by active-set enumeration.

#include "fogcache/admm.hpp"
#include "fogcache/heuristic.hpp"
#include "fogcache/model.hpp"
#include "fogcache/objective.hpp"
#include "fogcache/projection.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace fogcache {

struct BaselineConfig {
  double initial_step = 1.0;
  double shrink = 0.5;
  double sufficient_decrease = 1e-4;
  double tol = 1e-10;
  int max_iter = 20000;
  double projection_tol = 1e-12;
  int projection_max_iter = 200000;

  void validate() const {
    if (!(tol > 0.0)) detail::fail("baseline: tol must be positive");
    if (!(initial_step > 0.0) || !(shrink > 0.0 && shrink < 1.0)) detail::fail("baseline: bad step rule");
    if (!(sufficient_decrease > 0.0 && sufficient_decrease < 1.0)) detail::fail("baseline: bad Armijo constant");
    if (max_iter < 1) detail::fail("baseline: max_iter must be >= 1");
  }
};

/// Trace records reuse the ADMM layout: primal_residual holds the gradient
/// mapping norm ||p - Proj(p - t grad)|| / t, dual_residual the step length.
struct BaselineResult {
  Placement placement;
  std::vector<TraceRecord> trace;
  int iterations = 0;
  bool converged = false;
};

/// Projected gradient descent with Armijo backtracking along the projection
/// arc, started from the empty cache.
inline BaselineResult projected_gradient_solve(const Scenario& scenario, const BaselineConfig& config = {}) {
  config.validate();
  detail::require_equal_sizes(scenario.library);
  const ConstraintSystem cs(scenario);
  const ProjectionOptions popt{config.projection_tol, config.projection_max_iter};
  const Eigen::VectorXd c = hit_weights(scenario.library, scenario.num_nodes());
  const AdtCurve curve(scenario.traffic);

  Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(scenario.dim()));
  double value = curve.value(c.dot(p));
  BaselineResult out;

  for (int k = 1; k <= config.max_iter; ++k) {
    const Eigen::VectorXd grad = curve.d1(c.dot(p)) * c;
    double t = config.initial_step;
    Eigen::VectorXd q;
    double q_value = 0.0;
    for (int halvings = 0;; ++halvings) {
      q = project_feasible(p - t * grad, cs, popt);
      q_value = curve.value(c.dot(q));
      if (q_value <= value + config.sufficient_decrease * grad.dot(q - p) || halvings > 60) break;
      t *= config.shrink;
    }
    const double mapping = (p - q).norm() / t;
    const double step = (q - p).norm();
    p = std::move(q);
    value = q_value;
    out.iterations = k;
    out.trace.push_back({k, value, mapping, step});
    if (mapping <= config.tol) {
      out.converged = true;
      break;
    }
  }
  out.placement = Placement::from_vector(p, scenario.num_nodes(), scenario.num_contents());
  return out;
}

struct GridResult {
  double h_best = 0.0;
  double d_best = 0.0;
};

/// Scans D over h = 0, δ, 2δ, ... up to the largest feasible hit ratio
/// min(1, h_csl). The upper end is scanned too once δ fits below it.
inline GridResult grid_bruteforce(const Scenario& scenario, double resolution) {
  if (!(resolution > 0.0)) detail::fail("grid_bruteforce: resolution must be positive");
  const AdtCurve curve(scenario.traffic);
  const double h_max = std::min(1.0, echr_csl(scenario.library, scenario.cluster).h_csl);
  GridResult best{0.0, curve.value(0.0)};
  auto consider = [&](double h) {
    const double d = curve.value(h);
    if (d < best.d_best) best = {h, d};
  };
  const auto steps = static_cast<long long>(std::floor(h_max / resolution));
  for (long long k = 1; k <= steps; ++k) consider(static_cast<double>(k) * resolution);
  if (steps >= 1) consider(h_max);
  return best;
}

/// Exact Euclidean projection onto C for tiny instances (N·F <= 12).
/// Active sets are enumerated by increasing size; the first one whose
/// equality-constrained projection is primal feasible with nonnegative
/// multipliers is the KKT point, unique because the objective is strictly
/// convex.
inline Eigen::VectorXd qp_projection_oracle(const Eigen::VectorXd& x, const ConstraintSystem& cs) {
  constexpr std::size_t kMaxDim = 12;
  const std::size_t n = cs.dim();
  if (n > kMaxDim) detail::fail("qp_projection_oracle: N·F=", n, " exceeds enumeration bound ", kMaxDim);
  if (static_cast<std::size_t>(x.size()) != n) detail::fail("qp_projection_oracle: length mismatch");

  // Rows a_k z <= b_k: lower bounds, upper bounds, content rows, node rows.
  const auto ni = static_cast<Eigen::Index>(n);
  const Eigen::MatrixXd a_rows = cs.A();
  const Eigen::MatrixXd b_rows = cs.B();
  const Eigen::Index m = 2 * ni + a_rows.rows() + b_rows.rows();
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(m, ni);
  Eigen::VectorXd bounds(m);
  rows.topRows(ni) = -Eigen::MatrixXd::Identity(ni, ni);
  bounds.head(ni).setZero();
  rows.middleRows(ni, ni) = Eigen::MatrixXd::Identity(ni, ni);
  bounds.segment(ni, ni).setOnes();
  rows.middleRows(2 * ni, a_rows.rows()) = a_rows;
  bounds.segment(2 * ni, a_rows.rows()) = cs.A_u();
  rows.bottomRows(b_rows.rows()) = b_rows;
  bounds.tail(b_rows.rows()) = cs.B_u();

  constexpr double kTol = 1e-10;
  if (cs.max_violation(x) <= 0.0) return x;

  std::vector<Eigen::Index> active;
  Eigen::VectorXd found;
  // Lower and upper bound of one coordinate are parallel rows.
  auto conflicts = [&](Eigen::Index k) {
    for (Eigen::Index j : active) {
      if (k < 2 * ni && j < 2 * ni && (k % ni) == (j % ni)) return true;
    }
    return false;
  };
  auto try_active_set = [&]() {
    const auto s = static_cast<Eigen::Index>(active.size());
    Eigen::MatrixXd g(s, ni);
    Eigen::VectorXd rhs(s);
    for (Eigen::Index r = 0; r < s; ++r) {
      g.row(r) = rows.row(active[static_cast<std::size_t>(r)]);
      rhs(r) = bounds(active[static_cast<std::size_t>(r)]);
    }
    const Eigen::MatrixXd gram = g * g.transpose();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
    if (lu.rank() < s) return false;
    const Eigen::VectorXd mult = lu.solve(g * x - rhs);
    if (s > 0 && mult.minCoeff() < -kTol) return false;
    const Eigen::VectorXd z = x - g.transpose() * mult;
    if (((rows * z - bounds).array() > kTol).any()) return false;
    found = z;
    return true;
  };
  std::function<bool(Eigen::Index, std::size_t)> search = [&](Eigen::Index start, std::size_t size) {
    if (active.size() == size) return try_active_set();
    for (Eigen::Index k = start; k < m; ++k) {
      if (conflicts(k)) continue;
      active.push_back(k);
      if (search(k + 1, size)) return true;
      active.pop_back();
    }
    return false;
  };
  for (std::size_t size = 1; size <= n; ++size) {
    if (search(0, size)) return found;
  }
  throw NumericalError("qp_projection_oracle: no KKT point found", 0.0, x);
}

}  // namespace fogcache

#endif  // FOGCACHE_BASELINES_HPP
