#ifndef FOGCACHE_ADMM_HPP
#define FOGCACHE_ADMM_HPP

// ADMM for min D(p) s.t. p in C, split as D(p) + g(z) with p = z:
//
//   p <- argmin_p D(p) + rho/2 ||p - z + theta||^2
//   z <- Proj_C(p + theta)
//   theta <- theta + p - z
//
// D(p) = phi(c·p) is rank one, so the p-update reduces to a scalar root find.

#include "fogcache/model.hpp"
#include "fogcache/objective.hpp"
#include "fogcache/projection.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

namespace fogcache {

struct AdmmConfig {
  double rho = 0.01;
  double eps_abs = 1e-6;
  double eps_rel = 1e-4;
  int max_iter = 5000;
  double projection_tol = 1e-12;
  int projection_max_iter = 200000;

  void validate() const {
    if (!(rho > 0.0)) detail::fail("admm: rho must be positive");
    if (!(eps_abs > 0.0) || !(eps_rel > 0.0) || !(projection_tol > 0.0)) {
      detail::fail("admm: tolerances must be positive");
    }
    if (max_iter < 1 || projection_max_iter < 1) detail::fail("admm: iteration caps must be >= 1");
  }
};

/// One row of a solver's convergence trace.
struct TraceRecord {
  int k;
  double objective;
  double primal_residual;
  double dual_residual;
};

struct AdmmState {
  Eigen::VectorXd p;
  Eigen::VectorXd z;
  Eigen::VectorXd theta;
  int k = 0;
  double primal_residual = std::numeric_limits<double>::infinity();
  double dual_residual = std::numeric_limits<double>::infinity();
  bool converged = false;
  std::vector<TraceRecord> trace;
};

struct AdmmResult {
  Placement placement;
  AdmmState state;
};

namespace detail {

// Solves r(h) = h - target + scale * phi'(h) = 0 on phi's stable domain.
// r is strictly increasing and tends to -inf/+inf at the domain ends, so a
// sign change always exists.
inline double solve_scalar_prox(const AdtCurve& curve, double target, double scale, double tol = 1e-12) {
  const auto [lo, hi] = curve.domain();
  auto residual = [&](double h) { return h - target + scale * curve.d1(h); };

  double guess = std::clamp(target, 0.0, 1.0);
  double a = guess;
  double b = guess;
  double ra = residual(a);
  double rb = ra;
  for (int k = 1; ra > 0.0; ++k) {
    if (k > 200) fail("p_update: no left bracket below h=", guess);
    a = lo + (guess - lo) * std::ldexp(1.0, -k);
    ra = residual(a);
  }
  for (int k = 1; rb < 0.0; ++k) {
    if (k > 200) fail("p_update: no right bracket above h=", guess);
    b = hi - (hi - guess) * std::ldexp(1.0, -k);
    rb = residual(b);
  }
  if (ra == 0.0) return a;
  if (rb == 0.0) return b;

  // Newton with bisection fallback, keeping the bracket [a, b].
  double h = 0.5 * (a + b);
  for (int it = 0; it < 500; ++it) {
    const double r = residual(h);
    if (r == 0.0) return h;
    if (r < 0.0) {
      a = h;
    } else {
      b = h;
    }
    const double slope = 1.0 + scale * curve.d2(h);
    double next = h - r / slope;
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    if (std::abs(next - h) <= 0.25 * tol || b - a <= tol) return next;
    h = next;
  }
  std::ostringstream os;
  os << "p_update: root finding did not converge, bracket [" << a << ", " << b << "]";
  throw NumericalError(os.str(), b - a);
}

}  // namespace detail

/// Exact minimizer of D(p) + rho/2 ||p - z + theta||^2.
inline Eigen::VectorXd p_update(const Eigen::VectorXd& z, const Eigen::VectorXd& theta, const Scenario& scenario,
                                double rho) {
  if (!(rho > 0.0)) detail::fail("p_update: rho must be positive");
  if (static_cast<std::size_t>(z.size()) != scenario.dim() || z.size() != theta.size()) {
    detail::fail("p_update: z/theta must have length N·F=", scenario.dim());
  }
  const Eigen::VectorXd c = hit_weights(scenario.library, scenario.num_nodes());
  const AdtCurve curve(scenario.traffic);
  const Eigen::VectorXd v = z - theta;
  const double c2 = c.squaredNorm();
  const double h = detail::solve_scalar_prox(curve, c.dot(v), c2 / rho);
  return v - (curve.d1(h) / rho) * c;
}

/// Runs ADMM from p0 (default zero) and returns z as the placement.
inline AdmmResult solve_admm(const Scenario& scenario, const AdmmConfig& config = {},
                             const std::optional<Eigen::VectorXd>& p0 = std::nullopt) {
  config.validate();
  detail::require_equal_sizes(scenario.library);
  const std::size_t n = scenario.dim();
  const ConstraintSystem cs(scenario);
  const ProjectionOptions popt{config.projection_tol, config.projection_max_iter};
  const double sqrt_n = std::sqrt(static_cast<double>(n));

  AdmmState st;
  st.p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  if (p0) {
    if (static_cast<std::size_t>(p0->size()) != n) detail::fail("admm: p0 has length ", p0->size(), ", expected ", n);
    require_feasible(Placement::from_vector(*p0, scenario.num_nodes(), scenario.num_contents()), scenario.library,
                     scenario.cluster);
    st.p = *p0;
  }
  st.z = st.p;
  st.theta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));

  Eigen::VectorXd best_z = st.z;
  double best_obj = adt_of_vector(st.z, scenario);

  for (int k = 1; k <= config.max_iter; ++k) {
    st.p = p_update(st.z, st.theta, scenario, config.rho);
    const Eigen::VectorXd z_prev = st.z;
    st.z = project_feasible(st.p + st.theta, cs, popt);
    st.theta += st.p - st.z;
    st.k = k;

    st.primal_residual = (st.p - st.z).norm();
    st.dual_residual = config.rho * (st.z - z_prev).norm();
    const double objective = adt_of_vector(st.z, scenario);
    st.trace.push_back({k, objective, st.primal_residual, st.dual_residual});
    if (objective < best_obj) {
      best_obj = objective;
      best_z = st.z;
    }

    const double eps_primal = sqrt_n * config.eps_abs + config.eps_rel * std::max(st.p.norm(), st.z.norm());
    const double eps_dual = sqrt_n * config.eps_abs + config.eps_rel * config.rho * st.theta.norm();
    if (st.primal_residual <= eps_primal && st.dual_residual <= eps_dual) {
      st.converged = true;
      break;
    }
  }

  const Eigen::VectorXd& out = st.converged ? st.z : best_z;
  return {Placement::from_vector(out, scenario.num_nodes(), scenario.num_contents()), std::move(st)};
}

}  // namespace fogcache

#endif  // FOGCACHE_ADMM_HPP
