#ifndef FOGCACHE_PROJECTION_HPP
#define FOGCACHE_PROJECTION_HPP

// Feasible set C = {z : 0 <= z <= 1, A z <= A_u, B z <= B_u} and the
// Euclidean projection onto it.

#include "fogcache/model.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

namespace fogcache {

/// Linear constraints on the node-major placement vector. Row f of A sums
/// content f over nodes; row i of B weighs node i's entries by content size.
class ConstraintSystem {
 public:
  ConstraintSystem(const ContentLibrary& lib, const FogCluster& cluster)
      : sizes_(lib.sizes), capacities_(cluster.capacities) {}

  explicit ConstraintSystem(const Scenario& s) : ConstraintSystem(s.library, s.cluster) {}

  std::size_t num_nodes() const { return capacities_.size(); }
  std::size_t num_contents() const { return sizes_.size(); }
  std::size_t dim() const { return num_nodes() * num_contents(); }

  const std::vector<double>& sizes() const { return sizes_; }
  const std::vector<double>& capacities() const { return capacities_; }

  Eigen::MatrixXd A() const {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(idx(num_contents()), idx(dim()));
    for (std::size_t i = 0; i < num_nodes(); ++i) {
      for (std::size_t f = 0; f < num_contents(); ++f) a(idx(f), idx(flat_index(i, f, num_contents()))) = 1.0;
    }
    return a;
  }

  Eigen::VectorXd A_u() const { return Eigen::VectorXd::Ones(idx(num_contents())); }

  Eigen::MatrixXd B() const {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(idx(num_nodes()), idx(dim()));
    for (std::size_t i = 0; i < num_nodes(); ++i) {
      for (std::size_t f = 0; f < num_contents(); ++f) {
        b(idx(i), idx(flat_index(i, f, num_contents()))) = sizes_[f];
      }
    }
    return b;
  }

  Eigen::VectorXd B_u() const {
    return Eigen::Map<const Eigen::VectorXd>(capacities_.data(), idx(capacities_.size()));
  }

  /// Largest violation of any constraint of C; zero when z is feasible.
  double max_violation(const Eigen::VectorXd& z) const {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < z.size(); ++j) worst = std::max({worst, -z(j), z(j) - 1.0});
    for (std::size_t f = 0; f < num_contents(); ++f) {
      double total = 0.0;
      for (std::size_t i = 0; i < num_nodes(); ++i) total += z(idx(flat_index(i, f, num_contents())));
      worst = std::max(worst, total - 1.0);
    }
    for (std::size_t i = 0; i < num_nodes(); ++i) {
      double used = 0.0;
      for (std::size_t f = 0; f < num_contents(); ++f) used += sizes_[f] * z(idx(flat_index(i, f, num_contents())));
      worst = std::max(worst, used - capacities_[i]);
    }
    return worst;
  }

  // Projections onto the three simple sets whose intersection is C. Rows of
  // A (and of B) touch disjoint coordinates, so each family projects row by
  // row in closed form.

  void project_box(Eigen::VectorXd& z) const { z = z.cwiseMax(0.0).cwiseMin(1.0); }

  void project_content_rows(Eigen::VectorXd& z) const {
    const double n = static_cast<double>(num_nodes());
    for (std::size_t f = 0; f < num_contents(); ++f) {
      double total = 0.0;
      for (std::size_t i = 0; i < num_nodes(); ++i) total += z(idx(flat_index(i, f, num_contents())));
      if (total > 1.0) {
        const double shift = (total - 1.0) / n;
        for (std::size_t i = 0; i < num_nodes(); ++i) z(idx(flat_index(i, f, num_contents()))) -= shift;
      }
    }
  }

  void project_node_rows(Eigen::VectorXd& z) const {
    double norm2 = 0.0;
    for (double s : sizes_) norm2 += s * s;
    for (std::size_t i = 0; i < num_nodes(); ++i) {
      double used = 0.0;
      for (std::size_t f = 0; f < num_contents(); ++f) used += sizes_[f] * z(idx(flat_index(i, f, num_contents())));
      if (used > capacities_[i]) {
        const double scale = (used - capacities_[i]) / norm2;
        for (std::size_t f = 0; f < num_contents(); ++f) {
          z(idx(flat_index(i, f, num_contents()))) -= scale * sizes_[f];
        }
      }
    }
  }

 private:
  static Eigen::Index idx(std::size_t k) { return static_cast<Eigen::Index>(k); }

  std::vector<double> sizes_;
  std::vector<double> capacities_;
};

struct ProjectionOptions {
  double tol = 1e-12;
  int max_iter = 200000;
};

struct ProjectionResult {
  Eigen::VectorXd z;
  int iterations = 0;
};

/// Euclidean projection onto C by Dykstra's alternating projections over
/// the content rows, node rows and box. Stops once a full sweep moves the
/// iterate and every correction term less than `tol` in max-norm; throws NumericalError (carrying the
/// last iterate) when `max_iter` sweeps are not enough.
inline ProjectionResult project_feasible_ex(const Eigen::VectorXd& x, const ConstraintSystem& cs,
                                            const ProjectionOptions& opt = {}) {
  if (static_cast<std::size_t>(x.size()) != cs.dim()) {
    detail::fail("project_feasible: vector length ", x.size(), ", expected ", cs.dim());
  }
  Eigen::VectorXd z = x;
  Eigen::VectorXd inc_content = Eigen::VectorXd::Zero(x.size());
  Eigen::VectorXd inc_node = Eigen::VectorXd::Zero(x.size());
  Eigen::VectorXd inc_box = Eigen::VectorXd::Zero(x.size());
  Eigen::VectorXd prev(x.size());
  Eigen::VectorXd shifted(x.size());

  double moved = 0.0;
  auto step = [&](Eigen::VectorXd& inc, auto&& project) {
    shifted = z + inc;
    z = shifted;
    project(z);
    moved = std::max(moved, (shifted - z - inc).lpNorm<Eigen::Infinity>());
    inc = shifted - z;
  };

  for (int k = 1; k <= opt.max_iter; ++k) {
    prev = z;
    moved = 0.0;
    step(inc_content, [&](Eigen::VectorXd& v) { cs.project_content_rows(v); });
    step(inc_node, [&](Eigen::VectorXd& v) { cs.project_node_rows(v); });
    step(inc_box, [&](Eigen::VectorXd& v) { cs.project_box(v); });
    moved = std::max(moved, (z - prev).lpNorm<Eigen::Infinity>());
    if (moved < opt.tol) return {z, k};
  }
  throw NumericalError("project_feasible: Dykstra iteration cap reached", moved, z);
}

inline Eigen::VectorXd project_feasible(const Eigen::VectorXd& x, const ConstraintSystem& cs,
                                        const ProjectionOptions& opt = {}) {
  return project_feasible_ex(x, cs, opt).z;
}

}  // namespace fogcache

#endif  // FOGCACHE_PROJECTION_HPP
