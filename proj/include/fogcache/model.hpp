#ifndef FOGCACHE_MODEL_HPP
#define FOGCACHE_MODEL_HPP

// Problem instance types for cache placement in a fog cluster: the content
// library, the cluster's storage, the per-base-station traffic, and the
// placement matrix that ties them together.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fogcache {

/// Tolerance used when checking placement feasibility and popularity sums.
inline constexpr double kFeasibilityTol = 1e-8;
inline constexpr double kPopularitySumTol = 1e-12;

/// Raised when a numerical routine fails to reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double residual, Eigen::VectorXd last = {})
      : std::runtime_error(what), residual_(residual), last_(std::move(last)) {}

  double residual() const { return residual_; }
  const Eigen::VectorXd& last_iterate() const { return last_; }

 private:
  double residual_;
  Eigen::VectorXd last_;
};

struct ContentLibrary {
  std::vector<double> sizes;       // S_f
  std::vector<double> popularity;  // P_r(f), non-increasing, sums to 1

  std::size_t size() const { return sizes.size(); }

  bool equal_sizes() const {
    for (double s : sizes) {
      if (s != sizes.front()) return false;
    }
    return true;
  }
};

struct FogCluster {
  std::vector<double> capacities;  // M_i

  std::size_t size() const { return capacities.size(); }

  double total_capacity() const {
    double total = 0.0;
    for (double m : capacities) total += m;
    return total;
  }
};

/// Arrival and service rates of a single base station.
struct StationRates {
  double lambda;
  double mu_e;
  double mu_b;
};

struct TrafficProfile {
  std::vector<double> lambda;
  std::vector<double> mu_e;
  std::vector<double> mu_b;

  std::size_t size() const { return lambda.size(); }

  StationRates station(std::size_t i) const { return {lambda.at(i), mu_e.at(i), mu_b.at(i)}; }

  double total_lambda() const {
    double total = 0.0;
    for (double l : lambda) total += l;
    return total;
  }

  /// True when every station sees identical (λ, μ_e, μ_b).
  bool homogeneous() const {
    for (std::size_t i = 1; i < size(); ++i) {
      if (lambda[i] != lambda[0] || mu_e[i] != mu_e[0] || mu_b[i] != mu_b[0]) return false;
    }
    return true;
  }
};

struct Scenario {
  ContentLibrary library;
  FogCluster cluster;
  TrafficProfile traffic;

  std::size_t num_nodes() const { return cluster.size(); }
  std::size_t num_contents() const { return library.size(); }
  std::size_t dim() const { return num_nodes() * num_contents(); }
};

// ---------------------------------------------------------------------------
// Popularity and service rates
// ---------------------------------------------------------------------------

/// Zipf popularity P_r(f) = f^-alpha / sum_j j^-alpha for f = 1..F.
inline std::vector<double> zipf_popularity(long long num_contents, double alpha) {
  if (num_contents < 1) {
    throw std::invalid_argument("zipf_popularity: content count must be >= 1");
  }
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("zipf_popularity: alpha must be finite and >= 0");
  }
  std::vector<double> weights(static_cast<std::size_t>(num_contents));
  for (std::size_t f = 0; f < weights.size(); ++f) {
    weights[f] = std::pow(static_cast<double>(f + 1), -alpha);
  }
  // Sum smallest terms first.
  double norm = 0.0;
  for (auto it = weights.rbegin(); it != weights.rend(); ++it) norm += *it;
  for (double& w : weights) w /= norm;
  return weights;
}

struct ServiceRates {
  double mu_e;
  double mu_b;
};

/// Service rates of the edge and cloud provision modes for content size S,
/// edge delivery rate R_e and backhaul rate R_b. R_b may be +inf.
inline ServiceRates rates_from_link_speeds(double size, double edge_rate, double backhaul_rate) {
  if (!(size > 0.0) || !(edge_rate > 0.0) || !(backhaul_rate > 0.0) || !std::isfinite(size) ||
      !std::isfinite(edge_rate)) {
    throw std::invalid_argument("rates_from_link_speeds: size and rates must be positive");
  }
  const double mu_e = edge_rate / size;
  const double mu_b = 1.0 / (size / edge_rate + size / backhaul_rate);
  return {mu_e, mu_b};
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace detail {

template <typename... Parts>
[[noreturn]] void fail(const Parts&... parts) {
  std::ostringstream os;
  (os << ... << parts);
  throw std::invalid_argument(os.str());
}

}  // namespace detail

inline void validate_library(const ContentLibrary& lib) {
  const std::size_t num_contents = lib.size();
  if (num_contents < 1) detail::fail("library: F must be >= 1");
  if (lib.popularity.size() != num_contents) {
    detail::fail("library: popularity has length ", lib.popularity.size(), ", expected F=", num_contents);
  }
  double sum = 0.0;
  for (std::size_t f = 0; f < num_contents; ++f) {
    if (!(lib.sizes[f] > 0.0) || !std::isfinite(lib.sizes[f])) {
      detail::fail("content ", f + 1, ": size ", lib.sizes[f], " must be positive");
    }
    const double pr = lib.popularity[f];
    // A single content necessarily has popularity exactly 1.
    const bool in_range = num_contents == 1 ? pr == 1.0 : (pr > 0.0 && pr < 1.0);
    if (!in_range) detail::fail("content ", f + 1, ": popularity ", pr, " outside (0,1)");
    if (f > 0 && pr > lib.popularity[f - 1]) {
      detail::fail("content ", f + 1, ": not popularity-descending (", pr, " > ", lib.popularity[f - 1], ")");
    }
    sum += pr;
  }
  if (std::abs(sum - 1.0) > kPopularitySumTol) {
    detail::fail("library: popularity sums to ", sum, ", expected 1");
  }
}

inline void validate_cluster(const FogCluster& cluster) {
  if (cluster.size() < 1) detail::fail("cluster: N must be >= 1");
  for (std::size_t i = 0; i < cluster.size(); ++i) {
    if (!(cluster.capacities[i] >= 0.0) || !std::isfinite(cluster.capacities[i])) {
      detail::fail("node ", i + 1, ": capacity ", cluster.capacities[i], " must be >= 0");
    }
  }
}

inline void validate_traffic(const TrafficProfile& traffic, std::size_t num_nodes) {
  if (traffic.lambda.size() != num_nodes || traffic.mu_e.size() != num_nodes ||
      traffic.mu_b.size() != num_nodes) {
    detail::fail("traffic: lambda/mu_e/mu_b must each have length N=", num_nodes);
  }
  for (std::size_t i = 0; i < num_nodes; ++i) {
    const auto [lambda, mu_e, mu_b] = traffic.station(i);
    if (!(lambda > 0.0)) detail::fail("BS ", i + 1, ": λ=", lambda, " must be positive");
    if (!(lambda < mu_b)) detail::fail("BS ", i + 1, ": stability violated, λ=", lambda, " ≥ μ_b=", mu_b);
    if (!(mu_b < mu_e)) detail::fail("BS ", i + 1, ": stability violated, μ_b=", mu_b, " ≥ μ_e=", mu_e);
    if (!std::isfinite(mu_e)) detail::fail("BS ", i + 1, ": μ_e must be finite");
  }
}

/// Checks every type invariant and returns the scenario unchanged, or throws
/// std::invalid_argument naming the first violation.
inline Scenario validate_scenario(Scenario s) {
  validate_library(s.library);
  validate_cluster(s.cluster);
  validate_traffic(s.traffic, s.cluster.size());
  return s;
}

// ---------------------------------------------------------------------------
// Placement
// ---------------------------------------------------------------------------

/// N×F matrix of cached portions. The flattened vector is node-major:
/// entry j = i·F + f (0-based) holds P(i, f).
class Placement {
 public:
  Placement() = default;
  Placement(std::size_t num_nodes, std::size_t num_contents)
      : matrix_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(num_nodes),
                                      static_cast<Eigen::Index>(num_contents))) {}
  explicit Placement(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {}

  static Placement from_vector(const Eigen::VectorXd& p, std::size_t num_nodes, std::size_t num_contents) {
    if (static_cast<std::size_t>(p.size()) != num_nodes * num_contents) {
      detail::fail("placement: vector length ", p.size(), " does not match N·F=", num_nodes * num_contents);
    }
    Placement out(num_nodes, num_contents);
    for (std::size_t i = 0; i < num_nodes; ++i) {
      for (std::size_t f = 0; f < num_contents; ++f) {
        out(i, f) = p(static_cast<Eigen::Index>(i * num_contents + f));
      }
    }
    return out;
  }

  Eigen::VectorXd flatten() const {
    Eigen::VectorXd p(matrix_.size());
    for (Eigen::Index i = 0; i < matrix_.rows(); ++i) {
      for (Eigen::Index f = 0; f < matrix_.cols(); ++f) p(i * matrix_.cols() + f) = matrix_(i, f);
    }
    return p;
  }

  std::size_t num_nodes() const { return static_cast<std::size_t>(matrix_.rows()); }
  std::size_t num_contents() const { return static_cast<std::size_t>(matrix_.cols()); }

  double& operator()(std::size_t i, std::size_t f) {
    return matrix_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f));
  }
  double operator()(std::size_t i, std::size_t f) const {
    return matrix_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f));
  }

  const Eigen::MatrixXd& matrix() const { return matrix_; }

  bool operator==(const Placement& other) const {
    return matrix_.rows() == other.matrix_.rows() && matrix_.cols() == other.matrix_.cols() &&
           matrix_ == other.matrix_;
  }

 private:
  Eigen::MatrixXd matrix_;
};

/// Flat index of P(i, f).
inline std::size_t flat_index(std::size_t node, std::size_t content, std::size_t num_contents) {
  return node * num_contents + content;
}

/// Returns an empty string when the placement meets the box bounds, the
/// per-content limit and every node's capacity within `tol`; otherwise a
/// description of the first violated bound.
inline std::string placement_violation(const Placement& placement, const ContentLibrary& lib,
                                       const FogCluster& cluster, double tol = kFeasibilityTol) {
  std::ostringstream os;
  if (placement.num_nodes() != cluster.size() || placement.num_contents() != lib.size()) {
    os << "placement is " << placement.num_nodes() << "x" << placement.num_contents() << ", expected "
       << cluster.size() << "x" << lib.size();
    return os.str();
  }
  const auto& m = placement.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index f = 0; f < m.cols(); ++f) {
      if (!(m(i, f) >= -tol && m(i, f) <= 1.0 + tol)) {
        os << "P(" << i + 1 << "," << f + 1 << ")=" << m(i, f) << " outside [0,1]";
        return os.str();
      }
    }
  }
  for (Eigen::Index f = 0; f < m.cols(); ++f) {
    const double total = m.col(f).sum();
    if (total > 1.0 + tol) {
      os << "content " << f + 1 << ": cached portions sum to " << total << " > 1";
      return os.str();
    }
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double used = 0.0;
    for (Eigen::Index f = 0; f < m.cols(); ++f) used += m(i, f) * lib.sizes[static_cast<std::size_t>(f)];
    const double cap = cluster.capacities[static_cast<std::size_t>(i)];
    if (used > cap + tol) {
      os << "node " << i + 1 << ": storage " << used << " exceeds capacity " << cap;
      return os.str();
    }
  }
  return {};
}

inline bool is_feasible(const Placement& placement, const ContentLibrary& lib, const FogCluster& cluster,
                        double tol = kFeasibilityTol) {
  return placement_violation(placement, lib, cluster, tol).empty();
}

inline void require_feasible(const Placement& placement, const ContentLibrary& lib, const FogCluster& cluster,
                             double tol = kFeasibilityTol) {
  const std::string why = placement_violation(placement, lib, cluster, tol);
  if (!why.empty()) throw std::invalid_argument("infeasible placement: " + why);
}

/// Builds a validated scenario with one shared Zipf library, equal content
/// sizes and identical rates at every base station.
inline Scenario homogeneous_scenario(std::size_t num_contents, double alpha, std::vector<double> capacities,
                                     double lambda, double mu_e, double mu_b, double content_size = 1.0) {
  Scenario s;
  s.library.sizes.assign(num_contents, content_size);
  s.library.popularity = zipf_popularity(static_cast<long long>(num_contents), alpha);
  const std::size_t n = capacities.size();
  s.cluster.capacities = std::move(capacities);
  s.traffic.lambda.assign(n, lambda);
  s.traffic.mu_e.assign(n, mu_e);
  s.traffic.mu_b.assign(n, mu_b);
  return validate_scenario(std::move(s));
}

}  // namespace fogcache

#endif  // FOGCACHE_MODEL_HPP
