#ifndef FOGCACHE_OBJECTIVE_HPP
#define FOGCACHE_OBJECTIVE_HPP

// Analytic download-time model. Each base station serves edge hits and
// cloud fetches as two M/M/1 queues; the overall ADT D depends on the
// placement only through the scalar edge-cache-hit ratio h = c·p.

#include "fogcache/model.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace fogcache {

struct QueueSplit {
  std::vector<double> lambda_e;
  std::vector<double> lambda_b;
};

struct AdtReport {
  double h_e = 0.0;
  double h_b = 1.0;
  std::vector<double> t_e;  // per-station edge sojourn 1/(μ_e − λ_e)
  std::vector<double> t_b;  // per-station cloud sojourn 1/(μ_b − λ_b)
  std::vector<double> per_station;
  double overall = 0.0;
};

/// Popularity replicated once per node: h = c·p for the node-major vector p.
inline Eigen::VectorXd hit_weights(const ContentLibrary& lib, std::size_t num_nodes) {
  const std::size_t num_contents = lib.size();
  Eigen::VectorXd c(static_cast<Eigen::Index>(num_nodes * num_contents));
  for (std::size_t i = 0; i < num_nodes; ++i) {
    for (std::size_t f = 0; f < num_contents; ++f) {
      c(static_cast<Eigen::Index>(flat_index(i, f, num_contents))) = lib.popularity[f];
    }
  }
  return c;
}

/// Edge-cache-hit ratio H_e(P) = Σ_f P_r(f) Σ_i P(i,f).
inline double echr(const Placement& placement, const ContentLibrary& lib) {
  if (placement.num_contents() != lib.size()) {
    detail::fail("echr: placement has ", placement.num_contents(), " contents, library has ", lib.size());
  }
  double h = 0.0;
  for (std::size_t f = 0; f < lib.size(); ++f) {
    double cached = 0.0;
    for (std::size_t i = 0; i < placement.num_nodes(); ++i) cached += placement(i, f);
    h += lib.popularity[f] * cached;
  }
  return h;
}

inline QueueSplit split_arrivals(double h, const TrafficProfile& traffic) {
  QueueSplit split;
  for (double lambda : traffic.lambda) {
    split.lambda_e.push_back(lambda * h);
    split.lambda_b.push_back(lambda - lambda * h);
  }
  return split;
}

namespace detail {

inline void check_rates(const StationRates& r) {
  if (!(r.lambda > 0.0 && r.lambda < r.mu_b && r.mu_b < r.mu_e)) {
    fail("unstable rates: need 0 < λ < μ_b < μ_e, got λ=", r.lambda, " μ_b=", r.mu_b, " μ_e=", r.mu_e);
  }
}

inline void check_echr(double h) {
  if (!(h >= 0.0 && h <= 1.0)) fail("ECHR ", h, " outside [0,1]");
}

// Station ADT and its first two derivatives in h. Valid on the open interval
// where both queue denominators are positive, which contains [0,1].
inline double station_adt(double h, const StationRates& r) {
  return h / (r.mu_e - r.lambda * h) + (1.0 - h) / (r.mu_b - r.lambda * (1.0 - h));
}

inline double station_adt_d1(double h, const StationRates& r) {
  const double de = r.mu_e - r.lambda * h;
  const double db = r.mu_b - r.lambda * (1.0 - h);
  return r.mu_e / (de * de) - r.mu_b / (db * db);
}

inline double station_adt_d2(double h, const StationRates& r) {
  const double de = r.mu_e - r.lambda * h;
  const double db = r.mu_b - r.lambda * (1.0 - h);
  return 2.0 * r.mu_e * r.lambda / (de * de * de) + 2.0 * r.mu_b * r.lambda / (db * db * db);
}

}  // namespace detail

/// Station ADT D_i as a function of the hit ratio.
inline double adt_of_echr(double h, double lambda, double mu_e, double mu_b) {
  const StationRates r{lambda, mu_e, mu_b};
  detail::check_echr(h);
  detail::check_rates(r);
  return detail::station_adt(h, r);
}

/// The overall ADT as a scalar function of h, with derivatives. Weights are
/// λ_i / Σλ. Evaluation is defined on domain() which strictly contains [0,1].
class AdtCurve {
 public:
  explicit AdtCurve(const TrafficProfile& traffic) {
    const double total = traffic.total_lambda();
    lo_ = -std::numeric_limits<double>::infinity();
    hi_ = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < traffic.size(); ++i) {
      const StationRates r = traffic.station(i);
      detail::check_rates(r);
      stations_.push_back(r);
      weights_.push_back(r.lambda / total);
      lo_ = std::max(lo_, 1.0 - r.mu_b / r.lambda);
      hi_ = std::min(hi_, r.mu_e / r.lambda);
    }
  }

  double value(double h) const { return accumulate(h, detail::station_adt); }
  double d1(double h) const { return accumulate(h, detail::station_adt_d1); }
  double d2(double h) const { return accumulate(h, detail::station_adt_d2); }

  /// Open interval (lo, hi) on which every queue is stable.
  std::pair<double, double> domain() const { return {lo_, hi_}; }

  const std::vector<StationRates>& stations() const { return stations_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  template <typename Fn>
  double accumulate(double h, Fn fn) const {
    double total = 0.0;
    for (std::size_t i = 0; i < stations_.size(); ++i) total += weights_[i] * fn(h, stations_[i]);
    return total;
  }

  std::vector<StationRates> stations_;
  std::vector<double> weights_;
  double lo_;
  double hi_;
};

namespace detail {

inline void require_equal_sizes(const ContentLibrary& lib) {
  if (!lib.equal_sizes()) fail("the ADT model requires all contents to have equal size");
}

}  // namespace detail

/// Full ADT breakdown for a feasible placement.
inline AdtReport overall_adt(const Placement& placement, const Scenario& scenario) {
  detail::require_equal_sizes(scenario.library);
  require_feasible(placement, scenario.library, scenario.cluster);
  // Clamp away rounding from the feasibility tolerance.
  const double h = std::clamp(echr(placement, scenario.library), 0.0, 1.0);

  AdtReport report;
  report.h_e = h;
  report.h_b = 1.0 - h;
  const double total = scenario.traffic.total_lambda();
  for (std::size_t i = 0; i < scenario.traffic.size(); ++i) {
    const StationRates r = scenario.traffic.station(i);
    detail::check_rates(r);
    report.t_e.push_back(1.0 / (r.mu_e - r.lambda * h));
    report.t_b.push_back(1.0 / (r.mu_b - r.lambda * (1.0 - h)));
    const double d = detail::station_adt(h, r);
    report.per_station.push_back(d);
    report.overall += r.lambda / total * d;
  }
  return report;
}

/// Overall ADT D for a placement vector. Unlike overall_adt this only
/// requires c·p to lie in the stable domain, so it can score ADMM's p iterate.
inline double adt_of_vector(const Eigen::VectorXd& p, const Scenario& scenario) {
  const Eigen::VectorXd c = hit_weights(scenario.library, scenario.num_nodes());
  if (p.size() != c.size()) detail::fail("placement vector has length ", p.size(), ", expected ", c.size());
  const AdtCurve curve(scenario.traffic);
  const double h = c.dot(p);
  const auto [lo, hi] = curve.domain();
  if (!(h > lo && h < hi)) detail::fail("ECHR ", h, " outside the stable range");
  return curve.value(h);
}

/// ∇D(p) = D'(h)·c. Requires p feasible.
inline Eigen::VectorXd grad_overall_adt(const Eigen::VectorXd& p, const Scenario& scenario) {
  detail::require_equal_sizes(scenario.library);
  if (static_cast<std::size_t>(p.size()) != scenario.dim()) {
    detail::fail("placement vector has length ", p.size(), ", expected ", scenario.dim());
  }
  const Placement placement = Placement::from_vector(p, scenario.num_nodes(), scenario.num_contents());
  require_feasible(placement, scenario.library, scenario.cluster);
  const Eigen::VectorXd c = hit_weights(scenario.library, scenario.num_nodes());
  const double h = std::clamp(c.dot(p), 0.0, 1.0);
  return AdtCurve(scenario.traffic).d1(h) * c;
}

/// d²D/dh², positive for every valid scenario.
inline double d2_adt_dh2(double h, const Scenario& scenario) {
  detail::check_echr(h);
  return AdtCurve(scenario.traffic).d2(h);
}

}  // namespace fogcache

#endif  // FOGCACHE_OBJECTIVE_HPP
