#ifndef FOGCACHE_HEURISTIC_HPP
#define FOGCACHE_HEURISTIC_HPP

// Closed-form placement heuristic. Two limiting regimes bound the optimal
// hit ratio:
//   CSL (cache-storage-limited): cache as much popularity mass as fits.
//   CPL (content-provision-limited): stop at the stationary point of D(h).
// The heuristic takes h* = min(h_csl, h_cpl) and realizes it as a placement.

#include "fogcache/model.hpp"
#include "fogcache/objective.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

namespace fogcache {

enum class Regime { kCsl, kCpl };

inline const char* to_string(Regime r) { return r == Regime::kCsl ? "CSL" : "CPL"; }

struct CslResult {
  double h_csl = 0.0;
  std::vector<double> fractions;  // cached portion x_f per content
  Placement placement;
};

struct HeuristicResult {
  double h_csl = 0.0;
  double h_cpl = 0.0;
  double h_star = 0.0;
  std::optional<double> lambda_star;
  Regime regime = Regime::kCpl;
  Placement placement;
};

namespace detail {

// Contents ordered by decreasing P_r(f)/S_f, ties by index.
inline std::vector<std::size_t> density_order(const ContentLibrary& lib) {
  std::vector<std::size_t> order(lib.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return lib.popularity[a] / lib.sizes[a] > lib.popularity[b] / lib.sizes[b];
  });
  return order;
}

// Spreads per-content fractions over nodes, filling node 1 first, then
// node 2, and so on. A content may straddle two nodes.
inline Placement assign_first_fit(const std::vector<double>& fractions, const std::vector<std::size_t>& order,
                                  const ContentLibrary& lib, const FogCluster& cluster) {
  Placement placement(cluster.size(), lib.size());
  std::vector<double> remaining = cluster.capacities;
  std::size_t node = 0;
  for (std::size_t f : order) {
    double storage = fractions[f] * lib.sizes[f];
    while (storage > 0.0 && node < cluster.size()) {
      const double put = std::min(storage, remaining[node]);
      placement(node, f) += put / lib.sizes[f];
      remaining[node] -= put;
      storage -= put;
      if (remaining[node] <= 0.0) ++node;
    }
  }
  return placement;
}

}  // namespace detail

/// Maximum hit ratio under the storage limit: fractional knapsack over the
/// pooled capacity, filled greedily by popularity per unit size.
inline CslResult echr_csl(const ContentLibrary& lib, const FogCluster& cluster) {
  const auto order = detail::density_order(lib);
  CslResult out;
  out.fractions.assign(lib.size(), 0.0);
  double room = cluster.total_capacity();
  for (std::size_t f : order) {
    if (room <= 0.0) break;
    const double x = std::min(1.0, room / lib.sizes[f]);
    out.fractions[f] = x;
    room -= x * lib.sizes[f];
  }
  for (std::size_t f = 0; f < lib.size(); ++f) out.h_csl += lib.popularity[f] * out.fractions[f];
  out.h_csl = std::min(out.h_csl, 1.0);
  out.placement = detail::assign_first_fit(out.fractions, order, lib, cluster);
  return out;
}

/// Stationary point of D(h), clamped to [0,1]. Homogeneous traffic uses the
/// closed form; otherwise D'(h) = 0 is bisected on [0,1].
inline double echr_cpl(const TrafficProfile& traffic) {
  if (traffic.homogeneous()) {
    const auto [lambda, mu_e, mu_b] = traffic.station(0);
    detail::check_rates({lambda, mu_e, mu_b});
    const double se = std::sqrt(mu_e);
    const double sb = std::sqrt(mu_b);
    const double h = ((mu_e - std::sqrt(mu_e * mu_b)) * sb + lambda * se) / (lambda * sb + lambda * se);
    return std::clamp(h, 0.0, 1.0);
  }
  const AdtCurve curve(traffic);
  double a = 0.0;
  double b = 1.0;
  if (curve.d1(a) >= 0.0) return 0.0;
  if (curve.d1(b) <= 0.0) return 1.0;
  while (b - a > 1e-12) {
    const double m = 0.5 * (a + b);
    if (curve.d1(m) < 0.0) {
      a = m;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

/// Arrival rate at which h_cpl(λ) = h_csl for homogeneous rates; empty when
/// the two curves never cross. CPL applies above the threshold.
inline std::optional<double> lambda_threshold(double h_csl, double mu_e, double mu_b) {
  if (!(mu_b > 0.0 && mu_b < mu_e)) detail::fail("lambda_threshold: need 0 < μ_b < μ_e, got μ_b=", mu_b, " μ_e=", mu_e);
  const double se = std::sqrt(mu_e);
  const double sb = std::sqrt(mu_b);
  const double denom = h_csl * (se + sb) - se;
  if (!(denom > 0.0)) return std::nullopt;
  return std::sqrt(mu_b * mu_e) * (se - sb) / denom;
}

/// Placement with hit ratio exactly `h_target`, filling contents in the CSL
/// greedy order and cutting the last one short.
inline Placement placement_from_echr(double h_target, const ContentLibrary& lib, const FogCluster& cluster) {
  const CslResult csl = echr_csl(lib, cluster);
  if (!(h_target >= 0.0)) detail::fail("placement_from_echr: target ", h_target, " is negative");
  if (h_target > csl.h_csl + 1e-12) {
    detail::fail("placement_from_echr: target ", h_target, " exceeds the storage-limited maximum ", csl.h_csl);
  }
  const auto order = detail::density_order(lib);
  std::vector<double> fractions(lib.size(), 0.0);
  double need = std::min(h_target, csl.h_csl);
  for (std::size_t f : order) {
    if (need <= 0.0) break;
    const double full = lib.popularity[f] * csl.fractions[f];
    if (full <= need) {
      fractions[f] = csl.fractions[f];
      need -= full;
    } else {
      fractions[f] = need / lib.popularity[f];
      need = 0.0;
    }
  }
  return detail::assign_first_fit(fractions, order, lib, cluster);
}

inline HeuristicResult heuristic_solve(const Scenario& scenario) {
  HeuristicResult out;
  out.h_csl = echr_csl(scenario.library, scenario.cluster).h_csl;
  out.h_cpl = echr_cpl(scenario.traffic);
  out.h_star = std::min(out.h_csl, out.h_cpl);
  out.regime = out.h_csl < out.h_cpl ? Regime::kCsl : Regime::kCpl;
  if (scenario.traffic.homogeneous()) {
    const auto r = scenario.traffic.station(0);
    out.lambda_star = lambda_threshold(out.h_csl, r.mu_e, r.mu_b);
  }
  out.placement = placement_from_echr(out.h_star, scenario.library, scenario.cluster);
  return out;
}

}  // namespace fogcache

#endif  // FOGCACHE_HEURISTIC_HPP
