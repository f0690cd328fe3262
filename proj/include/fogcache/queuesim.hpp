#ifndef FOGCACHE_QUEUESIM_HPP
#define FOGCACHE_QUEUESIM_HPP

// Seeded simulation of the two-queue station model. Each queue is a FIFO
// M/M/1 driven by std::mt19937_64 (bit-exact across standard libraries)
// through an inverse-CDF exponential sampler, so results are reproducible
// everywhere. Sojourns follow the Lindley recursion
//   W_{n+1} = max(0, W_n + S_n - A_{n+1}),  sojourn_n = W_n + S_n.

#include "fogcache/model.hpp"
#include "fogcache/objective.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace fogcache {

struct SimConfig {
  std::uint64_t seed = 1;
  std::int64_t n_arrivals = 1'000'000;
  std::int64_t warmup = 10'000;

  /// Config with the default warmup of 1% of arrivals.
  static SimConfig with_default_warmup(std::uint64_t seed, std::int64_t n_arrivals) {
    return {seed, n_arrivals, n_arrivals / 100};
  }

  void validate() const {
    if (!(warmup >= 0 && n_arrivals > warmup)) {
      detail::fail("simulation: need n_arrivals > warmup >= 0, got ", n_arrivals, " and ", warmup);
    }
  }
};

/// Mean sojourn of one queue with a 95% half-width from 20 batch means.
struct QueueStats {
  double mean = 0.0;
  double ci_halfwidth = 0.0;
  std::int64_t samples = 0;
};

struct SimResult {
  double h_e = 0.0;
  std::optional<QueueStats> edge;   // absent when no traffic reaches the queue
  std::optional<QueueStats> cloud;
  double mean_adt = 0.0;
  double ci_halfwidth = 0.0;
};

/// Exponential variates by inversion: u takes the top 53 bits of one
/// 64-bit draw, x = -log(1 - u) / rate.
class ExponentialSampler {
 public:
  explicit ExponentialSampler(std::uint64_t seed) : gen_(seed) {}

  double operator()(double rate) {
    const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    return -std::log1p(-u) / rate;
  }

 private:
  std::mt19937_64 gen_;
};

/// SplitMix64 finalizer, used to derive independent stream seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline QueueStats simulate_mm1(double lambda, double mu, const SimConfig& config) {
  config.validate();
  if (!(lambda > 0.0 && lambda < mu)) {
    detail::fail("simulate_mm1: unstable queue, need 0 < λ < μ, got λ=", lambda, " μ=", mu);
  }
  constexpr int kBatches = 20;
  ExponentialSampler draw(config.seed);
  const std::int64_t kept = config.n_arrivals - config.warmup;
  std::vector<double> batch_sum(kBatches, 0.0);
  std::vector<std::int64_t> batch_count(kBatches, 0);

  double wait = 0.0;
  double total = 0.0;
  for (std::int64_t n = 0; n < config.n_arrivals; ++n) {
    const double service = draw(mu);
    const double sojourn = wait + service;
    if (n >= config.warmup) {
      const std::int64_t idx = n - config.warmup;
      const auto b = static_cast<std::size_t>(idx * kBatches / kept);
      batch_sum[b] += sojourn;
      ++batch_count[b];
      total += sojourn;
    }
    const double gap = draw(lambda);
    wait = std::max(0.0, sojourn - gap);
  }

  QueueStats stats;
  stats.samples = kept;
  stats.mean = total / static_cast<double>(kept);
  double var = 0.0;
  int used = 0;
  for (int b = 0; b < kBatches; ++b) {
    if (batch_count[b] == 0) continue;
    const double diff = batch_sum[b] / static_cast<double>(batch_count[b]) - stats.mean;
    var += diff * diff;
    ++used;
  }
  if (used > 1) stats.ci_halfwidth = 1.96 * std::sqrt(var / (used - 1) / used);
  return stats;
}

/// Simulates base station `station` under `placement`: arrivals split by
/// the hit ratio into independent edge and cloud Poisson streams.
inline SimResult simulate_station(const Placement& placement, const Scenario& scenario, std::size_t station,
                                  const SimConfig& config) {
  if (station >= scenario.num_nodes()) detail::fail("simulate_station: no base station ", station + 1);
  require_feasible(placement, scenario.library, scenario.cluster);
  const double h = std::clamp(echr(placement, scenario.library), 0.0, 1.0);
  const StationRates r = scenario.traffic.station(station);

  SimResult out;
  out.h_e = h;
  const double lambda_e = r.lambda * h;
  const double lambda_b = r.lambda * (1.0 - h);
  double var = 0.0;
  if (lambda_e > 0.0) {
    out.edge = simulate_mm1(lambda_e, r.mu_e, config);
    out.mean_adt += h * out.edge->mean;
    var += std::pow(h * out.edge->ci_halfwidth, 2);
  }
  if (lambda_b > 0.0) {
    SimConfig cloud = config;
    cloud.seed = mix_seed(config.seed);
    out.cloud = simulate_mm1(lambda_b, r.mu_b, cloud);
    out.mean_adt += (1.0 - h) * out.cloud->mean;
    var += std::pow((1.0 - h) * out.cloud->ci_halfwidth, 2);
  }
  out.ci_halfwidth = std::sqrt(var);
  return out;
}

}  // namespace fogcache

#endif  // FOGCACHE_QUEUESIM_HPP
