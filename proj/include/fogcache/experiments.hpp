#ifndef FOGCACHE_EXPERIMENTS_HPP
#define FOGCACHE_EXPERIMENTS_HPP

// Parameter sweeps and simulation tables behind the command-line tool.
//
// Sweep CSV columns:      value,solver,echr,adt,iterations,wall_time
// Simulation CSV columns: station,h_e,lambda_e,lambda_b,sim_edge,sim_cloud,
//                         sim_adt,ci_adt,analytic_edge,analytic_cloud,
//                         analytic_adt,rel_error

#include "fogcache/admm.hpp"
#include "fogcache/baselines.hpp"
#include "fogcache/heuristic.hpp"
#include "fogcache/io.hpp"
#include "fogcache/objective.hpp"
#include "fogcache/queuesim.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <future>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace fogcache {

enum class SolverKind { kAdmm, kPgd, kHeuristic, kCslOnly };

inline const char* to_string(SolverKind s) {
  switch (s) {
    case SolverKind::kAdmm: return "admm";
    case SolverKind::kPgd: return "pgd";
    case SolverKind::kHeuristic: return "heuristic";
    case SolverKind::kCslOnly: return "csl-only";
  }
  return "?";
}

inline SolverKind parse_solver(const std::string& name) {
  if (name == "admm") return SolverKind::kAdmm;
  if (name == "pgd") return SolverKind::kPgd;
  if (name == "heuristic") return SolverKind::kHeuristic;
  if (name == "csl-only") return SolverKind::kCslOnly;
  throw InputError("unknown solver '" + name + "' (expected admm, pgd, heuristic or csl-only)");
}

/// Solver settings shared by every sweep point.
struct SolverSettings {
  AdmmConfig admm;
  BaselineConfig pgd;
};

struct SolveOutcome {
  Placement placement;
  std::vector<TraceRecord> trace;
  int iterations = 0;
  bool converged = true;
};

inline SolveOutcome run_solver(SolverKind kind, const Scenario& s, const SolverSettings& settings = {}) {
  switch (kind) {
    case SolverKind::kAdmm: {
      auto r = solve_admm(s, settings.admm);
      return {std::move(r.placement), std::move(r.state.trace), r.state.k, r.state.converged};
    }
    case SolverKind::kPgd: {
      auto r = projected_gradient_solve(s, settings.pgd);
      return {std::move(r.placement), std::move(r.trace), r.iterations, r.converged};
    }
    case SolverKind::kHeuristic:
      return {heuristic_solve(s).placement, {}, 0, true};
    case SolverKind::kCslOnly:
      return {echr_csl(s.library, s.cluster).placement, {}, 0, true};
  }
  return {};
}

enum class SweepParameter { kLambda, kMuB, kMuE, kF };

inline SweepParameter parse_sweep_parameter(const std::string& name) {
  if (name == "lambda") return SweepParameter::kLambda;
  if (name == "mu_b") return SweepParameter::kMuB;
  if (name == "mu_e") return SweepParameter::kMuE;
  if (name == "F") return SweepParameter::kF;
  throw InputError("unknown sweep parameter '" + name + "' (expected lambda, mu_b, mu_e or F)");
}

struct SweepSpec {
  SweepParameter parameter = SweepParameter::kLambda;
  std::vector<double> values;
  nlohmann::json base;  // scenario document every point is derived from
};

/// Sweep file: {"parameter": "mu_b", "values": [...], "base": <scenario
/// object or path relative to the sweep file>}.
inline SweepSpec sweep_from_json(const nlohmann::json& j, const std::filesystem::path& relative_to = {}) {
  SweepSpec spec;
  if (!j.is_object() || !j.contains("parameter") || !j.at("parameter").is_string()) {
    throw InputError("sweep: missing 'parameter'");
  }
  spec.parameter = parse_sweep_parameter(j.at("parameter").get<std::string>());
  spec.values = detail::number_array(j, "values");
  if (spec.values.empty()) throw InputError("sweep: 'values' is empty");
  if (!j.contains("base")) throw InputError("sweep: missing 'base'");
  const auto& base = j.at("base");
  if (base.is_string()) {
    spec.base = detail::read_json_file((relative_to / base.get<std::string>()).string());
  } else if (base.is_object()) {
    spec.base = base;
  } else {
    throw InputError("sweep: 'base' must be a scenario object or a file path");
  }
  return spec;
}

inline SweepSpec load_sweep(const std::string& path) {
  return sweep_from_json(detail::read_json_file(path), std::filesystem::path(path).parent_path());
}

/// Scenario at one sweep value. Rate parameters are set at every base
/// station; F regenerates the Zipf library from the base's alpha and first
/// content size. Throws if the resulting scenario is invalid.
inline Scenario scenario_at(const SweepSpec& spec, double value) {
  nlohmann::json doc = spec.base;
  auto set_all = [&](const char* field) {
    auto& arr = doc.at("traffic").at(field);
    for (auto& v : arr) v = value;
  };
  switch (spec.parameter) {
    case SweepParameter::kLambda: set_all("lambda"); break;
    case SweepParameter::kMuB: set_all("mu_b"); break;
    case SweepParameter::kMuE: set_all("mu_e"); break;
    case SweepParameter::kF: {
      auto& lib = doc.at("library");
      if (!lib.contains("alpha")) throw InputError("sweep over F needs a base library with 'alpha'");
      if (value < 1.0 || value != std::floor(value)) throw InputError("sweep over F needs positive integers");
      const auto count = static_cast<std::size_t>(value);
      const double size = lib.at("sizes").at(0).get<double>();
      lib["F"] = count;
      lib["sizes"] = std::vector<double>(count, size);
      break;
    }
  }
  return scenario_from_json(doc);
}

struct SweepRow {
  double value = 0.0;
  SolverKind solver = SolverKind::kAdmm;
  bool valid = false;
  double echr = 0.0;
  double adt = 0.0;
  int iterations = 0;
  double wall_time = 0.0;
};

inline std::vector<SweepRow> sweep_point(const SweepSpec& spec, double value, const std::vector<SolverKind>& solvers,
                                         const SolverSettings& settings) {
  std::vector<SweepRow> rows;
  std::optional<Scenario> scenario;
  try {
    scenario = scenario_at(spec, value);
  } catch (const std::exception&) {
    for (SolverKind k : solvers) rows.push_back({value, k, false});
    return rows;
  }
  for (SolverKind k : solvers) {
    SweepRow row{value, k, true};
    const auto start = std::chrono::steady_clock::now();
    try {
      const SolveOutcome out = run_solver(k, *scenario, settings);
      row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      const AdtReport report = overall_adt(out.placement, *scenario);
      row.echr = report.h_e;
      row.adt = report.overall;
      row.iterations = out.iterations;
    } catch (const std::exception&) {
      row.valid = false;
    }
    rows.push_back(row);
  }
  return rows;
}

/// Runs every sweep point concurrently; rows come back in input order.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec, const std::vector<SolverKind>& solvers,
                                       const SolverSettings& settings = {}) {
  std::vector<std::future<std::vector<SweepRow>>> jobs;
  for (double v : spec.values) {
    jobs.push_back(std::async(std::launch::async, [&spec, &solvers, &settings, v] {
      return sweep_point(spec, v, solvers, settings);
    }));
  }
  std::vector<SweepRow> rows;
  for (auto& job : jobs) {
    for (auto& row : job.get()) rows.push_back(row);
  }
  return rows;
}

namespace detail {

inline std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace detail

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "value,solver,echr,adt,iterations,wall_time\n";
  for (const auto& r : rows) {
    os << detail::fmt("%.10g", r.value) << ',' << to_string(r.solver) << ',';
    if (r.valid) {
      os << detail::fmt("%.12g", r.echr) << ',' << detail::fmt("%.12g", r.adt) << ',' << r.iterations << ','
         << detail::fmt("%.6f", r.wall_time) << '\n';
    } else {
      os << "invalid,invalid,,\n";
    }
  }
}

struct SimulationRow {
  std::size_t station = 0;
  SimResult sim;
  double lambda_e = 0.0;
  double lambda_b = 0.0;
  AdtReport analytic;
};

/// Simulates every base station; station i uses seed + i.
inline std::vector<SimulationRow> simulate_all(const Placement& placement, const Scenario& scenario,
                                               std::uint64_t seed, std::int64_t arrivals) {
  const AdtReport analytic = overall_adt(placement, scenario);
  std::vector<std::future<SimResult>> jobs;
  for (std::size_t i = 0; i < scenario.num_nodes(); ++i) {
    const SimConfig config = SimConfig::with_default_warmup(seed + i, arrivals);
    jobs.push_back(std::async(std::launch::async, [&placement, &scenario, i, config] {
      return simulate_station(placement, scenario, i, config);
    }));
  }
  std::vector<SimulationRow> rows;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const double lambda = scenario.traffic.lambda[i];
    rows.push_back({i, jobs[i].get(), lambda * analytic.h_e, lambda * (1.0 - analytic.h_e), analytic});
  }
  return rows;
}

inline void write_simulation_csv(std::ostream& os, const std::vector<SimulationRow>& rows) {
  os << "station,h_e,lambda_e,lambda_b,sim_edge,sim_cloud,sim_adt,ci_adt,analytic_edge,analytic_cloud,"
        "analytic_adt,rel_error\n";
  for (const auto& r : rows) {
    const std::size_t i = r.station;
    const double analytic = r.analytic.per_station[i];
    os << i + 1 << ',' << detail::fmt("%.10g", r.sim.h_e) << ',' << detail::fmt("%.10g", r.lambda_e) << ','
       << detail::fmt("%.10g", r.lambda_b) << ',';
    os << (r.sim.edge ? detail::fmt("%.10g", r.sim.edge->mean) : "") << ',';
    os << (r.sim.cloud ? detail::fmt("%.10g", r.sim.cloud->mean) : "") << ',';
    os << detail::fmt("%.10g", r.sim.mean_adt) << ',' << detail::fmt("%.10g", r.sim.ci_halfwidth) << ',';
    os << (r.sim.edge ? detail::fmt("%.10g", r.analytic.t_e[i]) : "") << ',';
    os << (r.sim.cloud ? detail::fmt("%.10g", r.analytic.t_b[i]) : "") << ',';
    os << detail::fmt("%.10g", analytic) << ',' << detail::fmt("%.6g", std::abs(r.sim.mean_adt - analytic) / analytic)
       << '\n';
  }
}

}  // namespace fogcache

#endif  // FOGCACHE_EXPERIMENTS_HPP
