// fogcache: cache placement solver and experiment runner.
//
//   fogcache solve     --scenario s.json [--solver admm|pgd] [--out DIR]
//   fogcache heuristic --scenario s.json [--out DIR]
//   fogcache sweep     --sweep sweep.json [--solver admm,pgd,heuristic,csl-only] [--out FILE]
//   fogcache simulate  --scenario s.json --placement p.json [--seed N] [--arrivals N] [--out FILE]
//
// Exit codes: 0 success, 1 numerical non-convergence, 2 input error.

#include "fogcache/fogcache.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using fogcache::InputError;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNotConverged = 1;
constexpr int kExitInput = 2;

struct Options {
  std::string scenario;
  std::string placement;
  std::string sweep;
  std::string solver;
  std::string out;
  double rho = fogcache::AdmmConfig{}.rho;
  double eps_abs = fogcache::AdmmConfig{}.eps_abs;
  double eps_rel = fogcache::AdmmConfig{}.eps_rel;
  int max_iter = fogcache::AdmmConfig{}.max_iter;
  std::uint64_t seed = 1;
  std::int64_t arrivals = 1'000'000;
};

fogcache::SolverSettings settings_from(const Options& o) {
  fogcache::SolverSettings s;
  s.admm.rho = o.rho;
  s.admm.eps_abs = o.eps_abs;
  s.admm.eps_rel = o.eps_rel;
  s.admm.max_iter = o.max_iter;
  s.admm.validate();
  return s;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
}

fs::path output_dir(const std::string& out) {
  fs::path dir(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create " + out + ": " + ec.message());
  return dir;
}

nlohmann::json report_json(const fogcache::AdtReport& r) {
  return {{"echr", r.h_e},     {"btr", r.h_b},
          {"adt", r.overall},  {"per_station_adt", r.per_station},
          {"t_edge", r.t_e},   {"t_cloud", r.t_b}};
}

int cmd_solve(const Options& o) {
  const auto scenario = fogcache::load_scenario(o.scenario);
  const auto kind = fogcache::parse_solver(o.solver.empty() ? "admm" : o.solver);
  if (kind != fogcache::SolverKind::kAdmm && kind != fogcache::SolverKind::kPgd) {
    throw InputError("solve supports --solver admm or pgd");
  }
  const auto outcome = fogcache::run_solver(kind, scenario, settings_from(o));
  nlohmann::json report = report_json(fogcache::overall_adt(outcome.placement, scenario));
  report["solver"] = fogcache::to_string(kind);
  report["iterations"] = outcome.iterations;
  report["converged"] = outcome.converged;

  if (!o.out.empty()) {
    const fs::path dir = output_dir(o.out);
    write_file(dir / "placement.json", fogcache::placement_to_json(outcome.placement).dump(2) + "\n");
    write_file(dir / "report.json", report.dump(2) + "\n");
    std::ostringstream trace;
    fogcache::write_trace_csv(trace, outcome.trace);
    write_file(dir / "trace.csv", trace.str());
  }
  std::cout << report.dump(2) << "\n";
  if (!outcome.converged) {
    std::cerr << "fogcache: solver did not converge within " << outcome.iterations << " iterations\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

int cmd_heuristic(const Options& o) {
  const auto scenario = fogcache::load_scenario(o.scenario);
  const auto result = fogcache::heuristic_solve(scenario);
  nlohmann::json report = {{"h_csl", result.h_csl},
                           {"h_cpl", result.h_cpl},
                           {"h_star", result.h_star},
                           {"regime", fogcache::to_string(result.regime)}};
  report["lambda_star"] = result.lambda_star ? nlohmann::json(*result.lambda_star) : nlohmann::json();
  if (scenario.library.equal_sizes()) {
    report["adt"] = fogcache::overall_adt(result.placement, scenario).overall;
  } else {
    report["adt"] = nullptr;
  }
  if (!o.out.empty()) {
    const fs::path dir = output_dir(o.out);
    write_file(dir / "placement.json", fogcache::placement_to_json(result.placement).dump(2) + "\n");
    write_file(dir / "report.json", report.dump(2) + "\n");
  }
  std::cout << report.dump(2) << "\n";
  return kExitOk;
}

std::vector<fogcache::SolverKind> parse_solver_list(const std::string& list) {
  std::vector<fogcache::SolverKind> out;
  std::stringstream ss(list.empty() ? "admm,pgd,heuristic,csl-only" : list);
  for (std::string name; std::getline(ss, name, ',');) {
    if (!name.empty()) out.push_back(fogcache::parse_solver(name));
  }
  if (out.empty()) throw InputError("no solvers given");
  return out;
}

int cmd_sweep(const Options& o) {
  const auto spec = fogcache::load_sweep(o.sweep);
  const auto rows = fogcache::run_sweep(spec, parse_solver_list(o.solver), settings_from(o));
  std::ostringstream csv;
  fogcache::write_sweep_csv(csv, rows);
  if (o.out.empty()) {
    std::cout << csv.str();
  } else {
    write_file(o.out, csv.str());
  }
  return kExitOk;
}

int cmd_simulate(const Options& o) {
  const auto scenario = fogcache::load_scenario(o.scenario);
  const auto placement = fogcache::load_placement(o.placement, scenario);
  if (o.arrivals < 2) throw InputError("--arrivals must be at least 2");
  const auto rows = fogcache::simulate_all(placement, scenario, o.seed, o.arrivals);
  std::ostringstream csv;
  fogcache::write_simulation_csv(csv, rows);
  if (o.out.empty()) {
    std::cout << csv.str();
  } else {
    write_file(o.out, csv.str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cache placement for fog clusters: ADMM solver, heuristic, sweeps and queue simulation"};
  app.require_subcommand(1);
  Options o;

  auto add_admm_flags = [&](CLI::App* cmd) {
    cmd->add_option("--rho", o.rho, "ADMM augmented Lagrangian factor");
    cmd->add_option("--eps-abs", o.eps_abs, "ADMM absolute residual tolerance");
    cmd->add_option("--eps-rel", o.eps_rel, "ADMM relative residual tolerance");
    cmd->add_option("--max-iter", o.max_iter, "ADMM iteration cap");
  };

  auto* solve = app.add_subcommand("solve", "Compute the ADT-optimal placement");
  solve->add_option("--scenario", o.scenario, "Scenario JSON")->required();
  solve->add_option("--solver", o.solver, "admm (default) or pgd");
  solve->add_option("--out", o.out, "Directory for placement.json, report.json and trace.csv");
  add_admm_flags(solve);

  auto* heuristic = app.add_subcommand("heuristic", "Closed-form CSL/CPL heuristic placement");
  heuristic->add_option("--scenario", o.scenario, "Scenario JSON")->required();
  heuristic->add_option("--out", o.out, "Directory for placement.json and report.json");

  auto* sweep = app.add_subcommand("sweep", "Sweep lambda, mu_b, mu_e or F and tabulate solvers");
  sweep->add_option("--sweep", o.sweep, "Sweep JSON")->required();
  sweep->add_option("--solver", o.solver, "Comma list of admm, pgd, heuristic, csl-only");
  sweep->add_option("--out", o.out, "CSV output file (default stdout)");
  add_admm_flags(sweep);

  auto* simulate = app.add_subcommand("simulate", "Simulate the station queues under a placement");
  simulate->add_option("--scenario", o.scenario, "Scenario JSON")->required();
  simulate->add_option("--placement", o.placement, "Placement JSON")->required();
  simulate->add_option("--seed", o.seed, "Random seed");
  simulate->add_option("--arrivals", o.arrivals, "Arrivals per queue");
  simulate->add_option("--out", o.out, "CSV output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*solve) return cmd_solve(o);
    if (*heuristic) return cmd_heuristic(o);
    if (*sweep) return cmd_sweep(o);
    if (*simulate) return cmd_simulate(o);
  } catch (const fogcache::NumericalError& e) {
    std::cerr << "fogcache: " << e.what() << "\n";
    return kExitNotConverged;
  } catch (const std::exception& e) {
    std::cerr << "fogcache: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
