#ifndef FOGCACHE_IO_HPP
#define FOGCACHE_IO_HPP

// JSON scenario and placement files, and the convergence-trace CSV.
//
// Scenario:
//   {"library": {"F": 20, "alpha": 0.6, "sizes": [...]},   // or "popularity": [...]
//    "cluster": {"capacities": [2, 3, 5]},
//    "traffic": {"lambda": [...], "mu_e": [...], "mu_b": [...]}}
//
// Placement ("P" is row i = node, column f = content):
//   {"N": 3, "F": 20, "P": [[...], ...]}

#include "fogcache/admm.hpp"
#include "fogcache/model.hpp"

#include <json.hpp>

#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fogcache {

/// Raised for unreadable or malformed input files.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<double> number_array(const nlohmann::json& j, const char* field) {
  if (!j.contains(field) || !j.at(field).is_array()) {
    throw InputError(std::string("missing array field '") + field + "'");
  }
  std::vector<double> out;
  for (const auto& v : j.at(field)) {
    if (!v.is_number()) throw InputError(std::string("non-numeric entry in '") + field + "'");
    out.push_back(v.get<double>());
  }
  return out;
}

inline const nlohmann::json& object_field(const nlohmann::json& j, const char* field) {
  if (!j.is_object() || !j.contains(field) || !j.at(field).is_object()) {
    throw InputError(std::string("missing object field '") + field + "'");
  }
  return j.at(field);
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

}  // namespace detail

/// Builds and validates a scenario from its JSON form. When "alpha" is
/// present the popularity is generated as Zipf(F, alpha).
inline Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario s;
  const auto& lib = detail::object_field(j, "library");
  s.library.sizes = detail::number_array(lib, "sizes");
  if (lib.contains("alpha")) {
    if (!lib.contains("F") || !lib.at("F").is_number_integer()) throw InputError("library: 'F' must be an integer");
    if (!lib.at("alpha").is_number()) throw InputError("library: 'alpha' must be a number");
    s.library.popularity = zipf_popularity(lib.at("F").get<long long>(), lib.at("alpha").get<double>());
  } else {
    s.library.popularity = detail::number_array(lib, "popularity");
  }
  if (lib.contains("F") && lib.at("F").is_number_integer() &&
      lib.at("F").get<long long>() != static_cast<long long>(s.library.sizes.size())) {
    throw InputError("library: 'F' does not match the length of 'sizes'");
  }
  s.cluster.capacities = detail::number_array(detail::object_field(j, "cluster"), "capacities");
  const auto& traffic = detail::object_field(j, "traffic");
  s.traffic.lambda = detail::number_array(traffic, "lambda");
  s.traffic.mu_e = detail::number_array(traffic, "mu_e");
  s.traffic.mu_b = detail::number_array(traffic, "mu_b");
  return validate_scenario(std::move(s));
}

inline nlohmann::json scenario_to_json(const Scenario& s) {
  return {{"library", {{"F", s.library.size()}, {"popularity", s.library.popularity}, {"sizes", s.library.sizes}}},
          {"cluster", {{"capacities", s.cluster.capacities}}},
          {"traffic", {{"lambda", s.traffic.lambda}, {"mu_e", s.traffic.mu_e}, {"mu_b", s.traffic.mu_b}}}};
}

inline Scenario load_scenario(const std::string& path) { return scenario_from_json(detail::read_json_file(path)); }

inline nlohmann::json placement_to_json(const Placement& placement) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < placement.num_nodes(); ++i) {
    std::vector<double> row(placement.num_contents());
    for (std::size_t f = 0; f < row.size(); ++f) row[f] = placement(i, f);
    rows.push_back(row);
  }
  return {{"N", placement.num_nodes()}, {"F", placement.num_contents()}, {"P", rows}};
}

/// Parses a placement and checks it against the scenario's shape and
/// constraints.
inline Placement placement_from_json(const nlohmann::json& j, const Scenario& scenario) {
  if (!j.is_object() || !j.contains("P") || !j.at("P").is_array()) throw InputError("placement: missing 'P' matrix");
  const auto& rows = j.at("P");
  if (rows.size() != scenario.num_nodes()) {
    throw InputError("placement: " + std::to_string(rows.size()) + " rows, scenario has N=" +
                     std::to_string(scenario.num_nodes()));
  }
  Placement placement(scenario.num_nodes(), scenario.num_contents());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].is_array() || rows[i].size() != scenario.num_contents()) {
      throw InputError("placement: row " + std::to_string(i + 1) + " does not have F=" +
                       std::to_string(scenario.num_contents()) + " entries");
    }
    for (std::size_t f = 0; f < scenario.num_contents(); ++f) {
      if (!rows[i][f].is_number()) throw InputError("placement: non-numeric entry");
      placement(i, f) = rows[i][f].get<double>();
    }
  }
  const std::string why = placement_violation(placement, scenario.library, scenario.cluster);
  if (!why.empty()) throw InputError("placement: " + why);
  return placement;
}

inline Placement load_placement(const std::string& path, const Scenario& scenario) {
  return placement_from_json(detail::read_json_file(path), scenario);
}

/// CSV with header k,objective,primal_residual,dual_residual.
inline void write_trace_csv(std::ostream& os, const std::vector<TraceRecord>& trace) {
  os << "k,objective,primal_residual,dual_residual\n";
  os.precision(17);
  for (const auto& r : trace) {
    os << r.k << ',' << r.objective << ',' << r.primal_residual << ',' << r.dual_residual << '\n';
  }
}

}  // namespace fogcache

#endif  // FOGCACHE_IO_HPP
