#pragma once

#include "rdbp/claims.hpp"
#include "rdbp/equilibrium.hpp"
#include "rdbp/scenario.hpp"
#include "rdbp/simulator.hpp"

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace rdbp {

// "lo:hi:n" -> n evenly spaced values (n == 0 gives an empty list)
std::vector<double> parse_grid(const std::string& spec);
// "v1,v2,..." -> values
std::vector<double> parse_list(const std::string& spec);
// "hi" | "hni" | "ini" -> class evaluated at y
ClassTag parse_contour(const std::string& s);

struct CostOptions {
    std::vector<double> thresholds;
    std::optional<ClassTag> contour;
};

void write_cost(std::ostream& os, const Scenario& sc, const CostOptions& opt);
void cmd_cost(const Scenario& sc, const CostOptions& opt, const std::string& out);

void write_trajectories(std::ostream& os, const SimulationSummary& s);
nlohmann::json summary_json(const SimulationSummary& s);
SimulationSummary cmd_simulate(const Scenario& sc, const std::string& out, const std::string& summary_path);

nlohmann::json candidates_json(const std::vector<EquilibriumCandidate>& c);
std::vector<EquilibriumCandidate> cmd_solve(const Scenario& sc, const std::string& out);

void write_sweep(std::ostream& os, const SweepGrid& g);
SweepGrid cmd_sweep(const Scenario& sc, const SweepSpec& spec, const std::string& out);

}  // namespace rdbp
