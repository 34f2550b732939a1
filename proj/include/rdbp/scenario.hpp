#pragma once

#include "rdbp/equilibrium.hpp"
#include "rdbp/simulator.hpp"

#include <array>
#include <optional>
#include <string>

#include <json.hpp>

namespace rdbp {

struct Scenario {
    ScenarioParams params;
    std::array<std::optional<double>, 3> poisson_mean;  // set when the law was given by name
    bool initial_s_given = false;
    SearchConfig search;
    ConstraintForm form = ConstraintForm::verbatim;
};

Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);
nlohmann::json to_json(const Scenario& sc);

// Equilibrium inputs: ell_ni is the proportional immigration value, otherwise 0.
EquilibriumProblem to_problem(const Scenario& sc);

ClaimDistribution parse_claims(const nlohmann::json& j);
nlohmann::json claims_to_json(const ClaimDistribution& d);

}  // namespace rdbp
