#include "rdbp/commands.hpp"
#include "rdbp/csv.hpp"
#include "rdbp/error.hpp"
#include "rdbp/scenario.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace rdbp;
using nlohmann::json;

namespace {

std::string scen(const std::string& name) { return std::string(RDBP_SCENARIO_DIR) + "/" + name; }

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

std::vector<std::string> fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(line);
    while (std::getline(in, cur, ',')) out.push_back(cur);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::filesystem::path tmpdir() {
    auto d = std::filesystem::temp_directory_path() / "rdbp_test_commands";
    std::filesystem::create_directories(d);
    return d;
}

json minimal() {
    json c = {{"kind", "uniform"}, {"params", {{"lo", 0.0}, {"hi", 1.0}}}};
    json pop = {{"offspring_pmf", {0.2, 0.3, 0.5}}, {"production_mean", 0.4}, {"claims", c}};
    return {{"populations", {{"h", pop}, {"i", pop}, {"ni", pop}}}, {"phi", 0.2}};
}

}  // namespace

TEST_CASE("grid and list parsing") {
    auto g = parse_grid("0:1:3");
    REQUIRE(g.size() == 3);
    CHECK(g[0] == 0.0);
    CHECK(g[1] == 0.5);
    CHECK(g[2] == 1.0);
    CHECK(parse_grid("0:1:0").empty());
    CHECK(parse_grid("0.25:1:1") == std::vector<double>{0.25});
    CHECK_THROWS_AS(parse_grid("0:1"), ConfigError);
    CHECK_THROWS_AS(parse_grid("0:x:3"), ConfigError);
    CHECK_THROWS_AS(parse_grid("0:1:2.5"), ConfigError);
    CHECK(parse_list("0.1,0.2") == std::vector<double>{0.1, 0.2});
    CHECK(parse_list("").empty());
    CHECK(parse_contour("hi") == ClassTag::ni);
    CHECK(parse_contour("hni") == ClassTag::i);
    CHECK(parse_contour("ini") == ClassTag::h);
    CHECK_THROWS_AS(parse_contour("ih"), ConfigError);
}

TEST_CASE("doubles survive a text round trip") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int k = 0; k < 10000; ++k) {
        double x = k % 3 == 0 ? u(rng) * 1e-200 : u(rng);
        CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
    }
    CHECK(std::strtod(format_double(0.1).c_str(), nullptr) == 0.1);
}

TEST_CASE("scenario files round trip") {
    for (const char* name : {"baseline.json", "swapped.json", "cost_demo.json", "crossval.json", "symmetric_ni.json",
                             "subcritical.json", "model1_unconstrained.json", "symmetric_phi0.json"}) {
        CAPTURE(name);
        Scenario a = load_scenario(scen(name));
        json ja = to_json(a);
        Scenario b = parse_scenario(ja);
        CHECK(to_json(b) == ja);
        CHECK(b.params.phi == a.params.phi);
        for (int k = 0; k < 3; ++k) {
            CHECK(b.params.specs[k].offspring.pmf() == a.params.specs[k].offspring.pmf());
            CHECK(b.params.specs[k].production_mean == a.params.specs[k].production_mean);
        }
        CHECK(b.params.initial.s == a.params.initial.s);
        CHECK(b.search.phis() == a.search.phis());
    }
}

TEST_CASE("scenario validation") {
    CHECK_NOTHROW(parse_scenario(minimal()));
    auto j = minimal();
    j["colour"] = "red";
    CHECK_THROWS_WITH_AS(parse_scenario(j), "unknown key 'colour' in scenario", ConfigError);
    j = minimal();
    j["populations"]["h"]["claims"]["params"]["mu"] = 1;
    CHECK_THROWS_AS(parse_scenario(j), ConfigError);
    j = minimal();
    j["populations"].erase("ni");
    CHECK_THROWS_AS(parse_scenario(j), ConfigError);
    j = minimal();
    j["phi"] = 1.5;
    CHECK_THROWS_AS(parse_scenario(j), ConfigError);
    j = minimal();
    j["populations"]["i"]["offspring_pmf"] = {0.5, 0.6};
    CHECK_THROWS_AS(parse_scenario(j), ConfigError);
    j = minimal();
    j["populations"]["i"]["claims"]["kind"] = "gamma";
    CHECK_THROWS_AS(parse_scenario(j), ConfigError);
    j = minimal();
    j["immigration"] = {{"mode", "sometimes"}, {"value", 1}};
    CHECK_THROWS_AS(parse_scenario(j), ConfigError);
    j = minimal();
    j["solver"] = {{"phi_grid", {0.5, 1.0}}};
    CHECK_THROWS_AS(parse_scenario(j), ConfigError);
    j = minimal();
    j["populations"]["h"].erase("offspring_pmf");
    j["populations"]["h"]["offspring_mean"] = 1.2;
    j["populations"]["h"]["offspring_law"] = "poisson";
    auto sc = parse_scenario(j);
    CHECK(sc.params.specs[0].m() == doctest::Approx(1.2));
    CHECK_THROWS_AS(load_scenario("/nonexistent/file.json"), IoError);
}

TEST_CASE("initial resource space defaults to production of the initial population") {
    auto j = minimal();
    j["initial"] = {{"g_h", 10}, {"g_i", 5}, {"g_ni", 1}};
    CHECK(parse_scenario(j).params.initial.s == doctest::Approx(16 * 0.4));
    j["initial"]["s"] = 3.0;
    CHECK(parse_scenario(j).params.initial.s == 3.0);
}

TEST_CASE("equilibrium inputs from a scenario") {
    auto sc = load_scenario(scen("symmetric_ni.json"));
    auto p = to_problem(sc);
    CHECK(p.ell_ni == sc.params.immigration.value);
    CHECK(p.m[0] == doctest::Approx(2.0));
    auto b = to_problem(load_scenario(scen("baseline.json")));
    CHECK(b.ell_ni == 0.0);
}

TEST_CASE("cost table") {
    auto sc = load_scenario(scen("cost_demo.json"));
    std::ostringstream os;
    write_cost(os, sc, {{0.0, 0.5, 1.0}, std::nullopt});
    auto L = lines(os.str());
    REQUIRE(L.size() == 4);
    CHECK(L[0] == "t,F_h,F_i,F_ni,Psi_h,Psi_i,Psi_ni");
    auto first = fields(L[1]);
    for (int k = 4; k < 7; ++k) CHECK(std::stod(first[k]) == 0.0);
    auto last = fields(L[3]);
    CHECK(std::fabs(std::stod(last[4]) - 0.75) < 1e-15);
    CHECK(std::fabs(std::stod(last[5]) - 0.4) < 1e-15);
    CHECK(std::fabs(std::stod(last[6]) - 2.0 / 9.0) < 1e-15);
    auto mid = fields(L[2]);
    CHECK(std::strtod(mid[5].c_str(), nullptr) == sc.params.specs[1].claims.cost(0.5));

    std::ostringstream empty;
    write_cost(empty, sc, {{}, std::nullopt});
    CHECK(lines(empty.str()).size() == 1);

    std::ostringstream contour;
    write_cost(contour, sc, {{0.0, 1.0}, ClassTag::ni});
    auto C = lines(contour.str());
    REQUIRE(C.size() == 5);
    CHECK(C[0] == "x,y,Phi");
    CHECK(fields(C[1])[2] == "0");
}

TEST_CASE("simulate output") {
    auto sc = load_scenario(scen("subcritical.json"));
    sc.params.replications = 1;
    sc.params.max_generations = 1;
    auto s = run(sc.params, true);
    std::ostringstream os;
    write_trajectories(os, s);
    auto L = lines(os.str());
    REQUIRE(L.size() == 2);
    CHECK(L[0] == "replication,t,g_h,g_i,g_ni,I_t,served_h,served_i,served_ni,s,ratio,integrated,threshold");
    CHECK(fields(L[1]).size() == 13);
}

TEST_CASE("simulate files are reproducible") {
    auto d = tmpdir();
    auto sc = load_scenario(scen("symmetric_ni.json"));
    cmd_simulate(sc, (d / "a.csv").string(), (d / "a.json").string());
    cmd_simulate(sc, (d / "b.csv").string(), (d / "b.json").string());
    CHECK(slurp((d / "a.csv").string()) == slurp((d / "b.csv").string()));
    CHECK(slurp((d / "a.json").string()) == slurp((d / "b.json").string()));
    auto j = json::parse(slurp((d / "a.json").string()));
    CHECK(j["seed"] == sc.params.master_seed);
    CHECK(j.contains("survival_frequency"));
}

TEST_CASE("subcritical scenario dies out") {
    auto sc = load_scenario(scen("subcritical.json"));
    auto s = run(sc.params);
    CHECK(s.survival_frequency == 0.0);
    CHECK(s.class_survival[0] == 0.0);
    CHECK(s.class_survival[1] == 0.0);
    auto j = summary_json(s);
    CHECK(j["survival_frequency"] == 0.0);
    CHECK(j["alpha_hat"].is_null());
}

TEST_CASE("solve output") {
    auto d = tmpdir();
    auto none = cmd_solve(load_scenario(scen("baseline.json")), (d / "none.json").string());
    CHECK(none.empty());
    CHECK(json::parse(slurp((d / "none.json").string())) == json::array());
    auto some = cmd_solve(load_scenario(scen("swapped.json")), (d / "some.json").string());
    auto j = json::parse(slurp((d / "some.json").string()));
    REQUIRE(j.size() == some.size());
    CHECK(j.size() > 0);
    for (const char* k : {"tau", "phi", "alpha", "residual", "constraint_lhs", "constraint_rhs"}) CHECK(j[0].contains(k));
    CHECK(j[0]["alpha"].get<double>() == some[0].alpha);
}

TEST_CASE("sweep output") {
    auto sc = load_scenario(scen("swapped.json"));
    SweepSpec spec;
    spec.tau_axis = Axis{0.3, 0.9, 2};
    spec.phi_axis = Axis{0.1, 0.4, 2};
    std::ostringstream os;
    write_sweep(os, sweep(to_problem(sc), spec));
    auto L = lines(os.str());
    REQUIRE(L.size() == 5);
    CHECK(L[0] == "tau,phi,lhs15,rhs15,alpha_closed,con_lhs,con_rhs,feasible");
    for (std::size_t k = 1; k < L.size(); ++k) CHECK(fields(L[k]).size() == 8);

    spec.tau_axis = Axis{0.01, 1.0, 60};
    spec.phi_axis = Axis{0.01, 0.99, 60};
    auto d = tmpdir();
    auto g = cmd_sweep(sc, spec, (d / "sweep.csv").string());
    int feasible = 0;
    for (const auto& c : g.cells) feasible += c.feasible.value_or(false);
    CHECK(feasible > 0);
    CHECK(lines(slurp((d / "sweep.csv").string())).size() == 3601);
}

TEST_CASE("unwritable output") {
    auto sc = load_scenario(scen("cost_demo.json"));
    CHECK_THROWS_AS(cmd_cost(sc, {{0.5}, std::nullopt}, "/nonexistent/dir/out.csv"), IoError);
}
