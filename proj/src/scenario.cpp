#include "rdbp/scenario.hpp"

#include "rdbp/error.hpp"

#include <fstream>
#include <initializer_list>

using nlohmann::json;

namespace rdbp {

namespace {

void only_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
}

const json& need(const json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError("missing key '" + std::string(key) + "' in " + where);
    return *it;
}

double num(const json& j, const std::string& what) {
    if (!j.is_number()) throw ConfigError(what + " must be a number");
    return j.get<double>();
}

std::int64_t integer(const json& j, const std::string& what) {
    if (!j.is_number_integer()) throw ConfigError(what + " must be an integer");
    return j.get<std::int64_t>();
}

std::uint64_t count(const json& j, const std::string& what) {
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0))
        throw ConfigError(what + " must be a nonnegative integer");
    return j.get<std::uint64_t>();
}

const char* class_key(int k) { return k == 0 ? "h" : (k == 1 ? "i" : "ni"); }

}  // namespace

ClaimDistribution parse_claims(const json& j) {
    only_keys(j, {"kind", "params"}, "claims");
    const json& kind = need(j, "kind", "claims");
    const json& par = need(j, "params", "claims");
    if (!kind.is_string()) throw ConfigError("claims.kind must be a string");
    const auto k = kind.get<std::string>();
    if (k == "beta") {
        only_keys(par, {"a", "b"}, "claims.params");
        return ClaimDistribution::beta(num(need(par, "a", "claims.params"), "a"), num(need(par, "b", "claims.params"), "b"));
    }
    if (k == "uniform") {
        only_keys(par, {"lo", "hi"}, "claims.params");
        return ClaimDistribution::uniform(num(need(par, "lo", "claims.params"), "lo"),
                                          num(need(par, "hi", "claims.params"), "hi"));
    }
    if (k == "empirical") {
        only_keys(par, {"samples"}, "claims.params");
        const json& s = need(par, "samples", "claims.params");
        if (!s.is_array()) throw ConfigError("claims.params.samples must be an array");
        std::vector<double> v;
        for (const auto& x : s) v.push_back(num(x, "sample"));
        return ClaimDistribution::empirical(std::move(v));
    }
    throw ConfigError("unknown claims kind '" + k + "'");
}

json claims_to_json(const ClaimDistribution& d) {
    if (auto* b = std::get_if<BetaClaims>(&d.kind())) return {{"kind", "beta"}, {"params", {{"a", b->a}, {"b", b->b}}}};
    if (auto* u = std::get_if<UniformClaims>(&d.kind()))
        return {{"kind", "uniform"}, {"params", {{"lo", u->lo}, {"hi", u->hi}}}};
    const auto& e = std::get<EmpiricalClaims>(d.kind());
    return {{"kind", "empirical"}, {"params", {{"samples", e.samples}}}};
}

Scenario parse_scenario(const json& j) {
    Scenario sc;
    auto& P = sc.params;
    only_keys(j, {"populations", "phi", "immigration", "initial", "run", "solver"}, "scenario");

    const json& pops = need(j, "populations", "scenario");
    only_keys(pops, {"h", "i", "ni"}, "populations");
    for (int k = 0; k < 3; ++k) {
        const std::string where = std::string("populations.") + class_key(k);
        const json& pj = need(pops, class_key(k), "populations");
        only_keys(pj, {"offspring_pmf", "offspring_mean", "offspring_law", "production_mean", "claims"}, where);
        auto& sp = P.specs[k];
        if (pj.contains("offspring_pmf")) {
            if (pj.contains("offspring_mean") || pj.contains("offspring_law"))
                throw ConfigError(where + ": give either offspring_pmf or offspring_mean with offspring_law");
            const json& pm = pj["offspring_pmf"];
            if (!pm.is_array()) throw ConfigError(where + ".offspring_pmf must be an array");
            std::vector<double> v;
            for (const auto& x : pm) v.push_back(num(x, where + ".offspring_pmf entry"));
            sp.offspring = OffspringLaw(std::move(v));
        } else {
            double m = num(need(pj, "offspring_mean", where), where + ".offspring_mean");
            const json& law = need(pj, "offspring_law", where);
            if (!law.is_string() || law.get<std::string>() != "poisson")
                throw ConfigError(where + ".offspring_law must be \"poisson\"");
            sp.offspring = OffspringLaw::poisson(m);
            sc.poisson_mean[k] = m;
        }
        sp.production_mean = num(need(pj, "production_mean", where), where + ".production_mean");
        if (!(sp.production_mean >= 0.0)) throw ConfigError(where + ".production_mean must be nonnegative");
        sp.claims = parse_claims(need(pj, "claims", where));
    }

    P.phi = num(need(j, "phi", "scenario"), "phi");

    if (j.contains("immigration")) {
        const json& im = j["immigration"];
        only_keys(im, {"mode", "value"}, "immigration");
        const json& mode = need(im, "mode", "immigration");
        if (!mode.is_string()) throw ConfigError("immigration.mode must be a string");
        auto m = mode.get<std::string>();
        if (m == "none")
            P.immigration.mode = Immigration::Mode::none;
        else if (m == "proportional")
            P.immigration.mode = Immigration::Mode::proportional;
        else if (m == "constant")
            P.immigration.mode = Immigration::Mode::constant;
        else
            throw ConfigError("unknown immigration mode '" + m + "'");
        if (im.contains("value")) P.immigration.value = num(im["value"], "immigration.value");
        else if (P.immigration.mode != Immigration::Mode::none)
            throw ConfigError("missing key 'value' in immigration");
    }

    if (j.contains("initial")) {
        const json& in = j["initial"];
        only_keys(in, {"g_h", "g_i", "g_ni", "s"}, "initial");
        if (in.contains("g_h")) P.initial.g_h = count(in["g_h"], "initial.g_h");
        if (in.contains("g_i")) P.initial.g_i = count(in["g_i"], "initial.g_i");
        if (in.contains("g_ni")) P.initial.g_ni = count(in["g_ni"], "initial.g_ni");
        if (in.contains("s")) {
            P.initial.s = num(in["s"], "initial.s");
            sc.initial_s_given = true;
        }
    }
    if (!sc.initial_s_given)
        P.initial.s = static_cast<double>(P.initial.g_h) * P.specs[0].production_mean +
                      static_cast<double>(P.initial.g_i) * P.specs[1].production_mean +
                      static_cast<double>(P.initial.g_ni) * P.specs[2].production_mean;

    if (j.contains("run")) {
        const json& r = j["run"];
        only_keys(r, {"generations", "replications", "seed", "population_cap"}, "run");
        if (r.contains("generations")) P.max_generations = static_cast<int>(integer(r["generations"], "run.generations"));
        if (r.contains("replications"))
            P.replications = static_cast<int>(integer(r["replications"], "run.replications"));
        if (r.contains("seed")) P.master_seed = count(r["seed"], "run.seed");
        if (r.contains("population_cap")) P.population_cap = num(r["population_cap"], "run.population_cap");
    }

    if (j.contains("solver")) {
        const json& s = j["solver"];
        only_keys(s, {"phi_grid", "tau_grid", "alpha_max", "tolerances", "strict_supercritical",
                      "supercritical_margin", "constraint_form"},
                  "solver");
        auto& c = sc.search;
        if (s.contains("phi_grid")) {
            const json& g = s["phi_grid"];
            if (g.is_array()) {
                for (const auto& x : g) c.phi_grid.push_back(num(x, "solver.phi_grid entry"));
                if (c.phi_grid.empty()) throw ConfigError("solver.phi_grid must not be empty");
            } else {
                c.phi_points = static_cast<int>(integer(g, "solver.phi_grid"));
            }
        }
        if (s.contains("tau_grid")) c.tau_points = static_cast<int>(integer(s["tau_grid"], "solver.tau_grid"));
        if (s.contains("alpha_max")) c.alpha_max = num(s["alpha_max"], "solver.alpha_max");
        if (s.contains("tolerances")) {
            const json& t = s["tolerances"];
            only_keys(t, {"main", "constraint"}, "solver.tolerances");
            if (t.contains("main")) c.tol_main = num(t["main"], "solver.tolerances.main");
            if (t.contains("constraint")) c.tol_con = num(t["constraint"], "solver.tolerances.constraint");
        }
        if (s.contains("strict_supercritical")) {
            if (!s["strict_supercritical"].is_boolean()) throw ConfigError("solver.strict_supercritical must be a boolean");
            c.strict_supercritical = s["strict_supercritical"].get<bool>();
        }
        if (s.contains("supercritical_margin"))
            c.supercritical_margin = num(s["supercritical_margin"], "solver.supercritical_margin");
        if (s.contains("constraint_form")) {
            const json& f = s["constraint_form"];
            if (f == "verbatim")
                sc.form = ConstraintForm::verbatim;
            else if (f == "alpha_weighted")
                sc.form = ConstraintForm::alpha_weighted;
            else
                throw ConfigError("solver.constraint_form must be \"verbatim\" or \"alpha_weighted\"");
        }
        if (c.phi_points < 1) throw ConfigError("solver.phi_grid must be at least 1");
        if (c.tau_points < 2) throw ConfigError("solver.tau_grid must be at least 2");
        if (!(c.alpha_max > 0.0)) throw ConfigError("solver.alpha_max must be positive");
        if (!(c.tol_main > 0.0) || !(c.tol_con > 0.0)) throw ConfigError("solver tolerances must be positive");
        if (!(c.supercritical_margin >= 0.0)) throw ConfigError("solver.supercritical_margin must be nonnegative");
        c.phis();
    }

    P.validate();
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("scenario file '" + path + "' is not valid JSON: " + e.what());
    }
    try {
        return parse_scenario(j);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
}

json to_json(const Scenario& sc) {
    const auto& P = sc.params;
    json pops = json::object();
    for (int k = 0; k < 3; ++k) {
        const auto& sp = P.specs[k];
        json pj;
        if (sc.poisson_mean[k]) {
            pj["offspring_mean"] = *sc.poisson_mean[k];
            pj["offspring_law"] = "poisson";
        } else {
            pj["offspring_pmf"] = sp.offspring.pmf();
        }
        pj["production_mean"] = sp.production_mean;
        pj["claims"] = claims_to_json(sp.claims);
        pops[class_key(k)] = pj;
    }
    const char* mode = P.immigration.mode == Immigration::Mode::none
                           ? "none"
                           : (P.immigration.mode == Immigration::Mode::proportional ? "proportional" : "constant");
    json j;
    j["populations"] = pops;
    j["phi"] = P.phi;
    j["immigration"] = {{"mode", mode}, {"value", P.immigration.value}};
    j["initial"] = {{"g_h", P.initial.g_h}, {"g_i", P.initial.g_i}, {"g_ni", P.initial.g_ni}};
    if (sc.initial_s_given) j["initial"]["s"] = P.initial.s;
    j["run"] = {{"generations", P.max_generations},
                {"replications", P.replications},
                {"seed", P.master_seed},
                {"population_cap", P.population_cap}};
    const auto& c = sc.search;
    json solver;
    if (c.phi_grid.empty())
        solver["phi_grid"] = c.phi_points;
    else
        solver["phi_grid"] = c.phi_grid;
    solver["tau_grid"] = c.tau_points;
    solver["alpha_max"] = c.alpha_max;
    solver["tolerances"] = {{"main", c.tol_main}, {"constraint", c.tol_con}};
    solver["strict_supercritical"] = c.strict_supercritical;
    solver["supercritical_margin"] = c.supercritical_margin;
    solver["constraint_form"] = sc.form == ConstraintForm::verbatim ? "verbatim" : "alpha_weighted";
    j["solver"] = solver;
    return j;
}

EquilibriumProblem to_problem(const Scenario& sc) {
    EquilibriumProblem p;
    const auto& P = sc.params;
    p.F = P.claim_triple();
    for (int k = 0; k < 3; ++k) {
        p.m[k] = P.specs[k].m();
        p.r[k] = P.specs[k].production_mean;
    }
    p.ell_ni = P.immigration.mode == Immigration::Mode::proportional ? P.immigration.value : 0.0;
    p.form = sc.form;
    return p;
}

}  // namespace rdbp
