#include "rdbp/commands.hpp"

#include "rdbp/csv.hpp"
#include "rdbp/error.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

using nlohmann::json;

namespace rdbp {

namespace {

double to_double(const std::string& s) {
    std::size_t used = 0;
    double v;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ConfigError("not a number: '" + s + "'");
    }
    if (used != s.size() || !std::isfinite(v)) throw ConfigError("not a number: '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char c) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, c)) out.push_back(cur);
    if (!s.empty() && s.back() == c) out.emplace_back();
    return out;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write '" + path + "'");
    return f;
}

void finish(std::ofstream& f, const std::string& path) {
    f.flush();
    if (!f) throw IoError("write failed for '" + path + "'");
}

}  // namespace

std::vector<double> parse_grid(const std::string& spec) {
    auto parts = split(spec, ':');
    if (parts.size() != 3) throw ConfigError("grid must look like lo:hi:n");
    double lo = to_double(parts[0]);
    double hi = to_double(parts[1]);
    double nd = to_double(parts[2]);
    if (nd < 0 || nd != std::floor(nd)) throw ConfigError("grid point count must be a nonnegative integer");
    auto n = static_cast<int>(nd);
    std::vector<double> out;
    if (n == 1) out.push_back(lo);
    for (int k = 0; n > 1 && k < n; ++k) out.push_back(k + 1 == n ? hi : lo + (hi - lo) * k / (n - 1));
    return out;
}

std::vector<double> parse_list(const std::string& spec) {
    std::vector<double> out;
    if (spec.empty()) return out;
    for (const auto& p : split(spec, ',')) out.push_back(to_double(p));
    return out;
}

ClassTag parse_contour(const std::string& s) {
    if (s == "hi") return ClassTag::ni;
    if (s == "hni") return ClassTag::i;
    if (s == "ini") return ClassTag::h;
    throw ConfigError("contour must be one of hi, hni, ini");
}

void write_cost(std::ostream& os, const Scenario& sc, const CostOptions& opt) {
    const ClaimTriple ds = sc.params.claim_triple();
    if (opt.contour) {
        CsvWriter w(os, {"x", "y", "Phi"});
        for (double x : opt.thresholds)
            for (double y : opt.thresholds) {
                w.cell(x).cell(y).cell(contour_cost(ds, *opt.contour, x, y));
                w.end_row();
            }
        return;
    }
    CsvWriter w(os, {"t", "F_h", "F_i", "F_ni", "Psi_h", "Psi_i", "Psi_ni"});
    for (double t : opt.thresholds) {
        w.cell(t);
        for (const auto& d : ds) w.cell(d.cdf(t));
        CostVector c = cost_vector(ds, t);
        w.cell(c.psi_h).cell(c.psi_i).cell(c.psi_ni);
        w.end_row();
    }
}

void cmd_cost(const Scenario& sc, const CostOptions& opt, const std::string& out) {
    auto f = open_out(out);
    write_cost(f, sc, opt);
    finish(f, out);
}

void write_trajectories(std::ostream& os, const SimulationSummary& s) {
    CsvWriter w(os, {"replication", "t", "g_h", "g_i", "g_ni", "I_t", "served_h", "served_i", "served_ni", "s",
                     "ratio", "integrated", "threshold"});
    for (std::size_t r = 0; r < s.trajectories.size(); ++r)
        for (const auto& g : s.trajectories[r]) {
            w.cell(static_cast<std::uint64_t>(r)).cell(g.t).cell(g.g_h).cell(g.g_i).cell(g.g_ni).cell(g.arrived);
            w.cell(g.served[0]).cell(g.served[1]).cell(g.served[2]).cell(g.s).cell(g.ratio);
            w.cell(g.integrated).cell(g.threshold);
            w.end_row();
        }
}

json summary_json(const SimulationSummary& s) {
    json j;
    j["replications"] = s.replications;
    j["generations"] = s.generations;
    j["seed"] = s.seed;
    j["survivors"] = s.survivors;
    j["survival_frequency"] = s.survival_frequency;
    j["class_survival"] = {{"h", s.class_survival[0]}, {"i", s.class_survival[1]}, {"ni", s.class_survival[2]}};
    j["terminal_window"] = s.window;
    if (s.survivors > 0) {
        auto est = estimate_ratio_limit(s);
        j["alpha_hat"] = est.alpha_hat;
        j["stderr"] = est.std_error;
        j["terminal_variance"] = s.terminal_variance;
    } else {
        j["alpha_hat"] = nullptr;
        j["stderr"] = nullptr;
        j["terminal_variance"] = nullptr;
    }
    return j;
}

SimulationSummary cmd_simulate(const Scenario& sc, const std::string& out, const std::string& summary_path) {
    SimulationSummary s = run(sc.params, true);
    auto f = open_out(out);
    write_trajectories(f, s);
    finish(f, out);
    auto g = open_out(summary_path);
    g << summary_json(s).dump(2) << '\n';
    finish(g, summary_path);
    return s;
}

json candidates_json(const std::vector<EquilibriumCandidate>& cs) {
    json a = json::array();
    for (const auto& c : cs)
        a.push_back({{"tau", c.tau},
                     {"phi", c.phi},
                     {"alpha", c.alpha},
                     {"residual", c.residual_main},
                     {"constraint_lhs", c.constraint_lhs},
                     {"constraint_rhs", c.constraint_rhs}});
    return a;
}

std::vector<EquilibriumCandidate> cmd_solve(const Scenario& sc, const std::string& out) {
    auto cs = find_equilibria(to_problem(sc), sc.search);
    auto f = open_out(out);
    f << candidates_json(cs).dump(2) << '\n';
    finish(f, out);
    return cs;
}

void write_sweep(std::ostream& os, const SweepGrid& g) {
    CsvWriter w(os, {"tau", "phi", "lhs15", "rhs15", "alpha_closed", "con_lhs", "con_rhs", "feasible"});
    for (const auto& c : g.cells) {
        w.cell(c.tau).cell(c.phi).cell(c.lhs15).cell(c.rhs15).cell(c.alpha_closed).cell(c.con_lhs).cell(c.con_rhs);
        if (c.feasible)
            w.cell(*c.feasible ? 1 : 0);
        else
            w.empty();
        w.end_row();
    }
}

SweepGrid cmd_sweep(const Scenario& sc, const SweepSpec& spec, const std::string& out) {
    SweepGrid g = sweep(to_problem(sc), spec);
    auto f = open_out(out);
    write_sweep(f, g);
    finish(f, out);
    return g;
}

}  // namespace rdbp
