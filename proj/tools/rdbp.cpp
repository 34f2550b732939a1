#include "rdbp/commands.hpp"
#include "rdbp/error.hpp"
#include "rdbp/scenario.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <sstream>

namespace {

std::pair<double, double> support(const rdbp::Scenario& sc) {
    const auto ds = sc.params.claim_triple();
    double lo = ds[0].support_min(), hi = ds[0].support_max();
    for (const auto& d : ds) {
        lo = std::min(lo, d.support_min());
        hi = std::max(hi, d.support_max());
    }
    return {lo, hi};
}

rdbp::Axis to_axis(const std::string& spec) {
    auto v = rdbp::parse_grid(spec);
    if (v.empty()) throw rdbp::ConfigError("sweep axis needs at least one point");
    return {v.front(), v.back(), static_cast<int>(v.size())};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rdbp: resource-dependent branching processes with immigration"};
    app.require_subcommand(1);

    std::string scenario_path, out_path;
    auto common = [&](CLI::App* c) {
        c->add_option("--scenario", scenario_path, "scenario JSON file")->required();
        c->add_option("--out", out_path, "output path")->required();
    };

    auto* cost = app.add_subcommand("cost", "claim CDFs and cost functions on a threshold grid");
    common(cost);
    std::string grid, thresholds, contour;
    auto* grid_opt = cost->add_option("--grid", grid, "lo:hi:n");
    cost->add_option("--thresholds", thresholds, "comma separated thresholds")->excludes(grid_opt);
    cost->add_option("--contour", contour, "hi, hni or ini");

    auto* sim = app.add_subcommand("simulate", "Monte Carlo trajectories");
    common(sim);
    std::string summary_path;
    sim->add_option("--summary", summary_path, "summary JSON path (default <out>.json)");

    auto* solve = app.add_subcommand("solve", "search equilibrium candidates");
    common(solve);
    bool require_eq = false, strict = false;
    solve->add_flag("--require-equilibrium", require_eq, "exit 2 when no candidate is found");
    solve->add_flag("--strict-supercritical", strict, "require both criticality sides above 1 + margin");

    auto* sw = app.add_subcommand("sweep", "surfaces on a (tau, phi) grid");
    common(sw);
    std::string axes = "tau,phi", tau_range, phi_range;
    double tau_fixed = 0.5, phi_fixed = 0.5, alpha = 0.0;
    sw->add_option("--axes", axes, "tau,phi | tau | phi");
    sw->add_option("--tau-range", tau_range, "lo:hi:n");
    sw->add_option("--phi-range", phi_range, "lo:hi:n");
    sw->add_option("--tau", tau_fixed, "tau when not an axis");
    sw->add_option("--phi", phi_fixed, "phi when not an axis");
    auto* alpha_opt = sw->add_option("--alpha", alpha, "fixed alpha (default: solved per cell)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "rdbp: " << e.what() << "\n";
        return 1;
    }

    try {
        rdbp::Scenario sc = rdbp::load_scenario(scenario_path);

        if (*cost) {
            rdbp::CostOptions opt;
            if (!thresholds.empty() || cost->count("--thresholds")) {
                opt.thresholds = rdbp::parse_list(thresholds);
            } else if (!grid.empty()) {
                opt.thresholds = rdbp::parse_grid(grid);
            } else {
                auto [lo, hi] = support(sc);
                for (int k = 0; k <= 100; ++k) opt.thresholds.push_back(k == 100 ? hi : lo + (hi - lo) * k / 100.0);
            }
            if (!contour.empty()) opt.contour = rdbp::parse_contour(contour);
            rdbp::cmd_cost(sc, opt, out_path);
        } else if (*sim) {
            rdbp::cmd_simulate(sc, out_path, summary_path.empty() ? out_path + ".json" : summary_path);
        } else if (*solve) {
            if (strict) sc.search.strict_supercritical = true;
            auto cs = rdbp::cmd_solve(sc, out_path);
            std::cout << cs.size() << " candidate(s)\n";
            if (require_eq && cs.empty()) return 2;
        } else if (*sw) {
            rdbp::SweepSpec spec;
            bool use_tau = false, use_phi = false;
            std::string a;
            std::stringstream ss(axes);
            while (std::getline(ss, a, ',')) {
                if (a == "tau")
                    use_tau = true;
                else if (a == "phi")
                    use_phi = true;
                else
                    throw rdbp::ConfigError("unknown sweep axis '" + a + "'");
            }
            auto [lo, hi] = support(sc);
            if (use_tau) spec.tau_axis = tau_range.empty() ? rdbp::Axis{lo, hi, 51} : to_axis(tau_range);
            if (use_phi) spec.phi_axis = phi_range.empty() ? rdbp::Axis{0.0, 1.0, 51} : to_axis(phi_range);
            spec.tau_fixed = tau_fixed;
            spec.phi_fixed = phi_fixed;
            if (*alpha_opt) spec.alpha_fixed = alpha;
            spec.alpha_max = sc.search.alpha_max;
            spec.tol = sc.search.tol_con;
            rdbp::cmd_sweep(sc, spec, out_path);
        }
    } catch (const rdbp::ConfigError& e) {
        std::cerr << "rdbp: " << e.what() << "\n";
        return 1;
    } catch (const rdbp::IoError& e) {
        std::cerr << "rdbp: " << e.what() << "\n";
        return 1;
    } catch (const rdbp::NumericError& e) {
        std::cerr << "rdbp: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "rdbp: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
