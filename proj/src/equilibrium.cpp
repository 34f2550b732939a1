#include "rdbp/equilibrium.hpp"

#include "rdbp/error.hpp"
#include "rdbp/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rdbp {

void EquilibriumProblem::validate() const {
    for (const auto& d : F)
        if (!d.is_continuous()) throw ConfigError("equilibrium solver requires continuous claim distributions");
    for (double x : m)
        if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError("offspring means must be positive");
    for (double x : r)
        if (!(x >= 0.0) || !std::isfinite(x)) throw ConfigError("production means must be nonnegative");
    if (!(ell_ni >= 0.0) || !std::isfinite(ell_ni)) throw ConfigError("ell_ni must be nonnegative");
}

TauValues tau_values(const EquilibriumProblem& p, double tau) {
    TauValues v;
    v.tau = tau;
    for (int k = 0; k < 3; ++k) {
        v.F[k] = p.F[k].cdf(tau);
        v.psi[k] = p.F[k].cost(tau);
    }
    return v;
}

double g_ni(const EquilibriumProblem& p, const TauValues& v, double phi, double alpha) {
    if (p.ell_ni == 0.0) return 0.0;
    if (!(v.F[0] > 0.0)) throw NumericError("G_ni singular at tau below home-claim support");
    return v.F[2] * p.m[2] * p.ell_ni / (v.F[0] * p.m[0] * (1.0 + phi * alpha));
}

double g_ni(const EquilibriumProblem& p, double tau, double phi, double alpha) {
    return g_ni(p, tau_values(p, tau), phi, alpha);
}

Sides balance_sides(const EquilibriumProblem& p, const TauValues& v, double phi, double alpha) {
    const double G = g_ni(p, v, phi, alpha);
    const double home = 1.0 + phi * alpha;
    const double stay = (1.0 - phi) * alpha;
    Sides s;
    s.lhs = v.psi[0] * p.m[0] * home + v.psi[1] * p.m[1] * (stay + G) + v.psi[2] * p.ell_ni;
    s.rhs = p.r[0] * home + p.r[1] * stay + p.r[2] * G;
    return s;
}

double residual_main(const EquilibriumProblem& p, const TauValues& v, double phi, double alpha) {
    const double G = g_ni(p, v, phi, alpha);
    const double A = v.psi[0] * p.m[0] - p.r[0];
    const double B = v.psi[1] * p.m[1] - p.r[1];
    return A * (1.0 + phi * alpha) + B * (1.0 - phi) * alpha + (v.psi[1] * p.m[1] - p.r[2]) * G +
           v.psi[2] * p.ell_ni;
}

double residual_main(const EquilibriumProblem& p, double tau, double phi, double alpha) {
    return residual_main(p, tau_values(p, tau), phi, alpha);
}

Sides constraint_eval(const EquilibriumProblem& p, const TauValues& v, double phi, double alpha) {
    const double G = g_ni(p, v, phi, alpha);
    Sides s;
    s.lhs = v.F[0] * p.m[0] * (1.0 + phi * alpha);
    if (p.form == ConstraintForm::verbatim)
        s.rhs = v.F[1] * (p.m[1] * (1.0 - phi) + G);
    else
        s.rhs = v.F[1] * (p.m[1] * (1.0 - phi) * alpha + G);
    return s;
}

Sides constraint_eval(const EquilibriumProblem& p, double tau, double phi, double alpha) {
    return constraint_eval(p, tau_values(p, tau), phi, alpha);
}

std::optional<double> solve_alpha_closed_form(const EquilibriumProblem& p, const TauValues& v, double phi,
                                              std::string* diagnostic) {
    if (p.ell_ni != 0.0) throw ConfigError("closed-form alpha requires ell_ni = 0");
    const double A = v.psi[0] * p.m[0] - p.r[0];
    const double B = v.psi[1] * p.m[1] - p.r[1];
    const double den = phi * A + (1.0 - phi) * B;
    if (std::fabs(den) < 1e-14) {
        if (diagnostic) *diagnostic = "alpha unconstrained or impossible";
        return std::nullopt;
    }
    const double alpha = -A / den;
    if (!(alpha > 0.0)) {
        if (diagnostic) *diagnostic = "alpha not positive";
        return std::nullopt;
    }
    return alpha;
}

std::optional<double> solve_alpha_closed_form(const EquilibriumProblem& p, double tau, double phi,
                                              std::string* diagnostic) {
    return solve_alpha_closed_form(p, tau_values(p, tau), phi, diagnostic);
}

namespace {

double residual_dalpha(const EquilibriumProblem& p, const TauValues& v, double phi, double alpha) {
    const double A = v.psi[0] * p.m[0] - p.r[0];
    const double B = v.psi[1] * p.m[1] - p.r[1];
    const double G = g_ni(p, v, phi, alpha);
    const double dG = -G * phi / (1.0 + phi * alpha);
    return A * phi + B * (1.0 - phi) + (v.psi[1] * p.m[1] - p.r[2]) * dG;
}

// Newton iteration kept inside [a, b]; falls back to bisection.
double refine_alpha(const EquilibriumProblem& p, const TauValues& v, double phi, double a, double b, double fa) {
    double x = 0.5 * (a + b);
    for (int it = 0; it < 200; ++it) {
        double fx = residual_main(p, v, phi, x);
        if (fx == 0.0) return x;
        if ((fx < 0.0) == (fa < 0.0)) {
            a = x;
            fa = fx;
        } else {
            b = x;
        }
        if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, b)) break;
        double d = residual_dalpha(p, v, phi, x);
        double xn = d != 0.0 ? x - fx / d : a;
        if (!(xn > a && xn < b)) xn = 0.5 * (a + b);
        if (std::fabs(xn - x) <= 1e-15 * std::max(1.0, x)) return xn;
        x = xn;
    }
    return 0.5 * (a + b);
}

}  // namespace

std::vector<double> solve_alpha_roots(const EquilibriumProblem& p, const TauValues& v, double phi,
                                      double alpha_max) {
    std::vector<double> roots;
    if (p.ell_ni == 0.0) {
        auto a = solve_alpha_closed_form(p, v, phi);
        if (a && *a <= alpha_max) roots.push_back(*a);
        return roots;
    }
    constexpr int n = 400;
    double xa = 0.0;
    double fa = residual_main(p, v, phi, xa);
    for (int k = 1; k <= n; ++k) {
        double xb = alpha_max * k / n;
        double fb = residual_main(p, v, phi, xb);
        if (fb == 0.0) {
            roots.push_back(xb);
        } else if (fa != 0.0 && (fa < 0.0) != (fb < 0.0)) {
            roots.push_back(refine_alpha(p, v, phi, xa, xb, fa));
        }
        xa = xb;
        fa = fb;
    }
    return roots;
}

std::vector<double> SearchConfig::phis() const {
    if (!phi_grid.empty()) {
        for (double f : phi_grid)
            if (!(f > 0.0 && f < 1.0)) throw ConfigError("phi grid values must lie in (0,1)");
        return phi_grid;
    }
    if (phi_points < 1) throw ConfigError("phi grid needs at least one point");
    std::vector<double> out(phi_points);
    for (int k = 0; k < phi_points; ++k) out[k] = (k + 1.0) / (phi_points + 1.0);
    return out;
}

bool is_feasible(const EquilibriumCandidate& c, const SearchConfig& cfg) {
    if (!(std::fabs(c.residual_main) <= cfg.tol_main)) return false;
    if (!(std::fabs(c.constraint_lhs - c.constraint_rhs) <= cfg.tol_con)) return false;
    if (!(c.alpha > 0.0 && c.alpha <= cfg.alpha_max)) return false;
    const double lo = std::min(c.constraint_lhs, c.constraint_rhs);
    if (cfg.strict_supercritical) return lo >= 1.0 + cfg.supercritical_margin;
    return lo >= 1.0 - cfg.tol_con;
}

namespace {

std::pair<double, double> pooled_support(const EquilibriumProblem& p) {
    double lo = p.F[0].support_min();
    double hi = p.F[0].support_max();
    for (int k = 1; k < 3; ++k) {
        lo = std::min(lo, p.F[k].support_min());
        hi = std::max(hi, p.F[k].support_max());
    }
    return {lo, hi};
}

std::vector<double> branches(const EquilibriumProblem& p, const TauValues& v, double phi, double alpha_max) {
    try {
        return solve_alpha_roots(p, v, phi, alpha_max);
    } catch (const NumericError&) {
        return {};
    }
}

}  // namespace

std::vector<EquilibriumCandidate> find_equilibria(const EquilibriumProblem& p, const SearchConfig& cfg) {
    p.validate();
    if (cfg.tau_points < 2) throw ConfigError("tau grid needs at least two points");
    if (!(cfg.alpha_max > 0.0)) throw ConfigError("alpha_max must be positive");
    const std::vector<double> phis = cfg.phis();
    const auto [lo, hi] = pooled_support(p);
    const int n = cfg.tau_points;
    const double step = (hi - lo) / n;

    std::vector<TauValues> vals(n);
    for (int k = 0; k < n; ++k) vals[k] = tau_values(p, k + 1 == n ? hi : lo + step * (k + 1));

    std::vector<std::vector<EquilibriumCandidate>> per_phi(phis.size());
    parallel_for(phis.size(), [&](std::size_t j) {
        const double phi = phis[j];
        std::vector<std::vector<double>> br(n);
        for (int k = 0; k < n; ++k) br[k] = branches(p, vals[k], phi, cfg.alpha_max);

        auto gap = [&](const TauValues& v, double a) {
            Sides c = constraint_eval(p, v, phi, a);
            return c.lhs - c.rhs;
        };

        std::vector<EquilibriumCandidate> found;
        for (int k = 0; k + 1 < n; ++k) {
            const std::size_t nb = std::min(br[k].size(), br[k + 1].size());
            for (std::size_t b = 0; b < nb; ++b) {
                double da = gap(vals[k], br[k][b]);
                double db = gap(vals[k + 1], br[k + 1][b]);
                if ((da <= 0.0) == (db <= 0.0)) continue;
                double ta = vals[k].tau;
                double tb = vals[k + 1].tau;
                double t = ta;
                double alpha = br[k][b];
                bool lost = false;
                for (int it = 0; it < 100; ++it) {
                    double tm = 0.5 * (ta + tb);
                    if (tm == ta || tm == tb) break;
                    TauValues vm = tau_values(p, tm);
                    auto bm = branches(p, vm, phi, cfg.alpha_max);
                    if (bm.size() <= b) {
                        lost = true;
                        break;
                    }
                    double dm = gap(vm, bm[b]);
                    t = tm;
                    alpha = bm[b];
                    if (dm == 0.0) break;
                    if ((dm <= 0.0) == (da <= 0.0)) {
                        ta = tm;
                        da = dm;
                    } else {
                        tb = tm;
                    }
                }
                if (lost) continue;
                TauValues vt = tau_values(p, t);
                EquilibriumCandidate c;
                c.tau = t;
                c.phi = phi;
                c.alpha = alpha;
                try {
                    c.residual_main = residual_main(p, vt, phi, alpha);
                    Sides s = constraint_eval(p, vt, phi, alpha);
                    c.constraint_lhs = s.lhs;
                    c.constraint_rhs = s.rhs;
                } catch (const NumericError&) {
                    continue;
                }
                c.feasible = is_feasible(c, cfg);
                if (c.feasible) found.push_back(c);
            }
        }
        std::sort(found.begin(), found.end(),
                  [](const EquilibriumCandidate& x, const EquilibriumCandidate& y) { return x.tau < y.tau; });
        std::vector<EquilibriumCandidate> kept;
        for (const auto& c : found)
            if (kept.empty() || c.tau - kept.back().tau >= step) kept.push_back(c);
        per_phi[j] = std::move(kept);
    });

    std::vector<EquilibriumCandidate> out;
    for (auto& v : per_phi) out.insert(out.end(), v.begin(), v.end());
    return out;
}

SweepGrid sweep(const EquilibriumProblem& p, const SweepSpec& spec) {
    p.validate();
    const auto [lo, hi] = pooled_support(p);
    auto check_tau = [lo = lo, hi = hi](double t) {
        if (!(t >= lo && t <= hi)) throw ConfigError("sweep tau outside claim support");
    };
    auto check_phi = [](double f) {
        if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("sweep phi outside [0,1]");
    };
    auto check_axis = [](const Axis& a) {
        if (a.steps < 1) throw ConfigError("sweep axis needs at least one step");
        if (a.steps > 1 && !(a.lo < a.hi)) throw ConfigError("sweep axis needs lo < hi");
    };
    Axis ta{spec.tau_fixed, spec.tau_fixed, 1};
    Axis pa{spec.phi_fixed, spec.phi_fixed, 1};
    if (spec.tau_axis) ta = *spec.tau_axis;
    if (spec.phi_axis) pa = *spec.phi_axis;
    check_axis(ta);
    check_axis(pa);
    check_tau(ta.lo);
    check_tau(ta.hi);
    check_phi(pa.lo);
    check_phi(pa.hi);

    SweepGrid g;
    g.n_tau = ta.steps;
    g.n_phi = pa.steps;
    g.cells.resize(static_cast<std::size_t>(g.n_tau) * g.n_phi);
    std::vector<TauValues> vals(g.n_tau);
    for (int k = 0; k < g.n_tau; ++k) vals[k] = tau_values(p, ta.at(k));

    parallel_for(static_cast<std::size_t>(g.n_phi), [&](std::size_t jp) {
        const double phi = pa.at(static_cast<int>(jp));
        for (int k = 0; k < g.n_tau; ++k) {
            SweepCell& c = g.cells[jp * g.n_tau + k];
            const TauValues& v = vals[k];
            c.tau = v.tau;
            c.phi = phi;
            try {
                if (p.ell_ni == 0.0) {
                    c.alpha_closed = solve_alpha_closed_form(p, v, phi);
                } else {
                    auto roots = solve_alpha_roots(p, v, phi, spec.alpha_max);
                    if (!roots.empty()) c.alpha_closed = roots.front();
                }
            } catch (const NumericError&) {
            }
            std::optional<double> a = spec.alpha_fixed ? spec.alpha_fixed : c.alpha_closed;
            if (!a) continue;
            try {
                Sides b = balance_sides(p, v, phi, *a);
                Sides s = constraint_eval(p, v, phi, *a);
                c.lhs15 = b.lhs;
                c.rhs15 = b.rhs;
                c.con_lhs = s.lhs;
                c.con_rhs = s.rhs;
                c.feasible = std::min(s.lhs, s.rhs) >= 1.0 - spec.tol;
            } catch (const NumericError&) {
            }
        }
    });
    return g;
}

}  // namespace rdbp
