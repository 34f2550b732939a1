#pragma once

#include "rdbp/claims.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace rdbp {

enum class ConstraintForm {
    verbatim,        // F_i(tau) (m_i (1-phi) + G_ni)
    alpha_weighted,  // F_i(tau) (m_i (1-phi) alpha + G_ni)
};

struct EquilibriumProblem {
    ClaimTriple F{ClaimDistribution::uniform(0.0, 1.0), ClaimDistribution::uniform(0.0, 1.0),
                  ClaimDistribution::uniform(0.0, 1.0)};
    std::array<double, 3> m{};  // offspring means h, i, ni
    std::array<double, 3> r{};  // production means h, i, ni
    double ell_ni = 0.0;
    ConstraintForm form = ConstraintForm::verbatim;

    // throws ConfigError for non-positive means, negative ell_ni or discrete claims
    void validate() const;
};

// CDF and cost values of the three classes at one threshold.
struct TauValues {
    double tau = 0.0;
    std::array<double, 3> F{};
    std::array<double, 3> psi{};
};

TauValues tau_values(const EquilibriumProblem& p, double tau);

double g_ni(const EquilibriumProblem& p, double tau, double phi, double alpha);
double g_ni(const EquilibriumProblem& p, const TauValues& v, double phi, double alpha);

struct Sides {
    double lhs;
    double rhs;
};

// consumption side and production side of the balance equation
Sides balance_sides(const EquilibriumProblem& p, const TauValues& v, double phi, double alpha);

double residual_main(const EquilibriumProblem& p, double tau, double phi, double alpha);
double residual_main(const EquilibriumProblem& p, const TauValues& v, double phi, double alpha);

Sides constraint_eval(const EquilibriumProblem& p, double tau, double phi, double alpha);
Sides constraint_eval(const EquilibriumProblem& p, const TauValues& v, double phi, double alpha);

std::optional<double> solve_alpha_closed_form(const EquilibriumProblem& p, double tau, double phi,
                                              std::string* diagnostic = nullptr);
std::optional<double> solve_alpha_closed_form(const EquilibriumProblem& p, const TauValues& v, double phi,
                                              std::string* diagnostic = nullptr);

// Positive roots in alpha of the balance residual on (0, alpha_max], ascending.
std::vector<double> solve_alpha_roots(const EquilibriumProblem& p, const TauValues& v, double phi,
                                      double alpha_max);

struct SearchConfig {
    std::vector<double> phi_grid;  // empty: phi_points interior points of (0,1)
    int phi_points = 400;
    int tau_points = 400;
    double alpha_max = 100.0;
    double tol_main = 1e-8;
    double tol_con = 1e-8;
    bool strict_supercritical = false;
    double supercritical_margin = 1e-6;

    std::vector<double> phis() const;
};

struct EquilibriumCandidate {
    double tau = 0.0;
    double phi = 0.0;
    double alpha = 0.0;
    double residual_main = 0.0;
    double constraint_lhs = 0.0;
    double constraint_rhs = 0.0;
    bool feasible = false;
};

bool is_feasible(const EquilibriumCandidate& c, const SearchConfig& cfg);

std::vector<EquilibriumCandidate> find_equilibria(const EquilibriumProblem& p, const SearchConfig& cfg);

struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    int steps = 2;
    double at(int k) const { return steps == 1 ? lo : lo + (hi - lo) * k / (steps - 1); }
};

struct SweepSpec {
    std::optional<Axis> tau_axis;
    std::optional<Axis> phi_axis;
    double tau_fixed = 0.5;
    double phi_fixed = 0.5;
    std::optional<double> alpha_fixed;  // unset: alpha solved per cell
    double alpha_max = 100.0;
    double tol = 1e-8;
};

struct SweepCell {
    double tau = 0.0;
    double phi = 0.0;
    std::optional<double> lhs15;
    std::optional<double> rhs15;
    std::optional<double> alpha_closed;
    std::optional<double> con_lhs;
    std::optional<double> con_rhs;
    std::optional<bool> feasible;
};

struct SweepGrid {
    int n_tau = 1;
    int n_phi = 1;
    std::vector<SweepCell> cells;  // phi-major: cells[iphi * n_tau + itau]

    const SweepCell& at(int itau, int iphi) const { return cells[static_cast<std::size_t>(iphi) * n_tau + itau]; }
};

SweepGrid sweep(const EquilibriumProblem& p, const SweepSpec& spec);

}  // namespace rdbp
