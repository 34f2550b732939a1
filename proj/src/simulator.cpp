#include "rdbp/simulator.hpp"

#include "rdbp/error.hpp"
#include "rdbp/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace rdbp {

OffspringLaw::OffspringLaw(std::vector<double> pmf) : pmf_(std::move(pmf)) {
    if (pmf_.size() < 2) throw ConfigError("offspring pmf needs at least two entries");
    double total = 0.0;
    for (double p : pmf_) {
        if (!(p >= 0.0) || !std::isfinite(p)) throw ConfigError("offspring pmf entries must be nonnegative");
        total += p;
    }
    if (std::fabs(total - 1.0) > 1e-12) throw ConfigError("offspring pmf must sum to 1");
    if (!(pmf_[0] > 0.0)) throw ConfigError("offspring pmf needs p_0 > 0");
    if (!(pmf_[0] + pmf_[1] < 1.0)) throw ConfigError("offspring pmf needs p_0 + p_1 < 1");
    cum_.resize(pmf_.size());
    std::partial_sum(pmf_.begin(), pmf_.end(), cum_.begin());
    cum_.back() = 1.0;
    for (std::size_t k = 0; k < pmf_.size(); ++k) mean_ += static_cast<double>(k) * pmf_[k];
}

OffspringLaw OffspringLaw::poisson(double mean, int kmax) {
    if (!(mean > 0.0) || !std::isfinite(mean)) throw ConfigError("poisson offspring mean must be positive");
    std::vector<double> p(kmax + 1);
    double total = 0.0;
    for (int k = 0; k <= kmax; ++k) {
        p[k] = std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0));
        total += p[k];
    }
    for (auto& x : p) x /= total;
    // absorb rounding so the sum is 1 to machine precision
    double s = 0.0;
    for (int k = 1; k <= kmax; ++k) s += p[k];
    p[0] = 1.0 - s;
    return OffspringLaw(std::move(p));
}

std::uint64_t OffspringLaw::draw_total(std::uint64_t n, std::mt19937_64& rng) const {
    std::uint64_t total = 0;
    if (n <= 64) {
        const std::size_t last = cum_.size() - 1;
        for (std::uint64_t j = 0; j < n; ++j) {
            double u = open_unit(rng);
            std::size_t k = 0;
            while (k < last && u > cum_[k]) ++k;
            total += k;
        }
        return total;
    }
    // multinomial split by successive binomials
    std::uint64_t remaining = n;
    double rest = 1.0;
    for (std::size_t k = 0; k + 1 < pmf_.size() && remaining > 0; ++k) {
        double p = rest > 0.0 ? std::clamp(pmf_[k] / rest, 0.0, 1.0) : 1.0;
        std::uint64_t nk = remaining;
        if (p < 1.0) {
            std::binomial_distribution<std::uint64_t> bin(remaining, p);
            nk = bin(rng);
        }
        total += k * nk;
        remaining -= nk;
        rest -= pmf_[k];
    }
    total += (pmf_.size() - 1) * remaining;
    return total;
}

void ScenarioParams::validate() const {
    if (!(phi >= 0.0 && phi <= 1.0)) throw ConfigError("phi must lie in [0,1]");
    if (!(immigration.value >= 0.0) || !std::isfinite(immigration.value))
        throw ConfigError("immigration value must be nonnegative");
    if (replications < 1) throw ConfigError("replications must be at least 1");
    if (max_generations < 1) throw ConfigError("generations must be at least 1");
    if (!(initial.s >= 0.0)) throw ConfigError("initial resource space must be nonnegative");
    for (const auto& sp : specs)
        if (!(sp.production_mean >= 0.0) || !std::isfinite(sp.production_mean))
            throw ConfigError("production mean must be nonnegative");
}

std::mt19937_64 replication_rng(std::uint64_t master_seed, std::uint64_t rep) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(rep), static_cast<std::uint32_t>(rep >> 32)};
    return std::mt19937_64(seq);
}

std::pair<PopulationState, GenerationRecord> step_generation(const PopulationState& state,
                                                             const ScenarioParams& params,
                                                             std::mt19937_64& rng, int t) {
    ClaimLists scratch;
    return step_generation(state, params, rng, t, scratch);
}

std::pair<PopulationState, GenerationRecord> step_generation(const PopulationState& state,
                                                             const ScenarioParams& params,
                                                             std::mt19937_64& rng, int t,
                                                             ClaimLists& scratch) {
    const double cap = params.population_cap;
    auto check = [cap](std::uint64_t v) {
        if (static_cast<double>(v) > cap) throw NumericError("population explosion cap");
    };

    GenerationRecord rec;
    rec.t = t;
    rec.s = state.s;

    std::uint64_t integrated = 0;
    if (state.g_i > 0 && params.phi > 0.0) {
        if (params.phi >= 1.0) {
            integrated = state.g_i;
        } else {
            std::binomial_distribution<std::uint64_t> bin(state.g_i, params.phi);
            integrated = bin(rng);
        }
    }

    std::uint64_t arrived = 0;
    switch (params.immigration.mode) {
    case Immigration::Mode::none: break;
    case Immigration::Mode::proportional:
        arrived = static_cast<std::uint64_t>(std::llround(params.immigration.value * static_cast<double>(state.g_h)));
        break;
    case Immigration::Mode::constant:
        arrived = static_cast<std::uint64_t>(std::llround(params.immigration.value));
        break;
    }

    std::array<std::uint64_t, 3> claimants{state.g_h + integrated, state.g_i - integrated, state.g_ni + arrived};
    for (auto c : claimants) check(c);

    for (int k = 0; k < 3; ++k) {
        auto& v = scratch.by_class[k];
        v.resize(claimants[k]);
        const auto& d = params.specs[k].claims;
        for (auto& x : v) x = d.draw(rng);
    }
    ServiceResult sr = serve_weakest_first(scratch, state.s);

    std::uint64_t next_h = params.specs[0].offspring.draw_total(sr.per_class[0], rng);
    std::uint64_t next_i = params.specs[1].offspring.draw_total(sr.per_class[1], rng);
    next_i += params.specs[2].offspring.draw_total(sr.per_class[2], rng);
    check(next_h);
    check(next_i);

    PopulationState next;
    next.g_h = next_h;
    next.g_i = next_i;
    next.g_ni = 0;
    next.s = 0.0;
    for (int k = 0; k < 3; ++k)
        next.s += static_cast<double>(claimants[k]) * params.specs[k].production_mean;

    rec.g_h = next_h;
    rec.g_i = next_i;
    rec.g_ni = claimants[2];
    rec.arrived = arrived;
    rec.integrated = integrated;
    rec.claimants = claimants;
    for (int k = 0; k < 3; ++k) rec.served[k] = sr.per_class[k];
    rec.spent = sr.spent;
    if (sr.n > 0) rec.threshold = sr.threshold;
    if (next_h > 0) rec.ratio = static_cast<double>(next_i) / static_cast<double>(next_h);
    return {next, rec};
}

namespace {

struct RepPath {
    std::vector<std::array<std::uint64_t, 3>> counts;
    std::vector<GenerationRecord> records;
};

}  // namespace

SimulationSummary run(const ScenarioParams& params, bool keep_trajectories) {
    params.validate();
    const int T = params.max_generations;
    const auto R = static_cast<std::size_t>(params.replications);
    std::vector<RepPath> paths(R);

    parallel_for(R, [&](std::size_t rep) {
        auto rng = replication_rng(params.master_seed, rep);
        ClaimLists scratch;
        RepPath& p = paths[rep];
        p.counts.reserve(T);
        if (keep_trajectories) p.records.reserve(T);
        PopulationState st = params.initial;
        for (int t = 1; t <= T; ++t) {
            auto [next, rec] = step_generation(st, params, rng, t, scratch);
            p.counts.push_back({rec.g_h, rec.g_i, rec.g_ni});
            if (keep_trajectories) p.records.push_back(std::move(rec));
            st = next;
        }
    });

    SimulationSummary out;
    out.replications = params.replications;
    out.generations = T;
    out.seed = params.master_seed;
    out.survived.assign(R, false);
    out.mean_counts.assign(T, {0.0, 0.0, 0.0});
    out.mean_ratio.assign(T, std::numeric_limits<double>::quiet_NaN());
    out.window = std::max(1, static_cast<int>(std::ceil(0.2 * T)));

    std::array<int, 3> alive{};
    for (std::size_t r = 0; r < R; ++r) {
        const auto& last = paths[r].counts.back();
        for (int k = 0; k < 3; ++k)
            if (last[k] > 0) ++alive[k];
        out.survived[r] = last[0] > 0 && last[1] > 0;
        if (out.survived[r]) ++out.survivors;
    }
    for (int k = 0; k < 3; ++k) out.class_survival[k] = static_cast<double>(alive[k]) / static_cast<double>(R);
    out.survival_frequency = static_cast<double>(out.survivors) / static_cast<double>(R);

    std::vector<double> ratio_sum(T, 0.0);
    std::vector<int> ratio_n(T, 0);
    for (std::size_t r = 0; r < R; ++r) {
        if (!out.survived[r]) continue;
        const auto& c = paths[r].counts;
        double wsum = 0.0;
        int wn = 0;
        for (int t = 0; t < T; ++t) {
            for (int k = 0; k < 3; ++k) out.mean_counts[t][k] += static_cast<double>(c[t][k]);
            if (c[t][0] > 0) {
                double q = static_cast<double>(c[t][1]) / static_cast<double>(c[t][0]);
                ratio_sum[t] += q;
                ++ratio_n[t];
                if (t >= T - out.window) {
                    wsum += q;
                    ++wn;
                }
            }
        }
        out.terminal_ratios.push_back(wsum / wn);
    }
    for (int t = 0; t < T; ++t) {
        if (out.survivors > 0)
            for (int k = 0; k < 3; ++k) out.mean_counts[t][k] /= out.survivors;
        if (ratio_n[t] > 0) out.mean_ratio[t] = ratio_sum[t] / ratio_n[t];
    }
    const auto n = out.terminal_ratios.size();
    if (n > 0) {
        out.terminal_mean = std::accumulate(out.terminal_ratios.begin(), out.terminal_ratios.end(), 0.0) / n;
        double ss = 0.0;
        for (double q : out.terminal_ratios) ss += (q - out.terminal_mean) * (q - out.terminal_mean);
        out.terminal_variance = n > 1 ? ss / (n - 1) : 0.0;
    }
    if (keep_trajectories) {
        out.trajectories.resize(R);
        for (std::size_t r = 0; r < R; ++r) out.trajectories[r] = std::move(paths[r].records);
    }
    return out;
}

RatioEstimate estimate_ratio_limit(const SimulationSummary& summary) {
    if (summary.survivors == 0 || summary.terminal_ratios.empty())
        throw NumericError("conditioning event empty");
    const double n = static_cast<double>(summary.terminal_ratios.size());
    return {summary.terminal_mean, std::sqrt(summary.terminal_variance / n)};
}

}  // namespace rdbp
