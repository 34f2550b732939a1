#pragma once

#include "rdbp/allocation.hpp"
#include "rdbp/claims.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

namespace rdbp {

class OffspringLaw {
public:
    OffspringLaw() = default;
    explicit OffspringLaw(std::vector<double> pmf);
    static OffspringLaw poisson(double mean, int kmax = 64);

    const std::vector<double>& pmf() const { return pmf_; }
    double mean() const { return mean_; }
    // total offspring of n independent parents
    std::uint64_t draw_total(std::uint64_t n, std::mt19937_64& rng) const;

private:
    std::vector<double> pmf_;
    std::vector<double> cum_;
    double mean_ = 0.0;
};

struct SubPopulationSpec {
    OffspringLaw offspring;
    double production_mean = 0.0;
    ClaimDistribution claims = ClaimDistribution::uniform(0.0, 1.0);

    double m() const { return offspring.mean(); }
};

struct Immigration {
    enum class Mode { none, proportional, constant };
    Mode mode = Mode::none;
    double value = 0.0;
};

struct PopulationState {
    std::uint64_t g_h = 0;
    std::uint64_t g_i = 0;
    std::uint64_t g_ni = 0;
    double s = 0.0;
};

struct ScenarioParams {
    std::array<SubPopulationSpec, 3> specs;
    double phi = 0.0;
    Immigration immigration;
    PopulationState initial;
    int max_generations = 1;
    int replications = 1;
    std::uint64_t master_seed = 0;
    double population_cap = 1e9;

    ClaimTriple claim_triple() const {
        return {specs[0].claims, specs[1].claims, specs[2].claims};
    }
    void validate() const;
};

struct GenerationRecord {
    int t = 0;
    std::uint64_t g_h = 0;
    std::uint64_t g_i = 0;
    std::uint64_t g_ni = 0;
    std::uint64_t arrived = 0;
    std::uint64_t integrated = 0;
    std::array<std::uint64_t, 3> claimants{};
    std::array<std::uint64_t, 3> served{};
    double s = 0.0;
    double spent = 0.0;
    std::optional<double> threshold;
    std::optional<double> ratio;
};

std::pair<PopulationState, GenerationRecord> step_generation(const PopulationState& state,
                                                             const ScenarioParams& params,
                                                             std::mt19937_64& rng, int t = 1);

// Scratch-buffer variant used by run().
std::pair<PopulationState, GenerationRecord> step_generation(const PopulationState& state,
                                                             const ScenarioParams& params,
                                                             std::mt19937_64& rng, int t,
                                                             ClaimLists& scratch);

std::mt19937_64 replication_rng(std::uint64_t master_seed, std::uint64_t rep);

struct SimulationSummary {
    int replications = 0;
    int generations = 0;
    std::uint64_t seed = 0;
    int survivors = 0;  // both h and i alive at the horizon
    double survival_frequency = 0.0;
    std::array<double, 3> class_survival{};  // h, i, ni alive at the horizon
    std::vector<bool> survived;
    // per generation, averaged over surviving replications
    std::vector<std::array<double, 3>> mean_counts;
    std::vector<double> mean_ratio;
    int window = 0;
    std::vector<double> terminal_ratios;  // one per survivor, mean over the terminal window
    double terminal_mean = 0.0;
    double terminal_variance = 0.0;
    // filled when requested
    std::vector<std::vector<GenerationRecord>> trajectories;
};

SimulationSummary run(const ScenarioParams& params, bool keep_trajectories = false);

struct RatioEstimate {
    double alpha_hat;
    double std_error;
};

RatioEstimate estimate_ratio_limit(const SimulationSummary& summary);

}  // namespace rdbp
