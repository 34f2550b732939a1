#include "rdbp/error.hpp"
#include "rdbp/simulator.hpp"

#include <doctest.h>

#include <cmath>

using namespace rdbp;

namespace {

SubPopulationSpec spec(std::vector<double> pmf, double r, ClaimDistribution c = ClaimDistribution::uniform(0, 1)) {
    SubPopulationSpec s;
    s.offspring = OffspringLaw(std::move(pmf));
    s.production_mean = r;
    s.claims = c;
    return s;
}

ScenarioParams lumpy() {
    ScenarioParams p;
    p.specs[0] = spec({0.5, 0, 0, 0.5}, 0.15);
    p.specs[1] = spec({0.5, 0, 0, 0, 0, 0.5}, 0.1, ClaimDistribution::beta(2, 3));
    p.specs[2] = spec({0.5, 0, 0, 0, 0, 0, 0, 0.5}, 0.05, ClaimDistribution::beta(2, 7));
    p.phi = 0.4;
    p.immigration = {Immigration::Mode::proportional, 0.3};
    p.initial = {40, 30, 5, 20.0};
    p.max_generations = 12;
    p.replications = 30;
    p.master_seed = 99;
    return p;
}

}  // namespace

TEST_CASE("offspring law checks") {
    CHECK_THROWS_AS(OffspringLaw({0.5, 0.6}), ConfigError);
    CHECK_THROWS_AS(OffspringLaw({0.0, 0.5, 0.5}), ConfigError);
    CHECK_THROWS_AS(OffspringLaw({0.5, 0.5}), ConfigError);
    CHECK_THROWS_AS(OffspringLaw({1.0}), ConfigError);
    OffspringLaw l({0.1, 0.3, 0.6});
    CHECK(l.mean() == doctest::Approx(1.5));
    auto p = OffspringLaw::poisson(2.8);
    CHECK(p.pmf().size() == 65);
    double s = 0;
    for (double x : p.pmf()) s += x;
    CHECK(std::fabs(s - 1.0) < 1e-12);
    CHECK(p.mean() == doctest::Approx(2.8).epsilon(1e-12));
}

TEST_CASE("offspring totals have the right mean in both sampling branches") {
    OffspringLaw l({0.2, 0.1, 0.3, 0.4});
    std::mt19937_64 rng(5);
    for (std::uint64_t n : {10u, 5000u}) {
        double sum = 0;
        const int reps = 2000;
        for (int r = 0; r < reps; ++r) sum += static_cast<double>(l.draw_total(n, rng));
        double var = (0.1 + 4 * 0.3 + 9 * 0.4) - 1.9 * 1.9;
        double se = std::sqrt(var * n / reps);
        CHECK(std::fabs(sum / reps - 1.9 * n) < 4 * se);
    }
    CHECK(l.draw_total(0, rng) == 0);
}

TEST_CASE("extinction is absorbing") {
    ScenarioParams p = lumpy();
    std::mt19937_64 rng(1);
    auto [next, rec] = step_generation(PopulationState{0, 0, 0, 0.0}, p, rng);
    CHECK(next.g_h == 0);
    CHECK(next.g_i == 0);
    CHECK(next.g_ni == 0);
    CHECK(next.s == 0.0);
    CHECK(rec.arrived == 0);
    CHECK_FALSE(rec.ratio.has_value());
    CHECK_FALSE(rec.threshold.has_value());
}

TEST_CASE("class bookkeeping in one step") {
    ScenarioParams p = lumpy();
    std::mt19937_64 rng(2);
    PopulationState st = p.initial;
    std::uint64_t served_total = 0, integrated_total = 0;
    for (int t = 1; t <= 25; ++t) {
        auto [next, rec] = step_generation(st, p, rng, t);
        served_total += rec.served[0] + rec.served[1] + rec.served[2];
        integrated_total += rec.integrated;
        CHECK(rec.integrated <= st.g_i);
        CHECK(rec.arrived == static_cast<std::uint64_t>(std::llround(0.3 * st.g_h)));
        CHECK(rec.claimants[0] == st.g_h + rec.integrated);
        CHECK(rec.claimants[1] == st.g_i - rec.integrated);
        CHECK(rec.claimants[2] == st.g_ni + rec.arrived);
        for (int k = 0; k < 3; ++k) CHECK(rec.served[k] <= rec.claimants[k]);
        CHECK(rec.spent <= st.s);
        // home offspring come in threes, immigrant offspring are 5a + 7b
        CHECK(next.g_h % 3 == 0);
        CHECK(next.g_h <= 3 * rec.served[0]);
        bool split = false;
        for (std::uint64_t b = 0; b <= rec.served[2] && 7 * b <= next.g_i; ++b)
            if ((next.g_i - 7 * b) % 5 == 0 && (next.g_i - 7 * b) / 5 <= rec.served[1]) split = true;
        CHECK(split);
        CHECK(next.g_ni == 0);
        double s = rec.claimants[0] * 0.15 + rec.claimants[1] * 0.1 + rec.claimants[2] * 0.05;
        CHECK(next.s == doctest::Approx(s).epsilon(1e-15));
        st = next;
        if (st.g_h + st.g_i == 0) break;
    }
    CHECK(served_total > 100);
    CHECK(integrated_total > 0);
}

TEST_CASE("no integration and no arrivals when the pathways are off") {
    ScenarioParams p = lumpy();
    p.phi = 0.0;
    p.immigration = {};
    std::mt19937_64 rng(3);
    PopulationState st{50, 50, 0, 40.0};
    for (int t = 1; t <= 10; ++t) {
        auto [next, rec] = step_generation(st, p, rng, t);
        CHECK(rec.integrated == 0);
        CHECK(rec.arrived == 0);
        CHECK(rec.claimants[2] == 0);
        st = next;
    }
}

TEST_CASE("constant immigration stream") {
    ScenarioParams p = lumpy();
    p.immigration = {Immigration::Mode::constant, 7.4};
    std::mt19937_64 rng(4);
    auto [next, rec] = step_generation(PopulationState{10, 10, 0, 5.0}, p, rng);
    CHECK(rec.arrived == 7);
}

TEST_CASE("proportional immigration ratio tends to the rate") {
    ScenarioParams p = lumpy();
    p.immigration = {Immigration::Mode::proportional, 0.37};
    std::mt19937_64 rng(4);
    for (std::uint64_t g : {10u, 1000u, 100000u}) {
        PopulationState st{g, 0, 0, 0.0};
        auto [next, rec] = step_generation(st, p, rng);
        CHECK(std::fabs(double(rec.arrived) / g - 0.37) <= 0.5 / g);
    }
}

TEST_CASE("population cap") {
    ScenarioParams p = lumpy();
    p.population_cap = 100;
    std::mt19937_64 rng(5);
    CHECK_THROWS_WITH_AS(step_generation(PopulationState{200, 0, 0, 1.0}, p, rng), "population explosion cap",
                         NumericError);
}

TEST_CASE("runs are deterministic") {
    ScenarioParams p = lumpy();
    auto a = run(p, true);
    auto b = run(p, true);
    REQUIRE(a.trajectories.size() == b.trajectories.size());
    for (std::size_t r = 0; r < a.trajectories.size(); ++r)
        for (std::size_t t = 0; t < a.trajectories[r].size(); ++t) {
            const auto& x = a.trajectories[r][t];
            const auto& y = b.trajectories[r][t];
            CHECK(x.g_h == y.g_h);
            CHECK(x.g_i == y.g_i);
            CHECK(x.s == y.s);
            CHECK(x.threshold == y.threshold);
        }
    CHECK(a.terminal_ratios == b.terminal_ratios);
    p.master_seed = 100;
    auto c = run(p, true);
    bool differs = false;
    for (std::size_t r = 0; r < c.trajectories.size(); ++r)
        differs = differs || c.trajectories[r].back().g_h != a.trajectories[r].back().g_h;
    CHECK(differs);
}

TEST_CASE("summary shape") {
    ScenarioParams p = lumpy();
    auto s = run(p);
    CHECK(s.mean_counts.size() == 12);
    CHECK(s.mean_ratio.size() == 12);
    CHECK(s.window == 3);
    CHECK(s.survived.size() == 30);
    CHECK(s.terminal_ratios.size() == static_cast<std::size_t>(s.survivors));
    CHECK(s.trajectories.empty());
}

TEST_CASE("no survivors means no ratio estimate") {
    ScenarioParams p = lumpy();
    p.initial = {0, 0, 0, 0.0};
    auto s = run(p);
    CHECK(s.survival_frequency == 0.0);
    CHECK_THROWS_WITH_AS(estimate_ratio_limit(s), "conditioning event empty", NumericError);
}

TEST_CASE("full integration empties the immigrant class") {
    ScenarioParams p;
    for (auto& sp : p.specs) sp = spec({0.1, 0.3, 0.6}, 0.6);
    p.phi = 1.0;
    p.initial = {100, 100, 0, 0.0};
    p.initial.s = 200 * 0.6;
    p.max_generations = 15;
    p.replications = 20;
    auto s = run(p, true);
    for (const auto& tr : s.trajectories)
        for (const auto& g : tr) {
            CHECK(g.g_i == 0);
            if (g.ratio) CHECK(*g.ratio == 0.0);
        }
    CHECK(s.survival_frequency == 0.0);
    CHECK(s.class_survival[0] > 0.0);
    CHECK_THROWS_AS(estimate_ratio_limit(s), NumericError);
}

TEST_CASE("an unconstrained supercritical home population can survive") {
    ScenarioParams p;
    for (auto& sp : p.specs) sp = spec({0.25, 0.25, 0.25, 0.25}, 100.0);
    p.initial = {5, 0, 0, 500.0};
    p.max_generations = 15;
    p.replications = 200;
    auto s = run(p, true);
    CHECK(s.class_survival[0] > 0.0);
    for (const auto& tr : s.trajectories)
        for (const auto& g : tr) CHECK(g.served[0] == g.claimants[0]);
}

TEST_CASE("invalid parameters") {
    ScenarioParams p = lumpy();
    p.phi = 1.5;
    CHECK_THROWS_AS(run(p), ConfigError);
    p = lumpy();
    p.replications = 0;
    CHECK_THROWS_AS(run(p), ConfigError);
}
