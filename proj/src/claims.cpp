#include "rdbp/claims.hpp"

#include "rdbp/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/beta.hpp>

namespace rdbp {

const char* tag_name(ClassTag c) {
    switch (c) {
    case ClassTag::h: return "h";
    case ClassTag::i: return "i";
    case ClassTag::ni: return "ni";
    }
    return "?";
}

ClaimDistribution::ClaimDistribution(Kind k) : kind_(std::move(k)) {
    if (auto* b = std::get_if<BetaClaims>(&kind_)) {
        mean_ = b->a / (b->a + b->b);
    } else if (auto* u = std::get_if<UniformClaims>(&kind_)) {
        mean_ = 0.5 * (u->lo + u->hi);
    } else {
        auto& e = std::get<EmpiricalClaims>(kind_);
        prefix_.resize(e.samples.size() + 1, 0.0);
        std::partial_sum(e.samples.begin(), e.samples.end(), prefix_.begin() + 1);
        mean_ = prefix_.back() / static_cast<double>(e.samples.size());
    }
}

ClaimDistribution ClaimDistribution::beta(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
        throw ConfigError("beta claims need positive finite shapes");
    return ClaimDistribution(BetaClaims{a, b});
}

ClaimDistribution ClaimDistribution::uniform(double lo, double hi) {
    if (!(lo >= 0.0) || !(hi > lo) || !std::isfinite(hi))
        throw ConfigError("uniform claims need 0 <= lo < hi");
    return ClaimDistribution(UniformClaims{lo, hi});
}

ClaimDistribution ClaimDistribution::empirical(std::vector<double> samples) {
    if (samples.empty()) throw ConfigError("empirical claims need at least one sample");
    for (double x : samples)
        if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError("empirical claims must be positive");
    std::sort(samples.begin(), samples.end());
    return ClaimDistribution(EmpiricalClaims{std::move(samples)});
}

bool ClaimDistribution::is_continuous() const {
    return !std::holds_alternative<EmpiricalClaims>(kind_);
}

double ClaimDistribution::support_min() const {
    if (std::holds_alternative<BetaClaims>(kind_)) return 0.0;
    if (auto* u = std::get_if<UniformClaims>(&kind_)) return u->lo;
    return std::get<EmpiricalClaims>(kind_).samples.front();
}

double ClaimDistribution::support_max() const {
    if (std::holds_alternative<BetaClaims>(kind_)) return 1.0;
    if (auto* u = std::get_if<UniformClaims>(&kind_)) return u->hi;
    return std::get<EmpiricalClaims>(kind_).samples.back();
}

double ClaimDistribution::cdf(double t) const {
    if (std::isnan(t)) return t;
    if (auto* b = std::get_if<BetaClaims>(&kind_)) {
        if (t <= 0.0) return 0.0;
        if (t >= 1.0) return 1.0;
        return boost::math::ibeta(b->a, b->b, t);
    }
    if (auto* u = std::get_if<UniformClaims>(&kind_)) {
        if (t <= u->lo) return 0.0;
        if (t >= u->hi) return 1.0;
        return (t - u->lo) / (u->hi - u->lo);
    }
    const auto& s = std::get<EmpiricalClaims>(kind_).samples;
    auto k = std::upper_bound(s.begin(), s.end(), t) - s.begin();
    return static_cast<double>(k) / static_cast<double>(s.size());
}

double ClaimDistribution::pdf(double t) const {
    if (auto* b = std::get_if<BetaClaims>(&kind_)) {
        if (t < 0.0 || t > 1.0) return 0.0;
        return boost::math::ibeta_derivative(b->a, b->b, t);
    }
    if (auto* u = std::get_if<UniformClaims>(&kind_)) {
        if (t < u->lo || t > u->hi) return 0.0;
        return 1.0 / (u->hi - u->lo);
    }
    return 0.0;
}

double ClaimDistribution::cost(double t) const {
    double v;
    if (std::isnan(t)) return t;
    if (auto* b = std::get_if<BetaClaims>(&kind_)) {
        if (t <= 0.0) return 0.0;
        if (t >= 1.0) return mean_;
        v = mean_ * boost::math::ibeta(b->a + 1.0, b->b, t);
    } else if (auto* u = std::get_if<UniformClaims>(&kind_)) {
        if (t <= u->lo) return 0.0;
        if (t >= u->hi) return mean_;
        v = 0.5 * (t * t - u->lo * u->lo) / (u->hi - u->lo);
    } else {
        const auto& s = std::get<EmpiricalClaims>(kind_).samples;
        auto k = std::upper_bound(s.begin(), s.end(), t) - s.begin();
        v = prefix_[k] / static_cast<double>(s.size());
    }
    return std::clamp(v, 0.0, mean_);
}

double ClaimDistribution::second_moment() const {
    if (auto* b = std::get_if<BetaClaims>(&kind_))
        return b->a * (b->a + 1.0) / ((b->a + b->b) * (b->a + b->b + 1.0));
    if (auto* u = std::get_if<UniformClaims>(&kind_))
        return (u->lo * u->lo + u->lo * u->hi + u->hi * u->hi) / 3.0;
    const auto& s = std::get<EmpiricalClaims>(kind_).samples;
    double acc = 0.0;
    for (double x : s) acc += x * x;
    return acc / static_cast<double>(s.size());
}

double ClaimDistribution::draw(std::mt19937_64& rng) const {
    if (auto* b = std::get_if<BetaClaims>(&kind_)) {
        if (b->a == 1.0) return 1.0 - std::pow(open_unit(rng), 1.0 / b->b);
        if (b->b == 1.0) return std::pow(open_unit(rng), 1.0 / b->a);
        std::gamma_distribution<double> ga(b->a, 1.0), gb(b->b, 1.0);
        double x = ga(rng);
        double y = gb(rng);
        double r = x / (x + y);
        // keep claims strictly positive
        return r > 0.0 ? r : std::numeric_limits<double>::min();
    }
    if (auto* u = std::get_if<UniformClaims>(&kind_)) {
        double r = u->lo + (u->hi - u->lo) * open_unit(rng);
        return r > 0.0 ? r : std::numeric_limits<double>::min();
    }
    const auto& s = std::get<EmpiricalClaims>(kind_).samples;
    std::uniform_int_distribution<std::size_t> pick(0, s.size() - 1);
    return s[pick(rng)];
}

double cdf(const ClaimDistribution& d, double t) { return d.cdf(t); }

double cost(const ClaimDistribution& d, double t) { return d.cost(t); }

CostVector cost_vector(const ClaimTriple& ds, double t) {
    return {ds[0].cost(t), ds[1].cost(t), ds[2].cost(t)};
}

double contour_cost(const ClaimTriple& ds, ClassTag varies, double x, double y) {
    double acc = 0.0;
    for (int k = 0; k < 3; ++k)
        acc += ds[k].cost(k == static_cast<int>(varies) ? y : x);
    return acc;
}

std::vector<double> sample(const ClaimDistribution& d, std::mt19937_64& rng, std::size_t n) {
    std::vector<double> out(n);
    for (auto& x : out) x = d.draw(rng);
    return out;
}

}  // namespace rdbp
