#pragma once

#include <array>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace rdbp {

enum class ClassTag : unsigned char { h = 0, i = 1, ni = 2 };

const char* tag_name(ClassTag c);

struct BetaClaims {
    double a;
    double b;
};

struct UniformClaims {
    double lo;
    double hi;
};

// Bootstrap distribution over observed claims. Samples are kept sorted.
struct EmpiricalClaims {
    std::vector<double> samples;
};

class ClaimDistribution {
public:
    using Kind = std::variant<BetaClaims, UniformClaims, EmpiricalClaims>;

    static ClaimDistribution beta(double a, double b);
    static ClaimDistribution uniform(double lo, double hi);
    static ClaimDistribution empirical(std::vector<double> samples);

    const Kind& kind() const { return kind_; }
    bool is_continuous() const;

    double cdf(double t) const;
    double pdf(double t) const;
    // Psi(t) = integral of x dF(x) over [0, t]
    double cost(double t) const;
    double mean() const { return mean_; }
    double second_moment() const;
    double support_min() const;
    double support_max() const;

    double draw(std::mt19937_64& rng) const;

private:
    explicit ClaimDistribution(Kind k);

    Kind kind_;
    double mean_ = 0.0;
    std::vector<double> prefix_;  // empirical: running sums of sorted samples
};

using ClaimTriple = std::array<ClaimDistribution, 3>;

struct CostVector {
    double psi_h = 0.0;
    double psi_i = 0.0;
    double psi_ni = 0.0;
    double sum() const { return psi_h + psi_i + psi_ni; }
};

double cdf(const ClaimDistribution& d, double t);
double cost(const ClaimDistribution& d, double t);
CostVector cost_vector(const ClaimTriple& ds, double t);

// Summed cost where class `varies` is evaluated at y and the other two at x.
double contour_cost(const ClaimTriple& ds, ClassTag varies, double x, double y);

std::vector<double> sample(const ClaimDistribution& d, std::mt19937_64& rng, std::size_t n);

// uniform on the open interval (0,1), 53 bits
inline double open_unit(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace rdbp
