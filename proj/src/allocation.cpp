#include "rdbp/allocation.hpp"

#include "rdbp/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rdbp {

MergedList merge_and_sort(const ClaimLists& lists) {
    std::array<std::vector<double>, 3> sorted = lists.by_class;
    for (auto& v : sorted) std::sort(v.begin(), v.end());

    MergedList out;
    out.reserve(lists.total());
    std::array<std::size_t, 3> pos{};
    for (;;) {
        int best = -1;
        for (int k = 0; k < 3; ++k) {
            if (pos[k] == sorted[k].size()) continue;
            if (best < 0 || sorted[k][pos[k]] < sorted[best][pos[best]]) best = k;
        }
        if (best < 0) break;
        out.push_back({sorted[best][pos[best]], static_cast<ClassTag>(best)});
        ++pos[best];
    }
    return out;
}

ServiceResult n_served(const MergedList& m, double s) {
    ServiceResult r;
    double acc = 0.0;
    for (const auto& c : m) {
        double next = acc + c.value;
        if (next > s) break;
        acc = next;
        ++r.n;
        ++r.per_class[static_cast<int>(c.tag)];
        r.threshold = c.value;
    }
    r.spent = acc;
    return r;
}

ServiceResult serve_weakest_first(ClaimLists& lists, double s) {
    auto& v = lists.by_class;
    for (auto& x : v) std::sort(x.begin(), x.end());

    ServiceResult r;
    std::array<std::size_t, 3> pos{};
    double acc = 0.0;
    constexpr double inf = std::numeric_limits<double>::infinity();
    for (;;) {
        double x0 = pos[0] < v[0].size() ? v[0][pos[0]] : inf;
        double x1 = pos[1] < v[1].size() ? v[1][pos[1]] : inf;
        double x2 = pos[2] < v[2].size() ? v[2][pos[2]] : inf;
        int best = 0;
        double x = x0;
        if (x1 < x) { best = 1; x = x1; }
        if (x2 < x) { best = 2; x = x2; }
        if (x == inf) break;
        double next = acc + x;
        if (next > s) break;
        acc = next;
        ++pos[best];
        r.threshold = x;
    }
    r.per_class = pos;
    r.n = pos[0] + pos[1] + pos[2];
    r.spent = acc;
    return r;
}

AcceptCost expected_accept_and_cost(const ClaimTriple& ds, const Counts& counts, double t) {
    AcceptCost r;
    for (int k = 0; k < 3; ++k) {
        if (counts[k] == 0.0) continue;
        r.accepted += counts[k] * ds[k].cdf(t);
        r.cost += counts[k] * ds[k].cost(t);
    }
    return r;
}

BrsResult brs_tau(const ClaimTriple& ds, const Counts& counts, double s) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double total = 0.0;
    bool any = false;
    for (int k = 0; k < 3; ++k) {
        if (counts[k] < 0.0) throw ConfigError("negative class count");
        if (counts[k] == 0.0) continue;
        any = true;
        lo = std::min(lo, ds[k].support_min());
        hi = std::max(hi, ds[k].support_max());
        total += counts[k] * ds[k].mean();
    }
    if (!any) throw NumericError("empty population");
    if (s < 0.0) throw ConfigError("resource space must be nonnegative");

    BrsResult r;
    if (s >= total) {
        r.tau = hi;
        r.spent = total;
        r.bound = expected_accept_and_cost(ds, counts, hi).accepted;
        return r;
    }
    if (s == 0.0) {
        r.tau = lo;
        r.spent = 0.0;
        r.bound = 0.0;
        return r;
    }

    const double tol = 1e-10 * std::max(s, 1.0);
    double a = lo;
    double b = hi;
    double t = 0.5 * (a + b);
    for (int it = 0; it < 200; ++it) {
        t = 0.5 * (a + b);
        double f = expected_accept_and_cost(ds, counts, t).cost - s;
        if (std::fabs(f) <= tol) break;
        if (f < 0.0)
            a = t;
        else
            b = t;
        if (b - a <= 0.0) break;
    }
    auto ac = expected_accept_and_cost(ds, counts, t);
    r.tau = t;
    r.spent = ac.cost;
    r.bound = ac.accepted;
    return r;
}

}  // namespace rdbp
