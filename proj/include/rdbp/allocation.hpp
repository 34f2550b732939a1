#pragma once

#include "rdbp/claims.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace rdbp {

struct ClaimLists {
    std::array<std::vector<double>, 3> by_class;  // h, i, ni

    std::size_t total() const {
        return by_class[0].size() + by_class[1].size() + by_class[2].size();
    }
};

struct TaggedClaim {
    double value;
    ClassTag tag;
};

using MergedList = std::vector<TaggedClaim>;

// Per-class sort followed by a three-way merge. Equal values keep class order h, i, ni.
MergedList merge_and_sort(const ClaimLists& lists);

struct ServiceResult {
    std::size_t n = 0;
    std::array<std::size_t, 3> per_class{};
    double spent = 0.0;
    double threshold = 0.0;  // largest served claim, 0 when n == 0
};

// Largest prefix of m whose sum stays within s.
ServiceResult n_served(const MergedList& m, double s);

// Same rule without materialising the merged list. Sorts each class in place.
ServiceResult serve_weakest_first(ClaimLists& lists, double s);

struct BrsResult {
    double tau = 0.0;
    double bound = 0.0;
    double spent = 0.0;
};

using Counts = std::array<double, 3>;

BrsResult brs_tau(const ClaimTriple& ds, const Counts& counts, double s);

struct AcceptCost {
    double accepted = 0.0;
    double cost = 0.0;
};

AcceptCost expected_accept_and_cost(const ClaimTriple& ds, const Counts& counts, double t);

}  // namespace rdbp
