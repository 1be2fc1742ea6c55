#pragma once

#include <vector>

#include "lde/dynsys.hpp"
#include "lde/linalg.hpp"

namespace lde {

/// Outcome of the rank test on R for one vertex.
struct LocalizabilityReport {
    Index vertex = 0;
    Matrix r_matrix;
    std::vector<double> singular_values;  // nonincreasing
    Index numeric_rank = 0;
    bool localizable = false;
    double tolerance_used = kDefaultRankTol;
};

struct EverywhereReport {
    bool localizable = false;
    std::vector<LocalizabilityReport> vertices;
};

/// Similarity transform moving `vertex` to position 0; the remaining vertices
/// keep their relative order.
LinearSystem permute_vertex_first(const LinearSystem& sys, Index vertex);

/// Rows a12^T A22^l, l = 0..n-2, of the system viewed from `vertex`.
/// Throws InputError for n < 2.
Matrix r_matrix(const LinearSystem& sys, Index vertex);

/// Rank test on R. A 1x1 system is localizable with an empty R.
LocalizabilityReport is_localizable(const LinearSystem& sys, Index vertex,
                                    double rel_tol = kDefaultRankTol);

EverywhereReport localizable_everywhere(const LinearSystem& sys, double rel_tol = kDefaultRankTol);

/// Hautus-style test: [lambda I - A22; a12^T] keeps full column rank for every
/// eigenvalue lambda of A22. Requires n >= 2.
bool hautus_localizable(const LinearSystem& sys, Index vertex, double rel_tol = kDefaultRankTol);

bool is_strongly_connected(const DependencyGraph& g);

}  // namespace lde
