#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "lde/dynsys.hpp"
#include "lde/embedding.hpp"
#include "lde/linalg.hpp"

namespace lde {

/// Eigenvalues of the companion matrix, sorted by sort_spectrum.
ComplexVector local_eigenvalues(const CompanionModel& model);

/// (1, lambda, ..., lambda^{s-1}).
ComplexVector companion_eigenvector(Complex lambda, Index s);

struct TraceDet {
    double trace = 0.0;
    double det = 0.0;
};

/// trace = w_{s-1}, det = (-1)^{s+1} w_0.
TraceDet trace_det(const CompanionModel& model);

/// True iff the multiset {lambda} matches {-lambda} within `tol` per pair.
bool is_bipartite_spectrum(const ComplexVector& eigs, double tol);

/// Coefficients c_l = z_l xi_v^(l) of u^(k) = sum_l c_l lambda_l^k, by a
/// minimum-norm Vandermonde regression over all samples of u.
/// Throws DegenerateSpectrumError if two eigenvalues lie within distinct_tol.
ComplexVector local_eigenvector_components(const Vector& u, const ComplexVector& eigs,
                                           double svd_tol = kDefaultRankTol,
                                           double distinct_tol = kDefaultDistinctTol);

/// Position k (1-based) of the largest gap lambda_k - lambda_{k+1} among the
/// eigenvalues sorted in descending order, 1 <= k < max_k; first index wins ties.
Index detect_cluster_count(std::vector<double> eigs, Index max_k);

/// Cluster id per vertex from the signs of Re(components[v][1..k-1]); ids are
/// numbered by first appearance. Values with |Re| <= sign_tol count as +.
/// k = 1 puts every vertex into cluster 0.
std::vector<Index> decentralized_cluster_labels(const std::vector<ComplexVector>& components,
                                                Index k, double sign_tol = 1e-9);

/// True iff the two labelings induce the same partition (ids may differ).
bool same_partition(const std::vector<Index>& a, const std::vector<Index>& b);

struct AnalyzeOptions {
    double svd_tol = kDefaultRankTol;
    double distinct_tol = kDefaultDistinctTol;
    bool test_bipartite = true;
    double bipartite_tol = 1e-6;
    bool detect_gap = false;
    Index max_k = 0;  // 0 selects ceil(s / 2)
    bool compute_components = true;
};

struct SpectralReport {
    Index vertex = 0;
    CompanionModel model;
    ComplexVector eigenvalues;   // sort_spectrum order
    ComplexVector components;    // aligned with eigenvalues; empty if not computed
    double trace_estimate = 0.0;
    double det_estimate = 0.0;
    std::optional<bool> bipartite;
    std::optional<Index> cluster_count;
};

/// fit_companion -> local_eigenvalues -> components -> flags.
SpectralReport analyze_vertex(const Vector& u, Index delays, const AnalyzeOptions& options = {});

/// Eigenvalue/component pairs of a report reordered by descending real part,
/// the mode order used for sign clustering.
std::vector<std::pair<Complex, Complex>> modes_by_real_part(const SpectralReport& report);

struct ClusterOptions {
    AnalyzeOptions analyze = default_analyze();
    std::optional<Index> k;  // empty: detect per vertex and take the most frequent count
    double sign_tol = 1e-9;

    static AnalyzeOptions default_analyze() {
        AnalyzeOptions a;
        a.svd_tol = 1e-15;
        a.test_bipartite = false;
        a.detect_gap = true;
        return a;
    }
};

struct ClusterResult {
    std::vector<SpectralReport> reports;  // one per vertex
    Index k = 1;
    std::vector<Index> labels;
};

/// Runs analyze_vertex on every column of the trajectory independently, then
/// aggregates the cluster count and assigns sign-pattern labels.
ClusterResult cluster_vertices(const Trajectory& traj, Index delays, const ClusterOptions& options = {});

}  // namespace lde
