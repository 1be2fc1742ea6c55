#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "lde/linalg.hpp"

namespace lde {

/// Discrete linear dynamics x^(k+1) = A x^(k) on a weighted digraph.
class LinearSystem {
public:
    /// Throws InputError unless A is square, non-empty and finite.
    explicit LinearSystem(Matrix A);

    const Matrix& matrix() const noexcept { return A_; }
    Index dim() const noexcept { return A_.rows(); }

private:
    Matrix A_;
};

/// States x^(0) ... x^(m), one per row.
struct Trajectory {
    Matrix states;

    Index steps() const noexcept { return states.rows() - 1; }
    Index dim() const noexcept { return states.cols(); }
    /// Scalar time series observed at one vertex.
    Vector local(Index vertex) const;
};

/// Edge (from -> to) exists iff a_{to,from} != 0, i.e. x_from enters the update of x_to.
struct DependencyGraph {
    Index vertex_count = 0;
    std::vector<std::pair<Index, Index>> edges;  // (from, to), sorted

    bool has_edge(Index from, Index to) const;
};

/// Network of two-dimensional cells
///   x_{i,1} <- alpha_i x_{i,1} + beta_i (x_{i,2}^3 - x_{i,2}) + eps * sum_j S_ij x_{j,1}
///   x_{i,2} <- gamma_i x_{i,2}
/// State layout is cell-major: (x_{1,1}, x_{1,2}, x_{2,1}, x_{2,2}, ...).
struct CoupledCellSystem {
    Vector alpha;
    Vector beta;
    Vector gamma;
    Matrix coupling;  // S, 0/1 with zero diagonal
    double epsilon = 0.0;

    Index cells() const noexcept { return alpha.size(); }
    /// Throws InputError when shapes disagree or S has a nonzero diagonal.
    void validate() const;
};

struct SbmParams {
    std::vector<Index> cluster_sizes;
    double intra_p = 0.7;
    double inter_p = 0.05;
    double intra_weight = 1.0;
    double inter_weight = 0.2;
    int max_retries = 100;
    /// Also resample disconnected graphs (isolated vertices are always resampled).
    bool require_connected = false;
};

struct SbmGraph {
    Matrix adjacency;
    std::vector<Index> block;  // ground-truth cluster of each vertex
    int attempts = 1;
};

Trajectory simulate(const LinearSystem& sys, const Vector& x0, Index steps);
Vector simulate_local(const LinearSystem& sys, const Vector& x0, Index steps, Index vertex);

DependencyGraph dependency_graph(const LinearSystem& sys);

/// L = I - D^{-1/2} W D^{-1/2}. Throws InputError on asymmetric, negative or
/// isolated-vertex input.
Matrix normalized_laplacian(const Matrix& W);

/// Discretised graph wave equation [[2I - c^2 L, -I], [I, 0]].
LinearSystem build_wave_system(const Matrix& L, double c);

/// Lazy diffusion x <- (I - L/2) x; its slow modes are the small-L modes.
LinearSystem laplacian_dynamics(const Matrix& L);

/// Seeded stochastic block model; pure function of (params, seed).
SbmGraph generate_sbm(const SbmParams& params, std::uint64_t seed);

/// Adjacency of the three-cluster graph used by the drawn-graph demo
/// (21 intra-cluster edges of weight 1, 3 bridging edges of weight 0.2).
SbmGraph drawn_cluster_graph();

/// Six-vertex bipartite system, localizable everywhere.
LinearSystem bipartite_fixture();
/// Directed edges (from, to), 0-based, of the bipartite fixture in weight order.
std::vector<std::pair<Index, Index>> bipartite_fixture_edges();

/// Four-cell coupled system with eps = 0.1 and parameters drawn from the seed;
/// redrawn until the Koopman lift is localizable in x_{1,1}.
CoupledCellSystem coupled_cell_fixture(std::uint64_t seed, int max_redraws = 100);

Trajectory simulate_coupled(const CoupledCellSystem& sys, const Vector& x0, Index steps);

/// Exact linear representation on (x_{i,1}, x_{i,2}, x_{i,3} = x_{i,2}^3).
LinearSystem koopman_lift(const CoupledCellSystem& sys);
/// Maps a 2d-dimensional state to its 3d-dimensional lifted state.
Vector lift_state(const Vector& x);
/// Drops the x_{i,3} coordinates of a lifted trajectory.
Trajectory project_lifted(const Trajectory& lifted);

/// Dense system with i.i.d. N(0, 1/n) entries.
LinearSystem random_system(Index n, std::uint64_t seed);

/// Seeded standard-normal vector.
Vector random_normal_vector(Index n, std::uint64_t seed);

}  // namespace lde
