#include "lde/dynsys.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>
#include <string>

#include "lde/errors.hpp"
#include "lde/localizability.hpp"

namespace lde {

namespace {

void check_vertex(Index vertex, Index n) {
    if (vertex < 0 || vertex >= n) {
        throw InputError("vertex index " + std::to_string(vertex) + " out of range [0, " +
                         std::to_string(n) + ")");
    }
}

bool connected(const Matrix& W) {
    const Index n = W.rows();
    if (n == 0) return true;
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::queue<Index> q;
    q.push(0);
    seen[0] = true;
    Index count = 1;
    while (!q.empty()) {
        const Index i = q.front();
        q.pop();
        for (Index j = 0; j < n; ++j) {
            if (W(i, j) != 0.0 && !seen[static_cast<std::size_t>(j)]) {
                seen[static_cast<std::size_t>(j)] = true;
                ++count;
                q.push(j);
            }
        }
    }
    return count == n;
}

}  // namespace

LinearSystem::LinearSystem(Matrix A) : A_(std::move(A)) {
    if (A_.rows() == 0 || A_.rows() != A_.cols()) {
        throw InputError("system matrix must be square with n >= 1");
    }
    if (!A_.allFinite()) throw InputError("system matrix has non-finite entries");
}

Vector Trajectory::local(Index vertex) const {
    check_vertex(vertex, dim());
    return states.col(vertex);
}

bool DependencyGraph::has_edge(Index from, Index to) const {
    return std::binary_search(edges.begin(), edges.end(), std::make_pair(from, to));
}

void CoupledCellSystem::validate() const {
    const Index d = alpha.size();
    if (d == 0 || beta.size() != d || gamma.size() != d) {
        throw InputError("coupled-cell parameter arrays must share a positive length");
    }
    if (coupling.rows() != d || coupling.cols() != d) {
        throw InputError("coupling matrix must be d x d");
    }
    for (Index i = 0; i < d; ++i) {
        if (coupling(i, i) != 0.0) throw InputError("coupling matrix must have a zero diagonal");
    }
}

Trajectory simulate(const LinearSystem& sys, const Vector& x0, Index steps) {
    const Index n = sys.dim();
    if (x0.size() != n) throw InputError("initial state has the wrong dimension");
    if (steps < 0) throw InputError("step count must be nonnegative");
    Trajectory traj{Matrix(steps + 1, n)};
    Vector x = x0;
    traj.states.row(0) = x.transpose();
    for (Index k = 1; k <= steps; ++k) {
        x = sys.matrix() * x;
        traj.states.row(k) = x.transpose();
    }
    return traj;
}

Vector simulate_local(const LinearSystem& sys, const Vector& x0, Index steps, Index vertex) {
    check_vertex(vertex, sys.dim());
    return simulate(sys, x0, steps).local(vertex);
}

DependencyGraph dependency_graph(const LinearSystem& sys) {
    const Matrix& A = sys.matrix();
    DependencyGraph g;
    g.vertex_count = sys.dim();
    for (Index from = 0; from < g.vertex_count; ++from) {
        for (Index to = 0; to < g.vertex_count; ++to) {
            if (A(to, from) != 0.0) g.edges.emplace_back(from, to);
        }
    }
    return g;
}

Matrix normalized_laplacian(const Matrix& W) {
    const Index n = W.rows();
    if (n == 0 || W.cols() != n) throw InputError("adjacency must be square and non-empty");
    if (!W.allFinite()) throw InputError("adjacency has non-finite entries");
    if ((W.array() < 0.0).any()) throw InputError("adjacency must be nonnegative");
    const double scale = std::max(1.0, W.cwiseAbs().maxCoeff());
    if ((W - W.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw InputError("adjacency must be symmetric");
    }
    const Vector degree = W.rowwise().sum();
    for (Index i = 0; i < n; ++i) {
        if (!(degree(i) > 0.0)) {
            throw InputError("vertex " + std::to_string(i) + " is isolated (zero degree)");
        }
    }
    const Vector inv_sqrt = degree.cwiseSqrt().cwiseInverse();
    Matrix L = -(inv_sqrt.asDiagonal() * W * inv_sqrt.asDiagonal());
    L.diagonal().array() += 1.0;
    // Exact symmetry keeps downstream symmetric eigensolvers happy.
    return 0.5 * (L + L.transpose());
}

LinearSystem build_wave_system(const Matrix& L, double c) {
    const Index n = L.rows();
    if (n == 0 || L.cols() != n) throw InputError("Laplacian must be square and non-empty");
    if (!(c > 0.0)) throw InputError("wave speed must be positive");
    Matrix A = Matrix::Zero(2 * n, 2 * n);
    A.topLeftCorner(n, n) = 2.0 * Matrix::Identity(n, n) - c * c * L;
    A.topRightCorner(n, n) = -Matrix::Identity(n, n);
    A.bottomLeftCorner(n, n) = Matrix::Identity(n, n);
    return LinearSystem(std::move(A));
}

LinearSystem laplacian_dynamics(const Matrix& L) {
    if (L.rows() == 0 || L.cols() != L.rows()) throw InputError("Laplacian must be square and non-empty");
    return LinearSystem(Matrix::Identity(L.rows(), L.cols()) - 0.5 * L);
}

SbmGraph generate_sbm(const SbmParams& params, std::uint64_t seed) {
    if (params.cluster_sizes.empty()) throw InputError("SBM needs at least one cluster");
    for (Index size : params.cluster_sizes) {
        if (size < 1) throw InputError("SBM cluster sizes must be positive");
    }
    auto is_prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!is_prob(params.intra_p) || !is_prob(params.inter_p)) {
        throw InputError("SBM probabilities must lie in [0, 1]");
    }
    if (!(params.intra_weight > 0.0) || !(params.inter_weight > 0.0)) {
        throw InputError("SBM weights must be positive");
    }

    std::vector<Index> block;
    for (std::size_t c = 0; c < params.cluster_sizes.size(); ++c) {
        block.insert(block.end(), static_cast<std::size_t>(params.cluster_sizes[c]), static_cast<Index>(c));
    }
    const Index n = static_cast<Index>(block.size());

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int budget = std::max(1, params.max_retries);
    for (int attempt = 1; attempt <= budget; ++attempt) {
        Matrix W = Matrix::Zero(n, n);
        for (Index i = 0; i < n; ++i) {
            for (Index j = i + 1; j < n; ++j) {
                const bool same = block[static_cast<std::size_t>(i)] == block[static_cast<std::size_t>(j)];
                const double p = same ? params.intra_p : params.inter_p;
                if (unif(rng) < p) {
                    W(i, j) = W(j, i) = same ? params.intra_weight : params.inter_weight;
                }
            }
        }
        const bool isolated = (W.rowwise().sum().array() <= 0.0).any();
        if (isolated) continue;
        if (params.require_connected && !connected(W)) continue;
        return SbmGraph{std::move(W), block, attempt};
    }
    throw GenerationError("SBM generation exhausted " + std::to_string(budget) + " retries");
}

SbmGraph drawn_cluster_graph() {
    static constexpr int kSolid[][2] = {{1, 2},  {1, 3},  {1, 5},   {2, 3},   {2, 4},   {4, 5},   {6, 8},
                                        {6, 9},  {6, 10}, {7, 8},   {7, 9},   {7, 10},  {8, 9},   {9, 10},
                                        {11, 12}, {11, 13}, {11, 14}, {12, 14}, {12, 15}, {13, 14}, {13, 15}};
    static constexpr int kDashed[][2] = {{1, 14}, {8, 13}, {3, 7}};
    Matrix W = Matrix::Zero(15, 15);
    for (const auto& e : kSolid) W(e[0] - 1, e[1] - 1) = W(e[1] - 1, e[0] - 1) = 1.0;
    for (const auto& e : kDashed) W(e[0] - 1, e[1] - 1) = W(e[1] - 1, e[0] - 1) = 0.2;
    std::vector<Index> block(15);
    for (Index i = 0; i < 15; ++i) block[static_cast<std::size_t>(i)] = i / 5;
    return SbmGraph{std::move(W), std::move(block), 1};
}

std::vector<std::pair<Index, Index>> bipartite_fixture_edges() {
    // 1<->4, 2<->5, 3<->6, 4->2, 5->1, 5->3, 6->2 (1-based in the drawing).
    return {{0, 3}, {3, 0}, {1, 4}, {4, 1}, {2, 5}, {5, 2}, {3, 1}, {4, 0}, {4, 2}, {5, 1}};
}

LinearSystem bipartite_fixture() {
    // Unit weights leave vertices 2 and 5 non-localizable; distinct weights 1 + k/10 fix that.
    Matrix A = Matrix::Zero(6, 6);
    const auto edges = bipartite_fixture_edges();
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const auto [from, to] = edges[k];
        A(to, from) = 1.0 + static_cast<double>(k) / 10.0;
    }
    return LinearSystem(std::move(A));
}

CoupledCellSystem coupled_cell_fixture(std::uint64_t seed, int max_redraws) {
    constexpr Index d = 4;
    CoupledCellSystem sys;
    sys.coupling = Matrix::Zero(d, d);
    sys.coupling(0, 1) = 1.0;
    sys.coupling(1, 2) = 1.0;
    sys.coupling(1, 3) = 1.0;
    sys.coupling(2, 3) = 1.0;
    sys.coupling(3, 0) = 1.0;
    sys.epsilon = 0.1;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> alpha_dist(-1.0, 0.0);
    std::uniform_real_distribution<double> beta_dist(1.0, 2.0);
    std::uniform_real_distribution<double> gamma_dist(-1.0, 0.0);
    const int budget = std::max(1, max_redraws);
    for (int attempt = 0; attempt < budget; ++attempt) {
        sys.alpha = Vector(d);
        sys.beta = Vector(d);
        sys.gamma = Vector(d);
        for (Index i = 0; i < d; ++i) {
            sys.alpha(i) = alpha_dist(rng);
            sys.beta(i) = beta_dist(rng);
            sys.gamma(i) = gamma_dist(rng);
        }
        // Only x_{1,1} is observed; the x_{i,2}, x_{i,3} coordinates never are
        // localizable because nothing else feeds into them.
        if (is_localizable(koopman_lift(sys), 0).localizable) return sys;
    }
    throw GenerationError("coupled-cell fixture: no localizable draw within " +
                          std::to_string(budget) + " redraws");
}

Trajectory simulate_coupled(const CoupledCellSystem& sys, const Vector& x0, Index steps) {
    sys.validate();
    const Index d = sys.cells();
    if (x0.size() != 2 * d) throw InputError("coupled-cell state must have length 2d");
    if (steps < 0) throw InputError("step count must be nonnegative");
    Trajectory traj{Matrix(steps + 1, 2 * d)};
    Vector x = x0;
    traj.states.row(0) = x.transpose();
    Vector next(2 * d);
    for (Index k = 1; k <= steps; ++k) {
        for (Index i = 0; i < d; ++i) {
            const double x1 = x(2 * i);
            const double x2 = x(2 * i + 1);
            double coupled = 0.0;
            for (Index j = 0; j < d; ++j) coupled += sys.coupling(i, j) * x(2 * j);
            next(2 * i) = sys.alpha(i) * x1 + sys.beta(i) * (x2 * x2 * x2 - x2) + sys.epsilon * coupled;
            next(2 * i + 1) = sys.gamma(i) * x2;
        }
        x = next;
        traj.states.row(k) = x.transpose();
    }
    return traj;
}

LinearSystem koopman_lift(const CoupledCellSystem& sys) {
    sys.validate();
    const Index d = sys.cells();
    Matrix A = Matrix::Zero(3 * d, 3 * d);
    for (Index i = 0; i < d; ++i) {
        const double g = sys.gamma(i);
        A(3 * i, 3 * i) = sys.alpha(i);
        A(3 * i, 3 * i + 1) = -sys.beta(i);
        A(3 * i, 3 * i + 2) = sys.beta(i);
        A(3 * i + 1, 3 * i + 1) = g;
        A(3 * i + 2, 3 * i + 2) = g * g * g;
        for (Index j = 0; j < d; ++j) A(3 * i, 3 * j) += sys.epsilon * sys.coupling(i, j);
    }
    return LinearSystem(std::move(A));
}

Vector lift_state(const Vector& x) {
    if (x.size() % 2 != 0) throw InputError("coupled-cell state must have even length");
    const Index d = x.size() / 2;
    Vector lifted(3 * d);
    for (Index i = 0; i < d; ++i) {
        const double x2 = x(2 * i + 1);
        lifted(3 * i) = x(2 * i);
        lifted(3 * i + 1) = x2;
        lifted(3 * i + 2) = x2 * x2 * x2;
    }
    return lifted;
}

Trajectory project_lifted(const Trajectory& lifted) {
    if (lifted.dim() % 3 != 0) throw InputError("lifted trajectory dimension must be a multiple of 3");
    const Index d = lifted.dim() / 3;
    Trajectory out{Matrix(lifted.states.rows(), 2 * d)};
    for (Index i = 0; i < d; ++i) {
        out.states.col(2 * i) = lifted.states.col(3 * i);
        out.states.col(2 * i + 1) = lifted.states.col(3 * i + 1);
    }
    return out;
}

LinearSystem random_system(Index n, std::uint64_t seed) {
    if (n < 1) throw InputError("random system needs n >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(n)));
    Matrix A(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) A(i, j) = normal(rng);
    }
    return LinearSystem(std::move(A));
}

Vector random_normal_vector(Index n, std::uint64_t seed) {
    if (n < 0) throw InputError("vector length must be nonnegative");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector x(n);
    for (Index i = 0; i < n; ++i) x(i) = normal(rng);
    return x;
}

}  // namespace lde
