#include "lde/localizability.hpp"

#include <algorithm>
#include <string>

#include "lde/errors.hpp"

namespace lde {

namespace {

void check_vertex(Index vertex, Index n) {
    if (vertex < 0 || vertex >= n) {
        throw InputError("vertex index " + std::to_string(vertex) + " out of range [0, " +
                         std::to_string(n) + ")");
    }
}

std::vector<Index> vertex_first_order(Index n, Index vertex) {
    std::vector<Index> order;
    order.reserve(static_cast<std::size_t>(n));
    order.push_back(vertex);
    for (Index i = 0; i < n; ++i) {
        if (i != vertex) order.push_back(i);
    }
    return order;
}

std::vector<bool> reachable(const std::vector<std::vector<Index>>& adj, Index start) {
    std::vector<bool> seen(adj.size(), false);
    std::vector<Index> stack{start};
    seen[static_cast<std::size_t>(start)] = true;
    while (!stack.empty()) {
        const Index v = stack.back();
        stack.pop_back();
        for (Index w : adj[static_cast<std::size_t>(v)]) {
            if (!seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = true;
                stack.push_back(w);
            }
        }
    }
    return seen;
}

}  // namespace

LinearSystem permute_vertex_first(const LinearSystem& sys, Index vertex) {
    const Index n = sys.dim();
    check_vertex(vertex, n);
    const auto order = vertex_first_order(n, vertex);
    const Matrix& A = sys.matrix();
    Matrix P(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            P(i, j) = A(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
        }
    }
    return LinearSystem(std::move(P));
}

Matrix r_matrix(const LinearSystem& sys, Index vertex) {
    const Index n = sys.dim();
    if (n < 2) throw InputError("R is only defined for n >= 2");
    const LinearSystem permuted = permute_vertex_first(sys, vertex);
    const Matrix& A = permuted.matrix();
    const Index m = n - 1;
    const auto A22 = A.bottomRightCorner(m, m);

    Matrix R(m, m);
    Eigen::RowVectorXd row = A.block(0, 1, 1, m);
    for (Index l = 0; l < m; ++l) {
        R.row(l) = row;
        if (l + 1 < m) row = row * A22;
    }
    return R;
}

LocalizabilityReport is_localizable(const LinearSystem& sys, Index vertex, double rel_tol) {
    check_vertex(vertex, sys.dim());
    if (!(rel_tol > 0.0)) throw InputError("rank tolerance must be positive");
    LocalizabilityReport report;
    report.vertex = vertex;
    report.tolerance_used = rel_tol;
    if (sys.dim() == 1) {
        report.r_matrix = Matrix(0, 0);
        report.localizable = true;
        return report;
    }
    report.r_matrix = r_matrix(sys, vertex);
    report.singular_values = singular_values(report.r_matrix);
    report.numeric_rank = numeric_rank(report.singular_values, rel_tol);
    report.localizable = report.numeric_rank == sys.dim() - 1;
    return report;
}

EverywhereReport localizable_everywhere(const LinearSystem& sys, double rel_tol) {
    EverywhereReport out;
    out.localizable = true;
    out.vertices.reserve(static_cast<std::size_t>(sys.dim()));
    for (Index v = 0; v < sys.dim(); ++v) {
        out.vertices.push_back(is_localizable(sys, v, rel_tol));
        out.localizable = out.localizable && out.vertices.back().localizable;
    }
    return out;
}

bool hautus_localizable(const LinearSystem& sys, Index vertex, double rel_tol) {
    const Index n = sys.dim();
    if (n < 2) throw InputError("the Hautus test needs n >= 2");
    check_vertex(vertex, n);
    const Matrix A = permute_vertex_first(sys, vertex).matrix();
    const Index m = n - 1;
    const Matrix A22 = A.bottomRightCorner(m, m);
    const Eigen::RowVectorXd a12 = A.block(0, 1, 1, m);

    ComplexVector eigs = sort_spectrum(eigenvalues(A22));
    std::vector<Complex> distinct;
    for (Index i = 0; i < eigs.size(); ++i) {
        const bool seen = std::any_of(distinct.begin(), distinct.end(), [&](const Complex& z) {
            return std::abs(z - eigs(i)) <= kDefaultDistinctTol;
        });
        if (!seen) distinct.push_back(eigs(i));
    }

    ComplexMatrix stacked(n, m);
    for (const Complex& lambda : distinct) {
        stacked.topRows(m) = -A22.cast<Complex>();
        stacked.topRows(m).diagonal().array() += lambda;
        stacked.row(m) = a12.cast<Complex>();
        Eigen::JacobiSVD<ComplexMatrix> svd(stacked);
        const auto& sigma = svd.singularValues();
        if (!(sigma(0) > 0.0) || !(sigma(m - 1) > rel_tol * sigma(0))) return false;
    }
    return true;
}

bool is_strongly_connected(const DependencyGraph& g) {
    const Index n = g.vertex_count;
    if (n <= 1) return true;
    std::vector<std::vector<Index>> forward(static_cast<std::size_t>(n));
    std::vector<std::vector<Index>> backward(static_cast<std::size_t>(n));
    for (const auto& [from, to] : g.edges) {
        forward[static_cast<std::size_t>(from)].push_back(to);
        backward[static_cast<std::size_t>(to)].push_back(from);
    }
    // Strongly connected iff vertex 0 reaches everything and is reached by everything.
    const auto out = reachable(forward, 0);
    const auto in = reachable(backward, 0);
    return std::all_of(out.begin(), out.end(), [](bool b) { return b; }) &&
           std::all_of(in.begin(), in.end(), [](bool b) { return b; });
}

}  // namespace lde
