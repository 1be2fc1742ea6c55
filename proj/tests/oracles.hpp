#pragma once

// Reference computations written independently of the library: plain loops,
// long double where it helps, and whole-matrix eigendecompositions instead of
// local estimates.

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Rows = std::vector<std::vector<double>>;

inline Rows to_rows(const Eigen::MatrixXd& A) {
    Rows r(static_cast<std::size_t>(A.rows()), std::vector<double>(static_cast<std::size_t>(A.cols())));
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j) r[i][j] = A(i, j);
    return r;
}

// x^(0..steps) by repeated dense mat-vec, one state per entry.
inline Rows simulate(const Rows& A, std::vector<double> x, int steps) {
    Rows out{x};
    for (int k = 0; k < steps; ++k) {
        std::vector<double> next(x.size(), 0.0);
        for (std::size_t i = 0; i < A.size(); ++i) {
            long double acc = 0.0L;
            for (std::size_t j = 0; j < x.size(); ++j) acc += static_cast<long double>(A[i][j]) * x[j];
            next[i] = static_cast<double>(acc);
        }
        x = next;
        out.push_back(x);
    }
    return out;
}

// Faddeev-LeVerrier in long double: alpha_0..alpha_{n-1} of det(lambda I - A).
inline std::vector<long double> charpoly_leverrier(const Eigen::MatrixXd& A) {
    const std::size_t n = static_cast<std::size_t>(A.rows());
    using LRows = std::vector<std::vector<long double>>;
    LRows a(n, std::vector<long double>(n)), M(n, std::vector<long double>(n, 0.0L));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a[i][j] = A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    auto mul = [n](const LRows& x, const LRows& y) {
        LRows z(n, std::vector<long double>(n, 0.0L));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k)
                for (std::size_t j = 0; j < n; ++j) z[i][j] += x[i][k] * y[k][j];
        return z;
    };
    std::vector<long double> alpha(n);
    long double c = 1.0L;
    for (std::size_t k = 1; k <= n; ++k) {
        M = mul(a, M);
        for (std::size_t i = 0; i < n; ++i) M[i][i] += c;
        const LRows AM = mul(a, M);
        long double tr = 0.0L;
        for (std::size_t i = 0; i < n; ++i) tr += AM[i][i];
        c = -tr / static_cast<long double>(k);
        alpha[n - k] = c;
    }
    return alpha;
}

// Coefficients of prod (lambda - lambda_i) from a full eigensolve.
inline std::vector<double> charpoly_from_roots(const Eigen::MatrixXd& A) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
    const auto roots = es.eigenvalues();
    std::vector<std::complex<long double>> p{1.0L};  // ascending powers
    for (Eigen::Index i = 0; i < roots.size(); ++i) {
        const std::complex<long double> r(roots(i).real(), roots(i).imag());
        std::vector<std::complex<long double>> q(p.size() + 1, 0.0L);
        for (std::size_t j = 0; j < p.size(); ++j) {
            q[j + 1] += p[j];
            q[j] -= r * p[j];
        }
        p = q;
    }
    std::vector<double> alpha(p.size() - 1);
    for (std::size_t i = 0; i + 1 < p.size(); ++i) alpha[i] = static_cast<double>(p[i].real());
    return alpha;
}

struct Modes {
    Eigen::VectorXcd values;
    Eigen::MatrixXcd vectors;  // columns
    Eigen::VectorXcd z;        // vectors^{-1} x0
};

inline Modes eigendecompose(const Eigen::MatrixXd& A, const Eigen::VectorXd& x0) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(A);
    Modes m{es.eigenvalues(), es.eigenvectors(), {}};
    m.z = m.vectors.partialPivLu().solve(x0.cast<std::complex<double>>());
    return m;
}

// c_l for vertex v paired with each eigenvalue of A.
inline std::vector<std::pair<std::complex<double>, std::complex<double>>> components(const Modes& m, Eigen::Index v) {
    std::vector<std::pair<std::complex<double>, std::complex<double>>> out;
    for (Eigen::Index l = 0; l < m.values.size(); ++l) out.emplace_back(m.values(l), m.vectors(v, l) * m.z(l));
    return out;
}

// Global spectral clustering by sign structure: eigenvectors of the symmetric
// L in ascending order, modes 2..k weighted by z = V^T x0.
inline std::vector<int> sign_labels(const Eigen::MatrixXd& L, const Eigen::VectorXd& x0, int k, double tol = 1e-9) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
    const Eigen::MatrixXd V = es.eigenvectors();
    const Eigen::VectorXd z = V.transpose() * x0;
    std::map<std::vector<int>, int> ids;
    std::vector<int> labels;
    for (Eigen::Index v = 0; v < L.rows(); ++v) {
        std::vector<int> key;
        for (int l = 1; l < k; ++l) key.push_back(V(v, l) * z(l) >= -tol ? 1 : 0);
        const auto it = ids.emplace(key, static_cast<int>(ids.size())).first;
        labels.push_back(it->second);
    }
    return labels;
}

// Same partition up to renaming.
template <class A, class B>
bool same_partition(const std::vector<A>& a, const std::vector<B>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            if ((a[i] == a[j]) != (b[i] == b[j])) return false;
    return true;
}

// One step of the coupled-cell map written out per scalar; x is cell-major.
inline std::vector<double> coupled_step(const std::vector<double>& x, const std::vector<double>& alpha,
                                        const std::vector<double>& beta, const std::vector<double>& gamma,
                                        const Rows& S, double eps) {
    const std::size_t d = alpha.size();
    std::vector<double> y(2 * d);
    for (std::size_t i = 0; i < d; ++i) {
        const double x1 = x[2 * i];
        const double x2 = x[2 * i + 1];
        double coupling = 0.0;
        for (std::size_t j = 0; j < d; ++j) coupling += S[i][j] * x[2 * j];
        y[2 * i] = alpha[i] * x1 + beta[i] * (x2 * x2 * x2 - x2) + eps * coupling;
        y[2 * i + 1] = gamma[i] * x2;
    }
    return y;
}

// Largest distance of a greedy nearest-neighbour matching.
inline double match_distance(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    if (a.size() != b.size()) return INFINITY;
    std::vector<bool> used(static_cast<std::size_t>(b.size()), false);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        double best = INFINITY;
        Eigen::Index arg = -1;
        for (Eigen::Index j = 0; j < b.size(); ++j) {
            if (used[j]) continue;
            const double d = std::abs(a(i) - b(j));
            if (d < best) best = d, arg = j;
        }
        used[arg] = true;
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace oracle
