#include "lde/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lde/errors.hpp"

namespace lde {

namespace {

template <typename MatrixType, typename VectorType>
VectorType truncated_svd_solve(const MatrixType& M, const VectorType& b, double rel_tol,
                               Index& rank, std::vector<double>& sigma_out) {
    VectorType x = VectorType::Zero(M.cols());
    rank = 0;
    sigma_out.clear();
    if (M.size() == 0) return x;

    Eigen::JacobiSVD<MatrixType> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sigma = svd.singularValues();
    sigma_out.assign(sigma.data(), sigma.data() + sigma.size());
    if (sigma.size() == 0 || sigma(0) == 0.0) return x;

    const double cutoff = rel_tol * sigma(0);
    for (Index i = 0; i < sigma.size(); ++i) {
        if (sigma(i) > cutoff) ++rank;
    }
    const auto Ur = svd.matrixU().leftCols(rank);
    const auto Vr = svd.matrixV().leftCols(rank);
    VectorType coeffs = Ur.adjoint() * b;
    for (Index i = 0; i < rank; ++i) coeffs(i) /= sigma(i);
    x = Vr * coeffs;
    return x;
}

}  // namespace

LeastSquaresResult min_norm_solve(const Matrix& M, const Vector& b, double rel_tol) {
    if (M.rows() != b.size()) throw InputError("min_norm_solve: row count does not match rhs");
    LeastSquaresResult result;
    result.solution = truncated_svd_solve(M, b, rel_tol, result.rank, result.singular_values);
    return result;
}

ComplexVector min_norm_solve(const ComplexMatrix& M, const ComplexVector& b, double rel_tol,
                             Index* rank) {
    if (M.rows() != b.size()) throw InputError("min_norm_solve: row count does not match rhs");
    Index r = 0;
    std::vector<double> sigma;
    ComplexVector x = truncated_svd_solve(M, b, rel_tol, r, sigma);
    if (rank) *rank = r;
    return x;
}

Matrix pseudo_inverse(const Matrix& M, double rel_tol, Index* rank) {
    Matrix P = Matrix::Zero(M.cols(), M.rows());
    Index r = 0;
    if (M.size() > 0) {
        Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sigma = svd.singularValues();
        if (sigma.size() > 0 && sigma(0) > 0.0) {
            const double cutoff = rel_tol * sigma(0);
            while (r < sigma.size() && sigma(r) > cutoff) ++r;
            P = svd.matrixV().leftCols(r) * sigma.head(r).cwiseInverse().asDiagonal() *
                svd.matrixU().leftCols(r).transpose();
        }
    }
    if (rank) *rank = r;
    return P;
}

std::vector<double> singular_values(const Matrix& M) {
    if (M.size() == 0) return {};
    Eigen::JacobiSVD<Matrix> svd(M);
    const auto& s = svd.singularValues();
    return {s.data(), s.data() + s.size()};
}

Index numeric_rank(const std::vector<double>& sigma, double rel_tol) {
    if (sigma.empty() || sigma.front() == 0.0) return 0;
    const double cutoff = rel_tol * sigma.front();
    return static_cast<Index>(
        std::count_if(sigma.begin(), sigma.end(), [cutoff](double s) { return s > cutoff; }));
}

ComplexVector eigenvalues(const Matrix& A) {
    if (A.rows() != A.cols()) throw InputError("eigenvalues: matrix is not square");
    if (A.size() == 0) return {};
    Eigen::EigenSolver<Matrix> solver(A, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) throw NumericError("eigenvalues: QR iteration did not converge");
    return solver.eigenvalues();
}

ComplexVector sort_spectrum(const ComplexVector& eigs) {
    std::vector<Complex> v(eigs.data(), eigs.data() + eigs.size());
    std::stable_sort(v.begin(), v.end(),
                     [](const Complex& a, const Complex& b) { return std::abs(a) > std::abs(b); });

    // Groups of (nearly) equal modulus are ordered by argument.
    std::size_t begin = 0;
    while (begin < v.size()) {
        std::size_t end = begin + 1;
        while (end < v.size()) {
            const double scale = std::max(std::abs(v[begin]), 1.0);
            if (std::abs(v[end - 1]) - std::abs(v[end]) > 1e-12 * scale) break;
            ++end;
        }
        std::stable_sort(v.begin() + static_cast<std::ptrdiff_t>(begin),
                         v.begin() + static_cast<std::ptrdiff_t>(end),
                         [](const Complex& a, const Complex& b) { return std::arg(a) < std::arg(b); });
        begin = end;
    }
    ComplexVector out(static_cast<Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Index>(i)) = v[i];
    return out;
}

double multiset_distance(const ComplexVector& a, const ComplexVector& b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    std::vector<bool> used(static_cast<std::size_t>(b.size()), false);
    double worst = 0.0;
    const ComplexVector sorted_a = sort_spectrum(a);
    for (Index i = 0; i < sorted_a.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        Index best_j = -1;
        for (Index j = 0; j < b.size(); ++j) {
            if (used[static_cast<std::size_t>(j)]) continue;
            const double d = std::abs(sorted_a(i) - b(j));
            if (d < best) {
                best = d;
                best_j = j;
            }
        }
        used[static_cast<std::size_t>(best_j)] = true;
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace lde
