#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace lde {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

/// Default relative cutoff for rank decisions and pseudoinverses.
inline constexpr double kDefaultRankTol = 1e-10;
/// Default absolute tolerance for deciding two eigenvalues coincide.
inline constexpr double kDefaultDistinctTol = 1e-9;

/// Least-squares solution of M x = b restricted to the numerical range of M.
struct LeastSquaresResult {
    Vector solution;
    Index rank = 0;
    std::vector<double> singular_values;
};

/// Minimum-norm least-squares solve through a truncated SVD: singular values
/// at or below rel_tol * sigma_max are discarded. An all-zero M yields x = 0.
LeastSquaresResult min_norm_solve(const Matrix& M, const Vector& b, double rel_tol);

/// Complex counterpart of min_norm_solve.
ComplexVector min_norm_solve(const ComplexMatrix& M, const ComplexVector& b, double rel_tol,
                             Index* rank = nullptr);

/// Truncated-SVD pseudoinverse.
Matrix pseudo_inverse(const Matrix& M, double rel_tol, Index* rank = nullptr);

/// Singular values in nonincreasing order.
std::vector<double> singular_values(const Matrix& M);

/// Number of singular values strictly above rel_tol * sigma_max (0 when sigma_max = 0).
Index numeric_rank(const std::vector<double>& sigma, double rel_tol);

/// Eigenvalues of a general real matrix.
ComplexVector eigenvalues(const Matrix& A);

/// Canonical ordering used throughout: descending modulus, ties (within a
/// relative 1e-12 band) broken by ascending argument.
ComplexVector sort_spectrum(const ComplexVector& eigs);

/// Largest nearest-neighbour distance of a greedy one-to-one matching between
/// two multisets; +infinity when the sizes differ.
double multiset_distance(const ComplexVector& a, const ComplexVector& b);

}  // namespace lde
