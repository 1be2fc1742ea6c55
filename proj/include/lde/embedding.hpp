#pragma once

#include "lde/dynsys.hpp"
#include "lde/linalg.hpp"

namespace lde {

/// Augmented delay (Hankel) data matrices. Column j of X stacks the
/// observations at times j..j+s-1, column j of Y those at j+1..j+s.
struct DelayMatrices {
    Matrix X;
    Matrix Y;
    Index delays = 1;
    Index observed_dim = 1;
};

DelayMatrices hankel_matrices(const Trajectory& traj, Index delays);
DelayMatrices hankel_matrices(const Vector& u, Index delays);

struct DmdResult {
    Matrix C;
    Index rank = 0;
    bool rank_deficient = false;
};

/// Minimum-norm minimiser C = Y X^+ of ||C X - Y||_F.
DmdResult dmd(const Matrix& X, const Matrix& Y, double svd_tol = kDefaultRankTol);

/// Bottom row w_0..w_{s-1} of a companion matrix; the model is
/// u^(k+s) = sum_j w_j u^(k+j).
struct CompanionModel {
    Index delays = 0;
    Vector weights;
    double residual = 0.0;  // training residual norm, original units
    double scale = 1.0;     // max |u| of the training data (1 when u == 0)

    Matrix companion_matrix() const;
};

/// Structured delay-DMD: only the s bottom-row unknowns are regressed.
/// Requires u.size() >= 2 s.
CompanionModel fit_companion(const Vector& u, Index delays, double svd_tol = kDefaultRankTol);

/// Weights from the characteristic polynomial of A (Faddeev-LeVerrier).
CompanionModel exact_companion(const LinearSystem& sys);

/// Coefficients alpha_0..alpha_{n-1} of det(lambda I - A) = lambda^n + sum alpha_i lambda^i.
Vector characteristic_polynomial(const Matrix& A);

/// Seed window followed by `steps` iterates of the companion recursion.
Vector predict(const CompanionModel& model, const Vector& window, Index steps);

/// max_k |pred_k - truth_k| / max_{j<=k} |truth_j|; the running maximum keeps
/// decaying signals from inflating the error. Sizes must match.
double growth_normalized_error(const Vector& pred, const Vector& truth);

/// Solves R v^(k) = b^(k) for the hidden block from n consecutive local values
/// u^(k)..u^(k+n-1). The hidden block is ordered like permute_vertex_first.
/// Throws LocalizabilityError when R is numerically singular.
Vector recover_hidden_state(const LinearSystem& sys, Index vertex, const Vector& window,
                            double rel_tol = kDefaultRankTol);

}  // namespace lde
