#include "lde/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lde/errors.hpp"
#include "lde/localizability.hpp"

namespace lde {

DelayMatrices hankel_matrices(const Trajectory& traj, Index delays) {
    if (delays < 1) throw InputError("delay count must be at least 1");
    const Index samples = traj.states.rows();
    if (samples < delays + 1) {
        throw InputError("trajectory of " + std::to_string(samples) + " samples is too short for " +
                         std::to_string(delays) + " delays");
    }
    const Index p = traj.dim();
    const Index cols = samples - delays;  // m - s + 1 with m = samples - 1
    DelayMatrices out{Matrix(delays * p, cols), Matrix(delays * p, cols), delays, p};
    for (Index j = 0; j < cols; ++j) {
        for (Index r = 0; r < delays; ++r) {
            out.X.block(r * p, j, p, 1) = traj.states.row(j + r).transpose();
            out.Y.block(r * p, j, p, 1) = traj.states.row(j + r + 1).transpose();
        }
    }
    return out;
}

DelayMatrices hankel_matrices(const Vector& u, Index delays) {
    return hankel_matrices(Trajectory{u}, delays);
}

DmdResult dmd(const Matrix& X, const Matrix& Y, double svd_tol) {
    if (X.rows() != Y.rows() || X.cols() != Y.cols()) {
        throw InputError("dmd: X and Y must have the same shape");
    }
    DmdResult out;
    const Matrix pinv = pseudo_inverse(X, svd_tol, &out.rank);
    out.C = Y * pinv;
    out.rank_deficient = out.rank < X.rows();
    return out;
}

Matrix CompanionModel::companion_matrix() const {
    Matrix C = Matrix::Zero(delays, delays);
    if (delays > 1) C.topRightCorner(delays - 1, delays - 1).setIdentity();
    if (delays > 0) C.row(delays - 1) = weights.transpose();
    return C;
}

CompanionModel fit_companion(const Vector& u, Index delays, double svd_tol) {
    if (delays < 1) throw InputError("delay count must be at least 1");
    if (u.size() < 2 * delays) {
        throw InputError("fit_companion needs at least 2s = " + std::to_string(2 * delays) +
                         " samples, got " + std::to_string(u.size()));
    }
    CompanionModel model;
    model.delays = delays;
    const double peak = u.size() > 0 ? u.cwiseAbs().maxCoeff() : 0.0;
    if (peak == 0.0) {
        model.weights = Vector::Zero(delays);
        return model;
    }
    model.scale = peak;
    const Vector v = u / peak;

    // Equations u^(k+s) = sum_j w_j u^(k+j), k = 0..len-s-1.
    const Index equations = v.size() - delays;
    Matrix M(equations, delays);
    for (Index k = 0; k < equations; ++k) M.row(k) = v.segment(k, delays).transpose();
    const Vector rhs = v.tail(equations);

    const auto solved = min_norm_solve(M, rhs, svd_tol);
    model.weights = solved.solution;
    model.residual = (M * model.weights - rhs).norm() * peak;
    return model;
}

Vector characteristic_polynomial(const Matrix& A) {
    const Index n = A.rows();
    if (A.cols() != n) throw InputError("characteristic polynomial needs a square matrix");
    // Faddeev-LeVerrier: M_k = A M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(A M_k) / k.
    Vector coeffs(n);
    Matrix M = Matrix::Zero(n, n);
    double previous = 1.0;  // c_n
    for (Index k = 1; k <= n; ++k) {
        M = A * M;
        M.diagonal().array() += previous;
        const double c = -(A * M).trace() / static_cast<double>(k);
        coeffs(n - k) = c;
        previous = c;
    }
    return coeffs;
}

CompanionModel exact_companion(const LinearSystem& sys) {
    CompanionModel model;
    model.delays = sys.dim();
    model.weights = -characteristic_polynomial(sys.matrix());
    return model;
}

Vector predict(const CompanionModel& model, const Vector& window, Index steps) {
    const Index s = model.delays;
    if (window.size() != s) throw InputError("prediction window must hold exactly s values");
    if (steps < 0) throw InputError("step count must be nonnegative");
    Vector out(s + steps);
    out.head(s) = window;
    for (Index k = 0; k < steps; ++k) out(s + k) = model.weights.dot(out.segment(k, s));
    return out;
}

double growth_normalized_error(const Vector& pred, const Vector& truth) {
    if (pred.size() != truth.size()) throw InputError("growth_normalized_error: size mismatch");
    double running = 0.0;
    double worst = 0.0;
    for (Index k = 0; k < truth.size(); ++k) {
        running = std::max(running, std::abs(truth(k)));
        const double diff = std::abs(pred(k) - truth(k));
        if (diff == 0.0) continue;
        worst = std::max(worst, running > 0.0 ? diff / running : diff);
    }
    return worst;
}

Vector recover_hidden_state(const LinearSystem& sys, Index vertex, const Vector& window,
                            double rel_tol) {
    const Index n = sys.dim();
    if (n < 2) throw InputError("no hidden state for n = 1");
    if (window.size() != n) throw InputError("hidden-state recovery needs n consecutive local values");

    const auto report = is_localizable(sys, vertex, rel_tol);
    if (!report.localizable) {
        throw LocalizabilityError("system is not localizable in vertex " + std::to_string(vertex),
                                  report.singular_values);
    }
    const Matrix A = permute_vertex_first(sys, vertex).matrix();
    const Index m = n - 1;
    const double a11 = A(0, 0);
    const Matrix A22 = A.bottomRightCorner(m, m);
    const Vector a21 = A.block(1, 0, m, 1);

    // markov(l) = a12^T A22^l a21 = R.row(l) * a21.
    const Matrix& R = report.r_matrix;
    const Vector markov = R * a21;

    Vector b(m);
    for (Index r = 1; r <= m; ++r) {
        double value = window(r) - a11 * window(r - 1);
        for (Index l = 0; l <= r - 2; ++l) value -= markov(l) * window(r - 2 - l);
        b(r - 1) = value;
    }
    return R.colPivHouseholderQr().solve(b);
}

}  // namespace lde
