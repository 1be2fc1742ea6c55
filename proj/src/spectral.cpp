#include "lde/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "lde/errors.hpp"

namespace lde {

namespace {

// Greedy power-of-two row/column scaling; leaves the spectrum untouched.
void balance(Matrix& M) {
    constexpr double gamma = 0.9;
    const Index n = M.rows();
    bool changed = true;
    while (changed) {
        changed = false;
        for (Index i = 0; i < n; ++i) {
            const double row_norm = M.row(i).lpNorm<1>();
            const double col_norm = M.col(i).lpNorm<1>();
            if (row_norm == 0.0 || col_norm == 0.0) continue;
            int exponent = 0;
            std::frexp(row_norm / col_norm, &exponent);
            exponent /= 2;
            if (exponent == 0) continue;
            const double scaled_col = std::ldexp(col_norm, exponent);
            const double scaled_row = std::ldexp(row_norm, -exponent);
            if (scaled_col + scaled_row < gamma * (col_norm + row_norm)) {
                changed = true;
                M.row(i) *= std::ldexp(1.0, -exponent);
                M.col(i) *= std::ldexp(1.0, exponent);
            }
        }
    }
}

}  // namespace

ComplexVector local_eigenvalues(const CompanionModel& model) {
    if (model.delays < 1) return {};
    Matrix C = model.companion_matrix();
    balance(C);
    return sort_spectrum(eigenvalues(C));
}

ComplexVector companion_eigenvector(Complex lambda, Index s) {
    if (s < 1) throw InputError("companion eigenvector needs s >= 1");
    ComplexVector xi(s);
    xi(0) = 1.0;
    for (Index i = 1; i < s; ++i) xi(i) = xi(i - 1) * lambda;
    return xi;
}

TraceDet trace_det(const CompanionModel& model) {
    if (model.delays < 1) return {};
    const double sign = (model.delays % 2 == 1) ? 1.0 : -1.0;  // (-1)^{s+1}
    return {model.weights(model.delays - 1), sign * model.weights(0)};
}

bool is_bipartite_spectrum(const ComplexVector& eigs, double tol) {
    const ComplexVector sorted = sort_spectrum(eigs);
    const Index n = sorted.size();
    std::vector<bool> matched(static_cast<std::size_t>(n), false);
    for (Index i = 0; i < n; ++i) {
        if (matched[static_cast<std::size_t>(i)]) continue;
        const Complex target = -sorted(i);
        if (std::abs(sorted(i) - target) <= tol) {  // zero eigenvalue pairs with itself
            matched[static_cast<std::size_t>(i)] = true;
            continue;
        }
        Index best = -1;
        double best_dist = tol;
        for (Index j = 0; j < n; ++j) {
            if (j == i || matched[static_cast<std::size_t>(j)]) continue;
            const double d = std::abs(sorted(j) - target);
            if (d <= best_dist) {
                best_dist = d;
                best = j;
            }
        }
        if (best < 0) return false;
        matched[static_cast<std::size_t>(i)] = true;
        matched[static_cast<std::size_t>(best)] = true;
    }
    return true;
}

ComplexVector local_eigenvector_components(const Vector& u, const ComplexVector& eigs,
                                           double svd_tol, double distinct_tol) {
    const Index r = eigs.size();
    const Index len = u.size();
    if (len <= r) {
        throw InputError("Vandermonde regression needs more samples (" + std::to_string(len) +
                         ") than eigenvalues (" + std::to_string(r) + ")");
    }
    for (Index i = 0; i < r; ++i) {
        for (Index j = i + 1; j < r; ++j) {
            if (std::abs(eigs(i) - eigs(j)) <= distinct_tol) {
                throw DegenerateSpectrumError("eigenvalues " + std::to_string(i) + " and " +
                                              std::to_string(j) + " coincide; the Vandermonde "
                                              "matrix is rank-deficient");
            }
        }
    }
    if (r == 0) return {};
    const double peak = u.cwiseAbs().maxCoeff();
    if (peak == 0.0) return ComplexVector::Zero(r);

    // Columns lambda_l^k, each scaled to unit max-abs; rescaling columns does
    // not change the least-squares solution set.
    ComplexMatrix V(len, r);
    Vector column_scale(r);
    for (Index l = 0; l < r; ++l) {
        Complex power = 1.0;
        double largest = 0.0;
        for (Index k = 0; k < len; ++k) {
            V(k, l) = power;
            largest = std::max(largest, std::abs(power));
            power *= eigs(l);
        }
        column_scale(l) = largest;
        V.col(l) /= largest;
    }
    const ComplexVector rhs = (u / peak).cast<Complex>();
    ComplexVector c = min_norm_solve(V, rhs, svd_tol);
    for (Index l = 0; l < r; ++l) c(l) *= peak / column_scale(l);

    // Real data: conjugate eigenvalues carry conjugate coefficients.
    std::vector<bool> done(static_cast<std::size_t>(r), false);
    for (Index l = 0; l < r; ++l) {
        if (done[static_cast<std::size_t>(l)]) continue;
        const Complex partner_value = std::conj(eigs(l));
        const double band = 1e-8 * std::max(1.0, std::abs(eigs(l)));
        if (std::abs(eigs(l).imag()) <= 1e-12 * std::max(1.0, std::abs(eigs(l)))) {
            c(l) = c(l).real();
            done[static_cast<std::size_t>(l)] = true;
            continue;
        }
        for (Index j = 0; j < r; ++j) {
            if (j == l || done[static_cast<std::size_t>(j)]) continue;
            if (std::abs(eigs(j) - partner_value) <= band) {
                const Complex avg = 0.5 * (c(l) + std::conj(c(j)));
                c(l) = avg;
                c(j) = std::conj(avg);
                done[static_cast<std::size_t>(j)] = true;
                break;
            }
        }
        done[static_cast<std::size_t>(l)] = true;
    }
    return c;
}

Index detect_cluster_count(std::vector<double> eigs, Index max_k) {
    if (max_k < 1) throw InputError("max_k must be at least 1");
    if (eigs.size() < 2) return 1;
    std::sort(eigs.begin(), eigs.end(), std::greater<>());
    const Index last = std::min<Index>(max_k - 1, static_cast<Index>(eigs.size()) - 1);
    Index best_k = 1;
    double best_gap = -1.0;
    for (Index k = 1; k <= last; ++k) {
        const double gap = eigs[static_cast<std::size_t>(k - 1)] - eigs[static_cast<std::size_t>(k)];
        if (gap > best_gap) {
            best_gap = gap;
            best_k = k;
        }
    }
    return best_k;
}

std::vector<Index> decentralized_cluster_labels(const std::vector<ComplexVector>& components,
                                                Index k, double sign_tol) {
    if (k < 1) throw InputError("cluster count must be at least 1");
    std::vector<Index> labels(components.size(), 0);
    if (k == 1) return labels;
    std::map<std::vector<bool>, Index> ids;
    for (std::size_t v = 0; v < components.size(); ++v) {
        const ComplexVector& c = components[v];
        if (c.size() < k) {
            throw InputError("vertex " + std::to_string(v) + " supplies " + std::to_string(c.size()) +
                             " components, fewer than k = " + std::to_string(k));
        }
        std::vector<bool> pattern;
        for (Index l = 1; l < k; ++l) pattern.push_back(c(l).real() >= -sign_tol);
        const auto [it, inserted] = ids.try_emplace(pattern, static_cast<Index>(ids.size()));
        labels[v] = it->second;
    }
    return labels;
}

bool same_partition(const std::vector<Index>& a, const std::vector<Index>& b) {
    if (a.size() != b.size()) return false;
    std::map<Index, Index> forward;
    std::map<Index, Index> backward;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto f = forward.try_emplace(a[i], b[i]).first;
        const auto g = backward.try_emplace(b[i], a[i]).first;
        if (f->second != b[i] || g->second != a[i]) return false;
    }
    return true;
}

SpectralReport analyze_vertex(const Vector& u, Index delays, const AnalyzeOptions& options) {
    SpectralReport report;
    report.model = fit_companion(u, delays, options.svd_tol);
    report.eigenvalues = local_eigenvalues(report.model);
    const auto td = trace_det(report.model);
    report.trace_estimate = td.trace;
    report.det_estimate = td.det;
    if (options.compute_components) {
        report.components = local_eigenvector_components(u, report.eigenvalues, options.svd_tol,
                                                         options.distinct_tol);
    }
    if (options.test_bipartite) {
        report.bipartite = is_bipartite_spectrum(report.eigenvalues, options.bipartite_tol);
    }
    if (options.detect_gap) {
        std::vector<double> real_parts;
        for (Index i = 0; i < report.eigenvalues.size(); ++i) real_parts.push_back(report.eigenvalues(i).real());
        const Index max_k = options.max_k > 0 ? options.max_k : (delays + 1) / 2;
        report.cluster_count = detect_cluster_count(std::move(real_parts), max_k);
    }
    return report;
}

std::vector<std::pair<Complex, Complex>> modes_by_real_part(const SpectralReport& report) {
    std::vector<std::pair<Complex, Complex>> modes;
    for (Index i = 0; i < report.eigenvalues.size(); ++i) {
        const Complex c = i < report.components.size() ? report.components(i) : Complex{};
        modes.emplace_back(report.eigenvalues(i), c);
    }
    std::stable_sort(modes.begin(), modes.end(),
                     [](const auto& a, const auto& b) { return a.first.real() > b.first.real(); });
    return modes;
}

ClusterResult cluster_vertices(const Trajectory& traj, Index delays, const ClusterOptions& options) {
    ClusterResult result;
    AnalyzeOptions analyze = options.analyze;
    analyze.compute_components = true;
    analyze.detect_gap = analyze.detect_gap || !options.k.has_value();

    // Each vertex sees only its own column.
    for (Index v = 0; v < traj.dim(); ++v) {
        SpectralReport report = analyze_vertex(traj.local(v), delays, analyze);
        report.vertex = v;
        result.reports.push_back(std::move(report));
    }

    if (options.k) {
        result.k = *options.k;
    } else {
        std::map<Index, Index> votes;
        for (const auto& r : result.reports) ++votes[r.cluster_count.value_or(1)];
        Index best_votes = -1;
        for (const auto& [count, n] : votes) {
            if (n > best_votes) {  // std::map iterates ascending, so ties keep the smaller k
                best_votes = n;
                result.k = count;
            }
        }
    }

    std::vector<ComplexVector> ordered;
    for (const auto& r : result.reports) {
        const auto modes = modes_by_real_part(r);
        ComplexVector c(static_cast<Index>(modes.size()));
        for (std::size_t i = 0; i < modes.size(); ++i) c(static_cast<Index>(i)) = modes[i].second;
        ordered.push_back(std::move(c));
    }
    result.labels = decentralized_cluster_labels(ordered, result.k, options.sign_tol);
    return result;
}

}  // namespace lde
