#include "linfsindy/sparse_regression.hpp"

#include "linfsindy/error.hpp"
#include "linfsindy/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace linfsindy {

using Eigen::Index;

std::string to_string(ObjectiveKind kind) { return kind == ObjectiveKind::L2 ? "L2" : "Linf"; }

ObjectiveKind objective_kind_from_string(const std::string& name) {
    if (name == "L2" || name == "l2") return ObjectiveKind::L2;
    if (name == "Linf" || name == "linf" || name == "LINF") return ObjectiveKind::Linf;
    throw ConfigError("unknown objective '" + name + "'");
}

Residual residual(const Matrix& theta, const Vector& xi, const Vector& y) {
    if (theta.cols() != xi.size() || theta.rows() != y.size()) {
        throw InputError("residual: shape mismatch (theta " + std::to_string(theta.rows()) + "x" +
                         std::to_string(theta.cols()) + ", xi " + std::to_string(xi.size()) +
                         ", y " + std::to_string(y.size()) + ")");
    }
    return Residual{y - theta * xi};
}

double objective_value(const Matrix& theta, const Vector& xi, const Vector& y,
                       ObjectiveKind kind, double lambda) {
    const auto nnz = static_cast<double>((xi.array() != 0.0).count());
    return residual(theta, xi, y).norm(kind) + lambda * nnz;
}

LeastSquaresFit least_squares(const Matrix& theta, const Vector& y) {
    if (theta.rows() != y.size()) throw InputError("least_squares: shape mismatch");
    LeastSquaresFit fit;
    if (theta.cols() == 0) return fit;
    const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(theta);
    fit.rank = cod.rank();
    fit.rank_deficient = fit.rank < theta.cols();
    fit.coefficients = cod.solve(y);
    const Vector r = y - theta * fit.coefficients;
    fit.coefficients += cod.solve(r);
    return fit;
}

namespace {

Matrix select_columns(const Matrix& theta, const std::vector<std::size_t>& support) {
    Matrix sub(theta.rows(), static_cast<Index>(support.size()));
    for (std::size_t j = 0; j < support.size(); ++j) {
        sub.col(static_cast<Index>(j)) = theta.col(static_cast<Index>(support[j]));
    }
    return sub;
}

Vector scatter(const Vector& values, const std::vector<std::size_t>& support, Index m) {
    Vector xi = Vector::Zero(m);
    for (std::size_t j = 0; j < support.size(); ++j) {
        xi[static_cast<Index>(support[j])] = values[static_cast<Index>(j)];
    }
    return xi;
}

std::vector<std::size_t> nonzero_support(const Vector& xi) {
    std::vector<std::size_t> support;
    for (Index j = 0; j < xi.size(); ++j) {
        if (xi[j] != 0.0) support.push_back(static_cast<std::size_t>(j));
    }
    return support;
}

struct SupportFit {
    Vector xi;
    double residual_norm = 0.0;
    bool rank_deficient = false;
};

SupportFit fit_support(const Matrix& theta, const Vector& y,
                       const std::vector<std::size_t>& support, ObjectiveKind kind) {
    SupportFit out;
    if (support.empty()) {
        out.xi = Vector::Zero(theta.cols());
        out.residual_norm = Residual{y}.norm(kind);
        return out;
    }
    const Matrix sub = select_columns(theta, support);
    Vector c;
    if (kind == ObjectiveKind::L2) {
        const LeastSquaresFit fit = least_squares(sub, y);
        c = fit.coefficients;
        out.rank_deficient = fit.rank_deficient;
    } else {
        const ChebyshevFit fit = linf_fit_fixed_support(sub, y);
        c = fit.coefficients;
        out.rank_deficient = fit.rank_deficient;
    }
    out.xi = scatter(c, support, theta.cols());
    out.residual_norm = residual(theta, out.xi, y).norm(kind);
    return out;
}

SparseCoefficients package(const Matrix& theta, const Vector& y, Vector xi, ObjectiveKind kind,
                           double lambda) {
    SparseCoefficients out;
    out.support = nonzero_support(xi);
    out.objective_kind = kind;
    out.lambda = lambda;
    out.objective_value = objective_value(theta, xi, y, kind, lambda);
    out.xi = std::move(xi);
    return out;
}

void require_problem(const Matrix& theta, const Vector& y, const char* who) {
    if (theta.rows() < 1 || theta.cols() < 1) {
        throw InputError(std::string(who) + ": theta must be non-empty");
    }
    if (theta.rows() != y.size()) throw InputError(std::string(who) + ": shape mismatch");
    if (!theta.allFinite() || !y.allFinite()) {
        throw InputError(std::string(who) + ": non-finite input");
    }
}

} // namespace

SparseCoefficients stlsq(const Matrix& theta, const Vector& y, double threshold,
                         std::size_t max_iters) {
    require_problem(theta, y, "stlsq");
    if (!(threshold > 0.0)) throw ConfigError("stlsq: threshold must be positive");
    if (max_iters == 0) throw ConfigError("stlsq: max_iters must be positive");

    const Index m = theta.cols();
    std::vector<std::size_t> active(static_cast<std::size_t>(m));
    for (Index j = 0; j < m; ++j) active[static_cast<std::size_t>(j)] = static_cast<std::size_t>(j);

    SolverDiagnostics diag;
    diag.solver = "stlsq";
    diag.threshold = threshold;
    SupportFit fit = fit_support(theta, y, active, ObjectiveKind::L2);
    ++diag.inner_fits;
    diag.rank_deficient = fit.rank_deficient;

    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        diag.iterations = iter + 1;
        std::vector<std::size_t> kept;
        for (std::size_t j : active) {
            if (std::abs(fit.xi[static_cast<Index>(j)]) >= threshold) kept.push_back(j);
        }
        if (kept == active) break;
        active = std::move(kept);
        fit = fit_support(theta, y, active, ObjectiveKind::L2);
        ++diag.inner_fits;
        diag.rank_deficient = diag.rank_deficient || fit.rank_deficient;
        if (active.empty()) break;
    }

    // A refit can shrink a kept coefficient under the threshold when
    // max_iters runs out; the returned model honors the threshold regardless.
    Vector xi = fit.xi;
    for (Index j = 0; j < m; ++j) {
        if (std::abs(xi[j]) < threshold) xi[j] = 0.0;
    }
    SparseCoefficients out = package(theta, y, std::move(xi), ObjectiveKind::L2, threshold);
    diag.zero_model = out.support.empty();
    out.diagnostics = diag;
    return out;
}

ChebyshevFit linf_fit_fixed_support(const Matrix& theta_sub, const Vector& y) {
    const Index n = theta_sub.rows();
    const Index k = theta_sub.cols();
    if (n != y.size()) throw InputError("linf_fit_fixed_support: shape mismatch");
    if (k < 1 || n < k) throw InputError("linf_fit_fixed_support: need n >= k >= 1");
    if (!theta_sub.allFinite() || !y.allFinite()) {
        throw InputError("linf_fit_fixed_support: non-finite input");
    }

    ChebyshevFit fit;
    fit.coefficients = Vector::Zero(k);

    // Drop dependent columns so the LP basis is well defined.
    const Eigen::ColPivHouseholderQR<Matrix> qr(theta_sub);
    const Index rank = qr.rank();
    std::vector<Index> independent;
    for (Index j = 0; j < rank; ++j) independent.push_back(qr.colsPermutation().indices()[j]);
    std::sort(independent.begin(), independent.end());
    fit.rank_deficient = rank < k;
    if (rank == 0) {
        fit.minimax_residual = y.cwiseAbs().maxCoeff();
        return fit;
    }

    const double y_scale = y.cwiseAbs().maxCoeff();
    if (y_scale == 0.0) return fit;

    const auto r = static_cast<Index>(independent.size());
    Matrix scaled(n, r);
    Vector col_scale(r);
    for (Index j = 0; j < r; ++j) {
        scaled.col(j) = theta_sub.col(independent[static_cast<std::size_t>(j)]);
        col_scale[j] = scaled.col(j).cwiseAbs().maxCoeff();
        scaled.col(j) /= col_scale[j];
    }
    const Vector ys = y / y_scale;

    // Dual: max ys^T (u - w)  s.t.  S^T (u - w) = 0,  1^T (u + w) = 1,  u, w >= 0.
    // Its simplex multipliers are the primal (c, t).
    Matrix A(r + 1, 2 * n);
    A.topLeftCorner(r, n) = scaled.transpose();
    A.topRightCorner(r, n) = -scaled.transpose();
    A.row(r).setOnes();
    Vector b = Vector::Zero(r + 1);
    b[r] = 1.0;
    Vector cost(2 * n);
    cost.head(n) = ys;
    cost.tail(n) = -ys;

    const LpResult lp = solve_standard_lp(A, b, cost);
    if (lp.status != LpStatus::Optimal) {
        throw LpError("linf_fit_fixed_support: simplex did not reach optimality");
    }
    fit.lp_iterations = lp.iterations;
    for (Index j = 0; j < r; ++j) {
        fit.coefficients[independent[static_cast<std::size_t>(j)]] =
            lp.duals[j] * y_scale / col_scale[j];
    }
    fit.minimax_residual = (y - theta_sub * fit.coefficients).cwiseAbs().maxCoeff();
    return fit;
}

double default_linf_lambda(const Vector& y) {
    return y.size() == 0 ? 0.0 : 0.02 * y.cwiseAbs().maxCoeff();
}

SparseCoefficients linf_sparse_solve(const Matrix& theta, const Vector& y, double lambda,
                                     const LinfSolveOptions& options) {
    require_problem(theta, y, "linf_sparse_solve");
    if (lambda < 0.0) throw ConfigError("linf_sparse_solve: lambda must be nonnegative");
    const Index m = theta.cols();

    PsoConfig config = options.pso;
    if (config.bounds.empty()) {
        config.bounds.assign(static_cast<std::size_t>(m), {0.0, 1.0});
    } else if (config.bounds.size() != static_cast<std::size_t>(m)) {
        throw ConfigError("linf_sparse_solve: pso bounds must have one entry per column");
    }
    config.validate();

    std::map<std::vector<bool>, double> cache;
    bool rank_deficient = false;
    const auto decode = [&](const Eigen::VectorXd& gates) {
        std::vector<bool> mask(static_cast<std::size_t>(m));
        for (Index j = 0; j < m; ++j) mask[static_cast<std::size_t>(j)] = gates[j] > options.gate;
        return mask;
    };
    const auto to_support = [](const std::vector<bool>& mask) {
        std::vector<std::size_t> support;
        for (std::size_t j = 0; j < mask.size(); ++j) {
            if (mask[j]) support.push_back(j);
        }
        return support;
    };
    const Objective fitness = [&](const Eigen::VectorXd& gates) {
        const std::vector<bool> mask = decode(gates);
        auto it = cache.find(mask);
        if (it == cache.end()) {
            const std::vector<std::size_t> support = to_support(mask);
            double value = lambda * static_cast<double>(support.size());
            if (support.size() > static_cast<std::size_t>(theta.rows())) {
                value = std::numeric_limits<double>::infinity();
            } else {
                const SupportFit fit = fit_support(theta, y, support, ObjectiveKind::Linf);
                rank_deficient = rank_deficient || fit.rank_deficient;
                value += fit.residual_norm;
            }
            it = cache.emplace(mask, value).first;
        }
        return it->second;
    };

    const PsoResult best = pso_minimize(fitness, config);

    std::vector<std::size_t> support = to_support(decode(best.position));
    SupportFit fit = fit_support(theta, y, support, ObjectiveKind::Linf);
    SparseCoefficients out = package(theta, y, fit.xi, ObjectiveKind::Linf, lambda);
    out.diagnostics.solver = "pso-restart";
    out.diagnostics.rank_deficient = rank_deficient || fit.rank_deficient;
    out.diagnostics.iterations = best.diagnostics.iterations;
    out.diagnostics.pso_evaluations = best.diagnostics.evaluations;
    out.diagnostics.inner_fits = cache.size() + 1;
    out.diagnostics.zero_model = out.support.empty();
    return out;
}

std::size_t support_count(std::size_t m, std::size_t max_support) {
    std::size_t total = 0;
    std::size_t binom = 1;  // C(m, s)
    for (std::size_t s = 0; s <= std::min(m, max_support); ++s) {
        if (s > 0) {
            // C(m, s) = C(m, s-1) * (m - s + 1) / s; stop early once over the limit.
            const long double next = static_cast<long double>(binom) * (m - s + 1) / s;
            if (next > static_cast<long double>(kOracleSupportLimit)) return kOracleSupportLimit + 1;
            binom = static_cast<std::size_t>(next + 0.5L);
        }
        total += binom;
        if (total > kOracleSupportLimit) return kOracleSupportLimit + 1;
    }
    return total;
}

SparseCoefficients exhaustive_sparse_oracle(const Matrix& theta, const Vector& y, double lambda,
                                            ObjectiveKind norm, std::size_t max_support) {
    require_problem(theta, y, "exhaustive_sparse_oracle");
    if (lambda < 0.0) throw ConfigError("exhaustive_sparse_oracle: lambda must be nonnegative");
    const auto m = static_cast<std::size_t>(theta.cols());
    max_support = std::min({max_support, m, static_cast<std::size_t>(theta.rows())});
    const std::size_t count = support_count(m, max_support);
    if (count > kOracleSupportLimit) {
        throw SizeError("exhaustive_sparse_oracle: " + std::to_string(m) + " columns with support <= " +
                        std::to_string(max_support) + " exceeds " +
                        std::to_string(kOracleSupportLimit) + " supports");
    }

    SolverDiagnostics diag;
    diag.solver = "exhaustive";
    SupportFit best = fit_support(theta, y, {}, norm);
    double best_value = best.residual_norm;
    ++diag.inner_fits;

    // Sizes ascending, index sets lexicographic: keeping only strict
    // improvements realizes the tie-break order.
    for (std::size_t s = 1; s <= max_support; ++s) {
        std::vector<std::size_t> support(s);
        for (std::size_t i = 0; i < s; ++i) support[i] = i;
        while (true) {
            const SupportFit fit = fit_support(theta, y, support, norm);
            ++diag.inner_fits;
            diag.rank_deficient = diag.rank_deficient || fit.rank_deficient;
            const double value = fit.residual_norm + lambda * static_cast<double>(s);
            if (value < best_value) {
                best_value = value;
                best = fit;
            }
            // Next combination in lexicographic order.
            std::size_t i = s;
            while (i > 0 && support[i - 1] == m - s + (i - 1)) --i;
            if (i == 0) break;
            ++support[i - 1];
            for (std::size_t j = i; j < s; ++j) support[j] = support[j - 1] + 1;
        }
    }

    SparseCoefficients out = package(theta, y, best.xi, norm, lambda);
    diag.zero_model = out.support.empty();
    out.diagnostics = diag;
    return out;
}

} // namespace linfsindy
