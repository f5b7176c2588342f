#pragma once

#include "linfsindy/dynamics.hpp"
#include "linfsindy/pso.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace linfsindy {

enum class ObjectiveKind { L2, Linf };

std::string to_string(ObjectiveKind kind);
ObjectiveKind objective_kind_from_string(const std::string& name);

struct SolverDiagnostics {
    std::string solver;
    bool zero_model = false;      // every coefficient was thresholded away
    bool rank_deficient = false;  // some inner fit hit a rank-deficient support
    std::size_t iterations = 0;
    std::size_t inner_fits = 0;
    std::size_t pso_evaluations = 0;
    double threshold = 0.0;
};

/// Weight vector for one state dimension.
///
/// Invariants: xi[j] != 0 exactly when j is in `support` (sorted ascending),
/// and objective_value = ||y - Theta xi|| + lambda * |support| in the norm
/// named by objective_kind.
struct SparseCoefficients {
    Vector xi;
    std::vector<std::size_t> support;
    double objective_value = 0.0;
    ObjectiveKind objective_kind = ObjectiveKind::L2;
    double lambda = 0.0;
    SolverDiagnostics diagnostics;
};

/// Signed residual r = y - Theta xi.
struct Residual {
    Vector r;

    double norm_l2() const { return r.norm(); }
    double norm_linf() const { return r.size() == 0 ? 0.0 : r.cwiseAbs().maxCoeff(); }
    double norm(ObjectiveKind kind) const {
        return kind == ObjectiveKind::L2 ? norm_l2() : norm_linf();
    }
};

Residual residual(const Matrix& theta, const Vector& xi, const Vector& y);

/// ||y - Theta xi|| + lambda * nnz(xi)
double objective_value(const Matrix& theta, const Vector& xi, const Vector& y,
                       ObjectiveKind kind, double lambda);

struct LeastSquaresFit {
    Vector coefficients;
    bool rank_deficient = false;
    Eigen::Index rank = 0;
};

/// Minimum-norm least squares via complete orthogonal decomposition, with
/// one step of iterative refinement.
LeastSquaresFit least_squares(const Matrix& theta, const Vector& y);

/// Sequentially thresholded least squares. `lambda` in the result records the
/// threshold, and objective_value uses it as the per-term penalty.
SparseCoefficients stlsq(const Matrix& theta, const Vector& y, double threshold = 0.1,
                         std::size_t max_iters = 20);

struct ChebyshevFit {
    Vector coefficients;
    double minimax_residual = 0.0;
    bool rank_deficient = false;
    std::size_t lp_iterations = 0;
};

/// Minimizes max_i |y_i - (Theta c)_i| exactly, by solving the dual of
/// { min t : -t <= y - Theta c <= t } with the revised simplex. Rank-deficient
/// inputs are fitted on a maximal independent column subset (others set to 0).
ChebyshevFit linf_fit_fixed_support(const Matrix& theta_sub, const Vector& y);

struct LinfSolveOptions {
    PsoConfig pso;
    double gate = 0.5;  // a term is active when its gate coordinate exceeds this
};

/// 0.02 * ||y||_inf
double default_linf_lambda(const Vector& y);

/// Minimizes ||y - Theta xi||_inf + lambda * ||xi||_0 with a particle swarm over
/// per-term activation gates in [0, 1]. The fitness of a gate vector is the exact
/// minimax residual of its support (memoized per support) plus lambda times its
/// size, so the swarm only searches the combinatorial part. The best support is
/// returned with its minimax-optimal coefficients.
SparseCoefficients linf_sparse_solve(const Matrix& theta, const Vector& y, double lambda,
                                     const LinfSolveOptions& options);

/// Enumerates every support of size <= max_support and returns the exact optimum
/// of residual-norm + lambda * |support|. Ties go to the smaller support, then the
/// lexicographically smaller index set. Refuses more than 200000 supports.
SparseCoefficients exhaustive_sparse_oracle(const Matrix& theta, const Vector& y, double lambda,
                                            ObjectiveKind norm, std::size_t max_support);

inline constexpr std::size_t kOracleSupportLimit = 200000;

/// Number of supports of size <= max_support among m columns, saturating above the limit.
std::size_t support_count(std::size_t m, std::size_t max_support);

} // namespace linfsindy
