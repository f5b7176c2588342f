#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace linfsindy {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpResult {
    LpStatus status = LpStatus::IterationLimit;
    Eigen::VectorXd x;      // primal solution, length = columns of A
    Eigen::VectorXd duals;  // simplex multipliers pi = c_B^T B^{-1}, length = rows of A
    double objective = 0.0;
    std::vector<Eigen::Index> basis;  // basic column indices; >= cols(A) marks an artificial
    std::size_t iterations = 0;
};

struct LpOptions {
    double optimality_tol = 1e-10;
    double pivot_tol = 1e-9;
    std::size_t max_iterations = 100000;
    std::size_t refactor_every = 64;
    // Consecutive degenerate pivots before switching to Bland's rule.
    std::size_t degenerate_switch = 32;
};

/// Two-phase revised simplex for  max c^T x  s.t.  A x = b, x >= 0, with b >= 0.
///
/// Dense basis inverse, Dantzig pricing with a fallback to Bland's rule on
/// degenerate stalls. Intended for problems with few rows and many columns.
LpResult solve_standard_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                           const Eigen::VectorXd& c, const LpOptions& options = {});

} // namespace linfsindy
