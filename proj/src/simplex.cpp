#include "linfsindy/simplex.hpp"

#include "linfsindy/error.hpp"

#include <cmath>
#include <limits>

namespace linfsindy {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

class RevisedSimplex {
public:
    RevisedSimplex(const MatrixXd& A, const VectorXd& b, const LpOptions& options)
        : A_(A), b_(b), opt_(options), m_(A.rows()), n_(A.cols()) {
        basis_.resize(static_cast<std::size_t>(m_));
        for (Index i = 0; i < m_; ++i) basis_[static_cast<std::size_t>(i)] = n_ + i;
        is_basic_.assign(static_cast<std::size_t>(n_ + m_), false);
        for (Index i = 0; i < m_; ++i) is_basic_[static_cast<std::size_t>(n_ + i)] = true;
        binv_ = MatrixXd::Identity(m_, m_);
        xb_ = b_;
    }

    // Runs one phase with the given cost over all n+m columns; artificials may
    // enter only when allow_artificial is set.
    LpStatus run(const VectorXd& cost, bool allow_artificial) {
        std::size_t degenerate_streak = 0;
        std::size_t since_refactor = 0;
        while (iterations_ < opt_.max_iterations) {
            const VectorXd cb = basic_costs(cost);
            const VectorXd pi = binv_.transpose() * cb;
            const VectorXd reduced = cost.head(n_) - A_.transpose() * pi;

            const bool bland = degenerate_streak >= opt_.degenerate_switch;
            Index entering = -1;
            double best = opt_.optimality_tol;
            const Index limit = allow_artificial ? n_ + m_ : n_;
            for (Index j = 0; j < limit; ++j) {
                if (is_basic_[static_cast<std::size_t>(j)]) continue;
                const double d = j < n_ ? reduced[j] : cost[j] - pi[j - n_];
                if (d > best) {
                    entering = j;
                    if (bland) break;
                    best = d;
                }
            }
            if (entering < 0) return LpStatus::Optimal;

            const VectorXd alpha = binv_ * column(entering);
            Index leaving = -1;
            double ratio = std::numeric_limits<double>::infinity();
            for (Index i = 0; i < m_; ++i) {
                if (alpha[i] <= opt_.pivot_tol) continue;
                const double r = std::max(xb_[i], 0.0) / alpha[i];
                const bool better = r < ratio - 1e-14;
                const bool tie = !better && r <= ratio + 1e-14 && leaving >= 0;
                if (better) {
                    ratio = r;
                    leaving = i;
                } else if (tie) {
                    if (bland ? basis_[static_cast<std::size_t>(i)] <
                                    basis_[static_cast<std::size_t>(leaving)]
                              : alpha[i] > alpha[leaving]) {
                        leaving = i;
                    }
                }
            }
            if (leaving < 0) return LpStatus::Unbounded;

            degenerate_streak = ratio <= 1e-14 ? degenerate_streak + 1 : 0;
            pivot(entering, leaving, alpha);
            ++iterations_;
            if (++since_refactor >= opt_.refactor_every) {
                refactor();
                since_refactor = 0;
            }
        }
        return LpStatus::IterationLimit;
    }

    // Pivots zero-level artificials out of the basis where a structural column
    // can replace them. Rows that cannot be cleared are linearly dependent.
    void expel_artificials() {
        for (Index i = 0; i < m_; ++i) {
            if (basis_[static_cast<std::size_t>(i)] < n_) continue;
            const Eigen::RowVectorXd row = binv_.row(i) * A_;
            Index best = -1;
            double best_abs = opt_.pivot_tol;
            for (Index j = 0; j < n_; ++j) {
                if (is_basic_[static_cast<std::size_t>(j)]) continue;
                if (std::abs(row[j]) > best_abs) {
                    best_abs = std::abs(row[j]);
                    best = j;
                }
            }
            if (best >= 0) pivot(best, i, binv_ * column(best));
        }
        refactor();
    }

    void refactor() {
        MatrixXd basis_matrix(m_, m_);
        for (Index i = 0; i < m_; ++i) basis_matrix.col(i) = column(basis_[static_cast<std::size_t>(i)]);
        binv_ = basis_matrix.partialPivLu().inverse();
        xb_ = binv_ * b_;
    }

    double artificial_mass() const {
        double total = 0.0;
        for (Index i = 0; i < m_; ++i) {
            if (basis_[static_cast<std::size_t>(i)] >= n_) total += std::max(xb_[i], 0.0);
        }
        return total;
    }

    LpResult finish(LpStatus status, const VectorXd& cost) {
        refactor();
        LpResult result;
        result.status = status;
        result.iterations = iterations_;
        result.basis.assign(basis_.begin(), basis_.end());
        result.x = VectorXd::Zero(n_);
        for (Index i = 0; i < m_; ++i) {
            const Index j = basis_[static_cast<std::size_t>(i)];
            if (j < n_) result.x[j] = std::max(xb_[i], 0.0);
        }
        // Duals from a fresh solve of B^T pi = c_B.
        MatrixXd basis_matrix(m_, m_);
        for (Index i = 0; i < m_; ++i) basis_matrix.col(i) = column(basis_[static_cast<std::size_t>(i)]);
        result.duals = basis_matrix.transpose().fullPivLu().solve(basic_costs(cost));
        result.objective = cost.head(n_).dot(result.x);
        return result;
    }

private:
    VectorXd column(Index j) const {
        if (j < n_) return A_.col(j);
        return VectorXd::Unit(m_, j - n_);
    }

    VectorXd basic_costs(const VectorXd& cost) const {
        VectorXd cb(m_);
        for (Index i = 0; i < m_; ++i) cb[i] = cost[basis_[static_cast<std::size_t>(i)]];
        return cb;
    }

    void pivot(Index entering, Index leaving, const VectorXd& alpha) {
        const double p = alpha[leaving];
        const double step = xb_[leaving] / p;
        xb_ -= step * alpha;
        xb_[leaving] = step;
        const Eigen::RowVectorXd pivot_row = binv_.row(leaving) / p;
        binv_ -= alpha * pivot_row;
        binv_.row(leaving) = pivot_row;
        is_basic_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(leaving)])] = false;
        is_basic_[static_cast<std::size_t>(entering)] = true;
        basis_[static_cast<std::size_t>(leaving)] = entering;
    }

    const MatrixXd& A_;
    const VectorXd& b_;
    LpOptions opt_;
    Index m_;
    Index n_;
    std::vector<Index> basis_;
    std::vector<bool> is_basic_;
    MatrixXd binv_;
    VectorXd xb_;
    std::size_t iterations_ = 0;
};

} // namespace

LpResult solve_standard_lp(const MatrixXd& A, const VectorXd& b, const VectorXd& c,
                           const LpOptions& options) {
    if (b.size() != A.rows() || c.size() != A.cols()) {
        throw InputError("solve_standard_lp: shape mismatch");
    }
    if ((b.array() < 0.0).any()) throw InputError("solve_standard_lp: b must be nonnegative");
    if (!A.allFinite() || !b.allFinite() || !c.allFinite()) {
        throw InputError("solve_standard_lp: non-finite data");
    }

    const Index m = A.rows();
    const Index n = A.cols();
    RevisedSimplex simplex(A, b, options);

    VectorXd phase1 = VectorXd::Zero(n + m);
    phase1.tail(m).setConstant(-1.0);
    const LpStatus s1 = simplex.run(phase1, true);
    if (s1 == LpStatus::IterationLimit) return simplex.finish(s1, phase1);
    simplex.refactor();
    const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
    if (simplex.artificial_mass() > 1e-9 * scale) {
        return simplex.finish(LpStatus::Infeasible, phase1);
    }
    simplex.expel_artificials();

    VectorXd phase2 = VectorXd::Zero(n + m);
    phase2.head(n) = c;
    const LpStatus s2 = simplex.run(phase2, false);
    return simplex.finish(s2, phase2);
}

} // namespace linfsindy
