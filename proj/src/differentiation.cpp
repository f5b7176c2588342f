#include "linfsindy/differentiation.hpp"

#include "linfsindy/error.hpp"
#include "linfsindy/random.hpp"

#include <algorithm>
#include <cmath>

namespace linfsindy {

namespace {

DerivativeSeries make_series(const Trajectory& traj, std::size_t first, std::size_t last) {
    DerivativeSeries out;
    out.first_index = first;
    out.last_index = last;
    out.times.assign(traj.times.begin() + static_cast<std::ptrdiff_t>(first),
                     traj.times.begin() + static_cast<std::ptrdiff_t>(last) + 1);
    out.values.resize(static_cast<Eigen::Index>(last - first + 1), traj.values.cols());
    return out;
}

} // namespace

DerivativeSeries measured_derivative(const SystemSpec& system, const Trajectory& traj,
                                     const NoiseSpec& noise) {
    if (traj.size() == 0) throw InsufficientDataError("measured_derivative: empty trajectory");
    if (noise.sigma < 0.0) throw ConfigError("noise sigma must be nonnegative");
    DerivativeSeries out = make_series(traj, 0, traj.size() - 1);
    for (Eigen::Index i = 0; i < traj.values.rows(); ++i) {
        const Vector state = traj.values.row(i).transpose();
        out.values.row(i) = system(state).transpose();
    }
    if (noise.sigma > 0.0) {
        Rng rng(noise.seed);
        for (Eigen::Index i = 0; i < out.values.rows(); ++i) {
            for (Eigen::Index k = 0; k < out.values.cols(); ++k) {
                out.values(i, k) += noise.sigma * rng.gaussian();
            }
        }
    }
    return out;
}

DerivativeSeries central_difference(const Trajectory& traj) {
    const std::size_t n = traj.size();
    if (n < 3) {
        throw InsufficientDataError("central_difference needs at least 3 samples, got " +
                                    std::to_string(n));
    }
    DerivativeSeries out = make_series(traj, 1, n - 2);
    const double inv = 1.0 / (2.0 * traj.dt);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        out.values.row(r - 1) = (traj.values.row(r + 1) - traj.values.row(r - 1)) * inv;
    }
    return out;
}

DerivativeSeries polynomial_derivative(const Trajectory& traj, std::size_t window,
                                       std::size_t degree) {
    const std::size_t n = traj.size();
    if (window % 2 == 0) throw ConfigError("polynomial_derivative: window must be odd");
    if (degree == 0) throw ConfigError("polynomial_derivative: degree must be positive");
    if (degree >= window) {
        throw ConfigError("polynomial_derivative: degree must be smaller than window");
    }
    if (window > n) {
        throw ConfigError("polynomial_derivative: window " + std::to_string(window) +
                          " exceeds trajectory length " + std::to_string(n));
    }

    // On a uniform grid the derivative of the local fit at the center is a fixed
    // linear filter: row 1 of the pseudo-inverse of the local Vandermonde matrix,
    // built in units of dt so that conditioning does not depend on the step.
    const auto half = static_cast<Eigen::Index>(window / 2);
    const auto w = static_cast<Eigen::Index>(window);
    const auto p = static_cast<Eigen::Index>(degree + 1);
    Matrix vander(w, p);
    for (Eigen::Index r = 0; r < w; ++r) {
        const double s = static_cast<double>(r - half);
        double power = 1.0;
        for (Eigen::Index c = 0; c < p; ++c) {
            vander(r, c) = power;
            power *= s;
        }
    }
    const Matrix pinv = vander.completeOrthogonalDecomposition().pseudoInverse();
    const Eigen::RowVectorXd weights = pinv.row(1) / traj.dt;

    const auto first = static_cast<std::size_t>(half);
    const std::size_t last = n - 1 - first;
    DerivativeSeries out = make_series(traj, first, last);
    for (std::size_t i = first; i <= last; ++i) {
        const auto start = static_cast<Eigen::Index>(i) - half;
        out.values.row(static_cast<Eigen::Index>(i - first)) =
            weights * traj.values.middleRows(start, w);
    }
    return out;
}

ApproxErrorStats error_stats(const DerivativeSeries& est, const DerivativeSeries& truth) {
    if (est.values.cols() != truth.values.cols()) {
        throw InputError("error_stats: dimension mismatch");
    }
    const std::size_t first = std::max(est.first_index, truth.first_index);
    const std::size_t last = std::min(est.last_index, truth.last_index);
    if (est.size() == 0 || truth.size() == 0 || first > last) {
        throw InsufficientDataError("error_stats: derivative series do not overlap");
    }
    const auto rows = static_cast<Eigen::Index>(last - first + 1);
    const Matrix e =
        est.values.middleRows(static_cast<Eigen::Index>(first - est.first_index), rows) -
        truth.values.middleRows(static_cast<Eigen::Index>(first - truth.first_index), rows);

    ApproxErrorStats stats;
    stats.max_abs = e.cwiseAbs().colwise().maxCoeff().transpose();
    stats.mean = e.colwise().mean().transpose();
    stats.std.resize(e.cols());
    for (Eigen::Index k = 0; k < e.cols(); ++k) {
        const double var = (e.col(k).array() - stats.mean[k]).square().mean();
        stats.std[k] = std::sqrt(var);
    }
    return stats;
}

Matrix aligned_rows(const Matrix& source, const DerivativeSeries& series) {
    if (series.last_index >= static_cast<std::size_t>(source.rows())) {
        throw InputError("aligned_rows: derivative range exceeds source rows");
    }
    return source.middleRows(static_cast<Eigen::Index>(series.first_index),
                             static_cast<Eigen::Index>(series.size()));
}

} // namespace linfsindy
