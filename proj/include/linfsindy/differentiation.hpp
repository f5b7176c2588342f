#pragma once

#include "linfsindy/dynamics.hpp"

#include <cstddef>
#include <vector>

namespace linfsindy {

/// Derivative estimates on a contiguous index range of a source trajectory.
struct DerivativeSeries {
    std::vector<double> times;
    Matrix values;
    std::size_t first_index = 0;
    std::size_t last_index = 0;

    std::size_t size() const { return times.size(); }
};

/// Componentwise statistics of e = estimate - truth.
struct ApproxErrorStats {
    Vector max_abs;
    Vector mean;
    Vector std;
};

/// True right-hand side at every sample plus N(0, sigma^2) per entry.
DerivativeSeries measured_derivative(const SystemSpec& system, const Trajectory& traj,
                                     const NoiseSpec& noise);

/// Second-order central difference; drops the first and last sample.
DerivativeSeries central_difference(const Trajectory& traj);

/// Local least-squares polynomial (Savitzky-Golay) derivative at each window center.
DerivativeSeries polynomial_derivative(const Trajectory& traj, std::size_t window = 7,
                                       std::size_t degree = 3);

/// Statistics over the index range shared by both series.
ApproxErrorStats error_stats(const DerivativeSeries& est, const DerivativeSeries& truth);

/// Rows [series.first_index, series.last_index] of a matrix aligned with the source trajectory.
Matrix aligned_rows(const Matrix& source, const DerivativeSeries& series);

} // namespace linfsindy
