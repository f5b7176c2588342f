#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace linfsindy {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class SystemKind { Lorenz, Chen, Custom };

std::string to_string(SystemKind kind);
SystemKind system_kind_from_string(const std::string& name);

/// An autonomous ODE system dx/dt = f(x).
struct SystemSpec {
    SystemKind kind = SystemKind::Custom;
    std::size_t dimension = 0;
    std::vector<double> parameters;
    std::function<Vector(const Vector&)> rhs;

    Vector operator()(const Vector& state) const { return rhs(state); }
};

/// Uniformly sampled multivariate time series: one row per sample.
struct Trajectory {
    std::vector<double> times;
    Matrix values;
    double dt = 0.0;

    std::size_t size() const { return times.size(); }
    std::size_t dimension() const { return static_cast<std::size_t>(values.cols()); }

    /// Throws InputError when times and values disagree or spacing is not uniform.
    void validate() const;
};

/// Additive iid Gaussian noise channel.
struct NoiseSpec {
    double sigma = 0.0;
    std::uint64_t seed = 0;
};

/// (sigma, rho, beta) = (10, 28, 8/3).
std::vector<double> lorenz_default_parameters();
/// (a, b, c) = (35, 3, 28).
std::vector<double> chen_default_parameters();

// The right-hand sides are written term by term in monomial form
// (coefficient times monomial, summed in dictionary column order). A
// polynomial model carrying the same coefficients therefore evaluates to
// the same doubles, bit for bit.
Vector lorenz_rhs(const Vector& state, const std::vector<double>& params);
Vector chen_rhs(const Vector& state, const std::vector<double>& params);

SystemSpec lorenz_system(std::vector<double> params = lorenz_default_parameters());
SystemSpec chen_system(std::vector<double> params = chen_default_parameters());
SystemSpec custom_system(std::size_t dimension, std::function<Vector(const Vector&)> rhs);

/// Number of samples on [0, t_end] at spacing dt: floor(t_end/dt) + 1.
std::size_t sample_count(double dt, double t_end);

/// Classical fixed-step RK4. `substeps` > 1 refines each sampling interval
/// internally while still recording one sample per dt.
Trajectory integrate(const SystemSpec& system, const Vector& x0, double dt, double t_end,
                     std::size_t substeps = 1);

/// Result of an integration that may stop early.
struct BoundedIntegration {
    Trajectory trajectory;            // rows past `diverged_at` are left unfilled (zero)
    bool diverged = false;
    std::size_t diverged_at = 0;      // first step whose state was non-finite or beyond the limit
};

/// Same stepping as `integrate`, but stops instead of throwing once a state is
/// non-finite or has a component with magnitude above `limit`.
BoundedIntegration integrate_bounded(const SystemSpec& system, const Vector& x0, double dt,
                                     double t_end, double limit, std::size_t substeps = 1);

/// Adds N(0, sigma^2) to every entry, drawn in row-major order from Rng(noise.seed).
Trajectory add_state_noise(const Trajectory& traj, const NoiseSpec& noise);

} // namespace linfsindy
