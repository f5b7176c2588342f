#include "linfsindy/dynamics.hpp"

#include "linfsindy/error.hpp"
#include "linfsindy/random.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace linfsindy {

std::string to_string(SystemKind kind) {
    switch (kind) {
    case SystemKind::Lorenz: return "lorenz";
    case SystemKind::Chen: return "chen";
    case SystemKind::Custom: return "custom";
    }
    return "custom";
}

SystemKind system_kind_from_string(const std::string& name) {
    if (name == "lorenz") return SystemKind::Lorenz;
    if (name == "chen") return SystemKind::Chen;
    if (name == "custom") return SystemKind::Custom;
    throw ConfigError("unknown system '" + name + "'");
}

void Trajectory::validate() const {
    if (static_cast<std::size_t>(values.rows()) != times.size()) {
        throw InputError("trajectory has " + std::to_string(times.size()) + " times but " +
                         std::to_string(values.rows()) + " value rows");
    }
    if (!(dt > 0.0)) throw InputError("trajectory dt must be positive");
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double step = times[i] - times[i - 1];
        if (std::abs(step - dt) > 1e-12 * std::max(dt, std::abs(times[i]))) {
            throw InputError("trajectory times are not uniformly spaced at index " +
                             std::to_string(i));
        }
    }
}

std::vector<double> lorenz_default_parameters() { return {10.0, 28.0, 8.0 / 3.0}; }
std::vector<double> chen_default_parameters() { return {35.0, 3.0, 28.0}; }

namespace {

void require_state3(const Vector& state, const char* who) {
    if (state.size() != 3) {
        throw InputError(std::string(who) + ": state must have length 3");
    }
}

void require_params3(const std::vector<double>& params, const char* who) {
    if (params.size() != 3) {
        throw ConfigError(std::string(who) + " requires exactly 3 parameters");
    }
}

} // namespace

Vector lorenz_rhs(const Vector& state, const std::vector<double>& params) {
    require_state3(state, "lorenz_rhs");
    require_params3(params, "lorenz");
    const double x = state[0], y = state[1], z = state[2];
    const double sigma = params[0], rho = params[1], beta = params[2];
    Vector out(3);
    // sigma*(y - x), x*(rho - z) - y, x*y - beta*z
    out[0] = (-sigma) * x + sigma * y;
    out[1] = rho * x + (-1.0) * y + (-1.0) * (x * z);
    out[2] = (-beta) * z + 1.0 * (x * y);
    return out;
}

Vector chen_rhs(const Vector& state, const std::vector<double>& params) {
    require_state3(state, "chen_rhs");
    require_params3(params, "chen");
    const double x = state[0], y = state[1], z = state[2];
    const double a = params[0], b = params[1], c = params[2];
    Vector out(3);
    // a*(y - x), (c - a)*x + c*y - x*z, x*y - b*z
    out[0] = (-a) * x + a * y;
    out[1] = (c - a) * x + c * y + (-1.0) * (x * z);
    out[2] = (-b) * z + 1.0 * (x * y);
    return out;
}

SystemSpec lorenz_system(std::vector<double> params) {
    require_params3(params, "lorenz");
    SystemSpec spec;
    spec.kind = SystemKind::Lorenz;
    spec.dimension = 3;
    spec.parameters = params;
    spec.rhs = [params](const Vector& s) { return lorenz_rhs(s, params); };
    return spec;
}

SystemSpec chen_system(std::vector<double> params) {
    require_params3(params, "chen");
    SystemSpec spec;
    spec.kind = SystemKind::Chen;
    spec.dimension = 3;
    spec.parameters = params;
    spec.rhs = [params](const Vector& s) { return chen_rhs(s, params); };
    return spec;
}

SystemSpec custom_system(std::size_t dimension, std::function<Vector(const Vector&)> rhs) {
    if (dimension == 0) throw ConfigError("custom system dimension must be positive");
    SystemSpec spec;
    spec.kind = SystemKind::Custom;
    spec.dimension = dimension;
    spec.rhs = std::move(rhs);
    return spec;
}

std::size_t sample_count(double dt, double t_end) {
    // The small slack absorbs representation error in ratios like 50/0.01.
    return static_cast<std::size_t>(std::floor(t_end / dt + 1e-9)) + 1;
}

BoundedIntegration integrate_bounded(const SystemSpec& system, const Vector& x0, double dt,
                                     double t_end, double limit, std::size_t substeps) {
    if (!(dt > 0.0)) throw ConfigError("integrate: dt must be positive");
    if (!(t_end >= dt)) throw ConfigError("integrate: t_end must be at least dt");
    if (substeps == 0) throw ConfigError("integrate: substeps must be positive");
    if (static_cast<std::size_t>(x0.size()) != system.dimension) {
        throw InputError("integrate: initial state has length " + std::to_string(x0.size()) +
                         ", system dimension is " + std::to_string(system.dimension));
    }
    if (!x0.allFinite()) throw InputError("integrate: initial state is not finite");

    const std::size_t n = sample_count(dt, t_end);
    const auto d = static_cast<Eigen::Index>(system.dimension);
    BoundedIntegration out;
    Trajectory& traj = out.trajectory;
    traj.dt = dt;
    traj.times.resize(n);
    traj.values = Matrix::Zero(static_cast<Eigen::Index>(n), d);
    for (std::size_t i = 0; i < n; ++i) traj.times[i] = static_cast<double>(i) * dt;

    const double h = dt / static_cast<double>(substeps);
    Vector x = x0;
    traj.values.row(0) = x.transpose();
    for (std::size_t i = 1; i < n; ++i) {
        for (std::size_t s = 0; s < substeps; ++s) {
            const Vector k1 = system(x);
            const Vector k2 = system(x + (0.5 * h) * k1);
            const Vector k3 = system(x + (0.5 * h) * k2);
            const Vector k4 = system(x + h * k3);
            x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        if (!x.allFinite() || x.cwiseAbs().maxCoeff() > limit) {
            out.diverged = true;
            out.diverged_at = i;
            return out;
        }
        traj.values.row(static_cast<Eigen::Index>(i)) = x.transpose();
    }
    return out;
}

Trajectory integrate(const SystemSpec& system, const Vector& x0, double dt, double t_end,
                     std::size_t substeps) {
    BoundedIntegration run = integrate_bounded(system, x0, dt, t_end,
                                               std::numeric_limits<double>::infinity(), substeps);
    if (run.diverged) {
        throw DivergenceError(run.diverged_at, "integrate: non-finite state at step " +
                                                   std::to_string(run.diverged_at));
    }
    return std::move(run.trajectory);
}

Trajectory add_state_noise(const Trajectory& traj, const NoiseSpec& noise) {
    if (noise.sigma < 0.0) throw ConfigError("noise sigma must be nonnegative");
    Trajectory out = traj;
    if (noise.sigma == 0.0) return out;
    Rng rng(noise.seed);
    for (Eigen::Index i = 0; i < out.values.rows(); ++i) {
        for (Eigen::Index k = 0; k < out.values.cols(); ++k) {
            out.values(i, k) += noise.sigma * rng.gaussian();
        }
    }
    return out;
}

} // namespace linfsindy
