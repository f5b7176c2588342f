#include "linfsindy/pso.hpp"

#include "linfsindy/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <ostream>

namespace linfsindy {

using Eigen::Index;

void PsoConfig::validate() const {
    if (swarm_size < 2) throw ConfigError("pso: swarm_size must be at least 2");
    if (max_iters == 0) throw ConfigError("pso: max_iters must be positive");
    if (!(inertia >= 0.0 && inertia <= 1.2)) throw ConfigError("pso: inertia must lie in [0, 1.2]");
    if (cognitive < 0.0 || social < 0.0) {
        throw ConfigError("pso: cognitive and social weights must be nonnegative");
    }
    if (!(velocity_clamp > 0.0)) throw ConfigError("pso: velocity_clamp must be positive");
    if (bounds.empty()) throw ConfigError("pso: bounds must be set");
    for (const auto& [lo, hi] : bounds) {
        if (!(lo < hi)) throw ConfigError("pso: every bound needs lo < hi");
    }
}

namespace {

double evaluate(const Objective& objective, const Eigen::VectorXd& x, std::size_t particle,
                std::size_t iteration) {
    const double value = objective(x);
    if (!std::isfinite(value)) {
        throw FitnessError(particle, iteration,
                           "pso: non-finite objective value for particle " +
                               std::to_string(particle) + " at iteration " +
                               std::to_string(iteration));
    }
    return value;
}

void refresh_global_best(SwarmState& s) {
    Index best = 0;
    for (Index p = 1; p < s.personal_best_values.size(); ++p) {
        if (s.personal_best_values[p] < s.personal_best_values[best]) best = p;
    }
    if (s.personal_best_values[best] < s.global_best_value) {
        s.global_best_value = s.personal_best_values[best];
        s.global_best_position = s.personal_best_positions.row(best).transpose();
    }
}

} // namespace

SwarmState initialize_swarm(const Objective& objective, const PsoConfig& config,
                            std::uint64_t seed) {
    config.validate();
    const auto n = static_cast<Index>(config.swarm_size);
    const auto d = static_cast<Index>(config.dimension());
    SwarmState s;
    s.rng = Rng(seed);
    s.positions.resize(n, d);
    s.velocities.resize(n, d);
    for (Index p = 0; p < n; ++p) {
        for (Index k = 0; k < d; ++k) {
            const auto [lo, hi] = config.bounds[static_cast<std::size_t>(k)];
            const double vmax = config.velocity_clamp * (hi - lo);
            s.positions(p, k) = s.rng.uniform(lo, hi);
            s.velocities(p, k) = s.rng.uniform(-vmax, vmax);
        }
    }
    s.personal_best_positions = s.positions;
    s.personal_best_values.resize(n);
    for (Index p = 0; p < n; ++p) {
        s.personal_best_values[p] =
            evaluate(objective, s.positions.row(p).transpose(), static_cast<std::size_t>(p), 0);
    }
    s.global_best_value = std::numeric_limits<double>::infinity();
    refresh_global_best(s);
    return s;
}

SwarmState step(const SwarmState& state, const Objective& objective, const PsoConfig& config) {
    SwarmState s = state;
    const Index n = s.positions.rows();
    const Index d = s.positions.cols();

    // All random draws happen here, before any fitness call.
    for (Index p = 0; p < n; ++p) {
        for (Index k = 0; k < d; ++k) {
            const auto [lo, hi] = config.bounds[static_cast<std::size_t>(k)];
            const double width = hi - lo;
            const double vmax = config.velocity_clamp * width;
            const double r1 = s.rng.uniform();
            const double r2 = s.rng.uniform();
            const double x = s.positions(p, k);
            double v = config.inertia * s.velocities(p, k) +
                       config.cognitive * r1 * (s.personal_best_positions(p, k) - x) +
                       config.social * r2 * (s.global_best_position[k] - x);
            v = std::clamp(v, -vmax, vmax);
            double next = x + v;
            if (next > hi) {
                next = hi - (next - hi);
                v = -v;
            } else if (next < lo) {
                next = lo + (lo - next);
                v = -v;
            }
            s.positions(p, k) = std::clamp(next, lo, hi);
            s.velocities(p, k) = v;
        }
    }

    ++s.iteration;
    for (Index p = 0; p < n; ++p) {
        const double value =
            evaluate(objective, s.positions.row(p).transpose(), static_cast<std::size_t>(p), s.iteration);
        if (value < s.personal_best_values[p]) {
            s.personal_best_values[p] = value;
            s.personal_best_positions.row(p) = s.positions.row(p);
        }
    }
    refresh_global_best(s);
    return s;
}

PsoResult pso_minimize(const Objective& objective, const PsoConfig& config) {
    config.validate();
    PsoResult result;
    result.value = std::numeric_limits<double>::infinity();
    auto& diag = result.diagnostics;

    for (std::size_t r = 0; r <= config.restarts; ++r) {
        SwarmState s = initialize_swarm(objective, config, config.seed + r);
        diag.evaluations += config.swarm_size;
        diag.history.push_back({r, 0, s.global_best_value});

        double window_start_value = s.global_best_value;
        std::size_t window_start_iter = 0;
        while (s.iteration < config.max_iters) {
            s = step(s, objective, config);
            diag.evaluations += config.swarm_size;
            ++diag.iterations;
            diag.history.push_back({r, s.iteration, s.global_best_value});

            if (s.iteration - window_start_iter >= config.stall.iterations) {
                const double gain = window_start_value - s.global_best_value;
                const double scale = std::max(std::abs(window_start_value), 1e-300);
                if (gain <= config.stall.relative_improvement * scale) break;
                window_start_value = s.global_best_value;
                window_start_iter = s.iteration;
            }
        }
        diag.restart_best_values.push_back(s.global_best_value);
        if (s.global_best_value < result.value) {
            result.value = s.global_best_value;
            result.position = s.global_best_position;
        }
    }
    return result;
}

void write_convergence_csv(std::ostream& out, const PsoDiagnostics& diagnostics) {
    out << "restart,iteration,global_best_value\n";
    char buf[64];
    for (const auto& point : diagnostics.history) {
        std::snprintf(buf, sizeof buf, "%.17g", point.global_best_value);
        out << point.restart << ',' << point.iteration << ',' << buf << '\n';
    }
}

} // namespace linfsindy
