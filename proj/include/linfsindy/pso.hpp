#pragma once

#include "linfsindy/random.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

namespace linfsindy {

struct StallTolerance {
    std::size_t iterations = 100;
    double relative_improvement = 1e-9;
};

/// Global-best PSO settings. Empty `bounds` lets the caller fill them in.
struct PsoConfig {
    std::size_t swarm_size = 50;
    std::size_t max_iters = 1000;
    double inertia = 0.72;
    double cognitive = 1.49;
    double social = 1.49;
    std::vector<std::pair<double, double>> bounds;
    double velocity_clamp = 0.5;  // fraction of bound width
    std::size_t restarts = 3;
    std::uint64_t seed = 0;
    StallTolerance stall;

    /// Throws ConfigError on violated invariants.
    void validate() const;
    std::size_t dimension() const { return bounds.size(); }
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct SwarmState {
    Eigen::MatrixXd positions;   // swarm_size x D
    Eigen::MatrixXd velocities;  // swarm_size x D
    Eigen::MatrixXd personal_best_positions;
    Eigen::VectorXd personal_best_values;
    Eigen::VectorXd global_best_position;
    double global_best_value = 0.0;
    std::size_t iteration = 0;
    Rng rng{0};
};

struct ConvergencePoint {
    std::size_t restart;
    std::size_t iteration;
    double global_best_value;
};

struct PsoDiagnostics {
    std::vector<ConvergencePoint> history;
    std::vector<double> restart_best_values;
    std::size_t evaluations = 0;
    std::size_t iterations = 0;
};

struct PsoResult {
    Eigen::VectorXd position;
    double value = 0.0;
    PsoDiagnostics diagnostics;
};

/// Random positions in the box, random velocities within the clamp, evaluated once.
SwarmState initialize_swarm(const Objective& objective, const PsoConfig& config,
                            std::uint64_t seed);

/// One synchronous update of every particle followed by fitness evaluation
/// and best tracking. Positions leaving the box are reflected back inside.
SwarmState step(const SwarmState& state, const Objective& objective, const PsoConfig& config);

/// `restarts + 1` independent swarms seeded seed, seed+1, ...; best result wins.
/// A swarm ends after max_iters or when the global best improved by less than
/// the stall tolerance over the stall window.
PsoResult pso_minimize(const Objective& objective, const PsoConfig& config);

/// CSV with header `restart,iteration,global_best_value`.
void write_convergence_csv(std::ostream& out, const PsoDiagnostics& diagnostics);

} // namespace linfsindy
