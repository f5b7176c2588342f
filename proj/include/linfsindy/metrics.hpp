#pragma once

#include "linfsindy/dictionary.hpp"
#include "linfsindy/dynamics.hpp"
#include "linfsindy/sparse_regression.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace linfsindy {

/// Identified polynomial ODE: column k of `coefficients` holds the weights of
/// equation k over `terms`.
struct PolynomialModel {
    std::vector<TermSpec> terms;
    Matrix coefficients;  // M x d

    std::size_t dimension() const { return static_cast<std::size_t>(coefficients.cols()); }

    /// Sum over nonzero weights, in term order, of weight * monomial.
    Vector evaluate(const Vector& state) const;
    SystemSpec as_system() const;
};

/// Packs per-dimension solver outputs into a model over `terms`.
PolynomialModel make_model(const std::vector<TermSpec>& terms,
                           const std::vector<SparseCoefficients>& per_dimension);

/// Saturation bound for diverging reconstructions.
inline constexpr double kReconstructionClip = 1e6;

struct Reconstruction {
    Trajectory trajectory;
    bool diverged = false;
    std::size_t diverged_at = 0;
};

/// Integrates the identified model with RK4. If the model blows up, the
/// remaining samples are saturated at +-1e6 (sign of the last finite value)
/// and the result is flagged.
Reconstruction reconstruct(const PolynomialModel& model, const Vector& x0, double dt,
                           double t_end);

/// Per dimension sqrt(mean((truth - recon)^2)) over the common prefix.
Vector rmse_per_dim(const Trajectory& truth, const Trajectory& recon);
/// Per dimension population standard deviation of truth - recon over the common prefix.
Vector std_per_dim(const Trajectory& truth, const Trajectory& recon);

struct ErrorIndicators {
    Vector rmse;
    Vector std;
    bool truncated = false;  // lengths differed; the common prefix was used
};

ErrorIndicators compare_trajectories(const Trajectory& truth, const Trajectory& recon);

/// Reconstruction error of one identification run.
struct ResultRecord {
    std::string scenario_id;
    std::size_t replicate = 0;
    ObjectiveKind objective_kind = ObjectiveKind::L2;
    Vector rmse;
    Vector std;
    bool diverged = false;
    bool truncated = false;
    std::string error;  // non-empty when a stage threw; rmse/std are NaN then
    std::uint64_t noise_seed = 0;
    std::uint64_t solver_seed = 0;
    std::vector<std::pair<std::string, std::string>> settings;
    std::vector<SparseCoefficients> coefficients;  // one per equation
    PolynomialModel model;

    bool ok() const { return error.empty(); }
};

} // namespace linfsindy
