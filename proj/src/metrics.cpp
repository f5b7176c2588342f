#include "linfsindy/metrics.hpp"

#include "linfsindy/error.hpp"

#include <algorithm>
#include <cmath>

namespace linfsindy {

using Eigen::Index;

Vector PolynomialModel::evaluate(const Vector& state) const {
    Vector out = Vector::Zero(coefficients.cols());
    for (Index k = 0; k < coefficients.cols(); ++k) {
        bool first = true;
        double acc = 0.0;
        for (std::size_t j = 0; j < terms.size(); ++j) {
            const double w = coefficients(static_cast<Index>(j), k);
            if (w == 0.0) continue;
            const double term = w * evaluate_term(terms[j], state);
            acc = first ? term : acc + term;
            first = false;
        }
        out[k] = acc;
    }
    return out;
}

SystemSpec PolynomialModel::as_system() const {
    return custom_system(dimension(), [model = *this](const Vector& s) { return model.evaluate(s); });
}

PolynomialModel make_model(const std::vector<TermSpec>& terms,
                           const std::vector<SparseCoefficients>& per_dimension) {
    PolynomialModel model;
    model.terms = terms;
    model.coefficients = Matrix::Zero(static_cast<Index>(terms.size()),
                                      static_cast<Index>(per_dimension.size()));
    for (std::size_t k = 0; k < per_dimension.size(); ++k) {
        if (static_cast<std::size_t>(per_dimension[k].xi.size()) != terms.size()) {
            throw InputError("make_model: coefficient vector " + std::to_string(k) +
                             " does not match the term list");
        }
        model.coefficients.col(static_cast<Index>(k)) = per_dimension[k].xi;
    }
    return model;
}

Reconstruction reconstruct(const PolynomialModel& model, const Vector& x0, double dt,
                           double t_end) {
    if (model.terms.empty() || model.terms.front().exponents.size() != model.dimension()) {
        throw InputError("reconstruct: model terms do not match its dimension");
    }
    BoundedIntegration run =
        integrate_bounded(model.as_system(), x0, dt, t_end, kReconstructionClip);
    Reconstruction out;
    out.diverged = run.diverged;
    out.diverged_at = run.diverged_at;
    out.trajectory = std::move(run.trajectory);
    if (run.diverged) {
        Matrix& v = out.trajectory.values;
        const auto last = static_cast<Index>(run.diverged_at) - 1;
        for (Index i = last + 1; i < v.rows(); ++i) {
            for (Index k = 0; k < v.cols(); ++k) {
                v(i, k) = v(last, k) < 0.0 ? -kReconstructionClip : kReconstructionClip;
            }
        }
    }
    return out;
}

namespace {

Matrix error_signal(const Trajectory& truth, const Trajectory& recon, bool& truncated) {
    if (truth.dimension() != recon.dimension()) {
        throw InputError("trajectory comparison: dimension mismatch");
    }
    if (std::abs(truth.dt - recon.dt) > 1e-12 * std::max(truth.dt, recon.dt)) {
        throw InputError("trajectory comparison: time steps differ");
    }
    const auto rows = std::min(truth.values.rows(), recon.values.rows());
    if (rows == 0) throw InsufficientDataError("trajectory comparison: empty overlap");
    truncated = truth.values.rows() != recon.values.rows();
    return truth.values.topRows(rows) - recon.values.topRows(rows);
}

} // namespace

ErrorIndicators compare_trajectories(const Trajectory& truth, const Trajectory& recon) {
    ErrorIndicators out;
    const Matrix e = error_signal(truth, recon, out.truncated);
    out.rmse = e.array().square().colwise().mean().sqrt().transpose();
    const Eigen::RowVectorXd mean = e.colwise().mean();
    out.std = (e.rowwise() - mean).array().square().colwise().mean().sqrt().transpose();
    return out;
}

Vector rmse_per_dim(const Trajectory& truth, const Trajectory& recon) {
    return compare_trajectories(truth, recon).rmse;
}

Vector std_per_dim(const Trajectory& truth, const Trajectory& recon) {
    return compare_trajectories(truth, recon).std;
}

} // namespace linfsindy
