#pragma once

#include "linfsindy/dictionary.hpp"
#include "linfsindy/differentiation.hpp"
#include "linfsindy/dynamics.hpp"
#include "linfsindy/harness.hpp"
#include "linfsindy/metrics.hpp"
#include "linfsindy/sparse_regression.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace linfsindy {

using Json = nlohmann::ordered_json;

/// %.17g, enough digits to round-trip any double.
std::string format_double(double value);

/// Header `t,x1,...,xd`, one row per sample.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
/// Header `t,dx1,...,dxd`.
void write_derivative_csv(std::ostream& out, const DerivativeSeries& series);
Trajectory read_trajectory_csv(std::istream& in);

/// Identified equations together with the term list they index into.
struct CoefficientsDocument {
    std::size_t dimension = 0;
    unsigned max_degree = 0;
    std::vector<TermSpec> terms;
    std::vector<std::string> var_names;
    std::vector<SparseCoefficients> equations;
};

Json to_json(const CoefficientsDocument& doc);
CoefficientsDocument coefficients_from_json(const Json& j);

/// "dx/dt = -10 x + 10 y" style listing, one line per equation.
std::string format_equations(const CoefficientsDocument& doc);

Json pso_to_json(const PsoConfig& config);
PsoConfig pso_from_json(const Json& j);

Json to_json(const ScenarioConfig& config);
/// Missing keys take their defaults; unknown keys are rejected.
ScenarioConfig scenario_from_json(const Json& j);

/// One row per record: id, replicate, objective, rmse_k..., std_k..., flags, seeds.
void write_records_csv(std::ostream& out, const std::vector<ResultRecord>& records);

CoefficientsDocument coefficients_document(const ResultRecord& record, unsigned max_degree);

} // namespace linfsindy
