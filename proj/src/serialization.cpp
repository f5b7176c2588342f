#include "linfsindy/serialization.hpp"

#include "linfsindy/error.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace linfsindy {

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

namespace {

void write_rows(std::ostream& out, const std::vector<double>& times, const Matrix& values,
                const std::string& prefix) {
    out << 't';
    for (Eigen::Index k = 0; k < values.cols(); ++k) out << ',' << prefix << (k + 1);
    out << '\n';
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        out << format_double(times[static_cast<std::size_t>(i)]);
        for (Eigen::Index k = 0; k < values.cols(); ++k) out << ',' << format_double(values(i, k));
        out << '\n';
    }
}

Json vector_to_json(const Vector& v) {
    Json arr = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Vector vector_from_json(const Json& j, const char* key) {
    if (!j.is_array()) throw ConfigError(std::string(key) + " must be an array of numbers");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    return v;
}

void reject_unknown(const Json& j, const std::set<std::string>& allowed, const char* where) {
    if (!j.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
    for (const auto& item : j.items()) {
        if (!allowed.count(item.key())) {
            throw ConfigError(std::string(where) + ": unknown key '" + item.key() + "'");
        }
    }
}

template <typename T>
void read_if(const Json& j, const char* key, T& target) {
    if (j.contains(key) && !j[key].is_null()) target = j[key].get<T>();
}

} // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    write_rows(out, traj.times, traj.values, "x");
}

void write_derivative_csv(std::ostream& out, const DerivativeSeries& series) {
    write_rows(out, series.times, series.values, "dx");
}

Trajectory read_trajectory_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw InputError("trajectory csv: missing header");
    const auto columns = static_cast<Eigen::Index>(std::count(line.begin(), line.end(), ','));
    if (columns < 1) throw InputError("trajectory csv: header needs at least one state column");
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (static_cast<Eigen::Index>(row.size()) != columns + 1) {
            throw InputError("trajectory csv: row " + std::to_string(rows.size() + 1) +
                             " has the wrong number of fields");
        }
        rows.push_back(std::move(row));
    }
    Trajectory traj;
    traj.values.resize(static_cast<Eigen::Index>(rows.size()), columns);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        traj.times.push_back(rows[i][0]);
        for (Eigen::Index k = 0; k < columns; ++k) {
            traj.values(static_cast<Eigen::Index>(i), k) = rows[i][static_cast<std::size_t>(k) + 1];
        }
    }
    traj.dt = traj.times.size() > 1 ? traj.times[1] - traj.times[0] : 0.0;
    return traj;
}

Json to_json(const CoefficientsDocument& doc) {
    Json j;
    j["dimension"] = doc.dimension;
    j["max_degree"] = doc.max_degree;
    j["variables"] = doc.var_names;
    Json terms = Json::array();
    for (const auto& t : doc.terms) terms.push_back(t.exponents);
    j["terms"] = terms;
    Json eqs = Json::array();
    for (std::size_t k = 0; k < doc.equations.size(); ++k) {
        const SparseCoefficients& c = doc.equations[k];
        Json e;
        e["equation"] = k;
        e["objective_kind"] = to_string(c.objective_kind);
        e["lambda"] = c.lambda;
        e["objective_value"] = c.objective_value;
        Json coeffs = Json::array();
        for (std::size_t idx : c.support) {
            Json entry;
            entry["index"] = idx;
            entry["term"] = term_label(doc.terms[idx], doc.var_names);
            entry["coefficient"] = c.xi[static_cast<Eigen::Index>(idx)];
            coeffs.push_back(entry);
        }
        e["coefficients"] = coeffs;
        const SolverDiagnostics& d = c.diagnostics;
        e["diagnostics"] = {{"solver", d.solver},           {"zero_model", d.zero_model},
                            {"rank_deficient", d.rank_deficient}, {"iterations", d.iterations},
                            {"inner_fits", d.inner_fits},   {"pso_evaluations", d.pso_evaluations},
                            {"threshold", d.threshold}};
        eqs.push_back(e);
    }
    j["equations"] = eqs;
    return j;
}

CoefficientsDocument coefficients_from_json(const Json& j) {
    CoefficientsDocument doc;
    try {
        doc.dimension = j.at("dimension").get<std::size_t>();
        doc.max_degree = j.at("max_degree").get<unsigned>();
        doc.var_names = j.at("variables").get<std::vector<std::string>>();
        for (const auto& t : j.at("terms")) doc.terms.push_back(TermSpec{t.get<std::vector<unsigned>>()});
        for (const auto& e : j.at("equations")) {
            SparseCoefficients c;
            c.objective_kind = objective_kind_from_string(e.at("objective_kind").get<std::string>());
            c.lambda = e.at("lambda").get<double>();
            c.objective_value = e.at("objective_value").get<double>();
            c.xi = Vector::Zero(static_cast<Eigen::Index>(doc.terms.size()));
            for (const auto& entry : e.at("coefficients")) {
                const auto idx = entry.at("index").get<std::size_t>();
                if (idx >= doc.terms.size()) throw InputError("coefficients: term index out of range");
                c.support.push_back(idx);
                c.xi[static_cast<Eigen::Index>(idx)] = entry.at("coefficient").get<double>();
            }
            if (e.contains("diagnostics")) {
                const Json& d = e["diagnostics"];
                read_if(d, "solver", c.diagnostics.solver);
                read_if(d, "zero_model", c.diagnostics.zero_model);
                read_if(d, "rank_deficient", c.diagnostics.rank_deficient);
                read_if(d, "iterations", c.diagnostics.iterations);
                read_if(d, "inner_fits", c.diagnostics.inner_fits);
                read_if(d, "pso_evaluations", c.diagnostics.pso_evaluations);
                read_if(d, "threshold", c.diagnostics.threshold);
            }
            doc.equations.push_back(std::move(c));
        }
    } catch (const nlohmann::json::exception& ex) {
        throw InputError(std::string("coefficients json: ") + ex.what());
    }
    return doc;
}

std::string format_equations(const CoefficientsDocument& doc) {
    std::ostringstream out;
    for (std::size_t k = 0; k < doc.equations.size(); ++k) {
        const SparseCoefficients& c = doc.equations[k];
        const std::string name = k < doc.var_names.size() ? doc.var_names[k] : "x" + std::to_string(k + 1);
        out << 'd' << name << "/dt =";
        if (c.support.empty()) out << " 0";
        bool first = true;
        for (std::size_t idx : c.support) {
            const double w = c.xi[static_cast<Eigen::Index>(idx)];
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.6g", std::abs(w));
            if (first) {
                out << (w < 0 ? " -" : " ") << buf;
            } else {
                out << (w < 0 ? " - " : " + ") << buf;
            }
            const std::string label = term_label(doc.terms[idx], doc.var_names);
            if (label != "1") out << ' ' << label;
            first = false;
        }
        out << "    [" << to_string(c.objective_kind) << ", objective " << format_double(c.objective_value)
            << "]\n";
    }
    return out.str();
}

Json pso_to_json(const PsoConfig& config) {
    Json j;
    j["swarm_size"] = config.swarm_size;
    j["max_iters"] = config.max_iters;
    j["inertia"] = config.inertia;
    j["cognitive"] = config.cognitive;
    j["social"] = config.social;
    j["velocity_clamp"] = config.velocity_clamp;
    j["restarts"] = config.restarts;
    j["stall_iterations"] = config.stall.iterations;
    j["stall_relative_improvement"] = config.stall.relative_improvement;
    return j;
}

PsoConfig pso_from_json(const Json& j) {
    reject_unknown(j,
                   {"swarm_size", "max_iters", "inertia", "cognitive", "social", "velocity_clamp",
                    "restarts", "stall_iterations", "stall_relative_improvement"},
                   "pso");
    PsoConfig c;
    read_if(j, "swarm_size", c.swarm_size);
    read_if(j, "max_iters", c.max_iters);
    read_if(j, "inertia", c.inertia);
    read_if(j, "cognitive", c.cognitive);
    read_if(j, "social", c.social);
    read_if(j, "velocity_clamp", c.velocity_clamp);
    read_if(j, "restarts", c.restarts);
    read_if(j, "stall_iterations", c.stall.iterations);
    read_if(j, "stall_relative_improvement", c.stall.relative_improvement);
    return c;
}

Json to_json(const ScenarioConfig& config) {
    Json j;
    j["id"] = config.id;
    j["system"] = to_string(config.system);
    j["parameters"] = config.parameters;
    j["ident_x0"] = vector_to_json(config.ident_x0);
    j["recon_x0"] = vector_to_json(config.recon_x0);
    j["dt"] = config.dt;
    j["t_end"] = config.t_end;
    if (config.recon_t_end) j["recon_t_end"] = *config.recon_t_end;
    j["substeps"] = config.substeps;
    j["derivative"] = {{"kind", to_string(config.derivative.kind)},
                       {"sigma", config.derivative.sigma},
                       {"window", config.derivative.window},
                       {"degree", config.derivative.degree}};
    j["state_noise_sigma"] = config.state_noise_sigma;
    Json obj;
    obj["kind"] = to_string(config.objective.kind);
    obj["threshold"] = config.objective.threshold;
    obj["stlsq_max_iters"] = config.objective.stlsq_max_iters;
    if (config.objective.lambda) obj["lambda"] = *config.objective.lambda;
    obj["lambda_scale"] = config.objective.lambda_scale;
    obj["pso"] = pso_to_json(config.objective.pso);
    j["objective"] = obj;
    j["dictionary_degree"] = config.dictionary_degree;
    j["noise_seed"] = config.noise_seed;
    j["solver_seed"] = config.solver_seed;
    j["replicates"] = config.replicates;
    return j;
}

ScenarioConfig scenario_from_json(const Json& j) {
    reject_unknown(j,
                   {"id", "system", "parameters", "ident_x0", "recon_x0", "dt", "t_end",
                    "recon_t_end", "substeps", "derivative", "state_noise_sigma", "objective",
                    "dictionary_degree", "noise_seed", "solver_seed", "replicates"},
                   "scenario");
    ScenarioConfig c;
    try {
        read_if(j, "id", c.id);
        if (j.contains("system")) {
            c.system = system_kind_from_string(j["system"].get<std::string>());
            c.parameters = c.system == SystemKind::Chen ? chen_default_parameters()
                                                        : lorenz_default_parameters();
        }
        read_if(j, "parameters", c.parameters);
        if (j.contains("ident_x0")) c.ident_x0 = vector_from_json(j["ident_x0"], "ident_x0");
        if (j.contains("recon_x0")) c.recon_x0 = vector_from_json(j["recon_x0"], "recon_x0");
        read_if(j, "dt", c.dt);
        read_if(j, "t_end", c.t_end);
        if (j.contains("recon_t_end") && !j["recon_t_end"].is_null()) {
            c.recon_t_end = j["recon_t_end"].get<double>();
        }
        read_if(j, "substeps", c.substeps);
        if (j.contains("derivative")) {
            const Json& d = j["derivative"];
            reject_unknown(d, {"kind", "sigma", "window", "degree"}, "derivative");
            if (d.contains("kind")) c.derivative.kind = derivative_kind_from_string(d["kind"].get<std::string>());
            read_if(d, "sigma", c.derivative.sigma);
            read_if(d, "window", c.derivative.window);
            read_if(d, "degree", c.derivative.degree);
        }
        read_if(j, "state_noise_sigma", c.state_noise_sigma);
        if (j.contains("objective")) {
            const Json& o = j["objective"];
            reject_unknown(o, {"kind", "threshold", "stlsq_max_iters", "lambda", "lambda_scale", "pso"},
                           "objective");
            if (o.contains("kind")) c.objective.kind = objective_kind_from_string(o["kind"].get<std::string>());
            read_if(o, "threshold", c.objective.threshold);
            read_if(o, "stlsq_max_iters", c.objective.stlsq_max_iters);
            if (o.contains("lambda") && !o["lambda"].is_null()) c.objective.lambda = o["lambda"].get<double>();
            read_if(o, "lambda_scale", c.objective.lambda_scale);
            if (o.contains("pso")) c.objective.pso = pso_from_json(o["pso"]);
        }
        read_if(j, "dictionary_degree", c.dictionary_degree);
        read_if(j, "noise_seed", c.noise_seed);
        read_if(j, "solver_seed", c.solver_seed);
        read_if(j, "replicates", c.replicates);
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError(std::string("scenario json: ") + ex.what());
    }
    c.validate();
    return c;
}

void write_records_csv(std::ostream& out, const std::vector<ResultRecord>& records) {
    std::size_t d = 0;
    for (const auto& r : records) d = std::max<std::size_t>(d, static_cast<std::size_t>(r.rmse.size()));
    out << "scenario_id,replicate,objective";
    for (std::size_t k = 1; k <= d; ++k) out << ",rmse_" << k;
    for (std::size_t k = 1; k <= d; ++k) out << ",std_" << k;
    out << ",diverged,truncated,noise_seed,solver_seed,error\n";
    for (const auto& r : records) {
        out << r.scenario_id << ',' << r.replicate << ',' << to_string(r.objective_kind);
        for (std::size_t k = 0; k < d; ++k) {
            out << ',' << (static_cast<Eigen::Index>(k) < r.rmse.size() ? format_double(r.rmse[static_cast<Eigen::Index>(k)]) : "nan");
        }
        for (std::size_t k = 0; k < d; ++k) {
            out << ',' << (static_cast<Eigen::Index>(k) < r.std.size() ? format_double(r.std[static_cast<Eigen::Index>(k)]) : "nan");
        }
        std::string err = r.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        out << ',' << (r.diverged ? 1 : 0) << ',' << (r.truncated ? 1 : 0) << ',' << r.noise_seed
            << ',' << r.solver_seed << ',' << err << '\n';
    }
}

CoefficientsDocument coefficients_document(const ResultRecord& record, unsigned max_degree) {
    CoefficientsDocument doc;
    doc.dimension = record.model.dimension();
    doc.max_degree = max_degree;
    doc.terms = record.model.terms;
    doc.var_names = default_var_names(doc.dimension);
    doc.equations = record.coefficients;
    return doc;
}

} // namespace linfsindy
