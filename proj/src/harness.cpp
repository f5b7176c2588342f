#include "linfsindy/harness.hpp"

#include "linfsindy/dictionary.hpp"
#include "linfsindy/differentiation.hpp"
#include "linfsindy/error.hpp"
#include "linfsindy/serialization.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

namespace linfsindy {

using Eigen::Index;

std::string to_string(DerivativeKind kind) {
    switch (kind) {
    case DerivativeKind::MeasuredNoisy: return "measured";
    case DerivativeKind::CentralDifference: return "central_difference";
    case DerivativeKind::PolynomialInterp: return "polynomial";
    }
    return "central_difference";
}

DerivativeKind derivative_kind_from_string(const std::string& name) {
    if (name == "measured") return DerivativeKind::MeasuredNoisy;
    if (name == "central_difference") return DerivativeKind::CentralDifference;
    if (name == "polynomial") return DerivativeKind::PolynomialInterp;
    throw ConfigError("unknown derivative source '" + name + "'");
}

void ScenarioConfig::validate() const {
    if (!(dt > 0.0)) throw ConfigError("scenario: dt must be positive");
    if (!(t_end >= dt)) throw ConfigError("scenario: t_end must be at least dt");
    if (recon_t_end && !(*recon_t_end >= dt)) {
        throw ConfigError("scenario: recon_t_end must be at least dt");
    }
    if (replicates < 1) throw ConfigError("scenario: replicates must be at least 1");
    if (substeps < 1) throw ConfigError("scenario: substeps must be at least 1");
    if (dictionary_degree < 1) throw ConfigError("scenario: dictionary_degree must be at least 1");
    if (state_noise_sigma < 0.0 || derivative.sigma < 0.0) {
        throw ConfigError("scenario: noise levels must be nonnegative");
    }
    if (system == SystemKind::Custom) {
        throw ConfigError("scenario: only lorenz and chen systems can be configured");
    }
    if (ident_x0.size() != 3 || recon_x0.size() != 3) {
        throw ConfigError("scenario: initial states must have length 3");
    }
}

SystemSpec ScenarioConfig::system_spec() const {
    return system == SystemKind::Chen ? chen_system(parameters) : lorenz_system(parameters);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Independent swarm seed per (replicate, equation); restarts add +r on top.
std::uint64_t equation_seed(std::uint64_t solver_seed, std::size_t replicate, std::size_t eq) {
    return splitmix64(solver_seed ^ splitmix64((static_cast<std::uint64_t>(replicate) << 16) + eq));
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::vector<std::pair<std::string, std::string>> settings_echo(const ScenarioConfig& c) {
    std::vector<std::pair<std::string, std::string>> s{
        {"system", to_string(c.system)},
        {"dt", fmt(c.dt)},
        {"t_end", fmt(c.t_end)},
        {"derivative", to_string(c.derivative.kind)},
        {"state_noise_sigma", fmt(c.state_noise_sigma)},
        {"dictionary_degree", std::to_string(c.dictionary_degree)},
        {"objective", to_string(c.objective.kind)},
    };
    if (c.derivative.kind == DerivativeKind::MeasuredNoisy) {
        s.emplace_back("derivative_sigma", fmt(c.derivative.sigma));
    }
    if (c.derivative.kind == DerivativeKind::PolynomialInterp) {
        s.emplace_back("window", std::to_string(c.derivative.window));
        s.emplace_back("degree", std::to_string(c.derivative.degree));
    }
    if (c.objective.kind == ObjectiveKind::L2) {
        s.emplace_back("threshold", fmt(c.objective.threshold));
    } else {
        s.emplace_back("solver", "pso-restart");
        if (c.objective.lambda) {
            s.emplace_back("lambda", fmt(*c.objective.lambda));
        } else {
            s.emplace_back("lambda_scale", fmt(c.objective.lambda_scale));
        }
        const PsoConfig& p = c.objective.pso;
        s.emplace_back("swarm_size", std::to_string(p.swarm_size));
        s.emplace_back("max_iters", std::to_string(p.max_iters));
        s.emplace_back("inertia", fmt(p.inertia));
        s.emplace_back("cognitive", fmt(p.cognitive));
        s.emplace_back("social", fmt(p.social));
        s.emplace_back("restarts", std::to_string(p.restarts));
    }
    return s;
}

struct SharedTruth {
    Trajectory ident;
    Trajectory recon;
};

ResultRecord run_replicate(const ScenarioConfig& c, const SystemSpec& system,
                           const SharedTruth& truth, std::size_t r) {
    ResultRecord rec;
    rec.scenario_id = c.id;
    rec.replicate = r;
    rec.objective_kind = c.objective.kind;
    rec.noise_seed = c.noise_seed + r;
    rec.solver_seed = c.solver_seed + r;
    rec.settings = settings_echo(c);
    const auto d = static_cast<Index>(system.dimension);
    try {
        const Trajectory observed =
            add_state_noise(truth.ident, NoiseSpec{c.state_noise_sigma, rec.noise_seed});

        DerivativeSeries deriv;
        switch (c.derivative.kind) {
        case DerivativeKind::MeasuredNoisy:
            deriv = measured_derivative(
                system, truth.ident,
                NoiseSpec{c.derivative.sigma, splitmix64(rec.noise_seed ^ 0xD1B54A32D192ED03ull)});
            break;
        case DerivativeKind::CentralDifference:
            deriv = central_difference(observed);
            break;
        case DerivativeKind::PolynomialInterp:
            deriv = polynomial_derivative(observed, c.derivative.window, c.derivative.degree);
            break;
        }

        const DictionaryMatrix dict =
            build_dictionary(aligned_rows(observed.values, deriv), c.dictionary_degree);

        for (Index k = 0; k < d; ++k) {
            const Vector y = deriv.values.col(k);
            if (c.objective.kind == ObjectiveKind::L2) {
                rec.coefficients.push_back(
                    stlsq(dict.matrix, y, c.objective.threshold, c.objective.stlsq_max_iters));
            } else {
                LinfSolveOptions options;
                options.pso = c.objective.pso;
                options.pso.bounds.clear();
                options.pso.seed = equation_seed(rec.solver_seed, r, static_cast<std::size_t>(k));
                const double lambda =
                    c.objective.lambda ? *c.objective.lambda : c.objective.lambda_scale * y.cwiseAbs().maxCoeff();
                rec.coefficients.push_back(linf_sparse_solve(dict.matrix, y, lambda, options));
            }
        }
        rec.model = make_model(dict.terms, rec.coefficients);

        const double horizon = c.recon_t_end.value_or(c.t_end);
        const Reconstruction recon = reconstruct(rec.model, c.recon_x0, c.dt, horizon);
        rec.diverged = recon.diverged;
        const ErrorIndicators err = compare_trajectories(truth.recon, recon.trajectory);
        rec.rmse = err.rmse;
        rec.std = err.std;
        rec.truncated = err.truncated;
    } catch (const std::exception& ex) {
        rec.error = ex.what();
        rec.rmse = Vector::Constant(d, std::numeric_limits<double>::quiet_NaN());
        rec.std = rec.rmse;
    }
    return rec;
}

// Runs jobs [0, count) on a fixed number of threads; results are placed by index.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
    threads = std::max<std::size_t>(1, std::min(threads, count));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace

std::vector<ResultRecord> run_scenario(const ScenarioConfig& config) {
    config.validate();
    const SystemSpec system = config.system_spec();
    SharedTruth truth;
    std::vector<ResultRecord> records;
    try {
        truth.ident = integrate(system, config.ident_x0, config.dt, config.t_end, config.substeps);
        truth.recon = integrate(system, config.recon_x0, config.dt,
                                config.recon_t_end.value_or(config.t_end), config.substeps);
    } catch (const std::exception& ex) {
        for (std::size_t r = 0; r < config.replicates; ++r) {
            ResultRecord rec;
            rec.scenario_id = config.id;
            rec.replicate = r;
            rec.objective_kind = config.objective.kind;
            rec.error = ex.what();
            rec.rmse = Vector::Constant(3, std::numeric_limits<double>::quiet_NaN());
            rec.std = rec.rmse;
            records.push_back(std::move(rec));
        }
        return records;
    }
    for (std::size_t r = 0; r < config.replicates; ++r) {
        records.push_back(run_replicate(config, system, truth, r));
    }
    return records;
}

TableId table_id_from_int(int id) {
    if (id < 1 || id > 5) throw ConfigError("table id must be 1..5, got " + std::to_string(id));
    return static_cast<TableId>(id);
}

namespace {

const std::vector<ResultRecord>& records_of(const TableCell& cell, ObjectiveKind kind) {
    return kind == ObjectiveKind::L2 ? cell.l2 : cell.linf;
}

Vector mean_of(const std::vector<ResultRecord>& recs, bool use_rmse, Index d) {
    Vector sum = Vector::Zero(d);
    std::size_t ok = 0;
    for (const auto& r : recs) {
        if (!r.ok()) continue;
        sum += use_rmse ? r.rmse : r.std;
        ++ok;
    }
    if (ok == 0) return Vector::Constant(d, std::numeric_limits<double>::quiet_NaN());
    return sum / static_cast<double>(ok);
}

} // namespace

Vector TableCell::mean_rmse(ObjectiveKind kind) const {
    return mean_of(records_of(*this, kind), true, 3);
}

Vector TableCell::mean_std(ObjectiveKind kind) const {
    return mean_of(records_of(*this, kind), false, 3);
}

std::size_t TableCell::diverged(ObjectiveKind kind) const {
    std::size_t n = 0;
    for (const auto& r : records_of(*this, kind)) n += r.diverged ? 1 : 0;
    return n;
}

std::size_t TableCell::failed(ObjectiveKind kind) const {
    std::size_t n = 0;
    for (const auto& r : records_of(*this, kind)) n += r.ok() ? 0 : 1;
    return n;
}

TableResult build_table(TableId id, const TableOptions& options) {
    TableResult table;
    table.id = id;
    const int tid = static_cast<int>(id);

    ScenarioConfig base;
    base.replicates = options.replicates;
    if (options.t_end) base.t_end = *options.t_end;
    if (options.pso) base.objective.pso = *options.pso;

    auto add_cell = [&](std::vector<std::pair<std::string, std::string>> keys, ScenarioConfig cfg) {
        const std::size_t index = table.cells.size();
        std::string id_str = "T" + std::to_string(tid);
        for (const auto& [k, v] : keys) id_str += "/" + k + "=" + v;
        // Seeds depend only on the grid position, never on scheduling.
        cfg.noise_seed = options.seed + 1000003ull * (index + 1);
        cfg.solver_seed = options.seed + 7000003ull * (index + 1);
        TableCell cell;
        cell.keys = std::move(keys);
        cell.l2_config = cfg;
        cell.l2_config.id = id_str + "/L2";
        cell.l2_config.objective.kind = ObjectiveKind::L2;
        cell.linf_config = cfg;
        cell.linf_config.id = id_str + "/Linf";
        cell.linf_config.objective.kind = ObjectiveKind::Linf;
        table.cells.push_back(std::move(cell));
    };

    switch (id) {
    case TableId::T1:
        table.key_names = {"sigma"};
        for (double sigma : {0.0, 0.001, 0.005, 0.01, 0.05, 0.1, 0.5, 1.0}) {
            ScenarioConfig c = base;
            c.dt = 0.01;
            c.derivative.kind = DerivativeKind::MeasuredNoisy;
            c.derivative.sigma = sigma;
            add_cell({{"sigma", fmt(sigma)}}, c);
        }
        break;
    case TableId::T2:
        table.key_names = {"dt"};
        for (double dt : {0.001, 0.0025, 0.005, 0.0075, 0.01, 0.02}) {
            ScenarioConfig c = base;
            c.dt = dt;
            c.derivative.kind = DerivativeKind::CentralDifference;
            add_cell({{"dt", fmt(dt)}}, c);
        }
        break;
    case TableId::T3: {
        table.key_names = {"technique"};
        ScenarioConfig cd = base;
        cd.dt = 0.01;
        cd.derivative.kind = DerivativeKind::CentralDifference;
        add_cell({{"technique", "central_difference"}}, cd);
        ScenarioConfig poly = cd;
        poly.derivative.kind = DerivativeKind::PolynomialInterp;
        add_cell({{"technique", "polynomial"}}, poly);
        break;
    }
    case TableId::T4:
    case TableId::T5:
        table.key_names = {"dt", "sigma"};
        for (double dt : {0.005, 0.01, 0.02}) {
            for (double sigma : {0.01, 0.03, 0.05}) {
                ScenarioConfig c = base;
                if (id == TableId::T5) {
                    c.system = SystemKind::Chen;
                    c.parameters = chen_default_parameters();
                }
                c.dt = dt;
                c.derivative.kind = DerivativeKind::CentralDifference;
                c.state_noise_sigma = sigma;
                add_cell({{"dt", fmt(dt)}, {"sigma", fmt(sigma)}}, c);
            }
        }
        break;
    }
    return table;
}

std::size_t default_thread_count() {
    if (const char* env = std::getenv("SINDY_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

TableResult run_table(TableId id, const TableOptions& options) {
    TableResult table = build_table(id, options);
    const std::size_t jobs = table.cells.size() * 2;
    const std::size_t threads = options.threads > 0 ? options.threads : default_thread_count();
    parallel_for(jobs, threads, [&](std::size_t job) {
        TableCell& cell = table.cells[job / 2];
        if (job % 2 == 0) {
            cell.l2 = run_scenario(cell.l2_config);
        } else {
            cell.linf = run_scenario(cell.linf_config);
        }
    });
    return table;
}

namespace {

std::string four(double v) {
    if (!std::isfinite(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

} // namespace

std::string format_table(const TableResult& table, TableFormat format) {
    if (table.cells.empty()) throw Error("emit_table: no results to write");
    const std::size_t d = table.dimension;
    const bool md = format == TableFormat::Markdown;

    std::vector<std::string> header = table.key_names;
    for (std::size_t k = 1; k <= d; ++k) {
        for (const char* ind : {"rmse", "std"}) {
            header.push_back(std::string(ind) + "_l2_" + std::to_string(k));
            header.push_back(std::string(ind) + "_linf_" + std::to_string(k));
        }
    }
    for (const char* extra : {"replicates", "diverged_l2", "diverged_linf", "failed_l2", "failed_linf", "ties"}) {
        header.emplace_back(extra);
    }

    std::ostringstream out;
    const auto emit_row = [&](const std::vector<std::string>& row) {
        if (md) {
            out << '|';
            for (const auto& s : row) out << ' ' << s << " |";
        } else {
            for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        }
        out << '\n';
    };
    emit_row(header);
    if (md) {
        out << '|';
        for (std::size_t i = 0; i < header.size(); ++i) out << "---|";
        out << '\n';
    }

    for (const TableCell& cell : table.cells) {
        std::vector<std::string> row;
        for (const auto& kv : cell.keys) row.push_back(kv.second);
        const Vector rmse_l2 = cell.mean_rmse(ObjectiveKind::L2);
        const Vector rmse_li = cell.mean_rmse(ObjectiveKind::Linf);
        const Vector std_l2 = cell.mean_std(ObjectiveKind::L2);
        const Vector std_li = cell.mean_std(ObjectiveKind::Linf);
        std::string ties;
        for (std::size_t k = 0; k < d; ++k) {
            const auto kk = static_cast<Index>(k);
            const std::pair<double, double> pairs[2] = {{rmse_l2[kk], rmse_li[kk]}, {std_l2[kk], std_li[kk]}};
            const char* names[2] = {"rmse_", "std_"};
            for (int p = 0; p < 2; ++p) {
                const auto [a, b] = pairs[p];
                const std::string sa = four(a), sb = four(b);
                if (sa == sb && std::isfinite(a)) {
                    if (!ties.empty()) ties += ';';
                    ties += names[p] + std::to_string(k + 1);
                }
                if (md) {
                    const bool tie = sa == sb && std::isfinite(a);
                    const bool a_wins = tie || (std::isfinite(a) && (!std::isfinite(b) || a < b));
                    const bool b_wins = tie || (std::isfinite(b) && (!std::isfinite(a) || b < a));
                    row.push_back(a_wins ? "**" + sa + "**" : sa);
                    row.push_back(b_wins ? "**" + sb + "**" : sb);
                } else {
                    row.push_back(format_double(a));
                    row.push_back(format_double(b));
                }
            }
        }
        row.push_back(std::to_string(cell.l2.size()));
        row.push_back(std::to_string(cell.diverged(ObjectiveKind::L2)));
        row.push_back(std::to_string(cell.diverged(ObjectiveKind::Linf)));
        row.push_back(std::to_string(cell.failed(ObjectiveKind::L2)));
        row.push_back(std::to_string(cell.failed(ObjectiveKind::Linf)));
        row.push_back(ties);
        emit_row(row);
    }
    return out.str();
}

void emit_table(const TableResult& table, TableFormat format, const std::string& path) {
    const std::string text = format_table(table, format);
    std::ofstream file(path, std::ios::binary);
    if (!file) throw Error("emit_table: cannot open '" + path + "' for writing");
    file << text;
    if (!file) throw Error("emit_table: write to '" + path + "' failed");
}

} // namespace linfsindy
