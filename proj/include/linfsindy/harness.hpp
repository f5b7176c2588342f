#pragma once

#include "linfsindy/dynamics.hpp"
#include "linfsindy/metrics.hpp"
#include "linfsindy/pso.hpp"
#include "linfsindy/sparse_regression.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace linfsindy {

enum class DerivativeKind { MeasuredNoisy, CentralDifference, PolynomialInterp };

std::string to_string(DerivativeKind kind);
DerivativeKind derivative_kind_from_string(const std::string& name);

struct DerivativeSource {
    DerivativeKind kind = DerivativeKind::CentralDifference;
    double sigma = 0.0;       // MeasuredNoisy only
    std::size_t window = 7;   // PolynomialInterp only
    std::size_t degree = 3;   // PolynomialInterp only
};

struct ObjectiveConfig {
    ObjectiveKind kind = ObjectiveKind::L2;
    double threshold = 0.1;          // L2: STLSQ hard threshold
    std::size_t stlsq_max_iters = 20;
    std::optional<double> lambda;    // Linf: absolute penalty; overrides lambda_scale
    double lambda_scale = 0.02;      // Linf: lambda = lambda_scale * ||y||_inf per equation
    PsoConfig pso;                   // bounds are filled in by the solver
};

/// One experiment cell.
struct ScenarioConfig {
    std::string id = "scenario";
    SystemKind system = SystemKind::Lorenz;
    std::vector<double> parameters = lorenz_default_parameters();
    Vector ident_x0 = (Vector(3) << -8.0, 8.0, 27.0).finished();
    Vector recon_x0 = (Vector(3) << 1.0, 1.0, 1.0).finished();
    double dt = 0.01;
    double t_end = 50.0;
    std::optional<double> recon_t_end;  // defaults to t_end
    std::size_t substeps = 1;
    DerivativeSource derivative;
    double state_noise_sigma = 0.0;
    ObjectiveConfig objective;
    unsigned dictionary_degree = 2;
    std::uint64_t noise_seed = 1;
    std::uint64_t solver_seed = 1;
    std::size_t replicates = 1;

    /// Throws ConfigError on violated invariants.
    void validate() const;
    SystemSpec system_spec() const;
};

/// Full pipeline, once per replicate: integrate, optional state noise,
/// derivative estimate, dictionary, row alignment, per-equation sparse solve,
/// reconstruction, error indicators. Stage failures are recorded, not thrown.
std::vector<ResultRecord> run_scenario(const ScenarioConfig& config);

enum class TableId { T1 = 1, T2, T3, T4, T5 };

TableId table_id_from_int(int id);

struct TableOptions {
    std::size_t replicates = 1;
    std::uint64_t seed = 2024;
    std::size_t threads = 0;  // 0: SINDY_THREADS environment variable, else hardware
    /// Applied to every generated scenario (solver budgets, horizons).
    std::optional<PsoConfig> pso;
    std::optional<double> t_end;
};

/// One grid cell: both objectives, all replicates.
struct TableCell {
    std::vector<std::pair<std::string, std::string>> keys;
    ScenarioConfig l2_config;
    ScenarioConfig linf_config;
    std::vector<ResultRecord> l2;
    std::vector<ResultRecord> linf;

    /// Mean over successful replicates; NaN when none succeeded.
    Vector mean_rmse(ObjectiveKind kind) const;
    Vector mean_std(ObjectiveKind kind) const;
    std::size_t diverged(ObjectiveKind kind) const;
    std::size_t failed(ObjectiveKind kind) const;
};

struct TableResult {
    TableId id = TableId::T1;
    std::vector<std::string> key_names;
    std::vector<TableCell> cells;
    std::size_t dimension = 3;
};

/// Scenario grid of a table without running it.
TableResult build_table(TableId id, const TableOptions& options = {});

/// Builds and runs every cell; cells run in parallel, each seeded by its grid position.
TableResult run_table(TableId id, const TableOptions& options = {});

enum class TableFormat { Csv, Markdown };

/// Column order: grid keys, then per sub-system k:
/// rmse_l2_k, rmse_linf_k, std_l2_k, std_linf_k; then bookkeeping columns.
/// Markdown bolds the smaller value of each (L2, Linf) pair; values equal to
/// four decimals are both bolded and listed in the `ties` column.
std::string format_table(const TableResult& table, TableFormat format);

/// Writes format_table to `path`; I/O failures name the path.
void emit_table(const TableResult& table, TableFormat format, const std::string& path);

/// Thread count from SINDY_THREADS, else hardware concurrency (at least 1).
std::size_t default_thread_count();

} // namespace linfsindy
