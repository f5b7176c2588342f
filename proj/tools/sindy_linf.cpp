// Command-line front end: table sweeps, single scenarios, coefficient inspection.

#include "linfsindy/error.hpp"
#include "linfsindy/harness.hpp"
#include "linfsindy/serialization.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace linfsindy;

namespace {

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory '" + dir + "': " + ec.message());
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out << text;
}

std::string sanitize(std::string id) {
    for (char& ch : id) {
        if (ch == '/' || ch == '=' || ch == ' ') ch = '_';
    }
    return id;
}

int run_table_command(int table, const std::string& out_dir, std::size_t replicates,
                      std::uint64_t seed) {
    TableOptions options;
    options.replicates = replicates;
    options.seed = seed;
    const TableResult result = run_table(table_id_from_int(table), options);
    ensure_dir(out_dir);
    const std::string stem = "table" + std::to_string(table);
    emit_table(result, TableFormat::Csv, (fs::path(out_dir) / (stem + ".csv")).string());
    emit_table(result, TableFormat::Markdown, (fs::path(out_dir) / (stem + ".md")).string());

    std::vector<ResultRecord> all;
    for (const auto& cell : result.cells) {
        all.insert(all.end(), cell.l2.begin(), cell.l2.end());
        all.insert(all.end(), cell.linf.begin(), cell.linf.end());
    }
    std::ofstream records(fs::path(out_dir) / (stem + "_records.csv"), std::ios::binary);
    write_records_csv(records, all);
    std::cout << format_table(result, TableFormat::Markdown);
    return 0;
}

int run_config_command(const std::string& config_path, const std::string& out_dir) {
    std::ifstream in(config_path);
    if (!in) throw Error("cannot open config '" + config_path + "'");
    Json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError("config '" + config_path + "': " + ex.what());
    }
    const ScenarioConfig config = scenario_from_json(j);
    const std::vector<ResultRecord> records = run_scenario(config);

    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        std::ofstream csv(fs::path(out_dir) / "records.csv", std::ios::binary);
        write_records_csv(csv, records);
        for (const auto& rec : records) {
            if (!rec.ok()) continue;
            const auto doc = coefficients_document(rec, config.dictionary_degree);
            write_file(fs::path(out_dir) /
                           (sanitize(rec.scenario_id) + "_r" + std::to_string(rec.replicate) + ".json"),
                       to_json(doc).dump(2) + "\n");
        }
    }
    write_records_csv(std::cout, records);
    for (const auto& rec : records) {
        if (!rec.ok()) {
            std::cerr << rec.scenario_id << " replicate " << rec.replicate << ": " << rec.error << '\n';
            continue;
        }
        std::cout << "# " << rec.scenario_id << " replicate " << rec.replicate << '\n'
                  << format_equations(coefficients_document(rec, config.dictionary_degree));
    }
    return 0;
}

int inspect_command(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open coefficients file '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& ex) {
        throw InputError("coefficients file '" + path + "': " + ex.what());
    }
    std::cout << format_equations(coefficients_from_json(j));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse identification of polynomial ODEs with L2 and L-infinity residuals"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run a table sweep or a single scenario");
    int table = 0;
    std::string config_path;
    std::string out_dir;
    std::size_t replicates = 1;
    std::uint64_t seed = 2024;
    auto* table_opt = run->add_option("--table", table, "Table to regenerate (1-5)")->check(CLI::Range(1, 5));
    auto* config_opt = run->add_option("--config", config_path, "Scenario JSON file")->check(CLI::ExistingFile);
    table_opt->excludes(config_opt);
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--replicates", replicates, "Replicates per cell")->check(CLI::PositiveNumber);
    run->add_option("--seed", seed, "Base seed");

    auto* inspect = app.add_subcommand("inspect", "Print identified equations");
    std::string coeffs_path;
    inspect->add_option("--coeffs", coeffs_path, "Coefficients JSON file")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            if (*table_opt) {
                if (out_dir.empty()) throw ConfigError("run --table requires --out DIR");
                return run_table_command(table, out_dir, replicates, seed);
            }
            if (*config_opt) return run_config_command(config_path, out_dir);
            throw ConfigError("run needs --table or --config");
        }
        if (*inspect) return inspect_command(coeffs_path);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
    return 0;
}
