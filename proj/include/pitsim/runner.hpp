#pragma once

// Benchmark orchestration: run a config, write CSV/JSON artifacts, compare
// coarse variants.

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pitsim/basis.hpp"
#include "pitsim/config.hpp"
#include "pitsim/parareal.hpp"

namespace pitsim {

inline constexpr int kExitConverged = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNotConverged = 2;

struct RunOutcome {
    PararealReport report;
    double wall_seconds = 0.0;
    std::vector<std::filesystem::path> files;

    [[nodiscard]] int exit_code() const {
        return report.converged ? kExitConverged : kExitNotConverged;
    }
};

/// Runs Parareal for `config`; with write_outputs, emits the enabled
/// artifacts (solution.csv, convergence.csv, basis.csv, report.json) into
/// config.outputs.directory. I/O failures raise Error(Io).
[[nodiscard]] RunOutcome run_benchmark(const RunConfig& config, bool write_outputs = true);

/// "%.17g" formatting used for every number written to CSV.
[[nodiscard]] std::string format_number(double v);

[[nodiscard]] std::string convergence_csv(const PararealReport& report);
[[nodiscard]] std::string solution_csv(const std::vector<Trajectory>& windows);
[[nodiscard]] std::string basis_csv(const BasisSet& basis, std::size_t samples = 1001);
[[nodiscard]] nlohmann::json report_json(const PararealReport& report,
                                         const PararealConfig& config, double wall_seconds);

/// Re-derives cost arithmetic from the ledger fields of a report.json
/// document. Returns an empty string when consistent, else a description of
/// the first mismatch.
[[nodiscard]] std::string verify_ledger(const nlohmann::json& report);

struct ComparisonRow {
    std::string variant;
    bool ok = false;
    std::string error;
    std::size_t iterations = 0;
    bool converged = false;
    double cost_units = 0.0;
    double final_jump = 0.0;
    std::size_t fine_solves = 0;
    std::size_t coarse_solves = 0;
    std::size_t coarse_system_size = 0;
};

struct Comparison {
    std::vector<ComparisonRow> rows;

    [[nodiscard]] std::string to_text() const;
    [[nodiscard]] std::string to_csv() const;
};

/// Runs each variant on the same model and partition. A failing variant is
/// recorded in its row; the others still run.
[[nodiscard]] Comparison compare_variants(const RunConfig& config,
                                          const std::vector<std::string>& variants);

/// Splits "classical,dc,mpde:3" into its entries.
[[nodiscard]] std::vector<std::string> split_variants(std::string_view list);

}  // namespace pitsim
