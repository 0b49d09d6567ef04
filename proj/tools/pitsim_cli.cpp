// pitsim command-line front end. Talks to the library only through the C API.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "pitsim/pitsim.h"

namespace {

constexpr int kExitError = 1;

struct ConfigDeleter {
    void operator()(pitsim_config* c) const { pitsim_config_free(c); }
};
struct ResultDeleter {
    void operator()(pitsim_result* r) const { pitsim_result_free(r); }
};
struct StringDeleter {
    void operator()(char* s) const { pitsim_string_free(s); }
};
using ConfigPtr = std::unique_ptr<pitsim_config, ConfigDeleter>;
using ResultPtr = std::unique_ptr<pitsim_result, ResultDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

int report_failure(pitsim_status status) {
    std::cerr << "pitsim: " << pitsim_status_name(status) << ": " << pitsim_last_error() << '\n';
    return kExitError;
}

struct RunOptions {
    std::string config;
    std::string variant;
    std::string variants = "classical,dc,mpde:1,mpde:3";
    std::string out;
    std::string lift;
    std::size_t workers = 0;
    bool verify_ledger = false;
};

// Loads the config and applies command-line overrides.
pitsim_status load(const RunOptions& opts, ConfigPtr& config) {
    pitsim_config* raw = nullptr;
    if (auto s = pitsim_config_load(opts.config.c_str(), &raw); s != PITSIM_OK) return s;
    config.reset(raw);
    if (!opts.variant.empty())
        if (auto s = pitsim_config_set_variant(config.get(), opts.variant.c_str()); s != PITSIM_OK)
            return s;
    if (!opts.lift.empty())
        if (auto s = pitsim_config_set_mpde_lift(config.get(), opts.lift.c_str()); s != PITSIM_OK)
            return s;
    if (opts.workers > 0)
        if (auto s = pitsim_config_set_workers(config.get(), opts.workers); s != PITSIM_OK) return s;
    if (!opts.out.empty())
        if (auto s = pitsim_config_set_output_dir(config.get(), opts.out.c_str()); s != PITSIM_OK)
            return s;
    return PITSIM_OK;
}

int cmd_run(const RunOptions& opts) {
    ConfigPtr config;
    if (auto s = load(opts, config); s != PITSIM_OK) return report_failure(s);

    pitsim_result* raw = nullptr;
    if (auto s = pitsim_run(config.get(), 1, &raw); s != PITSIM_OK) return report_failure(s);
    ResultPtr result(raw);

    pitsim_ledger ledger{};
    pitsim_result_ledger(result.get(), &ledger);
    const std::size_t iterations = pitsim_result_iterations(result.get());
    double last_jump = 0.0;
    if (iterations > 0) pitsim_result_jump(result.get(), iterations, &last_jump);

    std::printf("iterations: %zu (%s)\n", iterations,
                pitsim_result_converged(result.get()) ? "converged" : "not converged");
    std::printf("final jump: %.3e\n", last_jump);
    std::printf("sequential solves: %zu fine (size %zu) + %zu coarse (size %zu)\n",
                ledger.fine_solves, ledger.fine_system_size, ledger.coarse_solves,
                ledger.coarse_system_size);
    std::printf("cost units: %.17g\n", ledger.cost_units);
    std::printf("wall time: %.3f s\n", pitsim_result_wall_seconds(result.get()));

    if (opts.verify_ledger) {
        const auto report =
            std::filesystem::path(pitsim_config_output_dir(config.get())) / "report.json";
        if (auto s = pitsim_verify_ledger_file(report.string().c_str()); s != PITSIM_OK)
            return report_failure(s);
        std::printf("ledger: consistent\n");
    }
    return pitsim_result_exit_code(result.get());
}

int cmd_compare(const RunOptions& opts) {
    ConfigPtr config;
    if (auto s = load(opts, config); s != PITSIM_OK) return report_failure(s);
    char* table = nullptr;
    if (auto s = pitsim_compare(config.get(), opts.variants.c_str(), 1, &table); s != PITSIM_OK)
        return report_failure(s);
    StringPtr owned(table);
    std::fputs(owned.get(), stdout);
    return 0;
}

int cmd_preset(const std::string& name, bool print) {
    pitsim_config* raw = nullptr;
    if (auto s = pitsim_config_preset(name.c_str(), &raw); s != PITSIM_OK) return report_failure(s);
    ConfigPtr config(raw);
    if (!print) {
        std::printf("preset '%s' is available; use --print to dump it\n", name.c_str());
        return 0;
    }
    char* json = nullptr;
    if (auto s = pitsim_config_to_json(config.get(), &json); s != PITSIM_OK)
        return report_failure(s);
    StringPtr owned(json);
    std::printf("%s\n", owned.get());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Parallel-in-time simulation of PWM-driven linear systems"};
    app.require_subcommand(1);
    app.set_version_flag("--version", pitsim_version());

    RunOptions run_opts;
    auto* run = app.add_subcommand("run", "Run Parareal for a config file");
    run->add_option("--config", run_opts.config, "JSON config file")->required()->check(CLI::ExistingFile);
    run->add_option("--variant", run_opts.variant, "Coarse propagator: classical | dc | fft:M | mpde:N_p");
    run->add_option("--workers", run_opts.workers, "Concurrent fine sweeps")->check(CLI::PositiveNumber);
    run->add_option("--out", run_opts.out, "Output directory");
    run->add_option("--mpde-lift", run_opts.lift, "MPDE window-start lift: periodic | zero")
        ->check(CLI::IsMember({"periodic", "zero"}));
    run->add_flag("--verify-ledger", run_opts.verify_ledger, "Re-derive cost arithmetic from report.json");

    RunOptions cmp_opts;
    auto* compare = app.add_subcommand("compare", "Compare coarse propagators on one config");
    compare->add_option("--config", cmp_opts.config, "JSON config file")->required()->check(CLI::ExistingFile);
    compare->add_option("--variants", cmp_opts.variants, "Comma-separated variant list")->capture_default_str();
    compare->add_option("--workers", cmp_opts.workers, "Concurrent fine sweeps")->check(CLI::PositiveNumber);
    compare->add_option("--out", cmp_opts.out, "Output directory for comparison.csv");
    compare->add_option("--mpde-lift", cmp_opts.lift, "MPDE window-start lift: periodic | zero")
        ->check(CLI::IsMember({"periodic", "zero"}));

    std::string preset_name;
    bool preset_print = false;
    auto* preset = app.add_subcommand("preset", "Inspect a built-in model preset");
    preset->add_option("name", preset_name, "Preset name (buck)")->required();
    preset->add_flag("--print", preset_print, "Dump the preset as a JSON config");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitError;
    }

    if (*run) return cmd_run(run_opts);
    if (*compare) return cmd_compare(cmp_opts);
    return cmd_preset(preset_name, preset_print);
}
