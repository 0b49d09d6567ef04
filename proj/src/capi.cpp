#include "pitsim/pitsim.h"

#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "pitsim/config.hpp"
#include "pitsim/error.hpp"
#include "pitsim/runner.hpp"

struct pitsim_config {
    pitsim::RunConfig value;
};

struct pitsim_result {
    pitsim::RunOutcome outcome;
    pitsim::PararealConfig config;
};

namespace {

thread_local std::string last_error;

pitsim_status status_of(pitsim::ErrorCode code) {
    using pitsim::ErrorCode;
    switch (code) {
        case ErrorCode::InvalidArgument: return PITSIM_E_INVALID_ARGUMENT;
        case ErrorCode::SingularSystem: return PITSIM_E_SINGULAR_SYSTEM;
        case ErrorCode::NonpositiveStep: return PITSIM_E_NONPOSITIVE_STEP;
        case ErrorCode::DegenerateBasis: return PITSIM_E_DEGENERATE_BASIS;
        case ErrorCode::NonPeriodicSource: return PITSIM_E_NONPERIODIC_SOURCE;
        case ErrorCode::DegenerateNorm: return PITSIM_E_DEGENERATE_NORM;
        case ErrorCode::ParseError: return PITSIM_E_PARSE;
        case ErrorCode::ValidationError: return PITSIM_E_VALIDATION;
        case ErrorCode::Io: return PITSIM_E_IO;
    }
    return PITSIM_E_INTERNAL;
}

pitsim_status fail(pitsim_status status, std::string message) {
    last_error = std::move(message);
    return status;
}

// Runs fn, translating exceptions into status codes.
template <class Fn>
pitsim_status guarded(Fn&& fn) {
    try {
        fn();
        return PITSIM_OK;
    } catch (const pitsim::Error& e) {
        return fail(status_of(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(PITSIM_E_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(PITSIM_E_INTERNAL, e.what());
    } catch (...) {
        return fail(PITSIM_E_INTERNAL, "unknown exception");
    }
}

char* duplicate(const std::string& s) {
    auto* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

#define PITSIM_REQUIRE(cond, what) \
    if (!(cond)) return fail(PITSIM_E_INVALID_ARGUMENT, what)

}  // namespace

extern "C" {

const char* pitsim_version(void) { return "0.1.0"; }

const char* pitsim_status_name(pitsim_status status) {
    switch (status) {
        case PITSIM_OK: return "ok";
        case PITSIM_E_INVALID_ARGUMENT: return "invalid argument";
        case PITSIM_E_SINGULAR_SYSTEM: return "singular system";
        case PITSIM_E_NONPOSITIVE_STEP: return "nonpositive step";
        case PITSIM_E_DEGENERATE_BASIS: return "degenerate basis";
        case PITSIM_E_NONPERIODIC_SOURCE: return "non-periodic source";
        case PITSIM_E_DEGENERATE_NORM: return "degenerate norm";
        case PITSIM_E_PARSE: return "parse error";
        case PITSIM_E_VALIDATION: return "validation error";
        case PITSIM_E_IO: return "I/O error";
        case PITSIM_E_LEDGER_MISMATCH: return "ledger mismatch";
        case PITSIM_E_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* pitsim_last_error(void) { return last_error.c_str(); }

void pitsim_string_free(char* str) { delete[] str; }

pitsim_status pitsim_config_parse(const char* json, pitsim_config** out) {
    PITSIM_REQUIRE(json && out, "null argument");
    return guarded([&] { *out = new pitsim_config{pitsim::parse_config(json)}; });
}

pitsim_status pitsim_config_load(const char* path, pitsim_config** out) {
    PITSIM_REQUIRE(path && out, "null argument");
    return guarded([&] { *out = new pitsim_config{pitsim::load_config(path)}; });
}

pitsim_status pitsim_config_preset(const char* name, pitsim_config** out) {
    PITSIM_REQUIRE(name && out, "null argument");
    return guarded([&] { *out = new pitsim_config{pitsim::preset_config(name)}; });
}

void pitsim_config_free(pitsim_config* config) { delete config; }

pitsim_status pitsim_config_set_variant(pitsim_config* config, const char* variant) {
    PITSIM_REQUIRE(config && variant, "null argument");
    return guarded([&] {
        auto parareal = config->value.parareal;
        parareal.coarse = pitsim::CoarseVariant::parse(variant);
        parareal.validate();
        config->value.parareal = parareal;
    });
}

pitsim_status pitsim_config_set_mpde_lift(pitsim_config* config, const char* lift) {
    PITSIM_REQUIRE(config && lift, "null argument");
    return guarded([&] { config->value.parareal.mpde_lift = pitsim::parse_mpde_lift(lift); });
}

pitsim_status pitsim_config_set_workers(pitsim_config* config, size_t workers) {
    PITSIM_REQUIRE(config, "null argument");
    PITSIM_REQUIRE(workers >= 1, "workers must be at least 1");
    config->value.parareal.workers = workers;
    return PITSIM_OK;
}

pitsim_status pitsim_config_set_output_dir(pitsim_config* config, const char* dir) {
    PITSIM_REQUIRE(config && dir, "null argument");
    config->value.outputs.directory = dir;
    return PITSIM_OK;
}

const char* pitsim_config_output_dir(const pitsim_config* config) {
    return config ? config->value.outputs.directory.c_str() : "";
}

pitsim_status pitsim_config_to_json(const pitsim_config* config, char** out_json) {
    PITSIM_REQUIRE(config && out_json, "null argument");
    return guarded([&] { *out_json = duplicate(pitsim::config_to_json(config->value).dump(2)); });
}

pitsim_status pitsim_run(const pitsim_config* config, int write_outputs, pitsim_result** out) {
    PITSIM_REQUIRE(config && out, "null argument");
    return guarded([&] {
        auto outcome = pitsim::run_benchmark(config->value, write_outputs != 0);
        *out = new pitsim_result{std::move(outcome), config->value.parareal};
    });
}

void pitsim_result_free(pitsim_result* result) { delete result; }

int pitsim_result_converged(const pitsim_result* result) {
    return result && result->outcome.report.converged ? 1 : 0;
}

int pitsim_result_exit_code(const pitsim_result* result) {
    return result ? result->outcome.exit_code() : pitsim::kExitError;
}

size_t pitsim_result_iterations(const pitsim_result* result) {
    return result ? result->outcome.report.iterations : 0;
}

double pitsim_result_cost_units(const pitsim_result* result) {
    return result ? result->outcome.report.cost_units() : 0.0;
}

double pitsim_result_wall_seconds(const pitsim_result* result) {
    return result ? result->outcome.wall_seconds : 0.0;
}

size_t pitsim_result_state_size(const pitsim_result* result) {
    return result ? result->outcome.report.ledger.state_size : 0;
}

size_t pitsim_result_windows(const pitsim_result* result) {
    return result ? result->config.windows : 0;
}

pitsim_status pitsim_result_jump(const pitsim_result* result, size_t iteration, double* out) {
    PITSIM_REQUIRE(result && out, "null argument");
    const auto& jumps = result->outcome.report.jumps;
    PITSIM_REQUIRE(iteration >= 1 && iteration <= jumps.size(), "iteration out of range");
    *out = jumps[iteration - 1];
    return PITSIM_OK;
}

pitsim_status pitsim_result_ledger(const pitsim_result* result, pitsim_ledger* out) {
    PITSIM_REQUIRE(result && out, "null argument");
    const auto& l = result->outcome.report.ledger;
    *out = {l.state_size,    l.fine_solves,        l.fine_system_size,
            l.coarse_solves, l.coarse_system_size, l.cost_units()};
    return PITSIM_OK;
}

pitsim_status pitsim_result_sync_state(const pitsim_result* result, size_t iteration, size_t n,
                                       double* out, size_t len) {
    PITSIM_REQUIRE(result && out, "null argument");
    const auto& history = result->outcome.report.sync_states;
    PITSIM_REQUIRE(iteration < history.size(), "iteration out of range");
    PITSIM_REQUIRE(n < history[iteration].size(), "window index out of range");
    const auto& x = history[iteration][n];
    PITSIM_REQUIRE(len == static_cast<size_t>(x.size()), "buffer length must equal the state size");
    for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = x[i];
    return PITSIM_OK;
}

pitsim_status pitsim_result_report_json(const pitsim_result* result, char** out_json) {
    PITSIM_REQUIRE(result && out_json, "null argument");
    return guarded([&] {
        *out_json = duplicate(pitsim::report_json(result->outcome.report, result->config,
                                                  result->outcome.wall_seconds)
                                  .dump(2));
    });
}

pitsim_status pitsim_verify_ledger_file(const char* report_path) {
    PITSIM_REQUIRE(report_path, "null argument");
    std::ifstream in(report_path);
    if (!in) return fail(PITSIM_E_IO, std::string("cannot open ") + report_path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        return fail(PITSIM_E_PARSE, e.what());
    }
    const std::string problem = pitsim::verify_ledger(doc);
    if (!problem.empty()) return fail(PITSIM_E_LEDGER_MISMATCH, problem);
    return PITSIM_OK;
}

pitsim_status pitsim_compare(const pitsim_config* config, const char* variants,
                             int write_outputs, char** out_table) {
    PITSIM_REQUIRE(config && variants && out_table, "null argument");
    return guarded([&] {
        const auto list = pitsim::split_variants(variants);
        if (list.empty())
            throw pitsim::Error(pitsim::ErrorCode::InvalidArgument, "variant list is empty");
        const auto table = pitsim::compare_variants(config->value, list);
        if (write_outputs != 0) {
            const std::filesystem::path dir(config->value.outputs.directory);
            std::error_code ec;
            std::filesystem::create_directories(dir, ec);
            std::ofstream csv(dir / "comparison.csv", std::ios::binary);
            if (ec || !csv)
                throw pitsim::Error(pitsim::ErrorCode::Io,
                                    "cannot write " + (dir / "comparison.csv").string());
            csv << table.to_csv();
        }
        *out_table = duplicate(table.to_text());
    });
}

}  // extern "C"
