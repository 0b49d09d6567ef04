#include "pitsim/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "pitsim/basis.hpp"
#include "pitsim/error.hpp"
#include "pitsim/mpde.hpp"

namespace pitsim {

using nlohmann::json;

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

bool close(double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string convergence_csv(const PararealReport& report) {
    std::ostringstream out;
    out << "iteration,jump,cumulative_cost_units\n";
    for (const auto& rec : report.history)
        out << rec.iteration << ',' << format_number(rec.jump) << ','
            << format_number(rec.cumulative_cost) << '\n';
    return out.str();
}

std::string solution_csv(const std::vector<Trajectory>& windows) {
    std::ostringstream out;
    const auto states = windows.empty() ? 0 : windows.front().states.front().size();
    out << 't';
    for (Eigen::Index j = 0; j < states; ++j) out << ",x_" << (j + 1);
    out << '\n';
    for (const auto& w : windows) {
        for (std::size_t i = 0; i < w.times.size(); ++i) {
            out << format_number(w.times[i]);
            for (Eigen::Index j = 0; j < states; ++j) out << ',' << format_number(w.states[i][j]);
            out << '\n';
        }
    }
    return out.str();
}

std::string basis_csv(const BasisSet& basis, std::size_t samples) {
    std::ostringstream out;
    out << "tau";
    for (std::size_t k = 0; k < basis.size(); ++k) out << ",w_" << (k + 1);
    out << '\n';
    for (std::size_t i = 0; i < samples; ++i) {
        const double tau = samples > 1 ? static_cast<double>(i) / static_cast<double>(samples - 1) : 0.0;
        const Vector w = basis.evaluate(tau);
        out << format_number(tau);
        for (Eigen::Index k = 0; k < w.size(); ++k) out << ',' << format_number(w[k]);
        out << '\n';
    }
    return out.str();
}

json report_json(const PararealReport& report, const PararealConfig& config,
                 double wall_seconds) {
    json fine_per = json::array();
    json coarse_per = json::array();
    for (const auto& rec : report.history) {
        fine_per.push_back(rec.fine_solves);
        coarse_per.push_back(rec.coarse_solves);
    }
    const SolveLedger& l = report.ledger;
    return {
        {"variant", report.variant},
        {"iterations", report.iterations},
        {"converged", report.converged},
        {"tolerance", config.tolerance},
        {"windows", config.windows},
        {"coarse_step", config.coarse_step},
        {"fine_step", config.fine_step},
        {"jump_metric", to_string(config.metric)},
        {"mpde_lift", to_string(config.mpde_lift)},
        {"jumps", report.jumps},
        {"ledger",
         {{"state_size", l.state_size},
          {"fine_solves", l.fine_solves},
          {"fine_system_size", l.fine_system_size},
          {"coarse_solves", l.coarse_solves},
          {"coarse_system_size", l.coarse_system_size},
          {"fine_solves_per_iteration", std::move(fine_per)},
          {"coarse_solves_per_iteration", std::move(coarse_per)},
          {"cost_units", l.cost_units()}}},
        {"wall_time_seconds", wall_seconds},
    };
}

std::string verify_ledger(const json& report) {
    try {
        const json& l = report.at("ledger");
        const auto n = l.at("state_size").get<double>();
        if (!(n > 0.0)) return "ledger.state_size must be positive";
        const auto fine = l.at("fine_solves").get<std::size_t>();
        const auto coarse = l.at("coarse_solves").get<std::size_t>();
        const double expected = static_cast<double>(fine) * l.at("fine_system_size").get<double>() / n +
                                static_cast<double>(coarse) * l.at("coarse_system_size").get<double>() / n;
        const double cost = l.at("cost_units").get<double>();
        if (!close(cost, expected))
            return "ledger.cost_units " + format_number(cost) + " != " + format_number(expected);

        const auto iterations = report.at("iterations").get<std::size_t>();
        const json& fine_per = l.at("fine_solves_per_iteration");
        const json& coarse_per = l.at("coarse_solves_per_iteration");
        if (fine_per.size() != iterations || coarse_per.size() != iterations)
            return "per-iteration solve lists do not match the iteration count";
        std::size_t fine_sum = 0;
        std::size_t coarse_sum = 0;
        for (const auto& v : fine_per) fine_sum += v.get<std::size_t>();
        for (const auto& v : coarse_per) coarse_sum += v.get<std::size_t>();
        if (fine_sum != fine) return "ledger.fine_solves does not equal the per-iteration sum";
        if (coarse_sum != coarse) return "ledger.coarse_solves does not equal the per-iteration sum";
        if (report.at("jumps").size() != iterations) return "jumps length does not match iterations";
    } catch (const json::exception& e) {
        return std::string("malformed report: ") + e.what();
    }
    return {};
}

RunOutcome run_benchmark(const RunConfig& config, bool write_outputs) {
    const LinearDaeModel model = config.build_model();
    const auto start = std::chrono::steady_clock::now();
    RunOutcome outcome;
    outcome.report = parareal_run(model, config.parareal);
    outcome.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!write_outputs) return outcome;

    const std::filesystem::path dir(config.outputs.directory);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create output directory " + dir.string() + ": " + ec.message());

    auto emit = [&](const char* name, const std::string& content) {
        write_file(dir / name, content);
        outcome.files.push_back(dir / name);
    };
    if (config.outputs.solution) {
        const auto windows = fine_trajectories(model, config.parareal, outcome.report.final_states());
        emit("solution.csv", solution_csv(windows));
    }
    if (config.outputs.convergence) emit("convergence.csv", convergence_csv(outcome.report));
    if (config.outputs.basis && config.parareal.coarse.kind == CoarseVariant::Kind::Mpde)
        emit("basis.csv", basis_csv(basis_for_model(model, config.parareal.coarse.order)));
    if (config.outputs.report)
        emit("report.json",
             report_json(outcome.report, config.parareal, outcome.wall_seconds).dump(2) + "\n");
    return outcome;
}

std::string Comparison::to_text() const {
    std::ostringstream out;
    out << std::left << std::setw(12) << "variant" << std::right << std::setw(11) << "iterations"
        << std::setw(11) << "converged" << std::setw(12) << "cost_units" << std::setw(14)
        << "final_jump" << '\n';
    for (const auto& r : rows) {
        out << std::left << std::setw(12) << r.variant << std::right;
        if (!r.ok) {
            out << "  error: " << r.error << '\n';
            continue;
        }
        out << std::setw(11) << r.iterations << std::setw(11) << (r.converged ? "yes" : "no")
            << std::setw(12) << format_number(r.cost_units) << std::setw(14) << std::scientific
            << std::setprecision(3) << r.final_jump << std::defaultfloat << '\n';
    }
    return out.str();
}

std::string Comparison::to_csv() const {
    std::ostringstream out;
    out << "variant,iterations,converged,cost_units,final_jump,fine_solves,coarse_solves,"
           "coarse_system_size,error\n";
    for (const auto& r : rows) {
        out << r.variant << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << ','
            << format_number(r.cost_units) << ',' << format_number(r.final_jump) << ','
            << r.fine_solves << ',' << r.coarse_solves << ',' << r.coarse_system_size << ','
            << '"' << r.error << '"' << '\n';
    }
    return out.str();
}

Comparison compare_variants(const RunConfig& config, const std::vector<std::string>& variants) {
    const LinearDaeModel model = config.build_model();
    Comparison table;
    for (const auto& name : variants) {
        ComparisonRow row;
        row.variant = name;
        try {
            PararealConfig pc = config.parareal;
            pc.coarse = CoarseVariant::parse(name);
            const PararealReport r = parareal_run(model, pc);
            row.ok = true;
            row.iterations = r.iterations;
            row.converged = r.converged;
            row.cost_units = r.cost_units();
            row.final_jump = r.jumps.empty() ? 0.0 : r.jumps.back();
            row.fine_solves = r.ledger.fine_solves;
            row.coarse_solves = r.ledger.coarse_solves;
            row.coarse_system_size = r.ledger.coarse_system_size;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::vector<std::string> split_variants(std::string_view list) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= list.size()) {
        const auto comma = list.find(',', start);
        const auto end = comma == std::string_view::npos ? list.size() : comma;
        auto item = list.substr(start, end - start);
        while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
        if (!item.empty()) out.emplace_back(item);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace pitsim
