#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "pitsim/config.hpp"
#include "pitsim/error.hpp"
#include "pitsim/runner.hpp"

using namespace pitsim;

namespace {

const std::filesystem::path kData = PITSIM_TEST_DATA_DIR;

// Returns the error raised by parse_config, or fails the test.
Error parse_error(const std::string& text) {
    try {
        (void)parse_config(text);
    } catch (const Error& e) {
        return e;
    }
    FAIL("parse_config accepted: " << text);
    return Error(ErrorCode::InvalidArgument, "unreachable");
}

bool starts_with(const std::string& s, const std::string& prefix) {
    return s.rfind(prefix, 0) == 0;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("pitsim_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("bundled configs parse") {
    const RunConfig mpde = load_config(kData / "buck_mpde3.json");
    CHECK(mpde.preset == "buck");
    CHECK(mpde.parareal.windows == 40);
    CHECK(mpde.parareal.coarse.to_string() == "mpde:3");
    CHECK(mpde.outputs.basis);

    const RunConfig inline_model = load_config(kData / "buck_inline.json");
    REQUIRE(inline_model.model);
    CHECK(inline_model.model->a() == buck_preset().a());
    CHECK(inline_model.model->b() == buck_preset().b());
    CHECK(inline_model.parareal.coarse_step == doctest::Approx(3e-4));

    const RunConfig rc = load_config(kData / "rc_sinusoid.json");
    CHECK(rc.model->size() == 1);
    CHECK(rc.model->source().components().size() == 2);

    const Error e = [] {
        try {
            (void)load_config(kData / "bad_unknown_key.json");
        } catch (const Error& err) {
            return err;
        }
        return Error(ErrorCode::InvalidArgument, "accepted");
    }();
    CHECK(e.code() == ErrorCode::ValidationError);
    CHECK(starts_with(e.what(), "parareal.windows"));

    try {
        (void)load_config(kData / "does_not_exist.json");
        FAIL("expected Io");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::Io);
    }
}

TEST_CASE("preset and model are mutually exclusive") {
    const Error both = parse_error(R"({"preset": "buck", "model": {"A": [[1]], "B": [[1]], "T": 1}})");
    CHECK(both.code() == ErrorCode::ValidationError);
    const Error neither = parse_error(R"({"parareal": {"N": 4}})");
    CHECK(neither.code() == ErrorCode::ValidationError);
}

TEST_CASE("validation errors name the field") {
    struct Case {
        const char* text;
        const char* path;
    };
    for (const Case c : {
             Case{R"({"preset": "buck", "parareal": {"N": 0}})", "parareal.N"},
             Case{R"({"preset": "buck", "parareal": {"N": -3}})", "parareal.N"},
             Case{R"({"preset": "buck", "parareal": {"tol": 0}})", "parareal.tol"},
             Case{R"({"preset": "buck", "parareal": {"coarse_variant": "mpde:x"}})",
                  "parareal.coarse_variant"},
             Case{R"({"preset": "buck", "parareal": {"fine_step": 1e-3}})", "parareal.fine_step"},
             Case{R"({"preset": "buck", "parareal": {"jump_metric": "other"}})",
                  "parareal.jump_metric"},
             Case{R"({"preset": "buck", "parareal": {"mpde_lift": "steady"}})",
                  "parareal.mpde_lift"},
             Case{R"({"preset": "boost"})", "preset"},
             Case{R"({"preset": "buck", "extra": 1})", "extra"},
             Case{R"({"preset": "buck", "outputs": {"csv": true}})", "outputs.csv"},
             Case{R"({"preset": "buck", "outputs": {"solution": "yes"}})", "outputs.solution"},
             Case{R"({"model": {"A": [[1, 0], [0, 1]], "B": [[1]], "T": 1},
                      "parareal": {"fine_step": 0.1}})",
                  "model.B"},
             Case{R"({"model": {"A": [[1, 0], [0]], "B": [[1]], "T": 1}})", "model.A[1]"},
             Case{R"({"model": {"A": [[1]], "B": [[1]], "T": 0}, "parareal": {"fine_step": 0.1}})",
                  "model.T"},
             Case{R"({"model": {"A": [[1]], "B": [[1]], "T": 1, "x0": [1, 2]},
                      "parareal": {"fine_step": 0.1}})",
                  "model.x0"},
             Case{R"({"model": {"A": [[1]], "B": [[1]], "T": 1}, "parareal": {}})",
                  "parareal.fine_step"},
             Case{R"({"model": {"A": [[1]], "B": [[1]], "T": 1,
                      "source": {"kind": "pwm", "amplitude": 1, "frequency": 10, "duty": 1.5,
                                 "channel": 0}},
                      "parareal": {"fine_step": 0.1}})",
                  "model.source.duty"},
             Case{R"({"model": {"A": [[1]], "B": [[1]], "T": 1,
                      "source": [{"kind": "constant", "value": [1]}, {"kind": "square"}]},
                      "parareal": {"fine_step": 0.1}})",
                  "model.source[1].kind"},
             Case{R"({"model": {"A": [[1]], "B": [[1]], "T": 1,
                      "source": {"kind": "sinusoid", "channel": 0, "amplitude": 1,
                                 "frequency": 1, "offset": 2}},
                      "parareal": {"fine_step": 0.1}})",
                  "model.source.offset"},
             Case{R"({"model": {"A": [[1]], "B": [[1]], "T": 1,
                      "source": {"kind": "constant", "value": [1, 2]}},
                      "parareal": {"fine_step": 0.1}})",
                  "model.source"},
         }) {
        CAPTURE(c.text);
        const Error e = parse_error(c.text);
        CHECK(e.code() == ErrorCode::ValidationError);
        CHECK_MESSAGE(starts_with(e.what(), std::string(c.path) + ":"), e.what());
    }
}

TEST_CASE("malformed JSON is a parse error") {
    for (const char* text : {"", "{", R"({"preset": "buck",})", "[1, 2"}) {
        const Error e = parse_error(text);
        CHECK(e.code() == ErrorCode::ParseError);
    }
    // Well-formed but not an object.
    CHECK(parse_error("[1, 2]").code() == ErrorCode::ValidationError);
}

TEST_CASE("defaults") {
    const RunConfig c = parse_config(R"({"preset": "buck"})");
    CHECK(c.parareal.windows == 40);
    CHECK(c.parareal.coarse_step == doctest::Approx(3e-4));
    CHECK(c.parareal.fine_step == 1e-6);
    CHECK(c.parareal.tolerance == 1e-6);
    CHECK(c.parareal.coarse.kind == CoarseVariant::Kind::Classical);
    CHECK(c.parareal.metric == JumpMetric::SuccessiveIterates);
    CHECK(c.parareal.mpde_lift == MpdeLift::PeriodicRipple);
    CHECK(parse_config(R"({"preset": "buck", "parareal": {"mpde_lift": "zero"}})").parareal.mpde_lift ==
          MpdeLift::ZeroRipple);
    CHECK(c.parareal.workers >= 1);
    CHECK(c.parareal.workers <= 40);
    CHECK(c.outputs.directory == "out");
    CHECK(c.outputs.solution);
    CHECK(c.outputs.convergence);
    CHECK(c.outputs.report);
    CHECK_FALSE(c.outputs.basis);
}

TEST_CASE("preset JSON round-trips") {
    RunConfig preset = preset_config("buck");
    preset.parareal.coarse = CoarseVariant::parse("fft:3");
    preset.parareal.mpde_lift = MpdeLift::ZeroRipple;
    const std::string text = config_to_json(preset).dump();
    const RunConfig back = parse_config(text);
    REQUIRE(back.model);
    const LinearDaeModel m = preset.build_model();
    CHECK(back.model->a() == m.a());
    CHECK(back.model->b() == m.b());
    CHECK(back.model->x0() == m.x0());
    CHECK(back.model->t_end() == m.t_end());
    for (double t : {0.0, 1e-4, 1.39e-4, 1.41e-4, 5.5e-3})
        CHECK(eval_source(*back.model, t) == eval_source(m, t));
    CHECK(back.parareal.coarse.to_string() == "fft:3");
    CHECK(back.parareal.mpde_lift == MpdeLift::ZeroRipple);
    CHECK(back.parareal.coarse_step == preset.parareal.coarse_step);
    CHECK(config_to_json(back) == config_to_json(preset));
    CHECK_THROWS_AS((void)preset_config("boost"), Error);
}

TEST_CASE("CSV and JSON artifacts") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);

    RunConfig config = parse_config(R"({"preset": "buck", "parareal": {"coarse_variant": "mpde:3"}})");
    config.outputs.directory = scratch_dir("artifacts").string();
    config.outputs.basis = true;
    const RunOutcome outcome = run_benchmark(config);
    CHECK(outcome.exit_code() == kExitConverged);
    CHECK(outcome.files.size() == 4);

    const auto dir = std::filesystem::path(config.outputs.directory);
    std::istringstream conv(slurp(dir / "convergence.csv"));
    std::string line;
    std::getline(conv, line);
    CHECK(line == "iteration,jump,cumulative_cost_units");
    int rows = 0;
    std::string last;
    while (std::getline(conv, line)) {
        ++rows;
        last = line;
    }
    CHECK(rows == static_cast<int>(outcome.report.iterations));
    CHECK(last.rfind("7,", 0) == 0);
    CHECK(last.substr(last.rfind(',') + 1) == "2940");

    std::istringstream sol(slurp(dir / "solution.csv"));
    std::getline(sol, line);
    CHECK(line == "t,x_1,x_2");
    rows = 0;
    while (std::getline(sol, line)) ++rows;
    CHECK(rows == 40 * 301);

    std::istringstream basis(slurp(dir / "basis.csv"));
    std::getline(basis, line);
    CHECK(line == "tau,w_1,w_2,w_3");

    const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
    CHECK(report["iterations"] == 7);
    CHECK(report["converged"] == true);
    CHECK(report["ledger"]["cost_units"] == 2940.0);
    CHECK(report["ledger"]["coarse_system_size"] == 6);
    CHECK(report["mpde_lift"] == "periodic");
    CHECK(report.contains("wall_time_seconds"));
    CHECK(verify_ledger(report).empty());

    auto tampered = report;
    tampered["ledger"]["cost_units"] = 3000.0;
    CHECK_FALSE(verify_ledger(tampered).empty());
    tampered = report;
    tampered["ledger"]["fine_solves"] = 2000;
    CHECK_FALSE(verify_ledger(tampered).empty());
    tampered = report;
    tampered["ledger"]["fine_solves_per_iteration"].push_back(300);
    CHECK_FALSE(verify_ledger(tampered).empty());
    CHECK_FALSE(verify_ledger(nlohmann::json::object()).empty());

    std::filesystem::remove_all(dir);
}

TEST_CASE("disabled outputs are not written") {
    RunConfig config = parse_config(R"({"preset": "buck", "parareal": {"coarse_variant": "dc"},
                                        "outputs": {"solution": false, "report": false}})");
    config.outputs.directory = scratch_dir("partial").string();
    const RunOutcome outcome = run_benchmark(config);
    CHECK(outcome.files.size() == 1);
    CHECK(std::filesystem::exists(std::filesystem::path(config.outputs.directory) / "convergence.csv"));
    CHECK_FALSE(std::filesystem::exists(std::filesystem::path(config.outputs.directory) / "solution.csv"));
    std::filesystem::remove_all(config.outputs.directory);
}

TEST_CASE("iteration limit gives exit code 2") {
    const RunConfig config = load_config(kData / "buck_one_iteration.json");
    const RunOutcome outcome = run_benchmark(config, false);
    CHECK(outcome.exit_code() == kExitNotConverged);
    CHECK(outcome.report.iterations == 1);
}

TEST_CASE("variant comparison") {
    const RunConfig config = preset_config("buck");
    CHECK(split_variants(" classical, dc ,,mpde:3") ==
          std::vector<std::string>{"classical", "dc", "mpde:3"});

    const Comparison table =
        compare_variants(config, {"classical", "dc", "mpde:1", "mpde:3"});
    REQUIRE(table.rows.size() == 4);
    const double costs[] = {3060, 2720, 2720, 2940};
    const std::size_t iterations[] = {9, 8, 8, 7};
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(table.rows[i].ok);
        CHECK(table.rows[i].iterations == iterations[i]);
        CHECK(table.rows[i].cost_units == costs[i]);
    }
    CHECK(table.to_text().find("mpde:3") != std::string::npos);
    const std::string csv = table.to_csv();
    CHECK(csv.rfind("variant,iterations,converged,cost_units", 0) == 0);
    CHECK(csv.find("\nclassical,9,1,3060,") != std::string::npos);

    const Comparison single = compare_variants(config, {"dc"});
    CHECK(single.rows.size() == 1);

    const Comparison dup = compare_variants(config, {"mpde:3", "mpde:3"});
    CHECK(dup.rows[0].iterations == dup.rows[1].iterations);
    CHECK(dup.rows[0].cost_units == dup.rows[1].cost_units);
    CHECK(dup.rows[0].final_jump == dup.rows[1].final_jump);

    const Comparison bad = compare_variants(config, {"bogus", "dc"});
    CHECK_FALSE(bad.rows[0].ok);
    CHECK_FALSE(bad.rows[0].error.empty());
    CHECK(bad.rows[1].ok);
    CHECK(bad.to_text().find("error") != std::string::npos);
}
