#include "pitsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <thread>

#include "pitsim/error.hpp"

namespace pitsim {

using nlohmann::json;

namespace {

constexpr std::string_view kBuckPreset = "buck";

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw Error(ErrorCode::ValidationError, path + ": " + what);
}

std::string child(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
}

std::string child(const std::string& path, std::size_t index) {
    return path + "[" + std::to_string(index) + "]";
}

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
}

void reject_unknown(const json& j, const std::string& path,
                    std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, value] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            fail(child(path, key), "unknown key");
    }
}

double read_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(path, "must be finite");
    return v;
}

std::size_t read_count(const json& j, const std::string& path) {
    if (j.is_number_unsigned()) return j.get<std::size_t>();
    if (j.is_number_integer()) fail(path, "must be non-negative");
    fail(path, "expected a non-negative integer");
}

bool read_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) fail(path, "expected true or false");
    return j.get<bool>();
}

std::string read_string(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

Vector read_vector(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of numbers");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = read_number(j[i], child(path, i));
    return v;
}

Matrix read_matrix(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of rows");
    const std::size_t rows = j.size();
    std::size_t cols = 0;
    Matrix m;
    for (std::size_t r = 0; r < rows; ++r) {
        const Vector row = read_vector(j[r], child(path, r));
        if (r == 0) {
            cols = static_cast<std::size_t>(row.size());
            m.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        } else if (static_cast<std::size_t>(row.size()) != cols) {
            fail(child(path, r), "row length differs from row 0");
        }
        m.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    return m;
}

template <class T>
T optional_field(const json& j, std::string_view key, T fallback,
                 T (*reader)(const json&, const std::string&), const std::string& path) {
    const auto it = j.find(key);
    return it == j.end() ? fallback : reader(*it, child(path, key));
}

const json& required_field(const json& j, std::string_view key, const std::string& path) {
    const auto it = j.find(key);
    if (it == j.end()) fail(child(path, key), "missing required field");
    return *it;
}

SourceComponent read_component(const json& j, const std::string& path) {
    require_object(j, path);
    const std::string kind = read_string(required_field(j, "kind", path), child(path, "kind"));
    auto number = [&](std::string_view key) {
        return read_number(required_field(j, key, path), child(path, key));
    };
    auto channel = [&] { return read_count(required_field(j, "channel", path), child(path, "channel")); };

    if (kind == "pwm") {
        reject_unknown(j, path, {"kind", "amplitude", "frequency", "duty", "channel"});
        PwmSource s;
        s.amplitude = number("amplitude");
        s.switching_frequency = number("frequency");
        s.duty_cycle = number("duty");
        s.channel = channel();
        if (!(s.switching_frequency > 0.0)) fail(child(path, "frequency"), "must be positive");
        if (!(s.duty_cycle > 0.0 && s.duty_cycle < 1.0)) fail(child(path, "duty"), "must lie in (0, 1)");
        return s;
    }
    if (kind == "constant") {
        reject_unknown(j, path, {"kind", "value"});
        return ConstantSource{read_vector(required_field(j, "value", path), child(path, "value"))};
    }
    if (kind == "sinusoid") {
        reject_unknown(j, path, {"kind", "channel", "amplitude", "frequency", "phase"});
        SinusoidSource s;
        s.channel = channel();
        s.amplitude = number("amplitude");
        s.frequency = number("frequency");
        s.phase = optional_field<double>(j, "phase", 0.0, read_number, path);
        return s;
    }
    if (kind == "fourier") {
        reject_unknown(j, path, {"kind", "channel", "fundamental", "mean", "harmonics"});
        FourierSeriesSource s;
        s.channel = channel();
        s.fundamental = number("fundamental");
        s.mean = optional_field<double>(j, "mean", 0.0, read_number, path);
        if (!(s.fundamental > 0.0)) fail(child(path, "fundamental"), "must be positive");
        if (const auto it = j.find("harmonics"); it != j.end()) {
            const std::string hpath = child(path, "harmonics");
            if (!it->is_array()) fail(hpath, "expected an array of [re, im] pairs");
            for (std::size_t m = 0; m < it->size(); ++m) {
                const json& pair = (*it)[m];
                if (!pair.is_array() || pair.size() != 2)
                    fail(child(hpath, m), "expected a [re, im] pair");
                s.harmonics.emplace_back(read_number(pair[0], child(child(hpath, m), 0)),
                                         read_number(pair[1], child(child(hpath, m), 1)));
            }
        }
        return s;
    }
    fail(child(path, "kind"), "unknown source kind '" + kind + "'");
}

SourceTerm read_source(const json& j, const std::string& path) {
    SourceTerm source;
    if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) source.add(read_component(j[i], child(path, i)));
    } else {
        source.add(read_component(j, path));
    }
    return source;
}

LinearDaeModel read_model(const json& j, const std::string& path) {
    require_object(j, path);
    reject_unknown(j, path, {"A", "B", "x0", "t0", "T", "source"});
    Matrix a = read_matrix(required_field(j, "A", path), child(path, "A"));
    Matrix b = read_matrix(required_field(j, "B", path), child(path, "B"));
    if (a.rows() != a.cols()) fail(child(path, "A"), "must be square");
    if (b.rows() != a.rows() || b.cols() != a.cols()) fail(child(path, "B"), "must match the shape of A");
    const auto n = a.rows();
    Vector x0 = Vector::Zero(n);
    if (const auto it = j.find("x0"); it != j.end()) {
        x0 = read_vector(*it, child(path, "x0"));
        if (x0.size() != n) fail(child(path, "x0"), "length must equal the number of states");
    }
    const double t0 = optional_field<double>(j, "t0", 0.0, read_number, path);
    const double t_end = read_number(required_field(j, "T", path), child(path, "T"));
    if (!(t_end > t0)) fail(child(path, "T"), "must exceed t0");
    SourceTerm source;
    if (const auto it = j.find("source"); it != j.end()) source = read_source(*it, child(path, "source"));
    try {
        source.check_dimension(static_cast<std::size_t>(n));
    } catch (const Error& e) {
        fail(child(path, "source"), e.what());
    }
    return LinearDaeModel(std::move(a), std::move(b), std::move(source), std::move(x0), t0, t_end);
}

JumpMetric read_metric(const json& j, const std::string& path) {
    const std::string s = read_string(j, path);
    if (s == "successive") return JumpMetric::SuccessiveIterates;
    if (s == "defect") return JumpMetric::FineCoarseDefect;
    fail(path, "expected 'successive' or 'defect'");
}

MpdeLift read_lift(const json& j, const std::string& path) {
    try {
        return parse_mpde_lift(read_string(j, path));
    } catch (const Error& e) {
        if (e.code() != ErrorCode::ValidationError) throw;
        fail(path, "expected 'periodic' or 'zero'");
    }
}

std::size_t default_workers(std::size_t windows) {
    const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    return std::clamp<std::size_t>(windows, 1, hw);
}

PararealConfig read_parareal(const json& j, const std::string& path, const LinearDaeModel& model,
                             bool preset) {
    require_object(j, path);
    reject_unknown(j, path, {"N", "coarse_step", "fine_step", "tol", "max_iter", "coarse_variant",
                             "workers", "jump_metric", "mpde_lift"});
    PararealConfig c;
    c.windows = optional_field<std::size_t>(j, "N", 40, read_count, path);
    if (c.windows < 1) fail(child(path, "N"), "must be at least 1");
    const double window = (model.t_end() - model.t0()) / static_cast<double>(c.windows);
    c.coarse_step = optional_field<double>(j, "coarse_step", window, read_number, path);
    if (preset) {
        c.fine_step = optional_field<double>(j, "fine_step", 1e-6, read_number, path);
    } else {
        c.fine_step = read_number(required_field(j, "fine_step", path), child(path, "fine_step"));
    }
    c.tolerance = optional_field<double>(j, "tol", 1e-6, read_number, path);
    c.max_iterations = optional_field<std::size_t>(j, "max_iter", 50, read_count, path);
    if (const auto it = j.find("coarse_variant"); it != j.end()) {
        const std::string vpath = child(path, "coarse_variant");
        try {
            c.coarse = CoarseVariant::parse(read_string(*it, vpath));
        } catch (const Error& e) {
            fail(vpath, e.what());
        }
    }
    c.workers = optional_field<std::size_t>(j, "workers", default_workers(c.windows), read_count,
                                            path);
    c.metric = optional_field<JumpMetric>(j, "jump_metric", JumpMetric::SuccessiveIterates,
                                          read_metric, path);
    c.mpde_lift = optional_field<MpdeLift>(j, "mpde_lift", MpdeLift::PeriodicRipple, read_lift, path);
    try {
        c.validate();
    } catch (const Error& e) {
        // validate() already prefixes "parareal.<field>".
        throw Error(ErrorCode::ValidationError, e.what());
    }
    return c;
}

OutputOptions read_outputs(const json& j, const std::string& path) {
    require_object(j, path);
    reject_unknown(j, path, {"dir", "solution", "convergence", "basis", "report"});
    OutputOptions o;
    o.directory = optional_field<std::string>(j, "dir", o.directory, read_string, path);
    o.solution = optional_field<bool>(j, "solution", o.solution, read_bool, path);
    o.convergence = optional_field<bool>(j, "convergence", o.convergence, read_bool, path);
    o.basis = optional_field<bool>(j, "basis", o.basis, read_bool, path);
    o.report = optional_field<bool>(j, "report", o.report, read_bool, path);
    return o;
}

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

json component_json(const SourceComponent& component) {
    return std::visit(
        [](const auto& s) -> json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, PwmSource>) {
                if (!s.has_default_waveforms())
                    throw Error(ErrorCode::InvalidArgument,
                                "PWM sources with injected waveforms cannot be serialized");
                return {{"kind", "pwm"},           {"amplitude", s.amplitude},
                        {"frequency", s.switching_frequency}, {"duty", s.duty_cycle},
                        {"channel", s.channel}};
            } else if constexpr (std::is_same_v<T, ConstantSource>) {
                return {{"kind", "constant"}, {"value", vector_json(s.value)}};
            } else if constexpr (std::is_same_v<T, SinusoidSource>) {
                return {{"kind", "sinusoid"},  {"channel", s.channel},
                        {"amplitude", s.amplitude}, {"frequency", s.frequency},
                        {"phase", s.phase}};
            } else {
                json harmonics = json::array();
                for (const auto& c : s.harmonics) harmonics.push_back({c.real(), c.imag()});
                return {{"kind", "fourier"}, {"channel", s.channel},
                        {"fundamental", s.fundamental}, {"mean", s.mean},
                        {"harmonics", std::move(harmonics)}};
            }
        },
        component);
}

}  // namespace

std::string_view to_string(JumpMetric metric) {
    return metric == JumpMetric::SuccessiveIterates ? "successive" : "defect";
}

LinearDaeModel RunConfig::build_model() const {
    if (model) return *model;
    if (preset && *preset == kBuckPreset) return buck_preset();
    throw Error(ErrorCode::ValidationError, "preset: unknown preset");
}

RunConfig parse_config(std::string_view text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, std::string("<root>: malformed JSON: ") + e.what());
    }
    require_object(root, "");
    reject_unknown(root, "", {"preset", "model", "parareal", "outputs"});

    const bool has_preset = root.contains("preset");
    const bool has_model = root.contains("model");
    if (has_preset == has_model)
        fail(has_preset ? "model" : "preset", "exactly one of 'preset' and 'model' must be given");

    RunConfig config;
    if (has_preset) {
        const std::string name = read_string(root["preset"], "preset");
        if (name != kBuckPreset) fail("preset", "unknown preset '" + name + "'");
        config.preset = name;
    } else {
        config.model = read_model(root["model"], "model");
    }
    const LinearDaeModel model = config.build_model();
    config.parareal = read_parareal(root.contains("parareal") ? root["parareal"] : json::object(),
                                    "parareal", model, has_preset);
    if (root.contains("outputs")) config.outputs = read_outputs(root["outputs"], "outputs");
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

RunConfig preset_config(std::string_view name) {
    if (name != kBuckPreset) fail("preset", "unknown preset '" + std::string(name) + "'");
    return parse_config(R"({"preset": "buck"})");
}

json config_to_json(const RunConfig& config) {
    const LinearDaeModel model = config.build_model();
    json source = json::array();
    for (const auto& c : model.source().components()) source.push_back(component_json(c));
    const PararealConfig& p = config.parareal;
    return {
        {"model",
         {{"A", matrix_json(model.a())},
          {"B", matrix_json(model.b())},
          {"x0", vector_json(model.x0())},
          {"t0", model.t0()},
          {"T", model.t_end()},
          {"source", std::move(source)}}},
        {"parareal",
         {{"N", p.windows},
          {"coarse_step", p.coarse_step},
          {"fine_step", p.fine_step},
          {"tol", p.tolerance},
          {"max_iter", p.max_iterations},
          {"coarse_variant", p.coarse.to_string()},
          {"workers", p.workers},
          {"jump_metric", to_string(p.metric)},
          {"mpde_lift", to_string(p.mpde_lift)}}},
        {"outputs",
         {{"dir", config.outputs.directory},
          {"solution", config.outputs.solution},
          {"convergence", config.outputs.convergence},
          {"basis", config.outputs.basis},
          {"report", config.outputs.report}}},
    };
}

}  // namespace pitsim
