#pragma once

// JSON run configuration with strict schema checking.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "pitsim/model.hpp"
#include "pitsim/parareal.hpp"

namespace pitsim {

struct OutputOptions {
    std::string directory = "out";
    bool solution = true;
    bool convergence = true;
    bool basis = false;
    bool report = true;
};

/// Exactly one of `preset` and `model` is set.
struct RunConfig {
    std::optional<std::string> preset;
    std::optional<LinearDaeModel> model;
    PararealConfig parareal;
    OutputOptions outputs;

    [[nodiscard]] LinearDaeModel build_model() const;
};

/// Parses and validates a config document. Malformed JSON raises ParseError,
/// schema violations raise ValidationError; both messages start with the
/// offending field path.
[[nodiscard]] RunConfig parse_config(std::string_view text);
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path);

/// The named preset with its benchmark Parareal settings. Throws
/// ValidationError for unknown names.
[[nodiscard]] RunConfig preset_config(std::string_view name);

/// Inline-model JSON document that parse_config accepts. Throws
/// InvalidArgument for sources with injected waveforms.
[[nodiscard]] nlohmann::json config_to_json(const RunConfig& config);

[[nodiscard]] std::string_view to_string(JumpMetric metric);

}  // namespace pitsim
