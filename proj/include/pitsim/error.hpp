#pragma once

#include <stdexcept>
#include <string>

namespace pitsim {

enum class ErrorCode {
    InvalidArgument,
    SingularSystem,
    NonpositiveStep,
    DegenerateBasis,
    NonPeriodicSource,
    DegenerateNorm,
    ParseError,
    ValidationError,
    Io,
};

[[nodiscard]] const char* to_string(ErrorCode code) noexcept;

/// Exception type thrown by every pitsim routine. The code is what the C API
/// maps onto its status values.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace pitsim
