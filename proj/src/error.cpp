#include "pitsim/error.hpp"

namespace pitsim {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::SingularSystem: return "SingularSystem";
        case ErrorCode::NonpositiveStep: return "NonpositiveStep";
        case ErrorCode::DegenerateBasis: return "DegenerateBasis";
        case ErrorCode::NonPeriodicSource: return "NonPeriodicSource";
        case ErrorCode::DegenerateNorm: return "DegenerateNorm";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ValidationError: return "ValidationError";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

}  // namespace pitsim
