#include "ertbp/errors.hpp"

namespace ertbp {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Config: return "ConfigError";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::CollisionSingularity: return "CollisionSingularity";
        case ErrorKind::NonpositiveLeadingCoefficient: return "NonpositiveLeadingCoefficient";
        case ErrorKind::ToleranceNotMet: return "ToleranceNotMet";
        case ErrorKind::DegenerateStep: return "DegenerateStep";
        case ErrorKind::SingularJacobian: return "SingularJacobian";
        case ErrorKind::BudgetExceeded: return "BudgetExceeded";
        case ErrorKind::MalformedRecord: return "MalformedRecord";
        case ErrorKind::UnsupportedDate: return "UnsupportedDate";
        case ErrorKind::NetworkUnavailable: return "NetworkUnavailable";
        case ErrorKind::UpstreamFormatChange: return "UpstreamFormatChange";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::NonConvergence: return "NonConvergence";
        case ErrorKind::Io: return "IoError";
    }
    return "Unknown";
}

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Config: return 2;
        case ErrorKind::InvalidArgument: return 3;
        case ErrorKind::CollisionSingularity: return 10;
        case ErrorKind::NonpositiveLeadingCoefficient: return 11;
        case ErrorKind::ToleranceNotMet: return 12;
        case ErrorKind::DegenerateStep: return 13;
        case ErrorKind::SingularJacobian: return 14;
        case ErrorKind::BudgetExceeded: return 15;
        case ErrorKind::MalformedRecord: return 16;
        case ErrorKind::UnsupportedDate: return 17;
        case ErrorKind::NetworkUnavailable: return 18;
        case ErrorKind::UpstreamFormatChange: return 19;
        case ErrorKind::LengthMismatch: return 20;
        case ErrorKind::NonConvergence: return 21;
        case ErrorKind::Io: return 22;
    }
    return 1;
}

}  // namespace ertbp
