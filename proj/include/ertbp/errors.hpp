// Error taxonomy shared by every module. Each kind maps to exactly one CLI
// exit code.
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ertbp {

enum class ErrorKind {
    Config,
    InvalidArgument,
    CollisionSingularity,
    NonpositiveLeadingCoefficient,
    ToleranceNotMet,
    DegenerateStep,
    SingularJacobian,
    BudgetExceeded,
    MalformedRecord,
    UnsupportedDate,
    NetworkUnavailable,
    UpstreamFormatChange,
    LengthMismatch,
    NonConvergence,
    Io,
};

std::string_view to_string(ErrorKind kind);

/// Process exit code for `kind`. Zero is reserved for success and 1 for
/// unexpected exceptions.
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Raised by parsers; carries the 1-based line number of the offending record.
class MalformedRecord : public Error {
public:
    MalformedRecord(std::size_t line, const std::string& what)
        : Error(ErrorKind::MalformedRecord,
                "line " + std::to_string(line) + ": " + what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace ertbp
