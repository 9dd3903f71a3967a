#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pdmp {

enum class ErrorCode {
    MissingParam,
    ConstraintViolation,
    OutOfDomain,
    NotTwoState,
    Diverged,
    NonFiniteState,
    SizeCap,
    DegenerateDerivative,
    SingularInterior,
    NotIntegrable,
    NegativeLambda,
    ParseError,
    UnknownKey,
    Io,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-readable error code. Every failure raised by
/// the library goes through this type so the CLI can map it to an exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace pdmp
