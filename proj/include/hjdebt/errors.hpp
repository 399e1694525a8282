#pragma once

#include <stdexcept>
#include <string>

namespace hjdebt {

enum class ErrorKind {
    Domain,
    NoSolution,
    SingularSlope,
    BracketFailure,
    StepFailure,
    NonCauchy,
    RestartStalled,
    HypothesisViolated,
    RegimeViolated,
    WitnessNotFound,
    VerificationFailed,
    Config,
};

const char* to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace hjdebt
