#include "hjdebt/errors.hpp"

namespace hjdebt {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Domain: return "DomainError";
        case ErrorKind::NoSolution: return "NoSolution";
        case ErrorKind::SingularSlope: return "SingularSlope";
        case ErrorKind::BracketFailure: return "BracketFailure";
        case ErrorKind::StepFailure: return "StepFailure";
        case ErrorKind::NonCauchy: return "NonCauchy";
        case ErrorKind::RestartStalled: return "RestartStalled";
        case ErrorKind::HypothesisViolated: return "HypothesisViolated";
        case ErrorKind::RegimeViolated: return "RegimeViolated";
        case ErrorKind::WitnessNotFound: return "WitnessNotFound";
        case ErrorKind::VerificationFailed: return "VerificationFailed";
        case ErrorKind::Config: return "ConfigError";
    }
    return "Unknown";
}

}  // namespace hjdebt
