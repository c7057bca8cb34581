#pragma once

#include <stdexcept>
#include <string>

namespace frontlab {

enum class ErrorKind {
    InvalidArgument,
    ConfigError,
    IoError,
    UnknownModel,
    ParameterOutOfRange,
    NotApplicable,
    DegenerateLeadingCoefficient,
    DegenerateFamily,
    NoConvergence,
    SingularJacobian,
    StepFailure,
    FoldDetected,
    TrackingLost,
    NotSimple,
    NonePinched,
    BracketInvalid,
    StableState,
    NoSolutions,
    NoSolutionInRange,
    NoSignChange,
    WeakCoreDecay,
    TailBelowNoise,
    InsufficientSamples,
    Blowup,
    FrontReachedBoundary,
    EigFailure,
};

const char* to_string(ErrorKind kind);

/// Process exit code for an error family (0 is reserved for success).
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace frontlab
