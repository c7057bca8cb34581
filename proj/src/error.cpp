#include "frontlab/error.hpp"

namespace frontlab {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::ConfigError: return "ConfigError";
        case ErrorKind::IoError: return "IoError";
        case ErrorKind::UnknownModel: return "UnknownModel";
        case ErrorKind::ParameterOutOfRange: return "ParameterOutOfRange";
        case ErrorKind::NotApplicable: return "NotApplicable";
        case ErrorKind::DegenerateLeadingCoefficient: return "DegenerateLeadingCoefficient";
        case ErrorKind::DegenerateFamily: return "DegenerateFamily";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::SingularJacobian: return "SingularJacobian";
        case ErrorKind::StepFailure: return "StepFailure";
        case ErrorKind::FoldDetected: return "FoldDetected";
        case ErrorKind::TrackingLost: return "TrackingLost";
        case ErrorKind::NotSimple: return "NotSimple";
        case ErrorKind::NonePinched: return "NonePinched";
        case ErrorKind::BracketInvalid: return "BracketInvalid";
        case ErrorKind::StableState: return "StableState";
        case ErrorKind::NoSolutions: return "NoSolutions";
        case ErrorKind::NoSolutionInRange: return "NoSolutionInRange";
        case ErrorKind::NoSignChange: return "NoSignChange";
        case ErrorKind::WeakCoreDecay: return "WeakCoreDecay";
        case ErrorKind::TailBelowNoise: return "TailBelowNoise";
        case ErrorKind::InsufficientSamples: return "InsufficientSamples";
        case ErrorKind::Blowup: return "Blowup";
        case ErrorKind::FrontReachedBoundary: return "FrontReachedBoundary";
        case ErrorKind::EigFailure: return "EigFailure";
    }
    return "Unknown";
}

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument:
        case ErrorKind::ConfigError:
            return 2;
        case ErrorKind::IoError:
            return 3;
        case ErrorKind::UnknownModel:
        case ErrorKind::ParameterOutOfRange:
        case ErrorKind::NotApplicable:
            return 4;
        case ErrorKind::DegenerateLeadingCoefficient:
        case ErrorKind::DegenerateFamily:
        case ErrorKind::NotSimple:
            return 5;
        case ErrorKind::NoConvergence:
        case ErrorKind::SingularJacobian:
        case ErrorKind::StepFailure:
        case ErrorKind::FoldDetected:
        case ErrorKind::TrackingLost:
        case ErrorKind::EigFailure:
            return 6;
        case ErrorKind::NonePinched:
        case ErrorKind::BracketInvalid:
        case ErrorKind::StableState:
        case ErrorKind::NoSolutions:
        case ErrorKind::NoSolutionInRange:
        case ErrorKind::NoSignChange:
            return 7;
        case ErrorKind::WeakCoreDecay:
        case ErrorKind::TailBelowNoise:
        case ErrorKind::InsufficientSamples:
            return 8;
        case ErrorKind::Blowup:
        case ErrorKind::FrontReachedBoundary:
            return 9;
    }
    return 1;
}

}  // namespace frontlab
