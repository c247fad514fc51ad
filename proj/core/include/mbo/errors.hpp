// Exception types used across the library. The CLI maps them onto exit codes:
// ConfigInvalid -> 2, NumericalFailure (and children) -> 3,
// InvariantViolation -> 4.
#pragma once

#include <stdexcept>
#include <string>

namespace mbo {

struct ConfigInvalid : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvariantViolation : std::logic_error {
    using std::logic_error::logic_error;
};

struct NonZeroMean : NumericalFailure {
    explicit NonZeroMean(const std::string& what) : NumericalFailure(what) {}
};

struct SizeMismatch : InvariantViolation {
    explicit SizeMismatch(const std::string& what) : InvariantViolation(what) {}
};

struct BlowupDetected : NumericalFailure {
    explicit BlowupDetected(const std::string& what) : NumericalFailure(what) {}
};

struct GenerationTooLarge : ConfigInvalid {
    explicit GenerationTooLarge(const std::string& what) : ConfigInvalid(what) {}
};

struct ModeUnsupported : ConfigInvalid {
    explicit ModeUnsupported(const std::string& what) : ConfigInvalid(what) {}
};

struct ConstraintViolated : InvariantViolation {
    explicit ConstraintViolated(const std::string& what) : InvariantViolation(what) {}
};

struct ZeroMu : ConfigInvalid {
    explicit ZeroMu(const std::string& what) : ConfigInvalid(what) {}
};

struct InvalidRegularity : ConfigInvalid {
    explicit InvalidRegularity(const std::string& what) : ConfigInvalid(what) {}
};

struct InconsistentPair : NumericalFailure {
    explicit InconsistentPair(const std::string& what) : NumericalFailure(what) {}
};

}  // namespace mbo
