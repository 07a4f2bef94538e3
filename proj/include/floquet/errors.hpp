#pragma once

#include <stdexcept>
#include <string>

namespace floquet {

enum class ErrorCode {
    DivisionByZeroInterval,
    DimensionMismatch,
    DecayTooWeak,
    DomainError,
    UnsupportedField,
    MalformedInput,
    NoConvergence,
    SingularJacobian,
    LogBranchFailure,
    NotCertifiablyInvertible,
    NoDominanceBelowCutoff,
    InvalidArgument,
    VerificationFailed,
    DegenerateSpectrum,
    NotCertified,
    AmbiguousTrivial,
    InconsistentRatios,
    Io,
};

const char* error_name(ErrorCode c);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode c, const std::string& what) { throw Error(c, what); }

}  // namespace floquet
