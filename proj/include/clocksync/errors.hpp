#pragma once

#include <stdexcept>
#include <string>

namespace clocksync {

enum class ErrorCode {
    FlowDomainViolation,
    NotInJumpSet,
    CorruptPhase,
    InvalidGain,
    InvalidParams,
    InvalidCertificateInput,
    Infeasible,
    NoCertificate,
    IoError,
    ConfigInvalid,
    VerifyInputMismatch,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what);
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace clocksync
