#include "clocksync/errors.hpp"

namespace clocksync {

const char* error_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::FlowDomainViolation: return "FlowDomainViolation";
    case ErrorCode::NotInJumpSet: return "NotInJumpSet";
    case ErrorCode::CorruptPhase: return "CorruptPhase";
    case ErrorCode::InvalidGain: return "InvalidGain";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InvalidCertificateInput: return "InvalidCertificateInput";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::NoCertificate: return "NoCertificate";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::VerifyInputMismatch: return "VerifyInputMismatch";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

} // namespace clocksync
