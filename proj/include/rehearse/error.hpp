#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rehearse {

/// Coarse error category surfaced by the HTTP facade and the CLI exit codes.
enum class ErrorCode {
    bad_request,
    not_found,
    wrong_state,
    provider_error,
    parse_error,
    storage_error,
};

std::string_view to_string(ErrorCode code);

/// Base of every engine error. Each concrete error maps to exactly one code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string kind, const std::string& message)
        : std::runtime_error(message), code_(code), kind_(std::move(kind)) {}

    ErrorCode code() const noexcept { return code_; }
    /// Short machine-readable name such as "WrongState".
    const std::string& kind() const noexcept { return kind_; }
    bool retriable() const noexcept { return code_ == ErrorCode::provider_error; }

private:
    ErrorCode code_;
    std::string kind_;
};

#define REHEARSE_DEFINE_ERROR(Name, Code)                                   \
    class Name : public Error {                                             \
    public:                                                                 \
        explicit Name(const std::string& message)                           \
            : Error(ErrorCode::Code, #Name, message) {}                     \
    }

REHEARSE_DEFINE_ERROR(InvalidArgument, bad_request);
REHEARSE_DEFINE_ERROR(InvalidScript, bad_request);
REHEARSE_DEFINE_ERROR(InvalidSpan, bad_request);
REHEARSE_DEFINE_ERROR(RangeOutOfBounds, bad_request);
REHEARSE_DEFINE_ERROR(UnboundPlaceholder, bad_request);
REHEARSE_DEFINE_ERROR(CapabilityUnavailable, bad_request);
REHEARSE_DEFINE_ERROR(ValidationError, bad_request);
REHEARSE_DEFINE_ERROR(ConfigError, bad_request);
REHEARSE_DEFINE_ERROR(UnknownSession, not_found);
REHEARSE_DEFINE_ERROR(UnknownAnnotation, not_found);
REHEARSE_DEFINE_ERROR(UnknownThread, not_found);
REHEARSE_DEFINE_ERROR(UnresolvableAudio, not_found);
REHEARSE_DEFINE_ERROR(NotFound, not_found);
REHEARSE_DEFINE_ERROR(WrongState, wrong_state);
REHEARSE_DEFINE_ERROR(ThreadAlreadyOpen, wrong_state);
REHEARSE_DEFINE_ERROR(NoPriorFeedback, wrong_state);
REHEARSE_DEFINE_ERROR(LabelParseError, parse_error);
REHEARSE_DEFINE_ERROR(StorageError, storage_error);
REHEARSE_DEFINE_ERROR(CorruptRecord, storage_error);

#undef REHEARSE_DEFINE_ERROR

}  // namespace rehearse
