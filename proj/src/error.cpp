#include "rehearse/error.hpp"

namespace rehearse {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::bad_request: return "bad_request";
        case ErrorCode::not_found: return "not_found";
        case ErrorCode::wrong_state: return "wrong_state";
        case ErrorCode::provider_error: return "provider_error";
        case ErrorCode::parse_error: return "parse_error";
        case ErrorCode::storage_error: return "storage_error";
    }
    return "bad_request";
}

}  // namespace rehearse
