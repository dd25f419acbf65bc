#pragma once

#include "rehearse/annotation/annotation.hpp"
#include "rehearse/annotation/hints.hpp"
#include "rehearse/feedback/thread.hpp"
#include "rehearse/session/session.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace rehearse::store {

inline constexpr int kFormatVersion = 1;

/// Everything persisted about one practice session.
struct SessionRecord {
    int format_version = kFormatVersion;
    session::InterviewSession session;
    std::vector<annotation::Hint> hints;
    std::vector<annotation::HintError> hint_errors;
    std::vector<annotation::Annotation> annotations;
    std::vector<feedback::FeedbackThread> feedback_threads;
    /// Counter for record-local annotation and thread ids.
    std::uint64_t next_local_id = 1;

    const std::string& id() const { return session.session_id; }

    annotation::Annotation* find_annotation(std::string_view annotation_id);
    const annotation::Annotation* find_annotation(std::string_view annotation_id) const;
    feedback::FeedbackThread* find_thread(std::string_view thread_id);
    const feedback::FeedbackThread* find_thread(std::string_view thread_id) const;
    /// Open thread bound to the annotation, if any.
    const feedback::FeedbackThread* open_thread_for(std::string_view annotation_id) const;

    /// "<session_id>-<prefix><n>", advancing next_local_id.
    std::string allocate_id(std::string_view prefix);

    /// Throws ValidationError on any unresolved cross-reference or broken
    /// session invariant.
    void validate() const;

    friend bool operator==(const SessionRecord&, const SessionRecord&) = default;
};

nlohmann::json encode(const TimeRange& range);
nlohmann::json encode(const session::Question& question);
nlohmann::json encode(const session::AnswerTurn& turn);
nlohmann::json encode(const session::Transcript& transcript);
nlohmann::json encode(const annotation::Hint& hint);
nlohmann::json encode(const annotation::HintError& error);
nlohmann::json encode(const annotation::Annotation& annotation);
nlohmann::json encode(const feedback::FeedbackMessage& message);
nlohmann::json encode(const feedback::FeedbackThread& thread);

template <typename T>
nlohmann::json encode_all(const std::vector<T>& items) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& item : items) out.push_back(encode(item));
    return out;
}

nlohmann::json to_json(const SessionRecord& record);
/// Throws CorruptRecord for unknown format_version or a malformed document.
SessionRecord record_from_json(const nlohmann::json& document);

/// Canonical text: sorted keys, two-space indent, trailing newline.
std::string canonical_text(const SessionRecord& record);
/// Throws CorruptRecord when the text is not valid JSON or not a record.
SessionRecord parse_record(std::string_view text);

}  // namespace rehearse::store
