#pragma once

#include "rehearse/annotation/annotation.hpp"
#include "rehearse/annotation/hints.hpp"
#include "rehearse/feedback/thread.hpp"
#include "rehearse/ids.hpp"
#include "rehearse/llm/gateway.hpp"
#include "rehearse/llm/prompt_template.hpp"
#include "rehearse/llm/speech.hpp"
#include "rehearse/session/interviewer.hpp"
#include "rehearse/store/session_store.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

namespace rehearse {

struct WorkspaceOptions {
    annotation::ParseMode parse_mode = annotation::ParseMode::Lenient;
    unsigned classify_parallelism = 1;
    session::SpeechTiming timing{};
};

struct WorkspaceDeps {
    std::shared_ptr<store::SessionStore> store;
    std::shared_ptr<llm::Gateway> gateway;
    llm::TemplateSet templates;
    std::shared_ptr<Clock> clock;
    std::shared_ptr<IdSource> ids;
    /// Optional; audio refs are rejected without one.
    std::shared_ptr<llm::Transcriber> transcriber;
    /// Optional; questions are text-only without one.
    std::shared_ptr<llm::Synthesizer> synthesizer;
};

struct AnnotationRequest {
    TimeRange range;
    std::string self_reflection;
    /// When set, the range is copied from the hint for this turn.
    std::optional<std::string> from_hint_turn;
};

/// Engine API over stored sessions. Every mutation is serialized per session
/// and written through to the store before returning; reads take a snapshot.
/// Annotation and thread ids embed their session id, so they resolve without
/// an index.
class Workspace {
public:
    explicit Workspace(WorkspaceDeps deps, WorkspaceOptions options = {});

    // session-core
    session::InterviewSession create_session(const std::string& job_title,
                                             std::optional<session::InterviewScript> script = {});
    session::NextStep submit_answer(const std::string& session_id, session::AnswerInput input);
    session::NextStep retry_question(const std::string& session_id);
    session::InterviewSession get_session(const std::string& session_id) const;
    session::Transcript get_transcript(const std::string& session_id) const;

    // annotation
    annotation::Classification classify(const std::string& session_id, bool force = false);
    std::vector<annotation::Hint> hints(const std::string& session_id) const;
    std::vector<TimeRange> highlights(const std::string& session_id) const;
    annotation::Annotation create_annotation(const std::string& session_id,
                                             const AnnotationRequest& request);
    void delete_annotation(const std::string& annotation_id);
    std::vector<annotation::Annotation> annotations(const std::string& session_id) const;
    annotation::Annotation get_annotation(const std::string& annotation_id) const;

    // dialogic feedback
    feedback::FeedbackThread start_thread(const std::string& annotation_id);
    feedback::FeedbackMessage ask(const std::string& thread_id, std::string text);
    feedback::FeedbackMessage submit_revision(const std::string& thread_id, std::string text,
                                              std::optional<std::string> audio_ref = {});
    feedback::FeedbackMessage retry_thread(const std::string& thread_id);
    feedback::FeedbackThread save_thread(const std::string& thread_id);
    feedback::FeedbackThread get_thread(const std::string& thread_id) const;

    // speech
    std::string upload_audio(std::string_view bytes);
    std::vector<llm::TimedText> transcribe(const std::string& audio_ref);
    std::optional<std::string> synthesize(std::string_view text);

    // persistence
    store::SessionRecord record(const std::string& session_id) const;
    std::vector<store::SessionSummary> list_sessions() const;
    std::string export_session(const std::string& session_id) const;
    /// Validates and stores an exported document; returns its session id.
    std::string import_session(std::string_view document);

    const llm::TemplateSet& templates() const { return deps_.templates; }
    store::SessionStore& storage() { return *deps_.store; }

private:
    struct Entry {
        mutable std::shared_mutex mutex;
        store::SessionRecord record;
    };

    std::shared_ptr<Entry> entry(const std::string& session_id) const;
    std::shared_ptr<Entry> entry_for_child(const std::string& child_id) const;
    void persist(const store::SessionRecord& record);
    std::string answer_text(session::AnswerInput& input);

    WorkspaceDeps deps_;
    WorkspaceOptions options_;
    session::Interviewer interviewer_;
    feedback::DialogicFeedback feedback_;
    mutable std::mutex entries_mutex_;
    mutable std::map<std::string, std::shared_ptr<Entry>, std::less<>> entries_;
};

/// Session id embedded in an annotation or thread id ("<session>-n3").
std::string owning_session(std::string_view child_id);

}  // namespace rehearse
