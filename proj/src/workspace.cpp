#include "rehearse/workspace.hpp"

#include "rehearse/coverage.hpp"
#include "rehearse/error.hpp"

#include <algorithm>
#include <cctype>

namespace rehearse {

std::string owning_session(std::string_view child_id) {
    const auto dash = child_id.rfind('-');
    if (dash == std::string_view::npos || dash == 0) return {};
    return std::string(child_id.substr(0, dash));
}

Workspace::Workspace(WorkspaceDeps deps, WorkspaceOptions options)
    : deps_(std::move(deps)),
      options_(options),
      interviewer_(*deps_.gateway, deps_.templates, *deps_.clock, *deps_.ids, options.timing),
      feedback_(*deps_.gateway, deps_.templates, *deps_.clock) {
    if (!deps_.store || !deps_.gateway || !deps_.clock || !deps_.ids) {
        throw ConfigError("workspace needs a store, gateway, clock and id source");
    }
}

std::shared_ptr<Workspace::Entry> Workspace::entry(const std::string& session_id) const {
    std::lock_guard lock(entries_mutex_);
    if (const auto it = entries_.find(session_id); it != entries_.end()) return it->second;
    if (!is_safe_id(session_id) || !deps_.store->contains(session_id)) {
        throw UnknownSession("no session " + session_id);
    }
    auto loaded = std::make_shared<Entry>();
    loaded->record = deps_.store->load(session_id);
    entries_.emplace(session_id, loaded);
    return loaded;
}

std::shared_ptr<Workspace::Entry> Workspace::entry_for_child(const std::string& child_id) const {
    const auto session_id = owning_session(child_id);
    if (session_id.empty()) throw NotFound("malformed id " + child_id);
    return entry(session_id);
}

void Workspace::persist(const store::SessionRecord& record) { deps_.store->store(record); }

namespace {

/// Applies `change` to a copy of the entry's record and commits it. Changes
/// interrupted by a provider failure are still committed so retained user
/// input survives; any other error discards the copy.
template <typename Entry, typename Persist, typename Change>
auto mutate(Entry& entry, Persist&& persist, Change&& change) {
    std::unique_lock lock(entry.mutex);
    store::SessionRecord working = entry.record;
    try {
        if constexpr (std::is_void_v<decltype(change(working))>) {
            change(working);
            persist(working);
            entry.record = std::move(working);
        } else {
            auto result = change(working);
            persist(working);
            entry.record = std::move(working);
            return result;
        }
    } catch (const llm::ProviderError&) {
        persist(working);
        entry.record = std::move(working);
        throw;
    }
}

std::string joined_text(const std::vector<llm::TimedText>& segments) {
    std::string out;
    for (const auto& segment : segments) {
        if (segment.text.empty()) continue;
        if (!out.empty()) out += ' ';
        out += segment.text;
    }
    return out;
}

std::int64_t covered_duration(const std::vector<llm::TimedText>& segments) {
    std::int64_t end = 0;
    for (const auto& segment : segments) end = std::max(end, segment.end_ms);
    return end;
}

}  // namespace

session::InterviewSession Workspace::create_session(const std::string& job_title,
                                                    std::optional<session::InterviewScript> script) {
    auto job = session::JobContext::make(job_title);
    auto chosen = script.value_or(session::InterviewScript::standard());
    chosen.validate();

    auto created = std::make_shared<Entry>();
    created->record.session = interviewer_.create_session(std::move(job), std::move(chosen));
    persist(created->record);
    {
        std::lock_guard lock(entries_mutex_);
        entries_.emplace(created->record.id(), created);
    }
    return created->record.session;
}

session::NextStep Workspace::submit_answer(const std::string& session_id, session::AnswerInput input) {
    auto e = entry(session_id);
    auto persist_fn = [this](const store::SessionRecord& r) { persist(r); };
    return mutate(*e, persist_fn, [&](store::SessionRecord& record) {
        if (input.audio_ref && input.text.empty()) {
            const auto segments = transcribe(*input.audio_ref);
            input.text = joined_text(segments);
            if (!input.span) {
                const auto start = record.session.transcript.duration_ms();
                input.span = TimeRange{start, start + covered_duration(segments)};
            }
        }
        return interviewer_.submit_answer(record.session, std::move(input));
    });
}

session::NextStep Workspace::retry_question(const std::string& session_id) {
    auto e = entry(session_id);
    auto persist_fn = [this](const store::SessionRecord& r) { persist(r); };
    return mutate(*e, persist_fn,
                  [&](store::SessionRecord& record) { return interviewer_.retry_question(record.session); });
}

session::InterviewSession Workspace::get_session(const std::string& session_id) const {
    auto e = entry(session_id);
    std::shared_lock lock(e->mutex);
    return e->record.session;
}

session::Transcript Workspace::get_transcript(const std::string& session_id) const {
    note_operation("get_transcript");
    auto e = entry(session_id);
    std::shared_lock lock(e->mutex);
    return e->record.session.transcript;
}

annotation::Classification Workspace::classify(const std::string& session_id, bool force) {
    auto e = entry(session_id);
    auto persist_fn = [this](const store::SessionRecord& r) { persist(r); };
    return mutate(*e, persist_fn, [&](store::SessionRecord& record) {
        auto result = annotation::classify_answers(
            record.session, *deps_.gateway, deps_.templates,
            {options_.parse_mode, force, options_.classify_parallelism});
        record.hints = result.hints;
        record.hint_errors = result.errors;
        return result;
    });
}

std::vector<annotation::Hint> Workspace::hints(const std::string& session_id) const {
    auto e = entry(session_id);
    std::shared_lock lock(e->mutex);
    return e->record.hints;
}

std::vector<TimeRange> Workspace::highlights(const std::string& session_id) const {
    return annotation::highlight_ranges(hints(session_id));
}

annotation::Annotation Workspace::create_annotation(const std::string& session_id,
                                                    const AnnotationRequest& request) {
    auto e = entry(session_id);
    auto persist_fn = [this](const store::SessionRecord& r) { persist(r); };
    return mutate(*e, persist_fn, [&](store::SessionRecord& record) {
        const auto& transcript = record.session.transcript;
        annotation::Annotation created;
        if (request.from_hint_turn) {
            const auto it = std::find_if(record.hints.begin(), record.hints.end(), [&](const annotation::Hint& h) {
                return h.turn_id == *request.from_hint_turn;
            });
            if (it == record.hints.end()) {
                throw InvalidArgument("no hint for turn " + *request.from_hint_turn);
            }
            created = annotation::annotation_from_hint(record.allocate_id("n"), record.id(), transcript, *it,
                                                       request.self_reflection);
        } else {
            created = annotation::make_annotation(record.allocate_id("n"), record.id(), transcript, request.range,
                                                  request.self_reflection);
        }
        record.annotations.push_back(created);
        return created;
    });
}

void Workspace::delete_annotation(const std::string& annotation_id) {
    auto e = entry_for_child(annotation_id);
    auto persist_fn = [this](const store::SessionRecord& r) { persist(r); };
    mutate(*e, persist_fn, [&](store::SessionRecord& record) {
        if (record.find_annotation(annotation_id) == nullptr) {
            throw UnknownAnnotation("no annotation " + annotation_id);
        }
        std::erase_if(record.annotations, [&](const auto& a) { return a.annotation_id == annotation_id; });
        std::erase_if(record.feedback_threads, [&](const auto& t) { return t.annotation_id == annotation_id; });
    });
}

std::vector<annotation::Annotation> Workspace::annotations(const std::string& session_id) const {
    auto e = entry(session_id);
    std::shared_lock lock(e->mutex);
    return e->record.annotations;
}

annotation::Annotation Workspace::get_annotation(const std::string& annotation_id) const {
    std::shared_ptr<Entry> e;
    try {
        e = entry_for_child(annotation_id);
    } catch (const Error&) {
        throw UnknownAnnotation("no annotation " + annotation_id);
    }
    std::shared_lock lock(e->mutex);
    const auto* found = e->record.find_annotation(annotation_id);
    if (found == nullptr) throw UnknownAnnotation("no annotation " + annotation_id);
    return *found;
}

feedback::FeedbackThread Workspace::start_thread(const std::string& annotation_id) {
    std::shared_ptr<Entry> e;
    try {
        e = entry_for_child(annotation_id);
    } catch (const Error&) {
        throw UnknownAnnotation("no annotation " + annotation_id);
    }
    auto persist_fn = [this](const store::SessionRecord& r) { persist(r); };
    return mutate(*e, persist_fn, [&](store::SessionRecord& record) {
        const auto* found = record.find_annotation(annotation_id);
        if (found == nullptr) throw UnknownAnnotation("no annotation " + annotation_id);
        if (const auto* open = record.open_thread_for(annotation_id)) {
            throw ThreadAlreadyOpen("annotation " + annotation_id + " already has open thread " + open->thread_id);
        }
        auto thread = feedback_.start_thread(record.allocate_id("t"), *found);
        record.feedback_threads.push_back(thread);
        return thread;
    });
}

namespace {

template <typename Record>
auto& require_thread(Record& record, const std::string& thread_id) {
    auto* thread = record.find_thread(thread_id);
    if (thread == nullptr) throw UnknownThread("no thread " + thread_id);
    const auto* owner = record.find_annotation(thread->annotation_id);
    if (owner == nullptr) throw UnknownAnnotation("thread " + thread_id + " lost its annotation");
    return *thread;
}

}  // namespace

feedback::FeedbackMessage Workspace::ask(const std::string& thread_id, std::string text) {
    std::shared_ptr<Entry> e;
    try {
        e = entry_for_child(thread_id);
    } catch (const Error&) {
        throw UnknownThread("no thread " + thread_id);
    }
    auto persist_fn = [this](const store::SessionRecord& r) { persist(r); };
    return mutate(*e, persist_fn, [&](store::SessionRecord& record) {
        auto& thread = require_thread(record, thread_id);
        return feedback_.ask(thread, *record.find_annotation(thread.annotation_id), std::move(text));
    });
}

feedback::FeedbackMessage Workspace::submit_revision(const std::string& thread_id, std::string text,
                                                     std::optional<std::string> audio_ref) {
    std::shared_ptr<Entry> e;
    try {
        e = entry_for_child(thread_id);
    } catch (const Error&) {
        throw UnknownThread("no thread " + thread_id);
    }
    if (audio_ref && text.empty()) text = joined_text(transcribe(*audio_ref));
    auto persist_fn = [this](const store::SessionRecord& r) { persist(r); };
    return mutate(*e, persist_fn, [&](store::SessionRecord& record) {
        auto& thread = require_thread(record, thread_id);
        return feedback_.submit_revision(thread, *record.find_annotation(thread.annotation_id), std::move(text),
                                         std::move(audio_ref));
    });
}

feedback::FeedbackMessage Workspace::retry_thread(const std::string& thread_id) {
    std::shared_ptr<Entry> e;
    try {
        e = entry_for_child(thread_id);
    } catch (const Error&) {
        throw UnknownThread("no thread " + thread_id);
    }
    auto persist_fn = [this](const store::SessionRecord& r) { persist(r); };
    return mutate(*e, persist_fn, [&](store::SessionRecord& record) {
        auto& thread = require_thread(record, thread_id);
        return feedback_.retry(thread, *record.find_annotation(thread.annotation_id));
    });
}

feedback::FeedbackThread Workspace::save_thread(const std::string& thread_id) {
    std::shared_ptr<Entry> e;
    try {
        e = entry_for_child(thread_id);
    } catch (const Error&) {
        throw UnknownThread("no thread " + thread_id);
    }
    auto persist_fn = [this](const store::SessionRecord& r) { persist(r); };
    return mutate(*e, persist_fn, [&](store::SessionRecord& record) {
        auto& thread = require_thread(record, thread_id);
        feedback_.save(thread);
        return thread;
    });
}

feedback::FeedbackThread Workspace::get_thread(const std::string& thread_id) const {
    std::shared_ptr<Entry> e;
    try {
        e = entry_for_child(thread_id);
    } catch (const Error&) {
        throw UnknownThread("no thread " + thread_id);
    }
    std::shared_lock lock(e->mutex);
    const auto* thread = e->record.find_thread(thread_id);
    if (thread == nullptr) throw UnknownThread("no thread " + thread_id);
    return *thread;
}

std::string Workspace::upload_audio(std::string_view bytes) { return deps_.store->store_audio(bytes); }

std::vector<llm::TimedText> Workspace::transcribe(const std::string& audio_ref) {
    if (!deps_.transcriber) throw CapabilityUnavailable("no transcriber is configured");
    return llm::transcribe(*deps_.transcriber, audio_ref);
}

std::optional<std::string> Workspace::synthesize(std::string_view text) {
    if (!deps_.synthesizer) return std::nullopt;
    try {
        return deps_.synthesizer->synthesize(text);
    } catch (const CapabilityUnavailable&) {
        return std::nullopt;
    }
}

store::SessionRecord Workspace::record(const std::string& session_id) const {
    auto e = entry(session_id);
    std::shared_lock lock(e->mutex);
    return e->record;
}

std::vector<store::SessionSummary> Workspace::list_sessions() const { return deps_.store->list_sessions(); }

std::string Workspace::export_session(const std::string& session_id) const {
    return store::canonical_text(record(session_id));
}

std::string Workspace::import_session(std::string_view document) {
    auto imported = std::make_shared<Entry>();
    imported->record = store::parse_record(document);
    imported->record.validate();
    const auto id = imported->record.id();
    std::lock_guard lock(entries_mutex_);
    if (entries_.count(id) != 0 || deps_.store->contains(id)) {
        throw WrongState("session " + id + " already exists");
    }
    persist(imported->record);
    entries_.emplace(id, imported);
    return id;
}

}  // namespace rehearse
