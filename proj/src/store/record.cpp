#include "rehearse/store/record.hpp"

#include "rehearse/error.hpp"
#include "rehearse/ids.hpp"

#include <algorithm>
#include <set>

namespace rehearse::store {

using nlohmann::json;

namespace {

json optional_text(const std::optional<std::string>& value) {
    return value ? json(*value) : json(nullptr);
}

std::optional<std::string> read_optional_text(const json& object, const char* key) {
    if (!object.contains(key) || object.at(key).is_null()) return std::nullopt;
    return object.at(key).get<std::string>();
}

json range_json(const TimeRange& range) {
    return {{"start_ms", range.start_ms}, {"end_ms", range.end_ms}};
}

TimeRange read_range(const json& object) {
    return {object.at("start_ms").get<std::int64_t>(), object.at("end_ms").get<std::int64_t>()};
}

json message_json(const feedback::FeedbackMessage& message) {
    return {{"role", feedback::to_string(message.role)},
            {"text", message.text},
            {"html_safe", message.html_safe},
            {"at", format_timestamp(message.at)},
            {"audio_ref", optional_text(message.audio_ref)}};
}

feedback::FeedbackMessage read_message(const json& object) {
    feedback::FeedbackMessage message;
    message.role = feedback::message_role_from_string(object.at("role").get<std::string>());
    message.text = object.at("text").get<std::string>();
    message.html_safe = object.at("html_safe").get<std::string>();
    message.at = parse_timestamp(object.at("at").get<std::string>());
    message.audio_ref = read_optional_text(object, "audio_ref");
    return message;
}

}  // namespace

annotation::Annotation* SessionRecord::find_annotation(std::string_view annotation_id) {
    const auto it = std::find_if(annotations.begin(), annotations.end(),
                                 [&](const auto& a) { return a.annotation_id == annotation_id; });
    return it == annotations.end() ? nullptr : &*it;
}

const annotation::Annotation* SessionRecord::find_annotation(std::string_view annotation_id) const {
    return const_cast<SessionRecord*>(this)->find_annotation(annotation_id);
}

feedback::FeedbackThread* SessionRecord::find_thread(std::string_view thread_id) {
    const auto it = std::find_if(feedback_threads.begin(), feedback_threads.end(),
                                 [&](const auto& t) { return t.thread_id == thread_id; });
    return it == feedback_threads.end() ? nullptr : &*it;
}

const feedback::FeedbackThread* SessionRecord::find_thread(std::string_view thread_id) const {
    return const_cast<SessionRecord*>(this)->find_thread(thread_id);
}

const feedback::FeedbackThread* SessionRecord::open_thread_for(std::string_view annotation_id) const {
    const auto it = std::find_if(feedback_threads.begin(), feedback_threads.end(), [&](const auto& t) {
        return t.annotation_id == annotation_id && t.state == feedback::ThreadState::Open;
    });
    return it == feedback_threads.end() ? nullptr : &*it;
}

std::string SessionRecord::allocate_id(std::string_view prefix) {
    return session.session_id + "-" + std::string(prefix) + std::to_string(next_local_id++);
}

void SessionRecord::validate() const {
    auto fail = [&](const std::string& what) { throw ValidationError("record " + id() + ": " + what); };
    if (format_version != kFormatVersion) fail("unsupported format_version " + std::to_string(format_version));
    if (!is_safe_id(session.session_id)) fail("session id is not a safe identifier");
    session.check_invariants();
    const auto& transcript = session.transcript;

    std::set<std::string> classified;
    for (const auto& hint : hints) {
        const auto* turn = session.find_answer(hint.turn_id);
        if (turn == nullptr) fail("hint references unknown turn " + hint.turn_id);
        if (hint.range != turn->span) fail("hint range differs from the span of turn " + hint.turn_id);
        if (!classified.insert(hint.turn_id).second) fail("turn " + hint.turn_id + " classified twice");
    }
    for (const auto& error : hint_errors) {
        if (session.find_answer(error.turn_id) == nullptr) fail("hint error references unknown turn " + error.turn_id);
        if (!classified.insert(error.turn_id).second) fail("turn " + error.turn_id + " classified twice");
    }

    std::set<std::string> annotation_ids;
    for (const auto& a : annotations) {
        if (a.session_id != session.session_id) fail("annotation " + a.annotation_id + " references another session");
        if (!is_safe_id(a.annotation_id) || !annotation_ids.insert(a.annotation_id).second) {
            fail("annotation id " + a.annotation_id + " is invalid or duplicated");
        }
        if (!a.range.valid() || a.range.end_ms > transcript.duration_ms()) {
            fail("annotation " + a.annotation_id + " lies outside the session");
        }
        if (a.excerpt != transcript.excerpt(a.range)) fail("annotation " + a.annotation_id + " excerpt is stale");
    }

    std::set<std::string> thread_ids;
    std::set<std::string> open_for;
    for (const auto& t : feedback_threads) {
        if (annotation_ids.count(t.annotation_id) == 0) fail("thread " + t.thread_id + " references unknown annotation");
        if (!is_safe_id(t.thread_id) || !thread_ids.insert(t.thread_id).second) {
            fail("thread id " + t.thread_id + " is invalid or duplicated");
        }
        if (t.state == feedback::ThreadState::Open && !open_for.insert(t.annotation_id).second) {
            fail("annotation " + t.annotation_id + " has two open threads");
        }
        if (t.messages.size() % 2 != 0) fail("thread " + t.thread_id + " has an incomplete exchange");
        bool seen_feedback = false;
        for (std::size_t i = 0; i < t.messages.size(); i += 2) {
            const auto user = t.messages[i].role;
            const auto reply = t.messages[i + 1].role;
            const bool question_pair =
                user == feedback::MessageRole::UserQuestion && reply == feedback::MessageRole::AssistantFeedback;
            const bool revision_pair =
                user == feedback::MessageRole::UserRevision && reply == feedback::MessageRole::AssistantAssessment;
            if (!question_pair && !revision_pair) fail("thread " + t.thread_id + " breaks the exchange pattern");
            if (revision_pair && !seen_feedback) fail("thread " + t.thread_id + " revises before any feedback");
            seen_feedback = seen_feedback || question_pair;
        }
        if (t.pending && (t.state != feedback::ThreadState::Open || !feedback::is_user_role(t.pending->role))) {
            fail("thread " + t.thread_id + " has an invalid pending message");
        }
    }
}

json encode(const TimeRange& range) { return range_json(range); }

json encode(const session::Question& q) {
    return {{"question_id", q.question_id},
            {"kind", session::to_string(q.kind)},
            {"main_index", q.main_index},
            {"text", q.text}};
}

json encode(const session::AnswerTurn& a) {
    return {{"turn_id", a.turn_id},
            {"question_id", a.question_id},
            {"text", a.text},
            {"audio_ref", optional_text(a.audio_ref)},
            {"span", range_json(a.span)},
            {"empty_answer", a.empty_answer}};
}

json encode(const session::Transcript& transcript) {
    json segments = json::array();
    for (const auto& seg : transcript.segments()) {
        segments.push_back({{"speaker", session::to_string(seg.speaker)},
                            {"text", seg.text},
                            {"start_ms", seg.start_ms},
                            {"end_ms", seg.end_ms}});
    }
    json sentences = json::array();
    for (const auto& sentence : transcript.sentences()) {
        sentences.push_back({{"segment_index", sentence.segment_index},
                             {"text", sentence.text},
                             {"start_ms", sentence.start_ms},
                             {"end_ms", sentence.end_ms}});
    }
    return {{"segments", std::move(segments)}, {"sentences", std::move(sentences)}};
}

json encode(const annotation::Hint& h) {
    return {{"turn_id", h.turn_id},
            {"label", annotation::to_string(h.label)},
            {"range", range_json(h.range)},
            {"rationale_raw", h.rationale_raw}};
}

json encode(const annotation::HintError& e) {
    return {{"turn_id", e.turn_id}, {"kind", e.kind}, {"message", e.message}, {"raw", optional_text(e.raw)}};
}

json encode(const annotation::Annotation& a) {
    return {{"annotation_id", a.annotation_id},
            {"session_id", a.session_id},
            {"range", range_json(a.range)},
            {"excerpt", a.excerpt},
            {"self_reflection", a.self_reflection},
            {"source", annotation::to_string(a.source)}};
}

json encode(const feedback::FeedbackMessage& message) { return message_json(message); }

json encode(const feedback::FeedbackThread& t) {
    json messages = json::array();
    for (const auto& m : t.messages) messages.push_back(message_json(m));
    return {{"thread_id", t.thread_id},
            {"annotation_id", t.annotation_id},
            {"state", feedback::to_string(t.state)},
            {"messages", std::move(messages)},
            {"pending", t.pending ? message_json(*t.pending) : json(nullptr)}};
}

json to_json(const SessionRecord& record) {
    const auto& s = record.session;
    return {{"format_version", record.format_version},
            {"session_id", s.session_id},
            {"created_at", format_timestamp(s.created_at)},
            {"state", session::to_string(s.state)},
            {"question_pending", s.question_pending},
            {"job", {{"job_title", s.job.job_title}}},
            {"script", {{"main_questions", s.script.main_questions}, {"follow_ups_per_main", s.script.follow_ups_per_main}}},
            {"asked", encode_all(s.asked)},
            {"answers", encode_all(s.answers)},
            {"transcript", encode(s.transcript)},
            {"hints", encode_all(record.hints)},
            {"hint_errors", encode_all(record.hint_errors)},
            {"annotations", encode_all(record.annotations)},
            {"feedback_threads", encode_all(record.feedback_threads)},
            {"next_local_id", record.next_local_id}};
}

SessionRecord record_from_json(const json& document) {
    try {
        if (!document.is_object()) throw CorruptRecord("record is not a JSON object");
        SessionRecord record;
        record.format_version = document.at("format_version").get<int>();
        if (record.format_version != kFormatVersion) {
            throw CorruptRecord("unknown format_version " + std::to_string(record.format_version));
        }
        auto& s = record.session;
        s.session_id = document.at("session_id").get<std::string>();
        s.created_at = parse_timestamp(document.at("created_at").get<std::string>());
        s.state = session::session_state_from_string(document.at("state").get<std::string>());
        s.question_pending = document.at("question_pending").get<bool>();
        s.job.job_title = document.at("job").at("job_title").get<std::string>();
        s.script.main_questions = document.at("script").at("main_questions").get<std::vector<std::string>>();
        s.script.follow_ups_per_main = document.at("script").at("follow_ups_per_main").get<int>();
        for (const auto& q : document.at("asked")) {
            s.asked.push_back({q.at("question_id").get<std::string>(),
                               session::question_kind_from_string(q.at("kind").get<std::string>()),
                               q.at("main_index").get<std::size_t>(), q.at("text").get<std::string>()});
        }
        for (const auto& a : document.at("answers")) {
            session::AnswerTurn turn;
            turn.turn_id = a.at("turn_id").get<std::string>();
            turn.question_id = a.at("question_id").get<std::string>();
            turn.text = a.at("text").get<std::string>();
            turn.audio_ref = read_optional_text(a, "audio_ref");
            turn.span = read_range(a.at("span"));
            turn.empty_answer = a.at("empty_answer").get<bool>();
            s.answers.push_back(std::move(turn));
        }
        std::vector<session::Segment> segments;
        for (const auto& seg : document.at("transcript").at("segments")) {
            segments.push_back({session::speaker_from_string(seg.at("speaker").get<std::string>()),
                                seg.at("text").get<std::string>(), seg.at("start_ms").get<std::int64_t>(),
                                seg.at("end_ms").get<std::int64_t>()});
        }
        s.transcript = session::Transcript::from_segments(std::move(segments));

        for (const auto& h : document.at("hints")) {
            record.hints.push_back({h.at("turn_id").get<std::string>(),
                                    annotation::label_from_string(h.at("label").get<std::string>()),
                                    read_range(h.at("range")), h.at("rationale_raw").get<std::string>()});
        }
        for (const auto& e : document.at("hint_errors")) {
            record.hint_errors.push_back({e.at("turn_id").get<std::string>(), e.at("kind").get<std::string>(),
                                          e.at("message").get<std::string>(), read_optional_text(e, "raw")});
        }
        for (const auto& a : document.at("annotations")) {
            record.annotations.push_back(
                {a.at("annotation_id").get<std::string>(), a.at("session_id").get<std::string>(),
                 read_range(a.at("range")), a.at("excerpt").get<std::string>(),
                 a.at("self_reflection").get<std::string>(),
                 annotation::annotation_source_from_string(a.at("source").get<std::string>())});
        }
        for (const auto& t : document.at("feedback_threads")) {
            feedback::FeedbackThread thread;
            thread.thread_id = t.at("thread_id").get<std::string>();
            thread.annotation_id = t.at("annotation_id").get<std::string>();
            thread.state = feedback::thread_state_from_string(t.at("state").get<std::string>());
            for (const auto& m : t.at("messages")) thread.messages.push_back(read_message(m));
            if (t.contains("pending") && !t.at("pending").is_null()) thread.pending = read_message(t.at("pending"));
            record.feedback_threads.push_back(std::move(thread));
        }
        record.next_local_id = document.at("next_local_id").get<std::uint64_t>();
        return record;
    } catch (const json::exception& e) {
        throw CorruptRecord(std::string("malformed record: ") + e.what());
    } catch (const CorruptRecord&) {
        throw;
    } catch (const Error& e) {
        throw CorruptRecord(std::string("malformed record: ") + e.what());
    }
}

std::string canonical_text(const SessionRecord& record) {
    return to_json(record).dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

SessionRecord parse_record(std::string_view text) {
    json document;
    try {
        document = json::parse(text);
    } catch (const json::parse_error& e) {
        throw CorruptRecord(std::string("record is not valid JSON: ") + e.what());
    }
    return record_from_json(document);
}

}  // namespace rehearse::store
