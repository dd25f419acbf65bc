#include "rehearse/session/interviewer.hpp"

#include "rehearse/coverage.hpp"
#include "rehearse/error.hpp"

#include <algorithm>
#include <cctype>

namespace rehearse::session {

namespace {

std::string trimmed(std::string text) {
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    text.erase(text.begin(), std::find_if(text.begin(), text.end(), not_space));
    text.erase(std::find_if(text.rbegin(), text.rend(), not_space).base(), text.end());
    return text;
}

std::string quoted_list(const std::vector<std::string>& questions) {
    std::string out;
    for (std::size_t i = 0; i < questions.size(); ++i) {
        if (i > 0) out += ", ";
        out += '"';
        out += questions[i];
        out += '"';
    }
    return out;
}

}  // namespace

std::int64_t SpeechTiming::estimate(std::string_view text) const {
    return std::max(min_utterance_ms, static_cast<std::int64_t>(text.size()) * ms_per_char);
}

InterviewSession Interviewer::open(JobContext job, InterviewScript script) const {
    if (job.job_title.empty()) throw InvalidArgument("job title must not be empty");
    script.validate();
    InterviewSession session;
    session.session_id = ids_.next("s");
    session.job = std::move(job);
    session.script = std::move(script);
    session.created_at = clock_.now();
    session.state = SessionState::Created;
    return session;
}

std::string Interviewer::opening_prompt(const InterviewSession& session) const {
    return templates_.get(llm::TemplateName::SimFirst)
        .render({{"input_job", session.job.job_title},
                 {"initial_question_1", session.script.main_questions.front()}});
}

void Interviewer::start(InterviewSession& session) const {
    if (session.state != SessionState::Created) throw WrongState("session has already started");
    const auto reply = gateway_.complete(llm::ModelSlot::Simulation,
                                         {{llm::Role::System, opening_prompt(session)}});
    record_question(session, QuestionKind::Main, 0, reply);
    session.state = SessionState::AwaitingAnswer;
}

InterviewSession Interviewer::create_session(JobContext job, InterviewScript script) const {
    note_operation("create_session");
    auto session = open(std::move(job), std::move(script));
    start(session);
    return session;
}

NextStep Interviewer::submit_answer(InterviewSession& session, AnswerInput answer) const {
    note_operation("submit_answer");
    if (session.state != SessionState::AwaitingAnswer) {
        throw WrongState("session " + session.session_id + " is not awaiting an answer");
    }
    const Question* question = session.outstanding();
    if (question == nullptr) {
        throw WrongState("the next question for session " + session.session_id +
                         " has not been generated yet; retry question generation");
    }

    const std::int64_t timeline_end = session.transcript.duration_ms();
    TimeRange span;
    if (answer.span) {
        span = *answer.span;
        if (!span.valid()) throw InvalidSpan("answer span is inverted or negative");
        if (span.start_ms < timeline_end) {
            throw InvalidSpan("answer span starts at " + std::to_string(span.start_ms) +
                              " ms, before the timeline end at " + std::to_string(timeline_end) + " ms");
        }
    } else {
        span = {timeline_end, timeline_end + timing_.estimate(answer.text)};
    }

    AnswerTurn turn;
    turn.turn_id = "a" + std::to_string(session.answers.size() + 1);
    turn.question_id = question->question_id;
    turn.empty_answer = trimmed(answer.text).empty();
    turn.text = std::move(answer.text);
    turn.audio_ref = std::move(answer.audio_ref);
    turn.span = span;

    session.transcript.append({Speaker::Candidate, turn.text, span.start_ms, span.end_ms});
    session.answers.push_back(std::move(turn));
    return ask_next(session);
}

NextStep Interviewer::retry_question(InterviewSession& session) const {
    if (!session.question_pending) throw WrongState("no question generation is pending");
    return ask_next(session);
}

std::vector<llm::ChatMessage> Interviewer::history(const InterviewSession& session) const {
    std::vector<llm::ChatMessage> messages;
    messages.push_back({llm::Role::System, opening_prompt(session)});
    for (std::size_t i = 0; i < session.asked.size(); ++i) {
        messages.push_back({llm::Role::Assistant, session.asked[i].text});
        if (i < session.answers.size()) messages.push_back({llm::Role::User, session.answers[i].text});
    }
    return messages;
}

NextStep Interviewer::ask_next(InterviewSession& session) const {
    const auto planned = plan_next(session.script, session.asked);
    if (!planned) {
        session.state = SessionState::Completed;
        session.question_pending = false;
        return SessionCompleted{};
    }

    std::string instruction;
    if (planned->kind == QuestionKind::FollowUp) {
        instruction = templates_.get(llm::TemplateName::SimFollowUp)
                          .render({{"initial_questions", quoted_list(session.script.main_questions)}});
    } else {
        instruction = templates_.get(llm::TemplateName::SimNextMain)
                          .render({{"initial_question_i", session.script.main_questions[planned->main_index]}});
    }
    auto messages = history(session);
    messages.push_back({llm::Role::System, std::move(instruction)});

    std::string reply;
    try {
        reply = gateway_.complete(llm::ModelSlot::Simulation, messages);
        record_question(session, planned->kind, planned->main_index, std::move(reply));
    } catch (const llm::ProviderError&) {
        session.question_pending = true;
        throw;
    }
    session.question_pending = false;
    const Question& asked = session.asked.back();
    if (asked.kind == QuestionKind::FollowUp) return FollowUpAsked{asked};
    return MainAsked{asked};
}

void Interviewer::record_question(InterviewSession& session, QuestionKind kind, std::size_t main_index,
                                  std::string text) const {
    text = trimmed(std::move(text));
    if (text.empty()) {
        throw llm::ProviderError(llm::ProviderFailure::Malformed, "provider returned an empty question", 1);
    }
    const std::int64_t start = session.transcript.duration_ms();
    session.transcript.append({Speaker::Interviewer, text, start, start + timing_.estimate(text)});
    session.asked.push_back(
        {"q" + std::to_string(session.asked.size() + 1), kind, main_index, std::move(text)});
}

}  // namespace rehearse::session
