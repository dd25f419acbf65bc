#include "rehearse/session/session.hpp"

#include "rehearse/error.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace rehearse::session {

namespace {

std::string_view trim(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    return text;
}

}  // namespace

JobContext JobContext::make(std::string_view job_title) {
    const auto trimmed = trim(job_title);
    if (trimmed.empty()) throw InvalidArgument("job title must not be empty");
    return JobContext{std::string(trimmed)};
}

InterviewScript InterviewScript::standard() {
    return InterviewScript{
        {
            "Tell me about yourself?",
            "How has your previous education and experience prepared you for this job?",
            "What do you consider to be your greatest strength and why?",
            "What do you consider to be your greatest weakness? How are you going about improving up on it?",
        },
        1,
    };
}

void InterviewScript::validate() const {
    if (main_questions.empty()) throw InvalidScript("script has no main questions");
    for (std::size_t i = 0; i < main_questions.size(); ++i) {
        if (trim(main_questions[i]).empty()) {
            throw InvalidScript("main question " + std::to_string(i + 1) + " is empty");
        }
    }
    if (follow_ups_per_main < 0 || follow_ups_per_main > kMaxFollowUpsPerMain) {
        throw InvalidScript("follow_ups_per_main must be within 0.." +
                            std::to_string(kMaxFollowUpsPerMain));
    }
}

std::string_view to_string(QuestionKind kind) {
    return kind == QuestionKind::Main ? "main" : "follow_up";
}

QuestionKind question_kind_from_string(std::string_view text) {
    if (text == "main") return QuestionKind::Main;
    if (text == "follow_up") return QuestionKind::FollowUp;
    throw InvalidArgument("unknown question kind: " + std::string(text));
}

std::string_view to_string(SessionState state) {
    switch (state) {
        case SessionState::Created: return "created";
        case SessionState::AwaitingAnswer: return "awaiting_answer";
        case SessionState::Completed: return "completed";
    }
    return "created";
}

SessionState session_state_from_string(std::string_view text) {
    if (text == "created") return SessionState::Created;
    if (text == "awaiting_answer") return SessionState::AwaitingAnswer;
    if (text == "completed") return SessionState::Completed;
    throw InvalidArgument("unknown session state: " + std::string(text));
}

std::optional<PlannedQuestion> plan_next(const InterviewScript& script,
                                         const std::vector<Question>& asked) {
    if (asked.empty()) return PlannedQuestion{QuestionKind::Main, 0};
    const std::size_t current = asked.back().main_index;
    const auto follow_ups = std::count_if(asked.begin(), asked.end(), [&](const Question& q) {
        return q.main_index == current && q.kind == QuestionKind::FollowUp;
    });
    if (follow_ups < script.follow_ups_per_main) return PlannedQuestion{QuestionKind::FollowUp, current};
    if (current + 1 < script.main_questions.size()) return PlannedQuestion{QuestionKind::Main, current + 1};
    return std::nullopt;
}

const Question* InterviewSession::outstanding() const {
    if (state != SessionState::AwaitingAnswer || question_pending) return nullptr;
    if (asked.size() != answers.size() + 1) return nullptr;
    return &asked.back();
}

const Question* InterviewSession::find_question(std::string_view question_id) const {
    const auto it = std::find_if(asked.begin(), asked.end(),
                                 [&](const Question& q) { return q.question_id == question_id; });
    return it == asked.end() ? nullptr : &*it;
}

const AnswerTurn* InterviewSession::find_answer(std::string_view turn_id) const {
    const auto it = std::find_if(answers.begin(), answers.end(),
                                 [&](const AnswerTurn& a) { return a.turn_id == turn_id; });
    return it == answers.end() ? nullptr : &*it;
}

void InterviewSession::check_invariants() const {
    auto fail = [&](const std::string& what) {
        throw ValidationError("session " + session_id + ": " + what);
    };
    if (job.job_title.empty()) fail("empty job title");
    try {
        script.validate();
    } catch (const InvalidScript& e) {
        fail(e.what());
    }
    if (answers.size() > asked.size() || asked.size() > answers.size() + 1) {
        fail("asked/answered counts out of step");
    }

    std::vector<Question> prefix;
    std::set<std::string> ids;
    for (const auto& question : asked) {
        const auto planned = plan_next(script, prefix);
        if (!planned || planned->kind != question.kind || planned->main_index != question.main_index) {
            fail("question " + question.question_id + " breaks the main/follow-up order");
        }
        if (question.text.empty()) fail("question " + question.question_id + " has no text");
        if (!ids.insert(question.question_id).second) fail("duplicate id " + question.question_id);
        prefix.push_back(question);
    }
    std::int64_t previous_end = 0;
    for (std::size_t i = 0; i < answers.size(); ++i) {
        const auto& answer = answers[i];
        if (answer.question_id != asked[i].question_id) fail("answer " + answer.turn_id + " is misaligned");
        if (!answer.span.valid()) fail("answer " + answer.turn_id + " has an invalid span");
        if (answer.span.start_ms < previous_end) fail("answer spans are out of order");
        previous_end = answer.span.end_ms;
        if (!ids.insert(answer.turn_id).second) fail("duplicate id " + answer.turn_id);
    }

    const bool exhausted = !plan_next(script, asked).has_value();
    switch (state) {
        case SessionState::Created:
            if (!asked.empty() || question_pending) fail("created session has questions");
            break;
        case SessionState::AwaitingAnswer:
            if (question_pending) {
                if (asked.size() != answers.size() || exhausted) fail("pending question is inconsistent");
            } else if (asked.size() != answers.size() + 1) {
                fail("awaiting answer without an outstanding question");
            }
            break;
        case SessionState::Completed:
            if (!exhausted || asked.size() != answers.size() || question_pending) {
                fail("completed session has unanswered or unasked questions");
            }
            break;
    }

    const auto& segments = transcript.segments();
    if (segments.size() != asked.size() + answers.size()) fail("transcript segment count mismatch");
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto& segment = segments[i];
        const std::size_t turn = i / 2;
        if (i % 2 == 0) {
            if (segment.speaker != Speaker::Interviewer || segment.text != asked[turn].text) {
                fail("transcript segment " + std::to_string(i) + " does not match its question");
            }
        } else {
            if (segment.speaker != Speaker::Candidate || segment.text != answers[turn].text ||
                segment.range() != answers[turn].span) {
                fail("transcript segment " + std::to_string(i) + " does not match its answer");
            }
        }
    }
}

}  // namespace rehearse::session
