#pragma once

#include "rehearse/session/transcript.hpp"
#include "rehearse/time.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rehearse::session {

struct JobContext {
    std::string job_title;

    /// Trims surrounding whitespace; throws InvalidArgument when nothing is left.
    static JobContext make(std::string_view job_title);
    friend bool operator==(const JobContext&, const JobContext&) = default;
};

struct InterviewScript {
    std::vector<std::string> main_questions;
    int follow_ups_per_main = 1;

    /// The four standard behavioral questions, one follow-up each.
    static InterviewScript standard();
    /// Throws InvalidScript.
    void validate() const;
    std::size_t total_questions() const {
        return main_questions.size() * static_cast<std::size_t>(1 + follow_ups_per_main);
    }
    friend bool operator==(const InterviewScript&, const InterviewScript&) = default;
};

/// Upper bound for follow_ups_per_main.
inline constexpr int kMaxFollowUpsPerMain = 8;

enum class QuestionKind { Main, FollowUp };
std::string_view to_string(QuestionKind kind);
QuestionKind question_kind_from_string(std::string_view text);

struct Question {
    std::string question_id;
    QuestionKind kind = QuestionKind::Main;
    std::size_t main_index = 0;
    std::string text;
    friend bool operator==(const Question&, const Question&) = default;
};

struct AnswerTurn {
    std::string turn_id;
    std::string question_id;
    std::string text;
    std::optional<std::string> audio_ref;
    TimeRange span;
    /// Set when the candidate skipped (empty text after trimming).
    bool empty_answer = false;
    friend bool operator==(const AnswerTurn&, const AnswerTurn&) = default;
};

enum class SessionState { Created, AwaitingAnswer, Completed };
std::string_view to_string(SessionState state);
SessionState session_state_from_string(std::string_view text);

struct InterviewSession {
    std::string session_id;
    JobContext job;
    InterviewScript script;
    std::vector<Question> asked;
    std::vector<AnswerTurn> answers;
    SessionState state = SessionState::Created;
    Timestamp created_at{};
    /// True after a provider failure left the next question ungenerated. The
    /// state stays AwaitingAnswer and the question must be regenerated before
    /// another answer is accepted.
    bool question_pending = false;
    Transcript transcript;

    /// Question that the next answer belongs to, if any.
    const Question* outstanding() const;
    const Question* find_question(std::string_view question_id) const;
    const AnswerTurn* find_answer(std::string_view turn_id) const;

    /// Throws ValidationError describing the first broken invariant.
    void check_invariants() const;

    friend bool operator==(const InterviewSession&, const InterviewSession&) = default;
};

/// Planned next question for a session: which kind and for which main
/// question. std::nullopt when the script is exhausted.
struct PlannedQuestion {
    QuestionKind kind;
    std::size_t main_index;
};
std::optional<PlannedQuestion> plan_next(const InterviewScript& script,
                                         const std::vector<Question>& asked);

}  // namespace rehearse::session
