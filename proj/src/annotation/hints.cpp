#include "rehearse/annotation/hints.hpp"

#include "rehearse/coverage.hpp"
#include "rehearse/error.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <variant>

namespace rehearse::annotation {

namespace {

using Outcome = std::variant<Hint, HintError>;

Outcome classify_turn(const session::AnswerTurn& turn, const llm::Gateway& gateway,
                      const llm::TemplateSet& templates, ParseMode mode) {
    const auto prompt = templates.get(llm::TemplateName::HintClassify).render({{"answer", turn.text}});
    std::string raw;
    try {
        raw = gateway.complete(llm::ModelSlot::Simulation, {{llm::Role::User, prompt}});
    } catch (const llm::ProviderError& e) {
        return HintError{turn.turn_id, "ProviderError", e.what(), std::nullopt};
    }
    try {
        return Hint{turn.turn_id, parse_label(raw, mode), turn.span, raw};
    } catch (const LabelParseError& e) {
        return HintError{turn.turn_id, "LabelParseError", e.what(), raw};
    }
}

}  // namespace

Classification classify_answers(const session::InterviewSession& session, const llm::Gateway& gateway,
                                const llm::TemplateSet& templates, const ClassifyOptions& options) {
    note_operation("classify_answers");
    if (session.state != session::SessionState::Completed && !options.force) {
        throw WrongState("session " + session.session_id + " is not completed; force to classify");
    }

    const auto& turns = session.answers;
    std::vector<std::optional<Outcome>> outcomes(turns.size());
    const unsigned workers =
        std::clamp<unsigned>(options.parallelism, 1u, static_cast<unsigned>(std::max<std::size_t>(turns.size(), 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < turns.size(); ++i) {
            outcomes[i] = classify_turn(turns[i], gateway, templates, options.mode);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < turns.size(); i = next++) {
                    outcomes[i] = classify_turn(turns[i], gateway, templates, options.mode);
                }
            });
        }
    }

    Classification result;
    for (auto& outcome : outcomes) {
        if (auto* hint = std::get_if<Hint>(&*outcome)) {
            result.hints.push_back(std::move(*hint));
        } else {
            result.errors.push_back(std::get<HintError>(std::move(*outcome)));
        }
    }
    return result;
}

std::vector<TimeRange> highlight_ranges(const std::vector<Hint>& hints) {
    note_operation("highlight_ranges");
    std::vector<TimeRange> ranges;
    for (const auto& hint : hints) {
        if (hint.label == Label::NeedsImprovement) ranges.push_back(hint.range);
    }
    std::sort(ranges.begin(), ranges.end());
    return ranges;
}

}  // namespace rehearse::annotation
