#pragma once

#include "rehearse/annotation/label.hpp"
#include "rehearse/llm/gateway.hpp"
#include "rehearse/llm/prompt_template.hpp"
#include "rehearse/session/session.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rehearse::annotation {

struct Hint {
    std::string turn_id;
    Label label = Label::Good;
    TimeRange range;
    std::string rationale_raw;
    friend bool operator==(const Hint&, const Hint&) = default;
};

/// Per-turn failure marker in a partial classification.
struct HintError {
    std::string turn_id;
    /// "ProviderError" or "LabelParseError".
    std::string kind;
    std::string message;
    /// Raw provider output when the label failed to parse.
    std::optional<std::string> raw;
    friend bool operator==(const HintError&, const HintError&) = default;
};

struct Classification {
    std::vector<Hint> hints;
    std::vector<HintError> errors;
};

struct ClassifyOptions {
    ParseMode mode = ParseMode::Lenient;
    /// Classify an unfinished session.
    bool force = false;
    /// Number of provider calls in flight at once.
    unsigned parallelism = 1;
};

/// One HintClassify call per answer turn. Results keep turn order; each turn
/// produces either a Hint or a HintError. Throws WrongState when the session
/// is not Completed and `force` is unset.
Classification classify_answers(const session::InterviewSession& session,
                                const llm::Gateway& gateway, const llm::TemplateSet& templates,
                                const ClassifyOptions& options = {});

/// Ranges of NeedsImprovement hints sorted by start.
std::vector<TimeRange> highlight_ranges(const std::vector<Hint>& hints);

}  // namespace rehearse::annotation
