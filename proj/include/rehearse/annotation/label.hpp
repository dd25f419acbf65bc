#pragma once

#include <string>
#include <string_view>

namespace rehearse::annotation {

enum class Label { Good, NeedsImprovement };

std::string_view to_string(Label label);
Label label_from_string(std::string_view text);

enum class ParseMode {
    /// Trim whitespace, ignore case, exact match only.
    Strict,
    /// Strict, plus surrounding quotes and trailing punctuation (. , ; : !)
    /// are removed before matching.
    Lenient,
};

/// Accepts exactly "good", "need improvement" and "needs improvement" under
/// the normalisation of `mode`. Throws LabelParseError otherwise.
Label parse_label(std::string_view raw, ParseMode mode = ParseMode::Lenient);

}  // namespace rehearse::annotation
