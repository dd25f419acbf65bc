#include "rehearse/annotation/label.hpp"

#include "rehearse/coverage.hpp"
#include "rehearse/error.hpp"

#include <array>
#include <cctype>
#include <utility>

namespace rehearse::annotation {

std::string_view to_string(Label label) {
    return label == Label::Good ? "good" : "needs_improvement";
}

Label label_from_string(std::string_view text) {
    if (text == "good") return Label::Good;
    if (text == "needs_improvement") return Label::NeedsImprovement;
    throw InvalidArgument("unknown label: " + std::string(text));
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool strip_trailing_punctuation(std::string_view& s) {
    constexpr std::string_view punctuation = ".,;:!";
    bool changed = false;
    while (!s.empty() && punctuation.find(s.back()) != std::string_view::npos) {
        s.remove_suffix(1);
        changed = true;
    }
    return changed;
}

bool strip_quotes(std::string_view& s) {
    static constexpr std::array<std::pair<std::string_view, std::string_view>, 5> pairs{{
        {"\"", "\""},
        {"'", "'"},
        {"`", "`"},
        {"“", "”"},
        {"‘", "’"},
    }};
    for (const auto& [open, close] : pairs) {
        if (s.size() >= open.size() + close.size() && s.substr(0, open.size()) == open &&
            s.substr(s.size() - close.size()) == close) {
            s = s.substr(open.size(), s.size() - open.size() - close.size());
            return true;
        }
    }
    return false;
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

}  // namespace

Label parse_label(std::string_view raw, ParseMode mode) {
    note_operation("parse_label");
    std::string_view s = trim(raw);
    if (mode == ParseMode::Lenient) {
        for (bool changed = true; changed;) {
            changed = strip_trailing_punctuation(s);
            s = trim(s);
            changed = strip_quotes(s) || changed;
            s = trim(s);
        }
    }
    const auto key = lower(s);
    if (key == "good") return Label::Good;
    if (key == "need improvement" || key == "needs improvement") return Label::NeedsImprovement;
    throw LabelParseError("unrecognised label: \"" + std::string(raw) + "\"");
}

}  // namespace rehearse::annotation
