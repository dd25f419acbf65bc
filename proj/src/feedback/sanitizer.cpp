#include "rehearse/feedback/sanitizer.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

namespace rehearse::feedback {

namespace {

constexpr std::string_view kRawContentTags[] = {"script", "style",    "iframe",   "object",
                                                 "template", "textarea", "noscript", "xmp",
                                                 "title",  "svg",      "math"};

bool is_raw_content_tag(std::string_view name) {
    return std::find(std::begin(kRawContentTags), std::end(kRawContentTags), name) != std::end(kRawContentTags);
}

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

bool starts_with_icase(std::string_view text, std::size_t at, std::string_view prefix) {
    if (at + prefix.size() > text.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (lower(text[at + i]) != lower(prefix[i])) return false;
    }
    return true;
}

/// Length of a character reference starting at text[at] == '&', or 0.
std::size_t entity_length(std::string_view text, std::size_t at) {
    std::size_t i = at + 1;
    if (i < text.size() && text[i] == '#') {
        ++i;
        const bool hex = i < text.size() && (text[i] == 'x' || text[i] == 'X');
        if (hex) ++i;
        const std::size_t digits_begin = i;
        while (i < text.size() && (hex ? std::isxdigit(static_cast<unsigned char>(text[i]))
                                       : std::isdigit(static_cast<unsigned char>(text[i])))) {
            ++i;
        }
        if (i == digits_begin || i - digits_begin > 8) return 0;
    } else {
        const std::size_t name_begin = i;
        while (i < text.size() && std::isalnum(static_cast<unsigned char>(text[i]))) ++i;
        if (i == name_begin || i - name_begin > 32) return 0;
    }
    if (i >= text.size() || text[i] != ';') return 0;
    return i + 1 - at;
}

struct Tag {
    std::string name;
    bool closing = false;
    bool self_closing = false;
    /// Index one past the '>'.
    std::size_t end = 0;
};

/// Parses a tag at text[at] == '<'. Returns false when this is not a
/// complete tag, in which case '<' is literal text.
bool parse_tag(std::string_view text, std::size_t at, Tag& tag) {
    std::size_t i = at + 1;
    if (i < text.size() && text[i] == '/') {
        tag.closing = true;
        ++i;
    }
    if (i >= text.size() || !std::isalpha(static_cast<unsigned char>(text[i]))) return false;
    const std::size_t name_begin = i;
    while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '-' ||
                               text[i] == ':')) {
        ++i;
    }
    tag.name.clear();
    for (std::size_t k = name_begin; k < i; ++k) tag.name += lower(text[k]);
    char quote = 0;
    char previous = 0;
    for (; i < text.size(); ++i) {
        const char c = text[i];
        if (quote != 0) {
            if (c == quote) quote = 0;
            continue;
        }
        if (c == '"' || c == '\'') {
            quote = c;
        } else if (c == '>') {
            tag.self_closing = previous == '/';
            tag.end = i + 1;
            return true;
        } else if (c == '<') {
            return false;
        }
        if (!std::isspace(static_cast<unsigned char>(c))) previous = c;
    }
    return false;
}

/// Index just past the element's closing tag, or text.size().
std::size_t skip_raw_content(std::string_view text, std::size_t from, std::string_view name) {
    for (std::size_t i = text.find('<', from); i != std::string_view::npos; i = text.find('<', i + 1)) {
        if (i + 1 < text.size() && text[i + 1] == '/' && starts_with_icase(text, i + 2, name)) {
            const std::size_t after = i + 2 + name.size();
            if (after >= text.size()) return text.size();
            const char c = text[after];
            if (c == '>' || std::isspace(static_cast<unsigned char>(c)) || c == '/') {
                const auto close = text.find('>', after);
                return close == std::string_view::npos ? text.size() : close + 1;
            }
        }
    }
    return text.size();
}

void append_escaped(std::string& out, char c) {
    switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
    }
}

}  // namespace

bool is_allowed_tag(std::string_view name) {
    return std::find(std::begin(kAllowedTags), std::end(kAllowedTags), name) != std::end(kAllowedTags);
}

std::string escape_html(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (const char c : text) append_escaped(out, c);
    return out;
}

std::string sanitize_html(std::string_view input) {
    std::string out;
    out.reserve(input.size());
    std::vector<std::string> open;

    std::size_t i = 0;
    while (i < input.size()) {
        const char c = input[i];
        if (c == '&') {
            if (const auto length = entity_length(input, i); length > 0) {
                out.append(input.substr(i, length));
                i += length;
            } else {
                out += "&amp;";
                ++i;
            }
            continue;
        }
        if (c != '<') {
            append_escaped(out, c);
            ++i;
            continue;
        }
        if (input.compare(i, 4, "<!--") == 0) {
            const auto close = input.find("-->", i + 4);
            i = close == std::string_view::npos ? input.size() : close + 3;
            continue;
        }
        if (input.compare(i, 9, "<![CDATA[") == 0) {
            const auto close = input.find("]]>", i + 9);
            i = close == std::string_view::npos ? input.size() : close + 3;
            continue;
        }
        if (i + 1 < input.size() && (input[i + 1] == '!' || input[i + 1] == '?')) {
            const auto close = input.find('>', i + 2);
            i = close == std::string_view::npos ? input.size() : close + 1;
            continue;
        }
        Tag tag;
        if (!parse_tag(input, i, tag)) {
            out += "&lt;";
            ++i;
            continue;
        }
        i = tag.end;
        if (tag.closing) {
            const auto it = std::find(open.rbegin(), open.rend(), tag.name);
            if (it == open.rend()) continue;
            const auto keep = static_cast<std::size_t>(std::distance(it, open.rend())) - 1;
            while (open.size() > keep) {
                out += "</" + open.back() + ">";
                open.pop_back();
            }
            continue;
        }
        if (is_raw_content_tag(tag.name)) {
            if (!tag.self_closing) i = skip_raw_content(input, i, tag.name);
            continue;
        }
        if (!is_allowed_tag(tag.name)) continue;
        if (tag.name == "br") {
            out += "<br>";
        } else if (tag.self_closing) {
            out += "<" + tag.name + "></" + tag.name + ">";
        } else {
            out += "<" + tag.name + ">";
            open.push_back(tag.name);
        }
    }
    while (!open.empty()) {
        out += "</" + open.back() + ">";
        open.pop_back();
    }
    return out;
}

}  // namespace rehearse::feedback
