#include "rehearse/llm/prompt_template.hpp"

#include "rehearse/coverage.hpp"
#include "rehearse/error.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace rehearse::llm {

std::string_view file_stem(TemplateName name) {
    switch (name) {
        case TemplateName::SimFirst: return "sim_first";
        case TemplateName::SimFollowUp: return "sim_follow_up";
        case TemplateName::SimNextMain: return "sim_next_main";
        case TemplateName::HintClassify: return "hint_classify";
        case TemplateName::DialogicFeedback: return "dialogic_feedback";
    }
    return "";
}

namespace {

bool name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

/// Calls on_text(literal) and on_name(name) in order over `text`.
template <typename OnText, typename OnName>
void scan(std::string_view text, OnText on_text, OnName on_name) {
    std::size_t literal_begin = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] != '{' || i + 1 >= text.size() || !name_start(text[i + 1])) {
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        while (j < text.size() && name_char(text[j])) ++j;
        if (j >= text.size() || text[j] != '}') {
            i = j;
            continue;
        }
        on_text(text.substr(literal_begin, i - literal_begin));
        on_name(text.substr(i + 1, j - i - 1));
        i = j + 1;
        literal_begin = i;
    }
    on_text(text.substr(literal_begin));
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read template " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

std::vector<std::string> find_placeholders(std::string_view text) {
    std::vector<std::string> names;
    scan(
        text, [](std::string_view) {},
        [&](std::string_view name) {
            if (std::find(names.begin(), names.end(), name) == names.end()) names.emplace_back(name);
        });
    return names;
}

std::vector<std::string> PromptTemplate::placeholders() const { return find_placeholders(body_); }

std::string PromptTemplate::render(const Bindings& bindings) const {
    note_operation("render");
    std::string out;
    out.reserve(body_.size());
    scan(
        body_, [&](std::string_view literal) { out += literal; },
        [&](std::string_view name) {
            const auto it = bindings.find(name);
            if (it == bindings.end()) {
                throw UnboundPlaceholder("template " + std::string(file_stem(name_)) +
                                         " has unbound placeholder {" + std::string(name) + "}");
            }
            out += it->second;
        });
    return out;
}

TemplateSet TemplateSet::load(const std::filesystem::path& directory) {
    TemplateSet set;
    for (const auto name : kAllTemplates) {
        const auto path = directory / (std::string(file_stem(name)) + ".txt");
        set.templates_.emplace(name, PromptTemplate(name, read_file(path)));
    }
    const auto suffix_path = directory / "anti_sycophancy_suffix.txt";
    if (std::filesystem::exists(suffix_path)) set.suffix_ = read_file(suffix_path);
    return set;
}

const PromptTemplate& TemplateSet::get(TemplateName name) const {
    const auto it = templates_.find(name);
    if (it == templates_.end()) {
        throw ConfigError("template " + std::string(file_stem(name)) + " is not loaded");
    }
    return it->second;
}

TemplateSet TemplateSet::with(PromptTemplate replacement) const {
    TemplateSet copy = *this;
    copy.templates_.insert_or_assign(replacement.name(), std::move(replacement));
    return copy;
}

}  // namespace rehearse::llm
