#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rehearse::llm {

enum class TemplateName { SimFirst, SimFollowUp, SimNextMain, HintClassify, DialogicFeedback };

inline constexpr TemplateName kAllTemplates[] = {
    TemplateName::SimFirst,     TemplateName::SimFollowUp,     TemplateName::SimNextMain,
    TemplateName::HintClassify, TemplateName::DialogicFeedback,
};

/// File stem under the templates directory, e.g. "sim_first".
std::string_view file_stem(TemplateName name);

using Bindings = std::map<std::string, std::string, std::less<>>;

/// Marker in the dialogic-feedback body after which the running conversation
/// is appended as chat messages.
inline constexpr std::string_view kAppendConversationMarker = "<APPEND CONVERSATION>";

/// Text with `{name}` placeholders, name matching [A-Za-z_][A-Za-z0-9_]*.
/// Braces that do not enclose a valid name are literal text.
class PromptTemplate {
public:
    PromptTemplate(TemplateName name, std::string body) : name_(name), body_(std::move(body)) {}

    TemplateName name() const { return name_; }
    const std::string& body() const { return body_; }

    /// Distinct placeholder names in order of first appearance.
    std::vector<std::string> placeholders() const;

    /// Single-pass substitution; values are inserted verbatim and are not
    /// rescanned. Throws UnboundPlaceholder naming the first unbound marker.
    std::string render(const Bindings& bindings) const;

private:
    TemplateName name_;
    std::string body_;
};

/// Placeholder names found in arbitrary text.
std::vector<std::string> find_placeholders(std::string_view text);

/// The full set of prompt templates an engine needs.
class TemplateSet {
public:
    /// Reads templates/<stem>.txt for every TemplateName plus the optional
    /// anti_sycophancy_suffix.txt. Throws ConfigError on a missing file.
    static TemplateSet load(const std::filesystem::path& directory);

    const PromptTemplate& get(TemplateName name) const;
    const std::optional<std::string>& anti_sycophancy_suffix() const { return suffix_; }

    TemplateSet with(PromptTemplate replacement) const;

private:
    std::map<TemplateName, PromptTemplate> templates_;
    std::optional<std::string> suffix_;
};

}  // namespace rehearse::llm
