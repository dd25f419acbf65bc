#pragma once

#include <string>
#include <string_view>

namespace rehearse::feedback {

/// Tags kept by sanitize_html. Attributes are always dropped.
inline constexpr std::string_view kAllowedTags[] = {"p", "ul", "ol", "li", "b", "strong", "em", "br"};

bool is_allowed_tag(std::string_view name);

/// Reduces provider markup to the allowed tags.
///
/// - Allowed tags are re-emitted bare (`<p class=x>` becomes `<p>`); `br` is
///   emitted as `<br>`.
/// - Closing tags without a matching open tag are dropped; tags still open
///   at the end are closed in order. Closing an outer tag closes the inner
///   ones first.
/// - Other tags, comments, CDATA sections, doctypes and processing
///   instructions are removed.
///   The content of script, style, iframe, object, template, textarea and
///   noscript elements is removed with them.
/// - Text is entity-escaped (& < > "), existing entities are kept.
std::string sanitize_html(std::string_view input);

/// Entity-escapes plain text.
std::string escape_html(std::string_view text);

}  // namespace rehearse::feedback
