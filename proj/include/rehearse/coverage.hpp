#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>

namespace rehearse {

/// Process-wide tally of engine operations, used by the CLI to report which
/// operations a scenario exercised.
inline constexpr std::array<std::string_view, 18> kCoreOperations{
    "create_session", "submit_answer", "get_transcript", "render", "complete", "transcribe",
    "synthesize", "classify_answers", "parse_label", "highlight_ranges", "create_annotation",
    "start_thread", "ask", "submit_revision", "save_thread", "store", "load", "list_sessions"};

void note_operation(std::string_view name);
std::map<std::string, unsigned long> operation_counts();
void reset_operation_counts();

}  // namespace rehearse
