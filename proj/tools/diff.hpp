#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace rehearse::cli {

std::vector<std::string> split_lines(std::string_view text);

/// Unified diff of two line sequences with `context` lines around each
/// change. Empty when the inputs are equal.
std::string unified_diff(const std::vector<std::string>& expected, const std::vector<std::string>& actual,
                         std::string_view expected_label = "expected", std::string_view actual_label = "actual",
                         std::size_t context = 3);

}  // namespace rehearse::cli
