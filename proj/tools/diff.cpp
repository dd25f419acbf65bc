#include "diff.hpp"

#include <algorithm>

namespace rehearse::cli {

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        const auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            lines.emplace_back(text.substr(start));
            break;
        }
        lines.emplace_back(text.substr(start, end - start));
        start = end + 1;
    }
    return lines;
}

namespace {

struct Edit {
    char op;  // ' ', '-', '+'
    std::size_t a;
    std::size_t b;
};

std::vector<Edit> edit_script(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    const auto n = a.size();
    const auto m = b.size();
    std::vector<std::vector<std::size_t>> lcs(n + 1, std::vector<std::size_t>(m + 1, 0));
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = m; j-- > 0;) {
            lcs[i][j] = a[i] == b[j] ? lcs[i + 1][j + 1] + 1 : std::max(lcs[i + 1][j], lcs[i][j + 1]);
        }
    }
    std::vector<Edit> edits;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < n || j < m) {
        if (i < n && j < m && a[i] == b[j]) {
            edits.push_back({' ', i++, j++});
        } else if (j < m && (i == n || lcs[i][j + 1] >= lcs[i + 1][j])) {
            edits.push_back({'+', i, j++});
        } else {
            edits.push_back({'-', i++, j});
        }
    }
    return edits;
}

std::string range_text(std::size_t first, std::size_t count) {
    // Line numbers are 1-based; an empty side reports the line before it.
    const auto start = count == 0 ? first : first + 1;
    return std::to_string(start) + "," + std::to_string(count);
}

}  // namespace

std::string unified_diff(const std::vector<std::string>& expected, const std::vector<std::string>& actual,
                         std::string_view expected_label, std::string_view actual_label, std::size_t context) {
    const auto edits = edit_script(expected, actual);
    if (std::all_of(edits.begin(), edits.end(), [](const Edit& e) { return e.op == ' '; })) return {};

    std::string out = "--- " + std::string(expected_label) + "\n+++ " + std::string(actual_label) + "\n";
    std::size_t k = 0;
    while (k < edits.size()) {
        while (k < edits.size() && edits[k].op == ' ') ++k;
        if (k == edits.size()) break;
        const auto begin = k >= context ? k - context : 0;
        auto end = k;
        // Extend the hunk while changes are separated by at most 2*context equal lines.
        while (end < edits.size()) {
            if (edits[end].op != ' ') {
                ++end;
                continue;
            }
            auto run = end;
            while (run < edits.size() && edits[run].op == ' ') ++run;
            if (run == edits.size() || run - end > 2 * context) {
                end = std::min(edits.size(), end + context);
                break;
            }
            end = run;
        }
        std::size_t a_count = 0;
        std::size_t b_count = 0;
        for (auto x = begin; x < end; ++x) {
            if (edits[x].op != '+') ++a_count;
            if (edits[x].op != '-') ++b_count;
        }
        out += "@@ -" + range_text(edits[begin].a, a_count) + " +" + range_text(edits[begin].b, b_count) + " @@\n";
        for (auto x = begin; x < end; ++x) {
            const auto& e = edits[x];
            out += e.op;
            out += e.op == '+' ? actual[e.b] : expected[e.a];
            out += '\n';
        }
        k = end;
    }
    return out;
}

}  // namespace rehearse::cli
