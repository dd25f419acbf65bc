#pragma once

#include "app.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace rehearse::cli {

struct ReplayResult {
    std::string name;
    bool passed = false;
    /// Unified diff of expected vs actual text, empty on a match.
    std::string diff;
    std::vector<std::string> problems;
    /// Canonical export of the replayed session.
    std::string exported;
};

/// Runs a scenario file end to end against its scripted mock provider in a
/// scratch data directory and compares the asked questions and thread
/// messages with the scenario's expectations.
ReplayResult replay_scenario(const std::filesystem::path& scenario, const GlobalOptions& options);

/// Lines compared by replay for one scenario's outcome.
std::vector<std::string> render_questions(const session::InterviewSession& session);
std::vector<std::string> render_thread(const feedback::FeedbackThread& thread);

}  // namespace rehearse::cli
