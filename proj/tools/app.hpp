#pragma once

#include "rehearse/llm/mock_provider.hpp"
#include "rehearse/workspace.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>

namespace rehearse::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kProvider = 3,
    kStorage = 4,
};

int exit_code_for(const Error& error);

struct GlobalOptions {
    std::filesystem::path data_dir = "data";
    std::filesystem::path templates_dir;
    std::optional<std::filesystem::path> provider_config;
    bool mock = false;
    std::optional<std::filesystem::path> mock_script;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> fixed_time;
    bool strict_labels = false;
};

/// A workspace plus the pieces the CLI needs to reach directly.
struct Runtime {
    std::shared_ptr<llm::MockProvider> mock;
    std::unique_ptr<Workspace> workspace;
};

/// Builds the workspace described by the global flags. Throws ConfigError
/// when no provider is selected, unless `needs_provider` is false; storage-only
/// commands then get a provider that fails every call.
Runtime make_runtime(const GlobalOptions& options, bool needs_provider = true);

/// Same, with an explicit mock script and data directory.
Runtime make_mock_runtime(const GlobalOptions& options, const nlohmann::json& mock_script,
                          const std::filesystem::path& data_dir, bool anti_sycophancy = false);

/// Entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace rehearse::cli
