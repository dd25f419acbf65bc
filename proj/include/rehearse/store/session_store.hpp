#pragma once

#include "rehearse/store/record.hpp"

#include <filesystem>
#include <functional>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace rehearse::store {

struct SessionSummary {
    std::string session_id;
    std::string job_title;
    Timestamp created_at{};
    session::SessionState state = session::SessionState::Created;
    friend bool operator==(const SessionSummary&, const SessionSummary&) = default;
};

/// File-per-session storage:
///
///   <root>/sessions/<id>.json   canonical record
///   <root>/audio/<sha256>       opaque audio blobs
///   <root>/index.json           summaries, rebuilt by list_sessions()
///
/// Writes go to a temporary file in the same directory which is flushed and
/// then renamed over the target, so readers never observe a partial record.
class SessionStore {
public:
    /// Stage hook for fault-injection tests; called after the temporary file
    /// is fully written and before the rename.
    using BeforeCommitHook = std::function<void(const std::filesystem::path& temporary)>;

    explicit SessionStore(std::filesystem::path root);

    std::string store(const SessionRecord& record);
    /// Throws NotFound or CorruptRecord.
    SessionRecord load(std::string_view session_id) const;
    bool contains(std::string_view session_id) const;
    /// Newest first; ties broken by id. Unreadable files are skipped.
    std::vector<SessionSummary> list_sessions() const;

    /// Stores the blob under its content hash and returns the hash.
    std::string store_audio(std::string_view bytes);
    std::filesystem::path audio_path(std::string_view audio_ref) const;

    const std::filesystem::path& root() const { return root_; }
    std::filesystem::path sessions_dir() const { return root_ / "sessions"; }
    std::filesystem::path audio_dir() const { return root_ / "audio"; }

    void set_before_commit_hook(BeforeCommitHook hook) { before_commit_ = std::move(hook); }

private:
    std::filesystem::path record_path(std::string_view session_id) const;
    void write_atomically(const std::filesystem::path& target, std::string_view bytes) const;

    std::filesystem::path root_;
    BeforeCommitHook before_commit_;
    mutable std::mutex index_mutex_;
};

}  // namespace rehearse::store
