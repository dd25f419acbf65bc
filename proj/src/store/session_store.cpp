#include "rehearse/store/session_store.hpp"

#include "rehearse/coverage.hpp"
#include "rehearse/error.hpp"
#include "rehearse/hash.hpp"
#include "rehearse/ids.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>

namespace rehearse::store {

namespace fs = std::filesystem;

namespace {

std::atomic<unsigned long> temp_counter{0};

void write_all(int fd, std::string_view bytes, const fs::path& path) {
    while (!bytes.empty()) {
        const auto written = ::write(fd, bytes.data(), bytes.size());
        if (written < 0) {
            if (errno == EINTR) continue;
            throw StorageError("write failed for " + path.string() + ": " + std::strerror(errno));
        }
        bytes.remove_prefix(static_cast<std::size_t>(written));
    }
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StorageError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

SessionStore::SessionStore(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(sessions_dir(), ec);
    if (!ec) fs::create_directories(audio_dir(), ec);
    if (ec) throw StorageError("cannot create data directory " + root_.string() + ": " + ec.message());
}

fs::path SessionStore::record_path(std::string_view session_id) const {
    if (!is_safe_id(session_id)) throw NotFound("no session " + std::string(session_id));
    return sessions_dir() / (std::string(session_id) + ".json");
}

void SessionStore::write_atomically(const fs::path& target, std::string_view bytes) const {
    const auto temporary =
        target.parent_path() / ("." + target.filename().string() + ".tmp." + std::to_string(::getpid()) + "." +
                                std::to_string(temp_counter++));
    const int fd = ::open(temporary.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0) throw StorageError("cannot create " + temporary.string() + ": " + std::strerror(errno));
    try {
        write_all(fd, bytes, temporary);
        if (::fsync(fd) != 0) throw StorageError("fsync failed for " + temporary.string());
    } catch (...) {
        ::close(fd);
        std::error_code ignored;
        fs::remove(temporary, ignored);
        throw;
    }
    ::close(fd);

    // A throwing hook simulates a crash: the temporary stays behind, the
    // target is untouched.
    if (before_commit_) before_commit_(temporary);

    std::error_code ec;
    fs::rename(temporary, target, ec);
    if (ec) {
        fs::remove(temporary, ec);
        throw StorageError("cannot commit " + target.string() + ": " + ec.message());
    }
}

std::string SessionStore::store(const SessionRecord& record) {
    note_operation("store");
    record.validate();
    write_atomically(record_path(record.id()), canonical_text(record));
    return record.id();
}

bool SessionStore::contains(std::string_view session_id) const {
    if (!is_safe_id(session_id)) return false;
    return fs::exists(record_path(session_id));
}

SessionRecord SessionStore::load(std::string_view session_id) const {
    note_operation("load");
    const auto path = record_path(session_id);
    if (!fs::exists(path)) throw NotFound("no session " + std::string(session_id));
    auto record = parse_record(read_file(path));
    if (record.id() != session_id) throw CorruptRecord("file " + path.string() + " holds another session");
    try {
        record.validate();
    } catch (const ValidationError& e) {
        throw CorruptRecord(e.what());
    }
    return record;
}

std::vector<SessionSummary> SessionStore::list_sessions() const {
    note_operation("list_sessions");
    std::vector<SessionSummary> summaries;
    std::error_code ec;
    for (const auto& item : fs::directory_iterator(sessions_dir(), ec)) {
        const auto name = item.path().filename().string();
        if (name.empty() || name.front() == '.' || item.path().extension() != ".json") continue;
        try {
            const auto record = load(item.path().stem().string());
            summaries.push_back({record.id(), record.session.job.job_title, record.session.created_at,
                                 record.session.state});
        } catch (const Error&) {
            // unreadable records are not listed
        }
    }
    std::sort(summaries.begin(), summaries.end(), [](const SessionSummary& a, const SessionSummary& b) {
        if (a.created_at != b.created_at) return a.created_at > b.created_at;
        return a.session_id < b.session_id;
    });

    nlohmann::json index = nlohmann::json::array();
    for (const auto& s : summaries) {
        index.push_back({{"session_id", s.session_id},
                         {"job_title", s.job_title},
                         {"created_at", format_timestamp(s.created_at)},
                         {"state", session::to_string(s.state)}});
    }
    {
        std::lock_guard lock(index_mutex_);
        write_atomically(root_ / "index.json", index.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n");
    }
    return summaries;
}

std::string SessionStore::store_audio(std::string_view bytes) {
    const auto hash = sha256_hex(bytes);
    const auto path = audio_dir() / hash;
    if (!fs::exists(path)) write_atomically(path, bytes);
    return hash;
}

fs::path SessionStore::audio_path(std::string_view audio_ref) const {
    if (!is_safe_id(audio_ref)) throw UnresolvableAudio("invalid audio reference");
    return audio_dir() / std::string(audio_ref);
}

}  // namespace rehearse::store
