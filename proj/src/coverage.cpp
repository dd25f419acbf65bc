#include "rehearse/coverage.hpp"

#include <mutex>

namespace rehearse {
namespace {

std::mutex& counts_mutex() {
    static std::mutex m;
    return m;
}

std::map<std::string, unsigned long>& counts() {
    static std::map<std::string, unsigned long> c;
    return c;
}

}  // namespace

void note_operation(std::string_view name) {
    std::lock_guard lock(counts_mutex());
    ++counts()[std::string(name)];
}

std::map<std::string, unsigned long> operation_counts() {
    std::lock_guard lock(counts_mutex());
    return counts();
}

void reset_operation_counts() {
    std::lock_guard lock(counts_mutex());
    counts().clear();
}

}  // namespace rehearse
