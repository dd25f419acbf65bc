#include "rehearse/ids.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

namespace rehearse {

RandomIdSource::RandomIdSource() {
    std::random_device device;
    engine_.seed((static_cast<std::uint64_t>(device()) << 32) ^ device());
}

std::string RandomIdSource::next(std::string_view prefix) {
    std::uint64_t value;
    {
        std::lock_guard lock(mutex_);
        value = engine_();
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(value));
    return std::string(prefix) + hex;
}

bool is_safe_id(std::string_view id) {
    if (id.empty() || id.size() > 128) return false;
    return std::all_of(id.begin(), id.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '-';
    });
}

}  // namespace rehearse
