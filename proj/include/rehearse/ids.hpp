#pragma once

#include <cstdint>
#include <mutex>
#include <random>
#include <string>
#include <string_view>

namespace rehearse {

/// Source of globally unique identifiers, e.g. "s3f09a1c2d4e5b6a7".
class IdSource {
public:
    virtual ~IdSource() = default;
    virtual std::string next(std::string_view prefix) = 0;
};

/// Pseudo-random ids from a 64-bit engine. A fixed seed gives a reproducible
/// id stream; the default constructor seeds from std::random_device.
class RandomIdSource final : public IdSource {
public:
    RandomIdSource();
    explicit RandomIdSource(std::uint64_t seed) : engine_(seed) {}

    std::string next(std::string_view prefix) override;

private:
    std::mutex mutex_;
    std::mt19937_64 engine_;
};

/// Ids usable as file names: [A-Za-z0-9_-]{1,128}.
bool is_safe_id(std::string_view id);

}  // namespace rehearse
