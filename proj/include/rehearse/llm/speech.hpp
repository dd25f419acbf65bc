#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace rehearse::llm {

struct TimedText {
    std::string text;
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;
    friend bool operator==(const TimedText&, const TimedText&) = default;
};

/// Speech-to-text plug-in. Segments may come back in any order.
class Transcriber {
public:
    virtual ~Transcriber() = default;
    virtual std::vector<TimedText> transcribe_raw(const std::string& audio_ref) = 0;
};

/// Runs the plug-in and returns its segments sorted by start_ms (stable).
std::vector<TimedText> transcribe(Transcriber& transcriber, const std::string& audio_ref);

/// Offline transcriber: audio ref `r` resolves to `<dir>/<r>.txt`. The file
/// holds the spoken text; an optional first line `#duration_ms=<n>` declares
/// the recording length (otherwise estimated at `ms_per_char`). The result is
/// a single segment starting at 0. Throws UnresolvableAudio.
class SidecarTranscriber final : public Transcriber {
public:
    explicit SidecarTranscriber(std::filesystem::path directory, std::int64_t ms_per_char = 60)
        : directory_(std::move(directory)), ms_per_char_(ms_per_char) {}

    std::vector<TimedText> transcribe_raw(const std::string& audio_ref) override;

private:
    std::filesystem::path directory_;
    std::int64_t ms_per_char_;
};

/// Text-to-speech plug-in. Optional: the engine works in text mode without it.
class Synthesizer {
public:
    virtual ~Synthesizer() = default;
    /// Returns an opaque audio reference or throws CapabilityUnavailable /
    /// ProviderError.
    virtual std::string synthesize(std::string_view text) = 0;
};

class NullSynthesizer final : public Synthesizer {
public:
    std::string synthesize(std::string_view text) override;
};

/// Returns "tts-<sha256 of text>" without producing audio.
class MockSynthesizer final : public Synthesizer {
public:
    std::string synthesize(std::string_view text) override;
};

}  // namespace rehearse::llm
