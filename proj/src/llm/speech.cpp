#include "rehearse/llm/speech.hpp"

#include "rehearse/coverage.hpp"
#include "rehearse/error.hpp"
#include "rehearse/hash.hpp"
#include "rehearse/ids.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>

namespace rehearse::llm {

std::vector<TimedText> transcribe(Transcriber& transcriber, const std::string& audio_ref) {
    note_operation("transcribe");
    auto segments = transcriber.transcribe_raw(audio_ref);
    std::stable_sort(segments.begin(), segments.end(),
                     [](const TimedText& a, const TimedText& b) { return a.start_ms < b.start_ms; });
    return segments;
}

std::vector<TimedText> SidecarTranscriber::transcribe_raw(const std::string& audio_ref) {
    if (!is_safe_id(audio_ref)) throw UnresolvableAudio("invalid audio reference: " + audio_ref);
    const auto path = directory_ / (audio_ref + ".txt");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UnresolvableAudio("no transcript sidecar for audio " + audio_ref);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    std::string text = buffer.str();

    std::optional<std::int64_t> duration;
    constexpr std::string_view header = "#duration_ms=";
    if (text.rfind(header, 0) == 0) {
        const auto line_end = text.find('\n');
        const auto value = text.substr(header.size(), line_end - header.size());
        try {
            duration = std::stoll(value);
        } catch (const std::exception&) {
            throw UnresolvableAudio("sidecar for " + audio_ref + " has a bad duration header");
        }
        if (*duration < 0) throw UnresolvableAudio("sidecar for " + audio_ref + " has a negative duration");
        text = line_end == std::string::npos ? std::string() : text.substr(line_end + 1);
    }
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
    const auto length = duration.value_or(static_cast<std::int64_t>(text.size()) * ms_per_char_);
    return {TimedText{std::move(text), 0, length}};
}

std::string NullSynthesizer::synthesize(std::string_view) {
    note_operation("synthesize");
    throw CapabilityUnavailable("speech synthesis is not configured");
}

std::string MockSynthesizer::synthesize(std::string_view text) {
    note_operation("synthesize");
    return "tts-" + sha256_hex(text);
}

}  // namespace rehearse::llm
