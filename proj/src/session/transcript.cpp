#include "rehearse/session/transcript.hpp"

#include "rehearse/error.hpp"

#include <cctype>
#include <optional>

namespace rehearse::session {

std::string_view to_string(Speaker speaker) {
    return speaker == Speaker::Interviewer ? "interviewer" : "candidate";
}

Speaker speaker_from_string(std::string_view text) {
    if (text == "interviewer") return Speaker::Interviewer;
    if (text == "candidate") return Speaker::Candidate;
    throw InvalidArgument("unknown speaker: " + std::string(text));
}

namespace {

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> pieces;
    std::size_t begin = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_terminator(text[i])) {
            ++i;
            continue;
        }
        std::size_t end = i;
        while (end < text.size() && is_terminator(text[end])) ++end;
        if (end < text.size() && !is_space(text[end])) {
            // "3.5" or "e.g.x": not a boundary
            i = end;
            continue;
        }
        while (end < text.size() && is_space(text[end])) ++end;
        pieces.emplace_back(text.substr(begin, end - begin));
        begin = end;
        i = end;
    }
    if (begin < text.size()) pieces.emplace_back(text.substr(begin));
    return pieces;
}

std::vector<Sentence> index_segment(const Segment& segment, std::size_t segment_index) {
    const auto pieces = split_sentences(segment.text);
    std::vector<Sentence> sentences;
    sentences.reserve(pieces.size());
    const std::int64_t duration = segment.end_ms - segment.start_ms;
    const auto total = static_cast<std::int64_t>(segment.text.size());
    std::int64_t prefix = 0;
    for (const auto& piece : pieces) {
        const std::int64_t from = segment.start_ms + duration * prefix / total;
        prefix += static_cast<std::int64_t>(piece.size());
        const std::int64_t to = segment.start_ms + duration * prefix / total;
        sentences.push_back({segment_index, piece, from, to});
    }
    return sentences;
}

void Transcript::append(Segment segment) {
    if (segment.start_ms < 0 || segment.end_ms < segment.start_ms) {
        throw InvalidSpan("segment has an inverted or negative range");
    }
    if (!segments_.empty() && segment.start_ms < segments_.back().end_ms) {
        throw InvalidSpan("segment starts before the previous one ends");
    }
    auto indexed = index_segment(segment, segments_.size());
    segments_.push_back(std::move(segment));
    sentences_.insert(sentences_.end(), std::make_move_iterator(indexed.begin()),
                      std::make_move_iterator(indexed.end()));
}

std::int64_t Transcript::duration_ms() const {
    return segments_.empty() ? 0 : segments_.back().end_ms;
}

std::string Transcript::excerpt(const TimeRange& range) const {
    std::string out;
    std::optional<std::size_t> last_segment;
    for (const auto& sentence : sentences_) {
        if (!overlaps(sentence.range(), range)) continue;
        if (last_segment && *last_segment != sentence.segment_index) out += '\n';
        out += sentence.text;
        last_segment = sentence.segment_index;
    }
    return out;
}

Transcript Transcript::from_segments(std::vector<Segment> segments) {
    Transcript transcript;
    for (auto& segment : segments) transcript.append(std::move(segment));
    return transcript;
}

}  // namespace rehearse::session
