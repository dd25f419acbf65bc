#pragma once

#include "rehearse/time.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace rehearse::session {

enum class Speaker { Interviewer, Candidate };

std::string_view to_string(Speaker speaker);
Speaker speaker_from_string(std::string_view text);

/// One full utterance.
struct Segment {
    Speaker speaker = Speaker::Interviewer;
    std::string text;
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;

    TimeRange range() const { return {start_ms, end_ms}; }
    friend bool operator==(const Segment&, const Segment&) = default;
};

struct Sentence {
    std::size_t segment_index = 0;
    std::string text;
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;

    TimeRange range() const { return {start_ms, end_ms}; }
    friend bool operator==(const Sentence&, const Sentence&) = default;
};

/// Splits after each run of sentence-ending punctuation (. ! ?) that is
/// followed by whitespace or the end of text. Whitespace after the
/// terminator stays with the preceding sentence, so concatenating the
/// pieces reproduces `text` exactly. Text that is empty yields no pieces.
std::vector<std::string> split_sentences(std::string_view text);

/// Apportions [start_ms, end_ms) over the pieces proportionally to their
/// character (byte) counts. Boundaries are floor(duration * prefix / total).
std::vector<Sentence> index_segment(const Segment& segment, std::size_t segment_index);

class Transcript {
public:
    Transcript() = default;

    /// Throws InvalidSpan if the segment starts before the previous one ends
    /// or has end < start.
    void append(Segment segment);

    const std::vector<Segment>& segments() const { return segments_; }
    const std::vector<Sentence>& sentences() const { return sentences_; }

    /// End of the last segment, 0 when empty.
    std::int64_t duration_ms() const;

    /// Text of the sentences intersecting `range`. Sentences from the same
    /// segment are concatenated; pieces from different segments are joined
    /// by a newline.
    std::string excerpt(const TimeRange& range) const;

    static Transcript from_segments(std::vector<Segment> segments);

    friend bool operator==(const Transcript&, const Transcript&) = default;

private:
    std::vector<Segment> segments_;
    std::vector<Sentence> sentences_;
};

}  // namespace rehearse::session
