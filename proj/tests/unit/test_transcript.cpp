#include <catch2/catch_amalgamated.hpp>

#include "rehearse/error.hpp"
#include "rehearse/session/transcript.hpp"

#include <numeric>
#include <random>

using namespace rehearse;
using namespace rehearse::session;

TEST_CASE("split_sentences keeps trailing whitespace with the sentence") {
    CHECK(split_sentences("I led a team. We shipped.") == std::vector<std::string>{"I led a team. ", "We shipped."});
    CHECK(split_sentences("Really?! Yes...  Fine") == std::vector<std::string>{"Really?! ", "Yes...  ", "Fine"});
    CHECK(split_sentences("Version 3.5 is out. ok") == std::vector<std::string>{"Version 3.5 is out. ", "ok"});
    CHECK(split_sentences("").empty());
    CHECK(split_sentences("no terminator") == std::vector<std::string>{"no terminator"});
}

TEST_CASE("sentence timestamps for the reference answer") {
    const Segment segment{Speaker::Candidate, "I led a team. We shipped.", 0, 2500};
    const auto sentences = index_segment(segment, 3);
    REQUIRE(sentences.size() == 2);
    CHECK(sentences[0].range() == TimeRange{0, 1400});
    CHECK(sentences[1].range() == TimeRange{1400, 2500});
    CHECK(sentences[0].segment_index == 3);
}

namespace {

std::string random_text(std::mt19937& rng) {
    static const std::vector<std::string> words = {"I", "led", "the", "team", "3.5", "release", "e.g.x", "ok",
                                                   "éclair", "wow", "  "};
    static const std::vector<std::string> ends = {".", "!", "?", "...", "?!", ""};
    std::uniform_int_distribution<std::size_t> w(0, words.size() - 1), e(0, ends.size() - 1), n(0, 12);
    std::string text;
    const auto count = n(rng);
    for (std::size_t i = 0; i < count; ++i) {
        text += words[w(rng)];
        text += ends[e(rng)];
        text += (i % 3 == 0) ? "\n" : " ";
    }
    return text;
}

}  // namespace

TEST_CASE("pieces concatenate back to the input, apportioned by byte share") {
    std::mt19937 rng(2024);
    std::uniform_int_distribution<std::int64_t> start(0, 100000), length(0, 20000);
    for (int i = 0; i < 500; ++i) {
        const auto text = random_text(rng);
        const auto s = start(rng);
        const Segment segment{Speaker::Candidate, text, s, s + length(rng)};
        const auto pieces = split_sentences(text);
        CHECK(std::accumulate(pieces.begin(), pieces.end(), std::string()) == text);

        const auto sentences = index_segment(segment, 0);
        REQUIRE(sentences.size() == pieces.size());
        // Oracle: boundary k sits at start + floor(duration * bytes_before_k / total).
        const long double duration = static_cast<long double>(segment.end_ms - segment.start_ms);
        std::size_t before = 0;
        for (std::size_t k = 0; k < sentences.size(); ++k) {
            const auto expect_from = segment.start_ms + static_cast<std::int64_t>(duration * before / text.size());
            before += pieces[k].size();
            const auto expect_to = segment.start_ms + static_cast<std::int64_t>(duration * before / text.size());
            CHECK(sentences[k].start_ms == expect_from);
            CHECK(sentences[k].end_ms == expect_to);
        }
        if (!sentences.empty()) {
            CHECK(sentences.front().start_ms == segment.start_ms);
            CHECK(sentences.back().end_ms == segment.end_ms);
        }
    }
}

TEST_CASE("append rejects overlapping and inverted segments") {
    Transcript t;
    t.append({Speaker::Interviewer, "Hello.", 0, 1000});
    CHECK_THROWS_AS(t.append({Speaker::Candidate, "Hi.", 999, 2000}), InvalidSpan);
    CHECK_THROWS_AS(t.append({Speaker::Candidate, "Hi.", 3000, 2000}), InvalidSpan);
    CHECK_THROWS_AS(t.append({Speaker::Candidate, "Hi.", -5, 2000}), InvalidSpan);
    t.append({Speaker::Candidate, "Hi.", 1000, 2000});
    t.append({Speaker::Interviewer, "Next.", 2500, 3000});
    CHECK(t.duration_ms() == 3000);
    CHECK(t.segments().size() == 3);
}

TEST_CASE("excerpt joins sentences within a segment and segments by newline") {
    const auto t = Transcript::from_segments({
        {Speaker::Interviewer, "Tell me about it.", 0, 1000},
        {Speaker::Candidate, "I led a team. We shipped.", 1000, 3500},
    });
    CHECK(t.excerpt({1000, 3500}) == "I led a team. We shipped.");
    CHECK(t.excerpt({1000, 1100}) == "I led a team. ");
    CHECK(t.excerpt({2400, 2400}) == "We shipped.");
    CHECK(t.excerpt({500, 1500}) == "Tell me about it.\nI led a team. ");
    CHECK(t.excerpt({3500, 4000}).empty());
    CHECK(Transcript().duration_ms() == 0);
}
