#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"

#include "rehearse/annotation/hints.hpp"
#include "rehearse/error.hpp"

using namespace rehearse;
using namespace rehearse::annotation;
using rehearse::testing::InterviewRig;

namespace {

session::InterviewSession completed_session(InterviewRig& rig, const std::vector<std::string>& answers) {
    session::InterviewScript script{{"One?", "Two?"}, 1};
    auto s = rig.interviewer.create_session(session::JobContext::make("Welder"), script);
    for (const auto& a : answers) rig.interviewer.submit_answer(s, {a, {}, {}});
    return s;
}

}  // namespace

TEST_CASE("one classification call per answer, results in turn order") {
    InterviewRig rig;
    auto s = completed_session(rig, {"vague", "the result: it worked", "meh", "the outcome was fine"});
    const auto before = rig.mock->call_count();
    const auto result = classify_answers(s, rig.gateway, rig.templates);
    CHECK(rig.mock->call_count() - before == 4);
    REQUIRE(result.hints.size() == 4);
    CHECK(result.errors.empty());
    CHECK(result.hints[0].label == Label::NeedsImprovement);
    CHECK(result.hints[1].label == Label::Good);
    CHECK(result.hints[2].label == Label::NeedsImprovement);
    CHECK(result.hints[3].label == Label::Good);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(result.hints[i].turn_id == s.answers[i].turn_id);
        CHECK(result.hints[i].range == s.answers[i].span);
    }
    CHECK(result.hints[0].rationale_raw == "Need improvement.");

    const auto requests = rig.mock->requests();
    const auto& last = requests.back();
    REQUIRE(last.messages.size() == 1);
    CHECK(last.messages[0].role == llm::Role::User);
    CHECK(last.model == "mock-simulation");
    CHECK(last.messages[0].content.find("User Answer: ```the outcome was fine```") != std::string::npos);
}

TEST_CASE("unfinished sessions need force") {
    InterviewRig rig;
    auto s = completed_session(rig, {"only one"});
    CHECK_THROWS_AS(classify_answers(s, rig.gateway, rig.templates), WrongState);
    ClassifyOptions options;
    options.force = true;
    CHECK(classify_answers(s, rig.gateway, rig.templates, options).hints.size() == 1);
}

TEST_CASE("failures become per-turn errors") {
    InterviewRig rig;
    auto s = completed_session(rig, {"a", "b", "c", "d"});
    rig.mock->queue_text("good");
    rig.mock->queue_text("It is sort of fine");
    rig.mock->queue_failure(llm::ProviderFailure::Rejected);
    rig.mock->queue_text("needs improvement");
    const auto result = classify_answers(s, rig.gateway, rig.templates);
    REQUIRE(result.hints.size() == 2);
    REQUIRE(result.errors.size() == 2);
    CHECK(result.hints[0].turn_id == "a1");
    CHECK(result.hints[1].turn_id == "a4");
    CHECK(result.errors[0].turn_id == "a2");
    CHECK(result.errors[0].kind == "LabelParseError");
    CHECK(result.errors[0].raw == std::optional<std::string>("It is sort of fine"));
    CHECK(result.errors[1].turn_id == "a3");
    CHECK(result.errors[1].kind == "ProviderError");
    CHECK_FALSE(result.errors[1].raw.has_value());
}

TEST_CASE("strict mode turns punctuation into parse errors") {
    InterviewRig rig;
    auto s = completed_session(rig, {"a", "b", "c", "d"});
    ClassifyOptions options;
    options.mode = ParseMode::Strict;
    const auto result = classify_answers(s, rig.gateway, rig.templates, options);
    CHECK(result.errors.size() == 4);
}

TEST_CASE("parallel classification matches sequential") {
    InterviewRig rig;
    auto s = completed_session(rig, {"vague", "Result: yes", "meh", "outcome"});
    const auto sequential = classify_answers(s, rig.gateway, rig.templates);
    ClassifyOptions options;
    options.parallelism = 4;
    const auto parallel = classify_answers(s, rig.gateway, rig.templates, options);
    CHECK(parallel.hints == sequential.hints);
    CHECK(parallel.errors == sequential.errors);
}

TEST_CASE("highlights keep only needs-improvement ranges, sorted") {
    const std::vector<Hint> hints = {
        {"a3", Label::NeedsImprovement, {500, 600}, ""},
        {"a1", Label::Good, {0, 100}, ""},
        {"a2", Label::NeedsImprovement, {200, 300}, ""},
    };
    CHECK(highlight_ranges(hints) == std::vector<TimeRange>{{200, 300}, {500, 600}});
    CHECK(highlight_ranges({}).empty());
}
