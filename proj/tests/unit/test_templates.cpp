#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"

#include "rehearse/error.hpp"

using namespace rehearse;
using namespace rehearse::llm;
using rehearse::testing::TempDir;

TEST_CASE("placeholders are found in order of first appearance") {
    const PromptTemplate t(TemplateName::SimFirst, "{b} and {a} then {b} {not valid} {_x1} {1x} {}");
    CHECK(t.placeholders() == std::vector<std::string>{"b", "a", "_x1"});
}

TEST_CASE("render substitutes once and leaves other text alone") {
    const PromptTemplate t(TemplateName::SimFirst, "Hi {name}, {{name}} {not valid} {x");
    CHECK(t.render({{"name", "{name}"}}) == "Hi {name}, {{name}} {not valid} {x");
    CHECK(t.render({{"name", "Ana"}, {"unused", "z"}}) == "Hi Ana, {Ana} {not valid} {x");
}

TEST_CASE("render reports the unbound placeholder") {
    const PromptTemplate t(TemplateName::SimFollowUp, "questions [{initial_questions}]");
    try {
        t.render({});
        FAIL("expected UnboundPlaceholder");
    } catch (const UnboundPlaceholder& e) {
        CHECK(std::string(e.what()).find("initial_questions") != std::string::npos);
    }
}

TEST_CASE("shipped templates expose the expected placeholders") {
    const auto& set = testing::shipped_templates();
    CHECK(set.get(TemplateName::SimFirst).placeholders() ==
          std::vector<std::string>{"input_job", "initial_question_1"});
    CHECK(set.get(TemplateName::SimFollowUp).placeholders() == std::vector<std::string>{"initial_questions"});
    CHECK(set.get(TemplateName::SimNextMain).placeholders() == std::vector<std::string>{"initial_question_i"});
    CHECK(set.get(TemplateName::HintClassify).placeholders() == std::vector<std::string>{"answer"});
    CHECK(set.get(TemplateName::DialogicFeedback).placeholders() ==
          std::vector<std::string>{"transcript", "comment"});
    CHECK(set.get(TemplateName::DialogicFeedback).body().find(kAppendConversationMarker) != std::string::npos);
    CHECK(set.anti_sycophancy_suffix().has_value());
}

TEST_CASE("file stems") {
    CHECK(file_stem(TemplateName::SimFirst) == "sim_first");
    CHECK(file_stem(TemplateName::SimFollowUp) == "sim_follow_up");
    CHECK(file_stem(TemplateName::SimNextMain) == "sim_next_main");
    CHECK(file_stem(TemplateName::HintClassify) == "hint_classify");
    CHECK(file_stem(TemplateName::DialogicFeedback) == "dialogic_feedback");
}

TEST_CASE("loading fails on a missing template") {
    TempDir dir;
    for (auto name : kAllTemplates) {
        if (name == TemplateName::HintClassify) continue;
        testing::write_text(dir.path() / (std::string(file_stem(name)) + ".txt"), "body");
    }
    CHECK_THROWS_AS(TemplateSet::load(dir.path()), ConfigError);
    testing::write_text(dir.path() / "hint_classify.txt", "Answer: {answer}");
    const auto set = TemplateSet::load(dir.path());
    CHECK_FALSE(set.anti_sycophancy_suffix().has_value());
    CHECK(set.get(TemplateName::HintClassify).render({{"answer", "x"}}) == "Answer: x");
}

TEST_CASE("with replaces a single template") {
    const auto set = testing::shipped_templates().with(PromptTemplate(TemplateName::HintClassify, "{answer}!"));
    CHECK(set.get(TemplateName::HintClassify).render({{"answer", "a"}}) == "a!");
    CHECK(set.get(TemplateName::SimFirst).body() ==
          testing::shipped_templates().get(TemplateName::SimFirst).body());
}
