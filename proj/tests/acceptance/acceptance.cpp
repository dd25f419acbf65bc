// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "html_check.hpp"
#include "record_gen.hpp"
#include "replay.hpp"
#include "test_support.hpp"

#include "rehearse/annotation/hints.hpp"
#include "rehearse/annotation/label.hpp"
#include "rehearse/error.hpp"
#include "rehearse/feedback/sanitizer.hpp"
#include "rehearse/feedback/thread.hpp"
#include "rehearse/hash.hpp"
#include "rehearse/store/session_store.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <regex>
#include <sstream>

using namespace rehearse;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

/// Collects the first few failure details of one criterion.
class Check {
public:
    void expect(bool ok, const std::string& what) {
        if (ok) return;
        ++failures_;
        if (failures_ <= 5) detail_ += (detail_.empty() ? "" : "; ") + what;
    }
    bool passed() const { return failures_ == 0; }
    std::string detail() const {
        return failures_ > 5 ? detail_ + "; ... " + std::to_string(failures_) + " failures" : detail_;
    }

private:
    int failures_ = 0;
    std::string detail_;
};

std::string replace_all(std::string text, const std::string& from, const std::string& to) {
    for (auto pos = text.find(from); pos != std::string::npos; pos = text.find(from, pos + to.size())) {
        text.replace(pos, from.size(), to);
    }
    return text;
}

// --- interview shape --------------------------------------------------------

void interview_shape(Check& check) {
    testing::TempDir dir;
    const auto begin = std::chrono::steady_clock::now();
    testing::WorkspaceRig rig(dir.path());
    const auto script = session::InterviewScript::standard();
    check.expect(script.follow_ups_per_main == 1, "default script does not use one follow-up");
    check.expect(script.main_questions.size() == 4, "default script does not have four main questions");
    const auto id = rig.workspace->create_session("Software Engineer", script).session_id;
    testing::answer_all(*rig.workspace, id, "I would describe the situation and the result.");
    const auto session = rig.workspace->get_session(id);
    const auto elapsed = std::chrono::steady_clock::now() - begin;

    std::string pattern;
    for (const auto& q : session.asked) pattern += q.kind == session::QuestionKind::Main ? "M" : "F";
    check.expect(pattern == "MFMFMFMF", "question pattern was " + pattern);
    check.expect(session.state == session::SessionState::Completed, "session did not complete");
    for (std::size_t i = 0; i < session.asked.size(); ++i) {
        check.expect(session.asked[i].main_index == i / 2, "question " + std::to_string(i) + " has the wrong main index");
    }
    for (std::size_t m = 0; m < 4 && 2 * m < session.asked.size(); ++m) {
        const auto& text = session.asked[2 * m].text;
        check.expect(text.find(script.main_questions[m]) != std::string::npos,
                     "main question " + std::to_string(m + 1) + " is not asked verbatim");
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
    check.expect(ms < 1000, "session took " + std::to_string(ms) + " ms");
}

// --- template fidelity ------------------------------------------------------

void template_fidelity(Check& check) {
    // Digests of the reference prompt texts, computed outside this code base.
    const std::vector<std::pair<std::string, std::string>> digests = {
        {"sim_first", "2ffeb87dbc174a14112e265227fcb1bb2559787f92e53aec4488b0f11d964204"},
        {"sim_follow_up", "134cf0f8414ab808572e2d338c19a231a60946ef052c59200092f71ad0ebb6f9"},
        {"sim_next_main", "5259fbec6772c860980bae3b0fa3b151db96ffe979c86f8c2b92d85cd45f2593"},
        {"hint_classify", "053a78c180731dec35c3978de8addab47a5aa0241ad9d7e89e48f7dfc5a69335"},
        {"dialogic_feedback", "3afc6a12794f9e4bd1f2a21165d4093a55781c911ee313d8adbc82d16fb70f3b"},
    };
    for (const auto& [stem, digest] : digests) {
        const auto bytes = testing::read_text(testing::kTemplateDir / (stem + ".txt"));
        check.expect(sha256_hex(bytes) == digest, stem + " checksum differs");
    }

    const auto& templates = testing::shipped_templates();
    const auto first = templates.get(llm::TemplateName::SimFirst)
                           .render({{"input_job", "Data Analyst"}, {"initial_question_1", "Tell me about yourself?"}});
    check.expect(first ==
                     "You have a role as an interviewer for a Behavioral Job Interview for the job position Data "
                     "Analyst. Act naturally as an interviewer with a dynamic yet professional approach. Begin by "
                     "saying 'Hi, nice to meet you,' then introduce yourself as the Hiring Manager. Afterward, ask "
                     "this initial question as the first question for the interview: Tell me about yourself?\n",
                 "sim_first golden render differs");
    const auto next = templates.get(llm::TemplateName::SimNextMain)
                          .render({{"initial_question_i", "What do you consider to be your greatest strength and why?"}});
    check.expect(next ==
                     "As an interviewer, smoothly transition to the next question. Ask the interviewee the following "
                     "question: What do you consider to be your greatest strength and why?.\n",
                 "sim_next_main golden render differs");
    const auto follow = templates.get(llm::TemplateName::SimFollowUp).render({{"initial_questions", "\"A\", \"B\""}});
    check.expect(follow ==
                     "As an interviewer, ask a relevant follow-up question about the job based on the user's "
                     "previous answers and the ongoing conversation. Ensure that your follow-up question is distinct "
                     "from the questions listed [\"A\", \"B\"], and avoid repeating your previous questions.\n",
                 "sim_follow_up golden render differs");

    // Every template: substitution by plain text replacement must agree with
    // render(), including values that look like placeholders themselves.
    std::mt19937 rng(2024);
    for (const auto name : llm::kAllTemplates) {
        const auto& tpl = templates.get(name);
        for (int round = 0; round < 50; ++round) {
            llm::Bindings bindings;
            std::string expected = tpl.body();
            for (const auto& placeholder : tpl.placeholders()) {
                auto value = testing::random_text(rng, 12);
                if (round % 5 == 0) value += "{" + placeholder + "}";
                bindings[placeholder] = value;
            }
            // Replace left to right in one pass over the body.
            std::string oracle;
            for (std::size_t i = 0; i < expected.size();) {
                bool replaced = false;
                if (expected[i] == '{') {
                    for (const auto& [key, value] : bindings) {
                        const auto marker = "{" + key + "}";
                        if (expected.compare(i, marker.size(), marker) == 0) {
                            oracle += value;
                            i += marker.size();
                            replaced = true;
                            break;
                        }
                    }
                }
                if (!replaced) oracle += expected[i++];
            }
            check.expect(tpl.render(bindings) == oracle,
                         std::string(llm::file_stem(name)) + " render changed non-placeholder text");
        }
    }
}

// --- label parser -----------------------------------------------------------

std::string apply_case(const std::string& s, int variant, std::mt19937& rng) {
    std::string out = s;
    switch (variant) {
        case 0: break;
        case 1:
            for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            break;
        case 2:
            out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
            break;
        default:
            for (auto& c : out) {
                if (std::bernoulli_distribution(0.5)(rng)) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            }
    }
    return out;
}

/// Independent statement of what the lenient parser must accept.
bool oracle_accepts(std::string s, std::string* label) {
    auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; };
    auto trim = [&](std::string& t) {
        while (!t.empty() && is_space(t.front())) t.erase(t.begin());
        while (!t.empty() && is_space(t.back())) t.pop_back();
    };
    const std::vector<std::pair<std::string, std::string>> quotes = {
        {"\"", "\""}, {"'", "'"}, {"`", "`"}, {"\xE2\x80\x9C", "\xE2\x80\x9D"}, {"\xE2\x80\x98", "\xE2\x80\x99"}};
    trim(s);
    for (bool changed = true; changed;) {
        changed = false;
        while (!s.empty() && std::string(".,;:!").find(s.back()) != std::string::npos) {
            s.pop_back();
            changed = true;
        }
        trim(s);
        for (const auto& [open, close] : quotes) {
            if (s.size() >= open.size() + close.size() && s.rfind(open, 0) == 0 &&
                s.compare(s.size() - close.size(), close.size(), close) == 0) {
                s = s.substr(open.size(), s.size() - open.size() - close.size());
                changed = true;
                break;
            }
        }
        trim(s);
    }
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (s == "good") {
        *label = "good";
        return true;
    }
    if (s == "need improvement" || s == "needs improvement") {
        *label = "needs_improvement";
        return true;
    }
    return false;
}

void label_parser(Check& check) {
    std::mt19937 rng(17);
    const std::vector<std::pair<std::string, annotation::Label>> accept = {
        {"good", annotation::Label::Good},
        {"need improvement", annotation::Label::NeedsImprovement},
        {"needs improvement", annotation::Label::NeedsImprovement},
    };
    const std::vector<std::string> spaces = {"", " ", "\t", "\n", "  \r\n"};
    const std::vector<std::pair<std::string, std::string>> quotes = {
        {"", ""}, {"'", "'"}, {"\"", "\""}, {"`", "`"}, {"```", "```"}, {"\xE2\x80\x9C", "\xE2\x80\x9D"}};
    const std::vector<std::string> punctuation = {"", ".", "!", ",", ";", ":", "..."};

    std::size_t cases = 0;
    for (const auto& [base, label] : accept) {
        for (int c = 0; c < 4; ++c) {
            for (const auto& lead : spaces) {
                for (const auto& trail : spaces) {
                    for (const auto& [open, close] : quotes) {
                        for (const auto& punct : punctuation) {
                            for (const bool punct_inside : {false, true}) {
                                const auto word = apply_case(base, c, rng);
                                const auto text = punct_inside ? lead + open + word + punct + close + trail
                                                               : lead + open + word + close + punct + trail;
                                ++cases;
                                std::string expected;
                                const bool oracle = oracle_accepts(text, &expected);
                                check.expect(oracle, "oracle rejects its own accept case");
                                try {
                                    const auto got = annotation::parse_label(text, annotation::ParseMode::Lenient);
                                    check.expect(got == label, "wrong label for " + json(text).dump());
                                } catch (const LabelParseError&) {
                                    check.expect(false, "rejected " + json(text).dump());
                                }
                                // Strict mode accepts only the case and whitespace variants.
                                const bool plain = open.empty() && punct.empty();
                                bool strict_ok = true;
                                try {
                                    annotation::parse_label(text, annotation::ParseMode::Strict);
                                } catch (const LabelParseError&) {
                                    strict_ok = false;
                                }
                                check.expect(strict_ok == plain, "strict mode disagrees on " + json(text).dump());
                            }
                        }
                    }
                }
            }
        }
    }
    check.expect(cases > 1000, "truth table is too small");

    // Rejections: near misses first, then random strings over a label-like alphabet.
    std::vector<std::string> rejects = {"",          "goo",          "goodd",           "not good",
                                        "good job",  "very good",    "need improvment", "needs  improvement",
                                        "needsimprovement", "need-improvement", "improvement", "needs",
                                        "bad",       "neutral",      "good/need improvement", "'good",
                                        "good'",     "\"good'",      "(good)",          "good?",
                                        "g o o d",   "needs improvements", "needed improvement", "goodness"};
    const std::string alphabet = "godneimprvts .!'\"`,;: \t";
    std::uniform_int_distribution<std::size_t> len(0, 20), pick(0, alphabet.size() - 1);
    while (rejects.size() < 1000) {
        std::string s;
        const auto n = len(rng);
        for (std::size_t i = 0; i < n; ++i) s += alphabet[pick(rng)];
        if (std::bernoulli_distribution(0.3)(rng)) {
            // Mutate an accepted word by one character.
            s = accept[rng() % accept.size()].first;
            const auto at = rng() % s.size();
            s[at] = alphabet[pick(rng)];
        }
        std::string ignored;
        if (!oracle_accepts(s, &ignored)) rejects.push_back(s);
    }
    std::size_t false_accepts = 0;
    for (const auto& s : rejects) {
        try {
            annotation::parse_label(s, annotation::ParseMode::Lenient);
            ++false_accepts;
            check.expect(false, "accepted " + json(s).dump());
        } catch (const LabelParseError&) {
        }
    }
    check.expect(false_accepts == 0, std::to_string(false_accepts) + " false accepts");
}

// --- hint projection --------------------------------------------------------

void hint_projection(Check& check) {
    std::mt19937 rng(31337);
    const std::vector<std::string> good_variants = {"good", "Good.", "'good'", " GOOD\n"};
    const std::vector<std::string> bad_variants = {"need improvement", "Needs improvement.", "\"need improvement.\""};
    int sessions = 0;
    for (int n = 0; n < 520; ++n) {
        testing::InterviewRig rig;
        session::InterviewScript script;
        const int mains = std::uniform_int_distribution<int>(1, 4)(rng);
        for (int i = 0; i < mains; ++i) script.main_questions.push_back("Question " + std::to_string(i) + "?");
        script.follow_ups_per_main = std::uniform_int_distribution<int>(0, 2)(rng);
        auto s = rig.interviewer.create_session(session::JobContext::make("Role " + std::to_string(n)), script);

        const auto answers = std::uniform_int_distribution<std::size_t>(1, script.total_questions())(rng);
        for (std::size_t i = 0; i < answers; ++i) {
            session::AnswerInput input{testing::random_text(rng, 15), std::nullopt, std::nullopt};
            if (std::bernoulli_distribution(0.4)(rng)) {
                const auto start = s.transcript.duration_ms() + std::uniform_int_distribution<std::int64_t>(0, 3000)(rng);
                input.span = TimeRange{start, start + std::uniform_int_distribution<std::int64_t>(0, 9000)(rng)};
            }
            rig.interviewer.submit_answer(s, input);
        }

        auto classifier = std::make_shared<llm::MockProvider>();
        classifier->set_fallback(llm::MockFallback::Fail);
        std::map<std::string, bool> needs_improvement;
        for (const auto& turn : s.answers) {
            const bool bad = std::bernoulli_distribution(0.5)(rng);
            needs_improvement[turn.turn_id] = bad;
            const auto& pool = bad ? bad_variants : good_variants;
            classifier->queue_text(pool[rng() % pool.size()]);
        }
        llm::Gateway gateway(classifier, llm::GatewayConfig::for_mock());
        const auto result = annotation::classify_answers(s, gateway, rig.templates, {annotation::ParseMode::Lenient, true, 1});
        check.expect(result.errors.empty(), "classification produced errors");
        check.expect(result.hints.size() == s.answers.size(), "missing hints");

        std::vector<TimeRange> expected_highlights;
        for (const auto& hint : result.hints) {
            const auto* turn = s.find_answer(hint.turn_id);
            check.expect(turn != nullptr, "hint for unknown turn");
            if (turn == nullptr) continue;
            check.expect((hint.label == annotation::Label::NeedsImprovement) == needs_improvement[hint.turn_id],
                         "label does not match the scripted reply");
            if (hint.label == annotation::Label::NeedsImprovement) {
                check.expect(hint.range.start_ms == turn->span.start_ms && hint.range.end_ms == turn->span.end_ms,
                             "hint range differs from its answer span");
                expected_highlights.push_back(turn->span);
            }
        }
        const auto highlights = annotation::highlight_ranges(result.hints);
        std::sort(expected_highlights.begin(), expected_highlights.end());
        check.expect(highlights == expected_highlights, "highlights differ from the needs-improvement spans");
        for (const auto& h : highlights) {
            for (const auto& segment : s.transcript.segments()) {
                if (segment.speaker != session::Speaker::Interviewer) continue;
                // Half-open intervals; a zero-length highlight intersects nothing.
                const bool overlaps = h.start_ms < segment.end_ms && segment.start_ms < h.end_ms;
                check.expect(!overlaps, "highlight intersects an interviewer segment");
            }
        }
        ++sessions;
    }
    check.expect(sessions >= 500, "fewer than 500 sessions");
}

// --- feedback golden scenario -----------------------------------------------

void feedback_golden(Check& check) {
    const auto result = cli::replay_scenario(testing::kScenarioDir / "mentor_dialogue.json", {});
    for (const auto& p : result.problems) check.expect(false, p);
    check.expect(result.diff.empty(), "transcript differs from the expected text");
    if (result.exported.empty()) {
        check.expect(false, "nothing exported");
        return;
    }
    const auto record = json::parse(result.exported);
    const auto& threads = record.at("feedback_threads");
    check.expect(threads.size() == 1, "expected one thread");
    if (threads.empty()) return;
    std::vector<std::string> roles;
    for (const auto& m : threads[0].at("messages")) roles.push_back(m.at("role"));
    const std::vector<std::string> expected = {"user_question",  "assistant_feedback",   "user_revision",
                                               "assistant_assessment", "user_revision", "assistant_assessment"};
    check.expect(roles == expected, "role sequence differs");
    const auto last = threads[0].at("messages").back().at("text").get<std::string>();
    check.expect(last.find("Well Done!") != std::string::npos, "final assessment lacks \"Well Done!\"");
    check.expect(threads[0].at("state") == "saved", "thread not saved");
}

// --- prompt assembly --------------------------------------------------------

void prompt_assembly(Check& check) {
    const std::string excerpt = "I was told to fix the CI.\nIt took a week, maybe ```two```.";
    const std::string comment = "I rambled & lost the {thread}.";
    auto raw = testing::read_text(testing::kTemplateDir / "dialogic_feedback.txt");
    raw = replace_all(raw, "{transcript}", excerpt);
    // `comment` is inserted after `transcript`, so its braces are never rescanned.
    const auto marker = raw.find("<APPEND CONVERSATION>");
    auto comment_at = raw.find("{comment}");
    std::string system = raw.substr(0, comment_at) + comment + raw.substr(comment_at + 9, marker - comment_at - 9);
    while (!system.empty() && std::isspace(static_cast<unsigned char>(system.back()))) system.pop_back();

    for (const std::size_t k : {0u, 1u, 3u}) {
        auto mock = std::make_shared<llm::MockProvider>();
        for (std::size_t i = 0; i <= k; ++i) mock->queue_text("<p>reply " + std::to_string(i) + "</p>");
        llm::Gateway gateway(mock, llm::GatewayConfig::for_mock());
        ManualClock clock(testing::fixed_start());
        feedback::DialogicFeedback engine(gateway, testing::shipped_templates(), clock);
        annotation::Annotation a{"s-n1", "s", {0, 5000}, excerpt, comment, annotation::AnnotationSource::UserSelected};
        auto thread = engine.start_thread("s-t2", a);
        std::vector<std::string> sent;
        for (std::size_t i = 0; i < k; ++i) {
            sent.push_back("message " + std::to_string(i));
            if (i == 0) {
                engine.ask(thread, a, sent.back());
            } else {
                engine.submit_revision(thread, a, sent.back());
            }
        }
        engine.ask(thread, a, k == 0 ? "How can I improve this part?" : "And now?");
        if (k == 0) engine.save(thread);
        const auto requests = mock->requests();
        const auto& request = requests.back().messages;
        const auto label = "k=" + std::to_string(k) + ": ";
        check.expect(request.size() == 2 * k + 2, label + "request has " + std::to_string(request.size()) + " messages");
        if (request.size() != 2 * k + 2) continue;
        check.expect(request[0].role == llm::Role::System && request[0].content == system,
                     label + "system prompt differs from the golden text");
        check.expect(request[0].content.find(excerpt) != std::string::npos, label + "excerpt not verbatim");
        check.expect(request[0].content.find(comment) != std::string::npos, label + "comment not verbatim");
        for (std::size_t i = 0; i < k; ++i) {
            check.expect(request[1 + 2 * i].role == llm::Role::User && request[1 + 2 * i].content == sent[i],
                         label + "user history out of order");
            check.expect(request[2 + 2 * i].role == llm::Role::Assistant &&
                             request[2 + 2 * i].content == "<p>reply " + std::to_string(i) + "</p>",
                         label + "assistant history out of order");
        }
        check.expect(request.back().role == llm::Role::User, label + "last message is not the user's");
    }
}

// --- persistence ------------------------------------------------------------

struct InjectedCrash : std::runtime_error {
    InjectedCrash() : std::runtime_error("injected crash") {}
};

void persistence(Check& check) {
    testing::TempDir dir;
    testing::WorkspaceRig rig(dir.path() / "source");
    store::SessionStore target(dir.path() / "target");
    std::mt19937 rng(4242);
    for (int n = 0; n < 100; ++n) {
        const auto record = rig.workspace->record(testing::random_session(*rig.workspace, rng));
        target.store(record);
        const auto loaded = target.load(record.id());
        check.expect(loaded == record, "record " + record.id() + " changed on load");
        check.expect(store::canonical_text(loaded) == store::canonical_text(record), "canonical text changed");

        // Crash with a partially written temporary: the old record must stay intact.
        auto changed = record;
        changed.session.job.job_title += " (edited)";
        const auto mode = n % 3;
        target.set_before_commit_hook([mode](const fs::path& temporary) {
            if (mode == 1) fs::resize_file(temporary, fs::file_size(temporary) / 2);
            if (mode == 2) testing::write_text(temporary, "{\"format_version\": 1, \"session_id\"");
            throw InjectedCrash();
        });
        bool crashed = false;
        try {
            target.store(changed);
        } catch (const InjectedCrash&) {
            crashed = true;
        }
        target.set_before_commit_hook({});
        check.expect(crashed, "crash hook did not fire");
        try {
            check.expect(target.load(record.id()) == record, "crash exposed a partial record");
        } catch (const Error& e) {
            check.expect(false, std::string("record unloadable after crash: ") + e.what());
        }

        // A first write that crashes leaves nothing loadable.
        store::SessionStore fresh(dir.path() / ("fresh" + std::to_string(n % 4)));
        fresh.set_before_commit_hook([](const fs::path& temporary) {
            fs::resize_file(temporary, fs::file_size(temporary) / 3);
            throw InjectedCrash();
        });
        try {
            fresh.store(record);
        } catch (const InjectedCrash&) {
        }
        fresh.set_before_commit_hook({});
        bool loadable = true;
        try {
            fresh.load(record.id());
        } catch (const NotFound&) {
            loadable = false;
        }
        check.expect(!loadable, "crashed first write is loadable");
    }
    check.expect(target.list_sessions().size() == 100, "listing does not show exactly the stored records");
}

// --- determinism ------------------------------------------------------------

std::string shell_quote(const std::string& s) { return "'" + replace_all(s, "'", "'\\''") + "'"; }

struct Ran {
    int status;
    std::string out;
};

Ran run_cli(const fs::path& data, const std::string& args) {
    const auto command = shell_quote(testing::kCliBinary.string()) + " --data-dir " + shell_quote(data.string()) +
                         " --mock --seed 11 --fixed-time 2024-05-06T07:08:09.000Z " + args + " 2>&1";
    Ran ran{-1, {}};
    FILE* pipe = ::popen(command.c_str(), "r");
    if (pipe == nullptr) return ran;
    char buffer[4096];
    for (std::size_t n; (n = std::fread(buffer, 1, sizeof buffer, pipe)) > 0;) ran.out.append(buffer, n);
    ran.status = ::pclose(pipe);
    return ran;
}

std::string pipeline_export(const fs::path& root, Check& check) {
    const auto answers = root / "answers.txt";
    testing::write_text(answers,
                        "I am a developer.\n"
                        "In one situation I rebuilt the deploy pipeline and the result was fewer outages.\n"
                        "School, mostly.\n"
                        "The outcome was a shipped product.\n"
                        "I listen.\n"
                        "In that situation I mediated and the result was a decision.\n"
                        "Impatience.\n"
                        "I now plan more; the outcome is calmer weeks.\n");
    const auto data = root / "data";
    std::smatch m;
    const auto practice = run_cli(data, "practice --job 'Platform Engineer' --answers " + shell_quote(answers.string()));
    check.expect(practice.status == 0, "practice failed: " + practice.out);
    if (!std::regex_search(practice.out, m, std::regex("session ([A-Za-z0-9_-]+)"))) return {};
    const std::string session_id = m[1];

    const auto hints = run_cli(data, "hints " + session_id);
    check.expect(hints.status == 0, "hints failed: " + hints.out);
    if (!std::regex_search(hints.out, m, std::regex("(\\S+) needs_improvement"))) {
        check.expect(false, "no needs-improvement hint");
        return {};
    }
    const std::string turn = m[1];

    const auto annotate = run_cli(data, "annotate " + session_id + " --from-hint " + turn + " --note 'Too short.'");
    check.expect(annotate.status == 0, "annotate failed: " + annotate.out);
    if (!std::regex_search(annotate.out, m, std::regex("annotation (\\S+)"))) return {};
    const std::string annotation_id = m[1];

    const auto thread = run_cli(data, "feedback " + annotation_id +
                                          " --turn 'ask:How can I improve this part?' --turn 'revise:I am a backend "
                                          "developer; in one situation I cut build time and the result was faster "
                                          "releases.' --save");
    check.expect(thread.status == 0, "feedback failed: " + thread.out);

    const auto file = root / "export.json";
    const auto exported = run_cli(data, "export " + session_id + " " + shell_quote(file.string()));
    check.expect(exported.status == 0, "export failed: " + exported.out);
    return testing::read_text(file);
}

void determinism(Check& check) {
    testing::TempDir a, b;
    const auto first = pipeline_export(a.path(), check);
    const auto second = pipeline_export(b.path(), check);
    check.expect(!first.empty(), "empty export");
    check.expect(first == second, "exports differ between identical runs");
    if (!first.empty()) {
        const auto doc = json::parse(first);
        check.expect(doc.at("feedback_threads").size() == 1 && doc.at("feedback_threads")[0].at("messages").size() == 4,
                     "export lacks the feedback thread");
        check.expect(doc.at("state") == "completed", "session not completed");
    }
}

// --- HTML sanitation --------------------------------------------------------

void html_sanitation(Check& check) {
    std::vector<std::string> corpus = {
        "<script>alert(1)</script>",
        "<p>ok</p><script type=\"text/javascript\">alert('x')</script><p>after</p>",
        "<SCRIPT SRC=//evil/x.js></SCRIPT>",
        "<scr<script>ipt>alert(1)</script>",
        "<img src=x onerror=alert(1)>",
        "<p onclick=\"steal()\" style=\"x\">click</p>",
        "<b onmouseover='x'>bold</b>",
        "<a href=\"javascript:alert(1)\">link</a>",
        "<iframe src=\"//evil\"></iframe>text",
        "<style>body{display:none}</style><p>visible</p>",
        "<p><b><i>nested</p></b>",
        "<ul><li>one<li>two</ul>",
        "</p></li></ul>stray closers",
        "<p <b>>broken</p>",
        "<<p>>double",
        "<p>unterminated",
        "<b>bold <em>both</b> after</em>",
        "<!-- <script>alert(1)</script> -->",
        "<![CDATA[<script>alert(1)</script>]]>",
        "<!DOCTYPE html><html><body><p>doc</p></body></html>",
        "<?php echo 1; ?>",
        "<svg onload=alert(1)><p>svg</p></svg>",
        "<math><mtext><script>alert(1)</script></mtext></math>",
        "<textarea><p>not markup</p></textarea>",
        "<noscript><p>hidden</p></noscript>",
        "<template><script>x</script></template>",
        "<object data=x></object><embed src=x>",
        "<br/><br /><BR><br onload=x>",
        "&lt;script&gt; &amp; &#60; &#x3C; &bogus; & alone",
        "\"quotes\" and 'single' > gt < lt",
        "<p>unicode é 日本 🙂</p>",
        "<STRONG>caps</STRONG><Ol><Li>mixed</lI></oL>",
        "<p\nclass=x\n>newline attr</p>",
        "<p/onclick=x>slash attr</p>",
        "<",
        ">",
        "<p",
        "</",
        "<!--",
        "<script",
        "<script>never closed",
        std::string("<p>nul\0byte</p>", 15),
        "<p>" + std::string(2000, '<') + "</p>",
        std::string(500, '<') + "b>" + std::string(500, '>'),
    };
    // Random markup soup built from tag fragments.
    std::mt19937 rng(99);
    const std::vector<std::string> pieces = {
        "<p>", "</p>", "<b>", "</b>", "<ul>", "</ul>", "<li>", "</li>", "<script>", "</script>", "<style>",
        "</style>", "<img src=x onerror=y>", "<a href=j>", "</a>", "<br>", "<em>", "</em>", "<", ">", "\"",
        "'", "&", "&amp;", "&#x27;", "text", " ", "<!--", "-->", "=", "/", "<p class=\"", "onload=", "\n"};
    for (int i = 0; i < 3000; ++i) {
        std::string s;
        const auto n = std::uniform_int_distribution<int>(1, 30)(rng);
        for (int j = 0; j < n; ++j) s += pieces[rng() % pieces.size()];
        corpus.push_back(s);
    }

    for (const auto& input : corpus) {
        std::string out;
        try {
            out = feedback::sanitize_html(input);
        } catch (const std::exception& e) {
            check.expect(false, std::string("sanitizer threw: ") + e.what());
            continue;
        }
        const auto violation = testing::html_violation(out);
        check.expect(violation.empty(), violation + " in output of " + json(input).dump());
        check.expect(out.find("alert") == std::string::npos || input.find("alert") == std::string::npos ||
                         out.find("&lt;") != std::string::npos,
                     "script content survived: " + json(out).dump());
        check.expect(feedback::sanitize_html(out) == out, "sanitizer is not idempotent on " + json(input).dump());
    }
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
        {"interview shape", interview_shape},
        {"template fidelity", template_fidelity},
        {"label parser truth table", label_parser},
        {"hint projection", hint_projection},
        {"feedback golden scenario", feedback_golden},
        {"prompt assembly", prompt_assembly},
        {"persistence", persistence},
        {"determinism", determinism},
        {"html sanitation", html_sanitation},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Check check;
        try {
            run(check);
        } catch (const std::exception& e) {
            check.expect(false, std::string("unexpected exception: ") + e.what());
        }
        if (check.passed()) {
            std::cout << "PASS " << name << "\n";
        } else {
            ++failed;
            std::cout << "FAIL " << name << ": " << check.detail() << "\n";
        }
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
    return failed == 0 ? 0 : 1;
}
