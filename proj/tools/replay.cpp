#include "replay.hpp"

#include "diff.hpp"

#include <cstdlib>
#include <fstream>

namespace rehearse::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kDefaultReplayTime = "2024-01-01T09:00:00.000Z";
constexpr std::uint64_t kDefaultReplaySeed = 1;

class ScratchDir {
public:
    ScratchDir() {
        auto pattern = (fs::temp_directory_path() / "rehearse-replay-XXXXXX").string();
        if (::mkdtemp(pattern.data()) == nullptr) throw StorageError("cannot create a scratch directory");
        path_ = pattern;
    }
    ~ScratchDir() {
        std::error_code ignored;
        fs::remove_all(path_, ignored);
    }
    ScratchDir(const ScratchDir&) = delete;
    ScratchDir& operator=(const ScratchDir&) = delete;
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

session::InterviewScript script_from(const json& scenario) {
    auto script = session::InterviewScript::standard();
    if (!scenario.contains("script")) return script;
    const auto& s = scenario.at("script");
    if (s.contains("main_questions")) script.main_questions = s.at("main_questions").get<std::vector<std::string>>();
    if (s.contains("follow_ups_per_main")) script.follow_ups_per_main = s.at("follow_ups_per_main").get<int>();
    return script;
}

const session::Question* asked_question(const session::NextStep& step) {
    if (const auto* f = std::get_if<session::FollowUpAsked>(&step)) return &f->question;
    if (const auto* m = std::get_if<session::MainAsked>(&step)) return &m->question;
    return nullptr;
}

session::AnswerInput answer_input(Workspace& ws, const json& answer) {
    if (answer.is_string()) return {answer.get<std::string>(), std::nullopt, std::nullopt};
    if (answer.contains("audio")) {
        // The sidecar transcriber reads <audio ref>.txt next to the stored bytes.
        const auto spoken = answer.at("audio").get<std::string>();
        const auto ref = ws.upload_audio("audio:" + spoken);
        std::ofstream sidecar(ws.storage().audio_path(ref).string() + ".txt", std::ios::binary);
        if (answer.contains("duration_ms")) sidecar << "#duration_ms=" << answer.at("duration_ms").get<long>() << "\n";
        sidecar << spoken;
        sidecar.flush();
        if (!sidecar) throw StorageError("cannot write transcript sidecar");
        return {"", ref, std::nullopt};
    }
    session::AnswerInput input{answer.at("text").get<std::string>(), std::nullopt, std::nullopt};
    if (answer.contains("span")) {
        input.span = TimeRange{answer.at("span").at(0).get<std::int64_t>(), answer.at("span").at(1).get<std::int64_t>()};
    }
    return input;
}

std::vector<std::string> expected_lines(const json& expected) {
    std::vector<std::string> lines;
    if (expected.contains("questions")) {
        std::size_t n = 0;
        for (const auto& q : expected.at("questions")) {
            ++n;
            lines.push_back("q" + std::to_string(n) + " " + q.at("kind").get<std::string>() + ": " +
                            q.at("text").get<std::string>());
        }
    }
    if (expected.contains("threads")) {
        std::size_t n = 0;
        for (const auto& thread : expected.at("threads")) {
            lines.push_back("thread " + std::to_string(++n));
            for (const auto& message : thread) {
                lines.push_back("[" + message.at("role").get<std::string>() + "]");
                for (auto& line : split_lines(message.at("text").get<std::string>())) lines.push_back(std::move(line));
            }
        }
    }
    return lines;
}

}  // namespace

std::vector<std::string> render_questions(const session::InterviewSession& session) {
    std::vector<std::string> lines;
    for (const auto& q : session.asked) {
        lines.push_back(q.question_id + " " + std::string(session::to_string(q.kind)) + ": " + q.text);
    }
    return lines;
}

std::vector<std::string> render_thread(const feedback::FeedbackThread& thread) {
    std::vector<std::string> lines;
    for (const auto& message : thread.messages) {
        lines.push_back("[" + std::string(feedback::to_string(message.role)) + "]");
        for (auto& line : split_lines(message.text)) lines.push_back(std::move(line));
    }
    return lines;
}

ReplayResult replay_scenario(const fs::path& path, const GlobalOptions& options) {
    ReplayResult result;
    result.name = path.stem().string();

    json scenario;
    {
        std::ifstream in(path);
        if (!in) {
            result.problems.push_back("cannot read " + path.string());
            return result;
        }
        try {
            scenario = json::parse(in);
        } catch (const json::exception& e) {
            result.problems.push_back(std::string("invalid scenario: ") + e.what());
            return result;
        }
    }
    result.name = scenario.value("name", result.name);

    GlobalOptions local = options;
    local.seed = scenario.value("seed", kDefaultReplaySeed);
    local.fixed_time = scenario.value("fixed_time", std::string(kDefaultReplayTime));
    const bool anti_sycophancy = scenario.value("anti_sycophancy", false);
    const json mock = scenario.value("mock", json::object());

    ScratchDir scratch;
    std::vector<std::string> actual;
    try {
        auto runtime = make_mock_runtime(local, mock, scratch.path() / "work", anti_sycophancy);
        auto& ws = *runtime.workspace;

        const auto created = ws.create_session(scenario.at("job_title").get<std::string>(), script_from(scenario));
        const auto id = created.session_id;
        ws.synthesize(created.asked.back().text);

        bool completed = false;
        for (const auto& answer : scenario.value("answers", json::array())) {
            if (completed) {
                result.problems.push_back("scenario has more answers than the script asks for");
                break;
            }
            const auto step = ws.submit_answer(id, answer_input(ws, answer));
            if (const auto* q = asked_question(step)) {
                ws.synthesize(q->text);
            } else {
                completed = true;
            }
        }

        const auto transcript = ws.get_transcript(id);
        const auto current = ws.get_session(id);
        if (transcript.segments().size() != current.asked.size() + current.answers.size()) {
            result.problems.push_back("transcript does not alternate question and answer segments");
        }

        if (scenario.value("classify", false)) {
            ws.classify(id, !completed);
            ws.highlights(id);
        }

        std::vector<std::string> annotation_ids;
        for (const auto& a : scenario.value("annotations", json::array())) {
            AnnotationRequest request;
            request.self_reflection = a.value("note", std::string());
            if (a.contains("from_hint")) {
                request.from_hint_turn = a.at("from_hint").get<std::string>();
            } else {
                request.range = {a.at("start_ms").get<std::int64_t>(), a.at("end_ms").get<std::int64_t>()};
            }
            annotation_ids.push_back(ws.create_annotation(id, request).annotation_id);
        }

        for (const auto& t : scenario.value("threads", json::array())) {
            const auto& annotation_id = annotation_ids.at(t.value("annotation", std::size_t{0}));
            const auto thread_id = ws.start_thread(annotation_id).thread_id;
            for (const auto& turn : t.value("turns", json::array())) {
                if (turn.contains("ask")) {
                    ws.ask(thread_id, turn.at("ask").get<std::string>());
                } else {
                    ws.submit_revision(thread_id, turn.at("revise").get<std::string>());
                }
            }
            if (t.value("save", false)) ws.save_thread(thread_id);
        }

        ws.list_sessions();
        result.exported = ws.export_session(id);

        // A fresh workspace over the same directory must read back the same record.
        auto reloaded = make_mock_runtime(local, mock, scratch.path() / "work", anti_sycophancy);
        if (reloaded.workspace->export_session(id) != result.exported) {
            result.problems.push_back("reloaded record differs from the stored one");
        }
        auto other = make_mock_runtime(local, mock, scratch.path() / "imported", anti_sycophancy);
        other.workspace->import_session(result.exported);
        if (other.workspace->export_session(id) != result.exported) {
            result.problems.push_back("export/import round trip changed the record");
        }

        const auto record = ws.record(id);
        const auto expected = scenario.value("expected", json::object());
        if (expected.contains("questions")) {
            for (auto& line : render_questions(record.session)) actual.push_back(std::move(line));
        }
        if (expected.contains("threads")) {
            std::size_t n = 0;
            for (const auto& thread : record.feedback_threads) {
                actual.push_back("thread " + std::to_string(++n));
                for (auto& line : render_thread(thread)) actual.push_back(std::move(line));
            }
        }
        result.diff = unified_diff(expected_lines(expected), actual, "expected", "actual");
        if (expected.contains("state") && expected.at("state").get<std::string>() != session::to_string(record.session.state)) {
            result.problems.push_back("session state is " + std::string(session::to_string(record.session.state)));
        }
    } catch (const Error& e) {
        result.problems.push_back(std::string(e.kind()) + ": " + e.what());
    } catch (const json::exception& e) {
        result.problems.push_back(std::string("invalid scenario: ") + e.what());
    }
    result.passed = result.problems.empty() && result.diff.empty();
    return result;
}

}  // namespace rehearse::cli
