#include "app.hpp"

#include "replay.hpp"

#include "rehearse/api/server.hpp"
#include "rehearse/coverage.hpp"
#include "rehearse/llm/http_provider.hpp"
#include "rehearse/llm/speech.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include <pthread.h>

#ifndef REHEARSE_TEMPLATE_DIR
#define REHEARSE_TEMPLATE_DIR "templates"
#endif
#ifndef REHEARSE_DEFAULT_MOCK_SCRIPT
#define REHEARSE_DEFAULT_MOCK_SCRIPT "scenarios/default_mock.json"
#endif

namespace rehearse::cli {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(const Error& error) {
    switch (error.code()) {
        case ErrorCode::bad_request: return kUsage;
        case ErrorCode::provider_error: return kProvider;
        case ErrorCode::storage_error:
        case ErrorCode::not_found: return kStorage;
        case ErrorCode::wrong_state:
        case ErrorCode::parse_error: return kFailure;
    }
    return kFailure;
}

namespace {

WorkspaceDeps base_deps(const GlobalOptions& options, const fs::path& data_dir) {
    WorkspaceDeps deps;
    deps.store = std::make_shared<store::SessionStore>(data_dir);
    deps.templates = llm::TemplateSet::load(options.templates_dir.empty() ? fs::path(REHEARSE_TEMPLATE_DIR)
                                                                          : options.templates_dir);
    if (options.fixed_time) {
        deps.clock = std::make_shared<ManualClock>(parse_timestamp(*options.fixed_time));
    } else {
        deps.clock = std::make_shared<SystemClock>();
    }
    if (options.seed) {
        deps.ids = std::make_shared<RandomIdSource>(*options.seed);
    } else {
        deps.ids = std::make_shared<RandomIdSource>();
    }
    deps.transcriber = std::make_shared<llm::SidecarTranscriber>(deps.store->audio_dir());
    return deps;
}

WorkspaceOptions workspace_options(const GlobalOptions& options) {
    WorkspaceOptions out;
    out.parse_mode = options.strict_labels ? annotation::ParseMode::Strict : annotation::ParseMode::Lenient;
    return out;
}

}  // namespace

Runtime make_mock_runtime(const GlobalOptions& options, const json& mock_script, const fs::path& data_dir,
                          bool anti_sycophancy) {
    auto deps = base_deps(options, data_dir);
    Runtime runtime;
    runtime.mock = llm::MockProvider::from_json(mock_script);
    auto config = llm::GatewayConfig::for_mock();
    config.anti_sycophancy = anti_sycophancy;
    deps.gateway = std::make_shared<llm::Gateway>(runtime.mock, config);
    deps.synthesizer = std::make_shared<llm::MockSynthesizer>();
    runtime.workspace = std::make_unique<Workspace>(std::move(deps), workspace_options(options));
    return runtime;
}

Runtime make_runtime(const GlobalOptions& options, bool needs_provider) {
    if (options.mock) {
        const fs::path script = options.mock_script.value_or(fs::path(REHEARSE_DEFAULT_MOCK_SCRIPT));
        std::ifstream in(script);
        if (!in) throw ConfigError("cannot read mock script " + script.string());
        json document;
        try {
            document = json::parse(in);
        } catch (const json::exception& e) {
            throw ConfigError("mock script " + script.string() + ": " + e.what());
        }
        return make_mock_runtime(options, document, options.data_dir, document.value("anti_sycophancy", false));
    }
    if (!options.provider_config) {
        if (!needs_provider) return make_mock_runtime(options, json{{"fallback", "fail"}}, options.data_dir);
        throw ConfigError("select a provider with --mock or --provider-config");
    }

    auto config = llm::GatewayConfig::load(*options.provider_config);
    auto deps = base_deps(options, options.data_dir);
    deps.gateway = std::make_shared<llm::Gateway>(std::make_shared<llm::HttpChatProvider>(config), config);
    Runtime runtime;
    runtime.workspace = std::make_unique<Workspace>(std::move(deps), workspace_options(options));
    return runtime;
}

namespace {

void print_question(std::ostream& out, const session::Question& q) {
    out << "Q" << q.question_id.substr(1) << " (" << session::to_string(q.kind) << "): " << q.text << "\n";
}

std::string format_range(const TimeRange& r) {
    return std::to_string(r.start_ms) + "-" + std::to_string(r.end_ms);
}

struct PracticeArgs {
    std::string job;
    std::optional<fs::path> answers;
    int follow_ups = 1;
    int retries = 2;
};

int run_practice(const GlobalOptions& global, const PracticeArgs& args, std::istream& in, std::ostream& out,
                 std::ostream& err) {
    // Reject a blank title before touching any provider.
    const auto job = session::JobContext::make(args.job);
    auto script = session::InterviewScript::standard();
    script.follow_ups_per_main = args.follow_ups;
    script.validate();

    auto runtime = make_runtime(global);
    auto& ws = *runtime.workspace;

    std::ifstream answers_file;
    if (args.answers) {
        answers_file.open(*args.answers);
        if (!answers_file) {
            err << "cannot read answers file " << args.answers->string() << "\n";
            return kUsage;
        }
    }
    std::istream& answers = args.answers ? static_cast<std::istream&>(answers_file) : in;
    const bool interactive = !args.answers;

    // Returns false when the user gives up or the retry budget is spent.
    auto may_retry = [&](int& used, const llm::ProviderError& e) {
        err << "provider error: " << e.what() << "\n";
        if (interactive) {
            err << "press Enter to retry, Ctrl-D to stop\n";
            std::string line;
            return static_cast<bool>(std::getline(in, line));
        }
        return used++ < args.retries;
    };

    std::optional<session::InterviewSession> created;
    for (int used = 0; !created;) {
        try {
            created = ws.create_session(job.job_title, script);
        } catch (const llm::ProviderError& e) {
            if (!may_retry(used, e)) return kProvider;
        }
    }
    const auto session_id = created->session_id;
    out << "session " << session_id << "\n";
    print_question(out, created->asked.back());

    while (true) {
        if (interactive) out << "> " << std::flush;
        std::string answer;
        if (!std::getline(answers, answer)) {
            out << "input ended; session " << session_id << " stored awaiting an answer\n";
            return kOk;
        }
        std::optional<session::NextStep> step;
        try {
            step = ws.submit_answer(session_id, {answer, std::nullopt, std::nullopt});
        } catch (const llm::ProviderError& e) {
            for (int used = 0; !step;) {
                if (!may_retry(used, e)) {
                    out << "session " << session_id << " stored awaiting the next question\n";
                    return kProvider;
                }
                try {
                    step = ws.retry_question(session_id);
                } catch (const llm::ProviderError&) {
                }
            }
        }
        if (std::holds_alternative<session::SessionCompleted>(*step)) break;
        const auto& question = std::holds_alternative<session::FollowUpAsked>(*step)
                                   ? std::get<session::FollowUpAsked>(*step).question
                                   : std::get<session::MainAsked>(*step).question;
        print_question(out, question);
    }
    const auto finished = ws.get_session(session_id);
    out << "completed " << finished.asked.size() << " questions\n";
    out << "session " << session_id << "\n";
    return kOk;
}

int run_hints(const GlobalOptions& global, const std::string& session_id, bool force, std::ostream& out) {
    auto runtime = make_runtime(global);
    const auto result = runtime.workspace->classify(session_id, force);
    for (const auto& hint : result.hints) {
        out << hint.turn_id << " " << annotation::to_string(hint.label) << " " << format_range(hint.range) << "\n";
    }
    bool provider_failed = false;
    for (const auto& error : result.errors) {
        out << error.turn_id << " error " << error.kind << ": " << error.message << "\n";
        provider_failed = provider_failed || error.kind == "ProviderError";
    }
    if (result.errors.empty()) return kOk;
    return provider_failed ? kProvider : kFailure;
}

struct AnnotateArgs {
    std::string session_id;
    std::optional<std::int64_t> start;
    std::optional<std::int64_t> end;
    std::optional<std::string> from_hint;
    std::string note;
};

int run_annotate(const GlobalOptions& global, const AnnotateArgs& args, std::ostream& out, std::ostream& err) {
    AnnotationRequest request;
    request.self_reflection = args.note;
    request.from_hint_turn = args.from_hint;
    if (!args.from_hint) {
        if (!args.start || !args.end) {
            err << "annotate needs --start and --end, or --from-hint\n";
            return kUsage;
        }
        request.range = {*args.start, *args.end};
    }
    auto runtime = make_runtime(global);
    const auto created = runtime.workspace->create_annotation(args.session_id, request);
    out << "annotation " << created.annotation_id << " " << format_range(created.range) << "\n";
    out << "excerpt: " << created.excerpt << "\n";
    return kOk;
}

struct FeedbackArgs {
    std::string annotation_id;
    std::vector<std::string> turns;
    bool retry = false;
    bool save = false;
};

void print_message(std::ostream& out, const feedback::FeedbackMessage& message) {
    out << "[" << feedback::to_string(message.role) << "] " << message.text << "\n";
}

int run_feedback(const GlobalOptions& global, const FeedbackArgs& args, std::ostream& out, std::ostream& err) {
    std::vector<std::pair<bool, std::string>> turns;  // (is_revision, text)
    for (const auto& turn : args.turns) {
        if (turn.rfind("ask:", 0) == 0) {
            turns.emplace_back(false, turn.substr(4));
        } else if (turn.rfind("revise:", 0) == 0) {
            turns.emplace_back(true, turn.substr(7));
        } else {
            err << "--turn must start with ask: or revise:\n";
            return kUsage;
        }
    }

    auto runtime = make_runtime(global);
    auto& ws = *runtime.workspace;
    const auto annotation = ws.get_annotation(args.annotation_id);
    const auto record = ws.record(annotation.session_id);
    std::string thread_id;
    if (const auto* open = record.open_thread_for(annotation.annotation_id)) {
        thread_id = open->thread_id;
    } else {
        thread_id = ws.start_thread(annotation.annotation_id).thread_id;
    }
    out << "thread " << thread_id << "\n";

    if (args.retry) print_message(out, ws.retry_thread(thread_id));
    for (const auto& [is_revision, text] : turns) {
        const auto reply = is_revision ? ws.submit_revision(thread_id, text) : ws.ask(thread_id, text);
        const auto thread = ws.get_thread(thread_id);
        print_message(out, thread.messages[thread.messages.size() - 2]);
        print_message(out, reply);
    }
    if (args.save) {
        ws.save_thread(thread_id);
        out << "saved " << thread_id << "\n";
    }
    return kOk;
}

int run_export(const GlobalOptions& global, const std::string& session_id, const std::string& path,
               std::ostream& out) {
    auto runtime = make_runtime(global, false);
    const auto text = runtime.workspace->export_session(session_id);
    if (path == "-") {
        out << text;
        return kOk;
    }
    std::ofstream file(path, std::ios::binary);
    file << text;
    file.flush();
    if (!file) throw StorageError("cannot write " + path);
    out << "exported " << session_id << " to " << path << "\n";
    return kOk;
}

int run_import(const GlobalOptions& global, const std::string& path, std::ostream& out) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw StorageError("cannot read " + path);
    std::ostringstream text;
    text << file.rdbuf();
    auto runtime = make_runtime(global, false);
    out << "imported " << runtime.workspace->import_session(text.str()) << "\n";
    return kOk;
}

int run_list(const GlobalOptions& global, std::ostream& out) {
    auto runtime = make_runtime(global, false);
    for (const auto& s : runtime.workspace->list_sessions()) {
        out << s.session_id << "  " << format_timestamp(s.created_at) << "  " << session::to_string(s.state) << "  "
            << s.job_title << "\n";
    }
    return kOk;
}

int run_replay(const GlobalOptions& global, const std::vector<std::string>& scenarios, bool require_coverage,
               std::ostream& out) {
    reset_operation_counts();
    bool all_passed = true;
    for (const auto& path : scenarios) {
        const auto result = replay_scenario(path, global);
        out << "replay " << result.name << ": " << (result.passed ? "PASS" : "FAIL") << "\n";
        for (const auto& problem : result.problems) out << "  " << problem << "\n";
        out << result.diff;
        all_passed = all_passed && result.passed;
    }
    const auto counts = operation_counts();
    out << "coverage:";
    bool covered = true;
    for (const auto& op : kCoreOperations) {
        const auto it = counts.find(std::string(op));
        const auto n = it == counts.end() ? 0 : it->second;
        out << " " << op << "=" << n;
        covered = covered && n > 0;
    }
    out << "\n";
    if (require_coverage && !covered) {
        out << "coverage: some operations were never exercised\n";
        all_passed = false;
    }
    return all_passed ? kOk : kFailure;
}

std::pair<std::string, int> parse_listen(const std::string& listen) {
    const auto colon = listen.rfind(':');
    if (colon == std::string::npos) throw ConfigError("--listen expects host:port");
    try {
        return {listen.substr(0, colon), std::stoi(listen.substr(colon + 1))};
    } catch (const std::exception&) {
        throw ConfigError("--listen expects host:port");
    }
}

int run_serve(const GlobalOptions& global, const std::string& listen, int deadline_ms, unsigned max_in_flight,
              std::ostream& out) {
    api::ServerOptions options;
    std::tie(options.host, options.port) = parse_listen(listen);
    options.request_deadline = std::chrono::milliseconds(deadline_ms);
    options.max_in_flight = max_in_flight;

    auto runtime = make_runtime(global);

    // Worker threads inherit the mask, so only sigwait below sees the signals.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    api::ApiServer server(*runtime.workspace, options);
    const int port = server.start();
    out << "listening on " << options.host << ":" << port << std::endl;
    int received = 0;
    sigwait(&signals, &received);
    out << "shutting down" << std::endl;
    server.stop();
    return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Interview practice engine: text-mode practice, hints, feedback and operations"};
    app.require_subcommand(1);

    GlobalOptions global;
    global.templates_dir = REHEARSE_TEMPLATE_DIR;
    std::string provider_config;
    std::string mock_script;
    std::uint64_t seed = 0;
    std::string fixed_time;
    app.add_option("--data-dir", global.data_dir, "Data directory")->capture_default_str();
    app.add_option("--templates", global.templates_dir, "Prompt template directory")->capture_default_str();
    auto* provider_opt = app.add_option("--provider-config", provider_config, "Provider configuration file");
    app.add_flag("--mock", global.mock, "Use the scripted mock provider");
    auto* mock_script_opt = app.add_option("--mock-script", mock_script, "Mock provider script (implies --mock)");
    auto* seed_opt = app.add_option("--seed", seed, "Seed for generated ids");
    auto* time_opt = app.add_option("--fixed-time", fixed_time, "Start the clock at this instant (YYYY-MM-DDTHH:MM:SS.mmmZ)");
    app.add_flag("--strict-labels", global.strict_labels, "Parse hint labels strictly");

    PracticeArgs practice;
    auto* practice_cmd = app.add_subcommand("practice", "Run an interview in the terminal");
    practice_cmd->add_option("--job", practice.job, "Job title")->required();
    practice_cmd->add_option("--answers", practice.answers, "Read one answer per line from this file");
    practice_cmd->add_option("--follow-ups", practice.follow_ups, "Follow-up questions per main question")
        ->capture_default_str();
    practice_cmd->add_option("--retries", practice.retries, "Provider retries when reading answers from a file")
        ->capture_default_str();

    std::string session_id;
    bool force = false;
    auto* hints_cmd = app.add_subcommand("hints", "Classify every answer of a session");
    hints_cmd->add_option("session", session_id, "Session id")->required();
    hints_cmd->add_flag("--force", force, "Classify an unfinished session");

    AnnotateArgs annotate;
    auto* annotate_cmd = app.add_subcommand("annotate", "Mark a time range of a session");
    annotate_cmd->add_option("session", annotate.session_id, "Session id")->required();
    annotate_cmd->add_option("--start", annotate.start, "Range start in ms");
    annotate_cmd->add_option("--end", annotate.end, "Range end in ms");
    annotate_cmd->add_option("--from-hint", annotate.from_hint, "Use the range of this answer turn's hint");
    annotate_cmd->add_option("--note", annotate.note, "Self-reflection comment");

    FeedbackArgs feedback_args;
    auto* feedback_cmd = app.add_subcommand("feedback", "Discuss an annotation with the mentor");
    feedback_cmd->add_option("annotation", feedback_args.annotation_id, "Annotation id")->required();
    feedback_cmd->add_option("--turn", feedback_args.turns, "ask:TEXT or revise:TEXT, in order");
    feedback_cmd->add_flag("--retry", feedback_args.retry, "Resend a message whose reply failed");
    feedback_cmd->add_flag("--save", feedback_args.save, "Save the thread afterwards");

    std::string path;
    auto* export_cmd = app.add_subcommand("export", "Write a session record");
    export_cmd->add_option("session", session_id, "Session id")->required();
    export_cmd->add_option("path", path, "Output file, or - for stdout")->required();

    auto* import_cmd = app.add_subcommand("import", "Store an exported session record");
    import_cmd->add_option("path", path, "Exported record")->required();

    auto* list_cmd = app.add_subcommand("list", "List stored sessions");

    std::vector<std::string> scenarios;
    bool require_coverage = false;
    auto* replay_cmd = app.add_subcommand("replay", "Replay scenario files against the mock provider");
    replay_cmd->add_option("scenarios", scenarios, "Scenario files")->required();
    replay_cmd->add_flag("--require-coverage", require_coverage,
                         "Fail unless every engine operation ran at least once");

    std::string listen = "127.0.0.1:8080";
    int deadline_ms = 60000;
    unsigned max_in_flight = 8;
    auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP API");
    serve_cmd->add_option("--listen", listen, "host:port")->capture_default_str();
    serve_cmd->add_option("--deadline-ms", deadline_ms, "Per-request provider deadline")->capture_default_str();
    serve_cmd->add_option("--max-in-flight", max_in_flight, "Concurrent requests")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    if (*provider_opt) global.provider_config = provider_config;
    if (*mock_script_opt) {
        global.mock_script = mock_script;
        global.mock = true;
    }
    if (*seed_opt) global.seed = seed;
    if (*time_opt) global.fixed_time = fixed_time;

    try {
        if (*practice_cmd) return run_practice(global, practice, in, out, err);
        if (*hints_cmd) return run_hints(global, session_id, force, out);
        if (*annotate_cmd) return run_annotate(global, annotate, out, err);
        if (*feedback_cmd) return run_feedback(global, feedback_args, out, err);
        if (*export_cmd) return run_export(global, session_id, path, out);
        if (*import_cmd) return run_import(global, path, out);
        if (*list_cmd) return run_list(global, out);
        if (*replay_cmd) return run_replay(global, scenarios, require_coverage, out);
        if (*serve_cmd) return run_serve(global, listen, deadline_ms, max_in_flight, out);
    } catch (const Error& e) {
        err << "error: " << to_string(e.code()) << " (" << e.kind() << "): " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kUsage;
}

}  // namespace rehearse::cli
