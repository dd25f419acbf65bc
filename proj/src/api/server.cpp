#include "rehearse/api/server.hpp"

#include "rehearse/store/record.hpp"

#include <httplib.h>

#include <algorithm>
#include <fstream>

namespace rehearse::api {

using nlohmann::json;

int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::bad_request: return 400;
        case ErrorCode::not_found: return 404;
        case ErrorCode::wrong_state: return 409;
        case ErrorCode::provider_error: return 502;
        case ErrorCode::parse_error: return 422;
        case ErrorCode::storage_error: return 500;
    }
    return 500;
}

json error_body(const Error& error) {
    return {{"error",
             {{"code", to_string(error.code())},
              {"kind", error.kind()},
              {"message", error.what()},
              {"retriable", error.retriable()}}}};
}

namespace {

json step_json(const session::NextStep& step) {
    if (const auto* follow = std::get_if<session::FollowUpAsked>(&step)) {
        return {{"step", "follow_up"}, {"question", store::encode(follow->question)}};
    }
    if (const auto* main = std::get_if<session::MainAsked>(&step)) {
        return {{"step", "main"}, {"question", store::encode(main->question)}};
    }
    return {{"step", "completed"}, {"question", nullptr}};
}

json session_json(const session::InterviewSession& s) {
    const auto* outstanding = s.outstanding();
    return {{"session_id", s.session_id},
            {"job", {{"job_title", s.job.job_title}}},
            {"script", {{"main_questions", s.script.main_questions}, {"follow_ups_per_main", s.script.follow_ups_per_main}}},
            {"state", session::to_string(s.state)},
            {"question_pending", s.question_pending},
            {"created_at", format_timestamp(s.created_at)},
            {"asked", store::encode_all(s.asked)},
            {"answers", store::encode_all(s.answers)},
            {"current_question", outstanding ? store::encode(*outstanding) : json(nullptr)}};
}

json hints_json(const Workspace& workspace, const std::string& session_id) {
    const auto record = workspace.record(session_id);
    json highlights = json::array();
    for (const auto& range : annotation::highlight_ranges(record.hints)) highlights.push_back(store::encode(range));
    return {{"hints", store::encode_all(record.hints)},
            {"errors", store::encode_all(record.hint_errors)},
            {"highlights", std::move(highlights)}};
}

json body_of(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    try {
        auto parsed = json::parse(req.body);
        if (!parsed.is_object()) throw InvalidArgument("request body must be a JSON object");
        return parsed;
    } catch (const json::parse_error& e) {
        throw InvalidArgument(std::string("request body is not valid JSON: ") + e.what());
    }
}

std::optional<std::string> optional_string(const json& body, const char* key) {
    if (!body.contains(key) || body.at(key).is_null()) return std::nullopt;
    return body.at(key).get<std::string>();
}

}  // namespace

ApiServer::ApiServer(Workspace& workspace, ServerOptions options)
    : workspace_(workspace), options_(std::move(options)), server_(std::make_unique<httplib::Server>()) {
    const unsigned workers = std::max(1u, options_.max_in_flight);
    server_->new_task_queue = [workers] { return new httplib::ThreadPool(workers); };
    // The library default adds SO_REUSEPORT, which lets a second server share
    // an occupied port instead of failing to bind.
    server_->set_socket_options([](socket_t sock) {
        int yes = 1;
        ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
    install_routes();
}

ApiServer::~ApiServer() { stop(); }

void ApiServer::install_routes() {
    using Handler = std::function<json(const httplib::Request&)>;
    auto wrap = [this](int success_status, Handler handler) {
        return [this, success_status, handler](const httplib::Request& req, httplib::Response& res) {
            try {
                llm::ScopedDeadline deadline(options_.request_deadline);
                const json body = handler(req);
                res.status = success_status;
                if (!body.is_null()) res.set_content(body.dump(-1, ' ', false, json::error_handler_t::replace), "application/json");
            } catch (const Error& e) {
                res.status = http_status(e.code());
                res.set_content(error_body(e).dump(-1, ' ', false, json::error_handler_t::replace), "application/json");
            } catch (const json::exception& e) {
                const InvalidArgument wrapped(std::string("bad request field: ") + e.what());
                res.status = 400;
                res.set_content(error_body(wrapped).dump(), "application/json");
            } catch (const std::exception& e) {
                const StorageError wrapped(e.what());
                res.status = 500;
                res.set_content(error_body(wrapped).dump(), "application/json");
            }
        };
    };
    auto& s = *server_;
    auto& ws = workspace_;

    s.Get("/healthz", wrap(200, [](const httplib::Request&) { return json{{"status", "ok"}}; }));

    s.Post("/sessions", wrap(201, [&ws](const httplib::Request& req) {
        const auto body = body_of(req);
        std::optional<session::InterviewScript> script;
        if (body.contains("script") && !body.at("script").is_null()) {
            const auto& sj = body.at("script");
            session::InterviewScript parsed = session::InterviewScript::standard();
            if (sj.contains("main_questions")) parsed.main_questions = sj.at("main_questions").get<std::vector<std::string>>();
            if (sj.contains("follow_ups_per_main")) parsed.follow_ups_per_main = sj.at("follow_ups_per_main").get<int>();
            script = std::move(parsed);
        }
        const auto created = ws.create_session(body.value("job_title", std::string()), std::move(script));
        auto out = session_json(created);
        out["question"] = store::encode(created.asked.back());
        return out;
    }));

    s.Get("/sessions", wrap(200, [&ws](const httplib::Request&) {
        json list = json::array();
        for (const auto& summary : ws.list_sessions()) {
            list.push_back({{"session_id", summary.session_id},
                            {"job_title", summary.job_title},
                            {"created_at", format_timestamp(summary.created_at)},
                            {"state", session::to_string(summary.state)}});
        }
        return json{{"sessions", std::move(list)}};
    }));

    s.Get(R"(/sessions/([A-Za-z0-9_-]+))", wrap(200, [&ws](const httplib::Request& req) {
        return session_json(ws.get_session(req.matches[1]));
    }));

    s.Post(R"(/sessions/([A-Za-z0-9_-]+)/answers)", wrap(200, [&ws](const httplib::Request& req) {
        const auto body = body_of(req);
        session::AnswerInput input;
        input.text = body.value("text", std::string());
        input.audio_ref = optional_string(body, "audio_ref");
        if (body.contains("span") && !body.at("span").is_null()) {
            input.span = TimeRange{body.at("span").at("start_ms").get<std::int64_t>(),
                                   body.at("span").at("end_ms").get<std::int64_t>()};
        }
        return step_json(ws.submit_answer(req.matches[1], std::move(input)));
    }));

    s.Post(R"(/sessions/([A-Za-z0-9_-]+)/retry)", wrap(200, [&ws](const httplib::Request& req) {
        return step_json(ws.retry_question(req.matches[1]));
    }));

    s.Get(R"(/sessions/([A-Za-z0-9_-]+)/transcript)", wrap(200, [&ws](const httplib::Request& req) {
        const auto transcript = ws.get_transcript(req.matches[1]);
        auto out = store::encode(transcript);
        out["duration_ms"] = transcript.duration_ms();
        return out;
    }));

    s.Post(R"(/sessions/([A-Za-z0-9_-]+)/hints)", wrap(200, [&ws](const httplib::Request& req) {
        const auto body = body_of(req);
        ws.classify(req.matches[1], body.value("force", false));
        return hints_json(ws, req.matches[1]);
    }));

    s.Get(R"(/sessions/([A-Za-z0-9_-]+)/hints)", wrap(200, [&ws](const httplib::Request& req) {
        return hints_json(ws, req.matches[1]);
    }));

    s.Post(R"(/sessions/([A-Za-z0-9_-]+)/annotations)", wrap(201, [&ws](const httplib::Request& req) {
        const auto body = body_of(req);
        AnnotationRequest request;
        request.from_hint_turn = optional_string(body, "from_hint_turn");
        if (!request.from_hint_turn) {
            request.range = {body.at("start_ms").get<std::int64_t>(), body.at("end_ms").get<std::int64_t>()};
        }
        request.self_reflection = body.value("self_reflection", std::string());
        return store::encode(ws.create_annotation(req.matches[1], request));
    }));

    s.Get(R"(/sessions/([A-Za-z0-9_-]+)/annotations)", wrap(200, [&ws](const httplib::Request& req) {
        return json{{"annotations", store::encode_all(ws.annotations(req.matches[1]))}};
    }));

    s.Get(R"(/sessions/([A-Za-z0-9_-]+)/export)", [&ws](const httplib::Request& req, httplib::Response& res) {
        try {
            res.set_content(ws.export_session(req.matches[1]), "application/json");
        } catch (const Error& e) {
            res.status = http_status(e.code());
            res.set_content(error_body(e).dump(), "application/json");
        }
    });

    s.Delete(R"(/annotations/([A-Za-z0-9_-]+))", wrap(204, [&ws](const httplib::Request& req) {
        ws.delete_annotation(req.matches[1]);
        return json(nullptr);
    }));

    s.Post(R"(/annotations/([A-Za-z0-9_-]+)/thread)", wrap(201, [&ws](const httplib::Request& req) {
        return store::encode(ws.start_thread(req.matches[1]));
    }));

    s.Get(R"(/threads/([A-Za-z0-9_-]+))", wrap(200, [&ws](const httplib::Request& req) {
        return store::encode(ws.get_thread(req.matches[1]));
    }));

    s.Post(R"(/threads/([A-Za-z0-9_-]+)/messages)", wrap(200, [&ws](const httplib::Request& req) {
        const auto body = body_of(req);
        const auto message = ws.ask(req.matches[1], body.value("text", std::string()));
        return json{{"message", store::encode(message)}, {"thread", store::encode(ws.get_thread(req.matches[1]))}};
    }));

    s.Post(R"(/threads/([A-Za-z0-9_-]+)/revisions)", wrap(200, [&ws](const httplib::Request& req) {
        const auto body = body_of(req);
        const auto message =
            ws.submit_revision(req.matches[1], body.value("text", std::string()), optional_string(body, "audio_ref"));
        return json{{"message", store::encode(message)}, {"thread", store::encode(ws.get_thread(req.matches[1]))}};
    }));

    s.Post(R"(/threads/([A-Za-z0-9_-]+)/retry)", wrap(200, [&ws](const httplib::Request& req) {
        const auto message = ws.retry_thread(req.matches[1]);
        return json{{"message", store::encode(message)}, {"thread", store::encode(ws.get_thread(req.matches[1]))}};
    }));

    s.Post(R"(/threads/([A-Za-z0-9_-]+)/save)", wrap(200, [&ws](const httplib::Request& req) {
        return store::encode(ws.save_thread(req.matches[1]));
    }));

    s.Post("/audio", wrap(201, [&ws](const httplib::Request& req) {
        if (!req.has_file("audio")) throw InvalidArgument("multipart field \"audio\" is required");
        const auto ref = ws.upload_audio(req.get_file_value("audio").content);
        if (req.has_file("transcript")) {
            const auto sidecar = ws.storage().audio_path(ref).string() + ".txt";
            std::ofstream out(sidecar, std::ios::binary);
            out << req.get_file_value("transcript").content;
            if (!out) throw StorageError("cannot write transcript sidecar");
        }
        return json{{"audio_ref", ref}};
    }));

    s.Post(R"(/audio/([A-Za-z0-9_-]+)/transcription)", wrap(200, [&ws](const httplib::Request& req) {
        json segments = json::array();
        for (const auto& segment : ws.transcribe(req.matches[1])) {
            segments.push_back({{"text", segment.text}, {"start_ms", segment.start_ms}, {"end_ms", segment.end_ms}});
        }
        return json{{"segments", std::move(segments)}};
    }));
}

int ApiServer::bind() {
    if (options_.port == 0) {
        port_ = server_->bind_to_any_port(options_.host);
    } else {
        port_ = server_->bind_to_port(options_.host, options_.port) ? options_.port : -1;
    }
    if (port_ <= 0) {
        throw ConfigError("cannot bind " + options_.host + ":" + std::to_string(options_.port));
    }
    return port_;
}

void ApiServer::run() { server_->listen_after_bind(); }

int ApiServer::start() {
    const int bound = bind();
    thread_ = std::thread([this] { run(); });
    server_->wait_until_ready();
    return bound;
}

void ApiServer::stop() {
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
}

}  // namespace rehearse::api
