#pragma once

#include "rehearse/error.hpp"
#include "rehearse/workspace.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <memory>
#include <string>
#include <thread>

namespace httplib {
class Server;
}

namespace rehearse::api {

struct ServerOptions {
    std::string host = "127.0.0.1";
    /// 0 picks an ephemeral port.
    int port = 8080;
    /// Upper bound on any provider work done for one request.
    std::chrono::milliseconds request_deadline{60000};
    /// Worker threads; requests beyond this wait in the queue.
    unsigned max_in_flight = 8;
};

int http_status(ErrorCode code);
/// {"error": {"code", "kind", "message", "retriable"}}
nlohmann::json error_body(const Error& error);

/// JSON-over-HTTP facade. Handlers only translate between JSON and
/// Workspace calls.
///
///   POST   /sessions                      {job_title, script?}
///   GET    /sessions
///   GET    /sessions/{id}
///   POST   /sessions/{id}/answers         {text, audio_ref?, span?}
///   POST   /sessions/{id}/retry
///   GET    /sessions/{id}/transcript
///   POST   /sessions/{id}/hints           {force?}
///   GET    /sessions/{id}/hints
///   POST   /sessions/{id}/annotations     {start_ms, end_ms, self_reflection?, from_hint_turn?}
///   GET    /sessions/{id}/annotations
///   GET    /sessions/{id}/export
///   DELETE /annotations/{id}
///   POST   /annotations/{id}/thread
///   GET    /threads/{id}
///   POST   /threads/{id}/messages         {text}
///   POST   /threads/{id}/revisions        {text?, audio_ref?}
///   POST   /threads/{id}/retry
///   POST   /threads/{id}/save
///   POST   /audio                         multipart: audio, transcript?
///   POST   /audio/{ref}/transcription
class ApiServer {
public:
    ApiServer(Workspace& workspace, ServerOptions options);
    ~ApiServer();
    ApiServer(const ApiServer&) = delete;
    ApiServer& operator=(const ApiServer&) = delete;

    /// Binds the listening socket and returns the port. Throws ConfigError
    /// (BindError) when the address is unavailable.
    int bind();
    /// Serves until stop(); call bind() first.
    void run();
    /// bind() and serve on a background thread.
    int start();
    /// Stops accepting and waits for in-flight requests.
    void stop();

    int port() const { return port_; }

private:
    void install_routes();

    Workspace& workspace_;
    ServerOptions options_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    int port_ = 0;
};

}  // namespace rehearse::api
