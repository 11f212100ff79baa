#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "spi/service/interview_service.hpp"

namespace spi::service {

inline constexpr int kDefaultPort = 8714;

struct HttpConfig {
    std::string host = "127.0.0.1";
    int port = kDefaultPort;  // 0 picks a free port
    /// Built UI bundle, served under "/".
    std::optional<std::filesystem::path> static_dir;
};

/// --port, else SPI_DISCOVERY_PORT, else the default.
int resolve_port(std::optional<int> flag);

/// Routes:
///   POST /sessions, POST /sessions/{id}/answer, POST /sessions/{id}/undo,
///   GET /sessions/{id}, GET /sessions/{id}/model
class HttpServer {
public:
    HttpServer(InterviewService& service, HttpConfig config);
    ~HttpServer();

    /// Binds the socket; returns the bound port. Throws Error when binding fails.
    int bind();
    /// Serves until stop(); call bind() first.
    void run();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace spi::service
