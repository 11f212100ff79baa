#include "spi/service/http_server.hpp"

#include <httplib.h>

#include <cstdlib>

namespace spi::service {

int resolve_port(std::optional<int> flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("SPI_DISCOVERY_PORT"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const long port = std::strtol(env, &end, 10);
        if (*end != '\0' || port < 0 || port > 65535) {
            throw InvalidArgument(std::string("SPI_DISCOVERY_PORT is not a port: ") + env);
        }
        return static_cast<int>(port);
    }
    return kDefaultPort;
}

struct HttpServer::Impl {
    InterviewService& service;
    HttpConfig config;
    httplib::Server server;

    static void send(httplib::Response& res, const Response& r) {
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    }

    static std::optional<Json> body_of(const httplib::Request& req, httplib::Response& res) {
        if (req.body.empty()) return Json::object();
        try {
            return Json::parse(req.body);
        } catch (const Json::parse_error& e) {
            send(res, {400, Json{{"error", std::string("malformed JSON: ") + e.what()}}});
            return std::nullopt;
        }
    }

    void routes() {
        server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
            if (auto body = body_of(req, res)) send(res, service.create_session(*body));
        });
        server.Post(R"(/sessions/([0-9a-f]+)/answer)", [this](const httplib::Request& req, httplib::Response& res) {
            if (auto body = body_of(req, res)) send(res, service.answer(req.matches[1], *body));
        });
        server.Post(R"(/sessions/([0-9a-f]+)/undo)", [this](const httplib::Request& req, httplib::Response& res) {
            send(res, service.undo(req.matches[1]));
        });
        server.Get(R"(/sessions/([0-9a-f]+))", [this](const httplib::Request& req, httplib::Response& res) {
            send(res, service.state(req.matches[1]));
        });
        server.Get(R"(/sessions/([0-9a-f]+)/model)", [this](const httplib::Request& req, httplib::Response& res) {
            send(res, service.model(req.matches[1]));
        });
        server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
            std::string what = "internal error";
            try {
                std::rethrow_exception(ep);
            } catch (const std::exception& e) {
                what = e.what();
            } catch (...) {
            }
            send(res, {500, Json{{"error", what}}});
        });
        server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
            if (res.body.empty() && res.status == 404) send(res, {404, Json{{"error", "not found"}}});
        });
        if (config.static_dir && std::filesystem::is_directory(*config.static_dir)) {
            server.set_mount_point("/", config.static_dir->string());
        }
    }
};

HttpServer::HttpServer(InterviewService& service, HttpConfig config)
    : impl_(std::make_unique<Impl>(service, std::move(config))) {
    impl_->routes();
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
    int port = impl_->config.port;
    if (port == 0) {
        port = impl_->server.bind_to_any_port(impl_->config.host);
    } else if (!impl_->server.bind_to_port(impl_->config.host, port)) {
        port = -1;
    }
    if (port < 0) {
        throw Error("cannot bind " + impl_->config.host + ":" + std::to_string(impl_->config.port));
    }
    impl_->config.port = port;
    return port;
}

void HttpServer::run() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
    if (impl_) impl_->server.stop();
}

}  // namespace spi::service
