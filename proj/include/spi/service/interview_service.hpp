#pragma once

// Session manager behind the HTTP interview endpoints. Transport-independent:
// every operation takes and returns JSON plus an HTTP status code.

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include "spi/persistence.hpp"

namespace spi::service {

using Clock = std::chrono::system_clock;

struct ServiceConfig {
    std::chrono::seconds ttl = std::chrono::hours(24);
    /// Sessions are written here as <id>.json after every mutation and reloaded at startup.
    std::optional<std::filesystem::path> snapshot_dir;
    std::function<Clock::time_point()> clock = [] { return Clock::now(); };
};

struct Response {
    int status = 200;
    Json body;
};

class Session;

/// Thread-safe. Mutations of one session are serialized; different sessions proceed
/// independently.
class InterviewService {
public:
    explicit InterviewService(ServiceConfig config = {});
    ~InterviewService();

    InterviewService(const InterviewService&) = delete;
    InterviewService& operator=(const InterviewService&) = delete;

    /// {"kind": "flat", "n"?, "names"?, "chain_order"?} or
    /// {"kind": "hierarchical", "names"?: {"g","h","f"}, "chain_order"?: {"g","h","f"}, "exhaustive_g"?: bool}
    Response create_session(const Json& body);
    /// {"vector": "01100", "value": 1}
    Response answer(const std::string& id, const Json& body);
    Response undo(const std::string& id);
    Response state(const std::string& id);
    Response model(const std::string& id);

    /// Drops sessions idle for longer than the TTL; returns how many.
    std::size_t evict_expired();
    std::size_t session_count() const;

private:
    std::shared_ptr<Session> find(const std::string& id) const;
    void persist(const Session& session) const;
    void restore();

    ServiceConfig config_;
    mutable std::shared_mutex mutex_;
    std::unordered_map<std::string, std::shared_ptr<Session>> sessions_;
};

/// "If x1 is 0, x2 is 1, ... is a case suspicious of cancer or not?"
std::string render_question(const BitVector& v, const std::vector<std::string>& names);

/// 32 hex characters from the system entropy source.
std::string new_session_id();

}  // namespace spi::service
