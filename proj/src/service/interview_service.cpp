#include "spi/service/interview_service.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <mutex>
#include <random>

namespace spi::service {

namespace {

// Boards beyond this width are unusable in a browser.
constexpr unsigned kMaxServiceWidth = 16;

Response error(int status, const std::string& message, Json extra = Json::object()) {
    extra["error"] = message;
    return {status, std::move(extra)};
}

std::int64_t seconds(Clock::time_point t) {
    return std::chrono::duration_cast<std::chrono::seconds>(t.time_since_epoch()).count();
}

bool parse_answer_value(const Json& v, bool& out) {
    if (v.is_boolean()) {
        out = v.get<bool>();
        return true;
    }
    if (v.is_number_integer() && (v == 0 || v == 1)) {
        out = v == 1;
        return true;
    }
    return false;
}

std::vector<std::string> parse_names(const Json* names, std::string_view prefix, unsigned width) {
    if (names == nullptr || names->is_null()) return variable_names(prefix, width);
    if (!names->is_array() || names->size() != width) {
        throw InvalidArgument("names must be an array of " + std::to_string(width) + " strings");
    }
    std::vector<std::string> out;
    for (const auto& n : *names) {
        if (!n.is_string() || n.get<std::string>().empty()) throw InvalidArgument("names must be non-empty strings");
        out.push_back(n.get<std::string>());
    }
    return out;
}

}  // namespace

// One monotone sub-interview: chain-ordered with closure, or exhaustive over the cube.
class Part {
public:
    Part(std::string name, std::string prefix, std::vector<std::string> names, ChainPlan plan, bool exhaustive)
        : name_(std::move(name)),
          prefix_(std::move(prefix)),
          names_(std::move(names)),
          exhaustive_(exhaustive),
          state_(std::move(plan)) {
        if (exhaustive_) {
            answers_.assign(state_.plan().cube_size(), -1);
            for (std::uint32_t m = 0; m < state_.plan().cube_size(); ++m) order_.push_back(m);
            // Bitstring order: "000", "001", ...
            std::sort(order_.begin(), order_.end(), [&](std::uint32_t a, std::uint32_t b) {
                return BitVector(width(), a).to_string() < BitVector(width(), b).to_string();
            });
        }
    }

    const std::string& name() const { return name_; }
    const std::string& prefix() const { return prefix_; }
    const std::vector<std::string>& names() const { return names_; }
    bool exhaustive() const { return exhaustive_; }
    unsigned width() const { return state_.width(); }
    const ChainPlan& plan() const { return state_.plan(); }

    std::optional<BitVector> next() const {
        if (!exhaustive_) return state_.next_question();
        for (const auto m : order_) {
            if (answers_[m] < 0) return BitVector(width(), m);
        }
        return std::nullopt;
    }

    bool complete() const { return !next().has_value(); }

    std::size_t asked() const { return exhaustive_ ? log_.size() : state_.asked_log().size(); }
    const std::vector<Answer>& asked_log() const { return exhaustive_ ? log_ : state_.asked_log(); }

    std::size_t known() const { return exhaustive_ ? log_.size() : state_.known_count(); }

    std::optional<bool> value(const BitVector& v) const {
        if (!exhaustive_) return state_.value(v);
        if (answers_[v.mask()] < 0) return std::nullopt;
        return answers_[v.mask()] == 1;
    }

    Provenance provenance(const BitVector& v) const {
        if (!exhaustive_) return state_.provenance(v);
        return answers_[v.mask()] < 0 ? Provenance::unknown : Provenance::asked;
    }

    /// Newly determined vectors other than v.
    std::vector<BitVector> submit(const BitVector& v, bool value) {
        if (!exhaustive_) {
            auto fresh = state_.submit_answer(v, value);
            fresh.erase(std::remove(fresh.begin(), fresh.end(), v), fresh.end());
            return fresh;
        }
        const auto pending = next();
        if (!pending || *pending != v) {
            throw SequencingError(pending ? "vector " + v.to_string() + " is not the pending question " +
                                                pending->to_string()
                                          : "interview is complete");
        }
        for (const auto& a : log_) {
            const bool violates = (value && !a.value && v.leq(a.vector)) || (!value && a.value && a.vector.leq(v));
            if (violates) {
                InconsistentAnswer e(v.to_string(), value, a.vector.to_string(), a.value);
                e.set_source(a.vector.to_string());
                throw e;
            }
        }
        answers_[v.mask()] = value ? 1 : 0;
        log_.push_back({v, value});
        return {};
    }

    std::vector<BitVector> undo() {
        if (!exhaustive_) return state_.undo();
        if (log_.empty()) throw SequencingError("nothing to undo");
        const auto last = log_.back();
        log_.pop_back();
        answers_[last.vector.mask()] = -1;
        return {last.vector};
    }

    Dnf dnf() const {
        if (!exhaustive_) return minimize_absorption(dnf_of_units(width(), known_lower_units(state_)));
        std::vector<BitVector> ones;
        for (const auto& a : log_) {
            if (a.value) ones.push_back(a.vector);
        }
        return minimize_absorption(dnf_of_units(width(), ones));
    }

    Json question_json(const BitVector& v) const {
        Json q{{"vector", v.to_string()}, {"text", render_question(v, names_)}, {"interview", name_}};
        const auto& chains = plan().chains();
        for (std::size_t c = 0; c < chains.size(); ++c) {
            for (std::size_t k = 0; k < chains[c].size(); ++k) {
                if (chains[c][k] == v) q["position"] = {{"chain", c}, {"index", k}};
            }
        }
        return q;
    }

    Json board_json() const {
        Json chains = Json::array();
        for (const auto& chain : plan().chains()) {
            Json cells = Json::array();
            for (const auto& v : chain) {
                const auto x = value(v);
                cells.push_back({{"vector", v.to_string()},
                                 {"value", x ? Json(*x ? 1 : 0) : Json(nullptr)},
                                 {"provenance", std::string(to_string(provenance(v)))}});
            }
            chains.push_back(std::move(cells));
        }
        Json asked_list = Json::array();
        for (const auto& a : asked_log()) asked_list.push_back(Json::array({a.vector.to_string(), a.value ? 1 : 0}));
        return Json{{"name", name_},
                    {"width", width()},
                    {"mode", exhaustive_ ? "exhaustive" : "hansel"},
                    {"names", names_},
                    {"complete", complete()},
                    {"question_count", asked()},
                    {"known", known()},
                    {"total", plan().cube_size()},
                    {"asked", std::move(asked_list)},
                    {"chains", std::move(chains)}};
    }

    Json model_json() const {
        const Dnf d = dnf();
        Json j = dnf_to_json(d, prefix_);
        j["named_text"] = d.to_string(names_);
        return Json{{"name", name_}, {"dnf", std::move(j)}, {"questions", asked()}, {"partial", !complete()}};
    }

    Json snapshot() const {
        Json j{{"name", name_}, {"prefix", prefix_}, {"names", names_}, {"mode", exhaustive_ ? "exhaustive" : "hansel"}};
        j["session"] = session_to_json(state_);
        if (exhaustive_) {
            Json answers = Json::array();
            for (const auto& a : log_) answers.push_back(Json::array({a.vector.to_string(), a.value ? 1 : 0}));
            j["answers"] = std::move(answers);
        }
        return j;
    }

    static Part restore(const Json& j) {
        const bool exhaustive = j.at("mode") == "exhaustive";
        ElicitationState state = session_from_json(j.at("session"));
        Part p(j.at("name").get<std::string>(), j.at("prefix").get<std::string>(),
               j.at("names").get<std::vector<std::string>>(), state.plan(), exhaustive);
        if (exhaustive) {
            for (const auto& a : j.at("answers")) p.submit(BitVector::parse(a.at(0).get<std::string>()), a.at(1) == 1);
        } else {
            p.state_ = std::move(state);
        }
        return p;
    }

private:
    std::string name_;
    std::string prefix_;
    std::vector<std::string> names_;
    bool exhaustive_;
    ElicitationState state_;  // closure state; also carries the board plan in exhaustive mode
    std::vector<std::int8_t> answers_;
    std::vector<Answer> log_;
    std::vector<std::uint32_t> order_;
};

class Session {
public:
    std::string id;
    std::string kind;  // "flat" | "hierarchical"
    std::vector<Part> parts;
    Clock::time_point created;
    Clock::time_point updated;
    mutable std::mutex mutex;

    std::optional<std::size_t> active() const {
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (!parts[i].complete()) return i;
        }
        return std::nullopt;
    }

    bool completed() const { return !active().has_value(); }

    Json question() const {
        const auto a = active();
        if (!a) return nullptr;
        return parts[*a].question_json(*parts[*a].next());
    }

    Json progress() const {
        std::size_t asked = 0;
        for (const auto& p : parts) asked += p.asked();
        Json j{{"questions", asked}, {"completed", completed()}};
        if (const auto a = active()) {
            const auto& p = parts[*a];
            j["interview"] = p.name();
            j["asked"] = p.asked();
            j["known"] = p.known();
            j["total"] = p.plan().cube_size();
        }
        return j;
    }

    Json model() const {
        Json out{{"id", id}, {"kind", kind}, {"partial", !completed()}};
        if (kind == "flat") {
            const auto m = parts.front().model_json();
            out["dnf"] = m["dnf"];
            out["questions"] = m["questions"];
            out["question_counts"] = {{"flat", m["questions"]}};
            return out;
        }
        Json interviews = Json::object();
        Json counts = Json::object();
        std::size_t total = 0;
        for (const auto& p : parts) {
            interviews[p.name()] = p.model_json();
            counts[p.name()] = p.asked();
            total += p.asked();
        }
        out["interviews"] = std::move(interviews);
        out["question_counts"] = std::move(counts);
        out["questions"] = total;
        if (completed()) {
            const HierarchySpec spec{part("f").dnf(), part("g").dnf(), part("h").dnf()};
            std::size_t ones = 0;
            std::vector<BitVector> minimal;
            for (std::uint32_t m = 0; m < (1U << 11); ++m) {
                if (!compose(spec, BitVector(11, m))) continue;
                ++ones;
                bool is_min = true;
                for (unsigned i = 0; i < 11 && is_min; ++i) {
                    if (((m >> i) & 1U) && compose(spec, BitVector(11, m & ~(1U << i)))) is_min = false;
                }
                if (is_min) minimal.emplace_back(11, m);
            }
            std::vector<std::string> flat_names;
            for (const char* g : {"g", "h"}) {
                for (const auto& n : part(g).names()) flat_names.push_back(n);
            }
            for (std::size_t i = 2; i < 5; ++i) flat_names.push_back(part("f").names()[i]);
            const Dnf flattened = dnf_of_units(11, minimal);
            out["composed"] = {
                {"evaluator", "f(g(w1,w2,w3), h(y1,y2,y3,y4,y5), x3, x4, x5)"},
                {"inputs", 1U << 11},
                {"true_inputs", ones},
                {"flattened", flattened.to_string(flat_names)},
                {"hierarchy", hierarchy_to_json(spec)},
            };
        }
        return out;
    }

    Json state() const {
        Json interviews = Json::array();
        for (const auto& p : parts) interviews.push_back(p.board_json());
        const auto a = active();
        return Json{{"id", id},
                    {"kind", kind},
                    {"created", seconds(created)},
                    {"updated", seconds(updated)},
                    {"completed", completed()},
                    {"active", a ? Json(parts[*a].name()) : Json(nullptr)},
                    {"question", question()},
                    {"progress", progress()},
                    {"can_undo", std::any_of(parts.begin(), parts.end(), [](const Part& p) { return p.asked() > 0; })},
                    {"interviews", std::move(interviews)}};
    }

    Json snapshot() const {
        Json ps = Json::array();
        for (const auto& p : parts) ps.push_back(p.snapshot());
        return Json{{"schema_version", kSchemaVersion},
                    {"kind", "service-session"},
                    {"id", id},
                    {"session_kind", kind},
                    {"created", seconds(created)},
                    {"updated", seconds(updated)},
                    {"parts", std::move(ps)}};
    }

    const Part& part(const std::string& name) const {
        for (const auto& p : parts) {
            if (p.name() == name) return p;
        }
        throw InvalidArgument("no sub-interview " + name);
    }
};

std::string render_question(const BitVector& v, const std::vector<std::string>& names) {
    std::string out = "If ";
    for (unsigned i = 0; i < v.width(); ++i) {
        if (i > 0) out += ", ";
        out += (i < names.size() ? names[i] : "x" + std::to_string(i + 1)) + " is " + (v.bit(i) ? "1" : "0");
    }
    return out + ", is a case suspicious of cancer or not?";
}

std::string new_session_id() {
    std::random_device rd;
    static constexpr char kHex[] = "0123456789abcdef";
    std::string id;
    for (int word = 0; word < 4; ++word) {
        std::uint32_t x = rd();
        for (int k = 0; k < 8; ++k) {
            id += kHex[x & 0xFU];
            x >>= 4;
        }
    }
    return id;
}

InterviewService::InterviewService(ServiceConfig config) : config_(std::move(config)) {
    if (config_.snapshot_dir) {
        std::filesystem::create_directories(*config_.snapshot_dir);
        restore();
    }
}

InterviewService::~InterviewService() = default;

std::shared_ptr<Session> InterviewService::find(const std::string& id) const {
    std::shared_lock lock(mutex_);
    const auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

std::size_t InterviewService::session_count() const {
    std::shared_lock lock(mutex_);
    return sessions_.size();
}

void InterviewService::persist(const Session& session) const {
    if (!config_.snapshot_dir) return;
    const auto path = *config_.snapshot_dir / (session.id + ".json");
    const auto tmp = *config_.snapshot_dir / (session.id + ".json.tmp");
    write_text_file(tmp, canonical(session.snapshot()));
    std::filesystem::rename(tmp, path);
}

void InterviewService::restore() {
    for (const auto& entry : std::filesystem::directory_iterator(*config_.snapshot_dir)) {
        if (entry.path().extension() != ".json") continue;
        try {
            const Json j = read_json_file(entry.path());
            if (j.value("kind", "") != "service-session") continue;
            if (j.value("schema_version", 0) != kSchemaVersion) continue;
            auto s = std::make_shared<Session>();
            s->id = j.at("id").get<std::string>();
            s->kind = j.at("session_kind").get<std::string>();
            s->created = Clock::time_point(std::chrono::seconds(j.at("created").get<std::int64_t>()));
            s->updated = Clock::time_point(std::chrono::seconds(j.at("updated").get<std::int64_t>()));
            for (const auto& p : j.at("parts")) s->parts.push_back(Part::restore(p));
            if (s->id + ".json" != entry.path().filename().string() || s->parts.empty()) continue;
            sessions_.emplace(s->id, std::move(s));
        } catch (const std::exception&) {
            // Unreadable snapshots are skipped; the file is left for inspection.
        }
    }
}

std::size_t InterviewService::evict_expired() {
    const auto now = config_.clock();
    std::vector<std::string> dropped;
    {
        std::unique_lock lock(mutex_);
        for (auto it = sessions_.begin(); it != sessions_.end();) {
            bool expired = false;
            {
                std::lock_guard session_lock(it->second->mutex);
                expired = now - it->second->updated > config_.ttl;
            }
            if (expired) {
                dropped.push_back(it->first);
                it = sessions_.erase(it);
            } else {
                ++it;
            }
        }
    }
    if (config_.snapshot_dir) {
        for (const auto& id : dropped) {
            std::error_code ec;
            std::filesystem::remove(*config_.snapshot_dir / (id + ".json"), ec);
        }
    }
    return dropped.size();
}

Response InterviewService::create_session(const Json& body) {
    evict_expired();
    if (!body.is_object()) return error(400, "request body must be a JSON object");
    if (!body.contains("kind") || !body["kind"].is_string()) return error(400, "missing \"kind\"");
    const auto kind = body["kind"].get<std::string>();

    auto session = std::make_shared<Session>();
    session->kind = kind;
    try {
        if (kind == "flat") {
            std::optional<ChainPlan> plan;
            if (body.contains("chain_order") && !body["chain_order"].is_null()) {
                plan = chain_plan_from_json(body["chain_order"]);
            }
            unsigned n = 0;
            if (body.contains("n")) {
                if (!body["n"].is_number_unsigned()) return error(400, "\"n\" must be a positive integer");
                n = body["n"].get<unsigned>();
            } else if (plan) {
                n = plan->width();
            } else {
                return error(400, "flat sessions need \"n\" or \"chain_order\"");
            }
            if (n < 1 || n > kMaxServiceWidth) {
                return error(400, "\"n\" must be between 1 and " + std::to_string(kMaxServiceWidth));
            }
            if (plan && plan->width() != n) return error(400, "chain_order width does not match n");
            const Json* names = body.contains("names") ? &body["names"] : nullptr;
            session->parts.emplace_back("flat", "x", parse_names(names, "x", n), plan ? *plan : ChainPlan::hansel(n),
                                        false);
        } else if (kind == "hierarchical") {
            const Json* names = body.contains("names") ? &body["names"] : nullptr;
            const Json* orders = body.contains("chain_order") ? &body["chain_order"] : nullptr;
            if (names && !names->is_null() && !names->is_object()) return error(400, "\"names\" must be an object");
            if (orders && !orders->is_null() && !orders->is_object()) return error(400, "\"chain_order\" must be an object");
            const bool exhaustive_g = body.value("exhaustive_g", false);
            const std::array<std::tuple<const char*, const char*, unsigned>, 3> layout{
                {{"g", "w", 3}, {"h", "y", 5}, {"f", "x", 5}}};
            for (const auto& [part, prefix, width] : layout) {
                const Json* part_names = (names && names->is_object() && names->contains(part)) ? &(*names)[part] : nullptr;
                ChainPlan plan = ChainPlan::hansel(width);
                if (orders && orders->is_object() && orders->contains(part)) {
                    plan = chain_plan_from_json((*orders)[part]);
                    if (plan.width() != width) return error(400, std::string("chain_order for ") + part + " has the wrong width");
                }
                session->parts.emplace_back(part, prefix, parse_names(part_names, prefix, width), std::move(plan),
                                            std::string(part) == "g" && exhaustive_g);
            }
        } else {
            return error(400, "unknown kind '" + kind + "' (expected flat or hierarchical)");
        }
    } catch (const ParseError& e) {
        return error(400, e.what());
    } catch (const InvalidArgument& e) {
        return error(400, e.what());
    } catch (const Json::exception& e) {
        return error(400, e.what());
    }

    session->id = new_session_id();
    session->created = session->updated = config_.clock();
    Json out;
    {
        std::lock_guard session_lock(session->mutex);
        out = Json{{"id", session->id}, {"kind", kind}, {"question", session->question()}, {"progress", session->progress()}};
        persist(*session);
    }
    {
        std::unique_lock lock(mutex_);
        sessions_.emplace(session->id, session);
    }
    return {201, std::move(out)};
}

Response InterviewService::answer(const std::string& id, const Json& body) {
    const auto session = find(id);
    if (!session) return error(404, "unknown session '" + id + "'");
    if (!body.is_object() || !body.contains("vector") || !body["vector"].is_string() || !body.contains("value")) {
        return error(400, "body must be {\"vector\": bitstring, \"value\": 0|1}");
    }
    bool value = false;
    if (!parse_answer_value(body["value"], value)) return error(400, "\"value\" must be 0 or 1");
    BitVector v;
    try {
        v = BitVector::parse(body["vector"].get<std::string>());
    } catch (const InvalidArgument& e) {
        return error(400, e.what());
    }

    std::lock_guard session_lock(session->mutex);
    const auto active = session->active();
    if (!active) return error(409, "all interviews are complete");
    Part& part = session->parts[*active];
    if (v.width() != part.width()) {
        return error(409, "vector " + v.to_string() + " does not belong to the active interview " + part.name());
    }
    std::vector<BitVector> propagated;
    try {
        propagated = part.submit(v, value);
    } catch (const SequencingError& e) {
        const auto pending = part.next();
        return error(409, e.what(), {{"pending", pending ? Json(pending->to_string()) : Json(nullptr)}});
    } catch (const InconsistentAnswer& e) {
        return error(422, e.what(),
                     {{"vector", e.vector()},
                      {"value", e.value()},
                      {"conflicting", e.conflicting()},
                      {"conflicting_value", e.conflicting_value()},
                      {"source", e.source().empty() ? Json(nullptr) : Json(e.source())}});
    }
    session->updated = config_.clock();

    Json prop = Json::array();
    for (const auto& w : propagated) prop.push_back(Json::array({w.to_string(), value ? 1 : 0}));
    Json out{{"accepted", {{"vector", v.to_string()}, {"value", value ? 1 : 0}, {"interview", part.name()}}},
             {"propagated", std::move(prop)},
             {"question", session->question()},
             {"completed", session->completed()},
             {"progress", session->progress()}};
    const auto now_active = session->active();
    if (part.complete() && now_active) out["transition"] = session->parts[*now_active].name();
    if (part.complete()) out["interview_model"] = part.model_json();
    if (session->completed()) out["model"] = session->model();
    persist(*session);
    return {200, std::move(out)};
}

Response InterviewService::undo(const std::string& id) {
    const auto session = find(id);
    if (!session) return error(404, "unknown session '" + id + "'");
    std::lock_guard session_lock(session->mutex);
    // The latest answered sub-interview: the active one, or the previous one right after a transition.
    std::optional<std::size_t> target;
    for (std::size_t i = 0; i < session->parts.size(); ++i) {
        if (session->parts[i].asked() > 0) target = i;
    }
    if (!target) return error(409, "nothing to undo");
    Part& part = session->parts[*target];
    const auto reverted = part.undo();
    session->updated = config_.clock();
    Json list = Json::array();
    for (const auto& v : reverted) list.push_back(v.to_string());
    Json out{{"reverted", std::move(list)},
             {"interview", part.name()},
             {"question", session->question()},
             {"progress", session->progress()}};
    persist(*session);
    return {200, std::move(out)};
}

Response InterviewService::state(const std::string& id) {
    const auto session = find(id);
    if (!session) return error(404, "unknown session '" + id + "'");
    std::lock_guard session_lock(session->mutex);
    return {200, session->state()};
}

Response InterviewService::model(const std::string& id) {
    const auto session = find(id);
    if (!session) return error(404, "unknown session '" + id + "'");
    std::lock_guard session_lock(session->mutex);
    return {200, session->model()};
}

}  // namespace spi::service
