// spi-discovery: command-line front end for rule discovery and expert interviews.

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <charconv>
#include <condition_variable>
#include <csignal>
#include <cstdio>
#include <iostream>
#include <mutex>
#include <thread>

#include "spi/dataset_io.hpp"
#include "spi/learner.hpp"
#include "spi/persistence.hpp"
#include "spi/service/http_server.hpp"
#include "spi/service/interview_service.hpp"
#include "spi/synthetic.hpp"

using namespace spi;

namespace {

enum Exit : int { kOk = 0, kFailure = 1, kUsage = 2, kInconsistent = 3, kDegenerate = 4 };

struct UsageError : Error {
    using Error::Error;
};

struct DegenerateData : Error {
    using Error::Error;
};

struct Globals {
    std::uint64_t seed = 0;
    std::string output;
    std::string format = "text";

    bool json() const { return format == "json"; }
};

std::string fixed(double x, int digits = 4) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, digits);
    return std::string(buf, r.ptr);
}

void emit(const Json& j) { std::cout << j.dump(2) << '\n'; }

std::vector<std::string> split_names(const std::string& text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto end = comma == std::string::npos ? text.size() : comma;
        out.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    return out;
}

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("spi");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    const char* env = std::getenv("SPI_DISCOVERY_LOG");
    const std::string level = env ? env : "warn";
    if (level == "debug") {
        spdlog::set_level(spdlog::level::debug);
    } else if (level == "info") {
        spdlog::set_level(spdlog::level::info);
    } else if (level == "error") {
        spdlog::set_level(spdlog::level::err);
    } else {
        spdlog::set_level(spdlog::level::warn);
    }
}

// ---- chains

struct ChainsArgs {
    int n = 0;
};

int cmd_chains(const Globals& g, const ChainsArgs& a) {
    if (a.n < 1 || a.n > static_cast<int>(kMaxCubeWidth)) {
        throw UsageError("--n must be between 1 and " + std::to_string(kMaxCubeWidth));
    }
    const auto plan = ChainPlan::hansel(static_cast<unsigned>(a.n));
    if (!g.output.empty()) write_text_file(g.output, canonical(chain_plan_to_json(plan)));
    if (g.json()) {
        emit(chain_plan_to_json(plan));
        return kOk;
    }
    for (const auto& chain : plan.chains()) {
        std::string line;
        for (const auto& v : chain) line += (line.empty() ? "" : " < ") + v.to_string();
        std::cout << line << '\n';
    }
    return kOk;
}

// ---- elicit

struct ElicitArgs {
    std::optional<int> n;
    std::string oracle;
    bool interactive = false;
    std::string chain_order;
    std::string names;
};

struct Oracle {
    TruthTable table;
    std::vector<std::string> variables;
};

Oracle load_oracle(const std::string& path) {
    const Json j = read_json_file(path);
    Oracle o{truth_table_from_json(j), {}};
    if (j.contains("variables")) o.variables = j["variables"].get<std::vector<std::string>>();
    return o;
}

std::vector<std::string> resolve_names(const std::string& flag, const std::vector<std::string>& fallback, unsigned n) {
    std::vector<std::string> names = flag.empty() ? fallback : split_names(flag);
    if (names.empty()) return variable_names("x", n);
    if (names.size() != n) throw UsageError("expected " + std::to_string(n) + " variable names");
    return names;
}

// Board layout: chains with values, asked cells starred.
std::string board_text(const ElicitationState& s) {
    std::string out;
    for (const auto& chain : s.plan().chains()) {
        std::string line;
        for (const auto& v : chain) {
            if (!line.empty()) line += " < ";
            const auto x = s.value(v);
            line += v.to_string() + ":" + (x ? (*x ? "1" : "0") : "?");
            if (s.provenance(v) == Provenance::asked) line += "*";
        }
        out += line + '\n';
    }
    return out;
}

bool ask_operator(const BitVector& v, const std::vector<std::string>& names, ElicitationState& s, bool& quit) {
    for (;;) {
        std::cout << service::render_question(v, names) << " [1/0, u = undo, q = quit] " << std::flush;
        std::string line;
        if (!std::getline(std::cin, line) || line == "q") {
            quit = true;
            return false;
        }
        if (line == "1" || line == "y" || line == "yes") return true;
        if (line == "0" || line == "n" || line == "no") return false;
        if (line == "u") {
            try {
                s.undo();
                return ask_operator(*s.next_question(), names, s, quit);
            } catch (const SequencingError&) {
                std::cout << "nothing to undo\n";
            }
        }
    }
}

int cmd_elicit(const Globals& g, const ElicitArgs& a) {
    if (a.oracle.empty() == !a.interactive) throw UsageError("give exactly one of --oracle or --interactive");
    std::optional<Oracle> oracle;
    if (!a.oracle.empty()) oracle = load_oracle(a.oracle);
    std::optional<ChainPlan> plan;
    if (!a.chain_order.empty()) plan = chain_plan_from_json(read_json_file(a.chain_order));

    unsigned n = 0;
    if (a.n) {
        if (*a.n < 1 || *a.n > static_cast<int>(kMaxCubeWidth)) throw UsageError("--n out of range");
        n = static_cast<unsigned>(*a.n);
    } else if (plan) {
        n = plan->width();
    } else if (oracle) {
        n = oracle->table.width();
    } else {
        throw UsageError("--n is required");
    }
    if (plan && plan->width() != n) throw UsageError("chain order width does not match --n");
    if (oracle && oracle->table.width() != n) throw UsageError("oracle width does not match --n");
    const auto names = resolve_names(a.names, oracle ? oracle->variables : std::vector<std::string>{}, n);

    ElicitationState state(plan ? *plan : ChainPlan::hansel(n));
    bool quit = false;
    while (const auto q = state.next_question()) {
        bool value = false;
        if (oracle) {
            value = oracle->table(*q);
        } else {
            value = ask_operator(*q, names, state, quit);
            if (quit) break;
        }
        spdlog::debug("{} -> {}", q->to_string(), value ? 1 : 0);
        state.submit_answer(*state.next_question(), value);
    }
    if (oracle) {
        // Closure values must agree with the scripted answers.
        for (std::uint32_t m = 0; m < state.plan().cube_size(); ++m) {
            const BitVector v(n, m);
            if (*state.value(v) != oracle->table(v)) {
                const auto origin = state.origin(v);
                InconsistentAnswer e(v.to_string(), oracle->table(v) ? 1 : 0,
                                     origin ? origin->to_string() : "?", *state.value(v) ? 1 : 0);
                throw e;
            }
        }
    }

    const Dnf dnf = minimize_absorption(dnf_of_units(n, known_lower_units(state)));
    if (!g.output.empty()) save_model(state, g.output);
    if (g.json()) {
        Json asked = Json::array();
        for (const auto& ans : state.asked_log()) asked.push_back(Json::array({ans.vector.to_string(), ans.value ? 1 : 0}));
        Json dj = dnf_to_json(dnf);
        dj["text"] = dnf.to_string(names);
        emit(Json{{"questions", state.asked_log().size()},
                     {"asked", std::move(asked)},
                     {"complete", state.complete()},
                     {"dnf", std::move(dj)},
                     {"session", session_to_json(state)}});
        return kOk;
    }
    std::cout << "questions: " << state.asked_log().size() << '\n';
    std::string asked;
    for (const auto& ans : state.asked_log()) {
        asked += (asked.empty() ? "" : " ") + ans.vector.to_string() + "=" + (ans.value ? "1" : "0");
    }
    std::cout << "asked: " << asked << '\n';
    std::cout << "table:\n" << board_text(state);
    if (!state.complete()) std::cout << "incomplete: " << state.known_count() << "/" << state.plan().cube_size() << '\n';
    std::cout << "dnf: " << dnf.to_string(names) << '\n';
    return kOk;
}

// ---- economy

struct EconomyArgs {
    std::string f, g, h, chain_order;
};

int cmd_economy(const Globals& gl, const EconomyArgs& a) {
    const auto order = [&](unsigned n) {
        if (!a.chain_order.empty()) {
            auto plan = chain_plan_from_json(read_json_file(a.chain_order));
            if (plan.width() == n) return plan;
        }
        return ChainPlan::hansel(n);
    };
    const auto run = [&](const std::string& path, unsigned n) {
        const auto o = load_oracle(path);
        if (o.table.width() != n) throw UsageError(path + ": expected width " + std::to_string(n));
        return run_interview(order(n), [&](const BitVector& v) { return o.table(v); });
    };
    const auto f = run(a.f, 5);
    const auto h = run(a.h, 5);
    const std::size_t fq = f.asked.size(), hq = h.asked.size();
    const std::size_t bound = question_bound(5);
    const std::size_t exhaustive = std::size_t{1} << 11;

    Json j{{"f", {{"questions", fq}, {"bound", bound}}},
           {"h", {{"questions", hq}, {"bound", bound}}},
           {"total", fq + hq},
           {"total_bound", 2 * bound},
           {"exhaustive", exhaustive}};
    std::optional<InterviewResult> g;
    if (!a.g.empty()) {
        g = run(a.g, 3);
        j["g"] = {{"questions", g->asked.size()}, {"bound", question_bound(3)}};
        const HierarchySpec spec{minimize_absorption(dnf_of_units(5, lower_units(f.table, order(5)))),
                                 minimize_absorption(dnf_of_units(3, lower_units(g->table, ChainPlan::hansel(3)))),
                                 minimize_absorption(dnf_of_units(5, lower_units(h.table, order(5))))};
        if (!gl.output.empty()) save_model(spec, gl.output);
    }
    if (gl.json()) {
        emit(j);
        return kOk;
    }
    std::cout << "f questions: " << fq << " <= " << bound << '\n';
    std::cout << "h questions: " << hq << " <= " << bound << '\n';
    std::cout << "f+h questions: " << fq + hq << " <= " << 2 * bound << '\n';
    if (g) std::cout << "g questions: " << g->asked.size() << " <= " << question_bound(3) << '\n';
    std::cout << "without monotonicity and hierarchy: 2^11 = " << exhaustive << '\n';
    return kOk;
}

// ---- learn / evaluate

struct DataArgs {
    std::string data, spec, target;
    std::size_t max_premise = 4;
};

struct LearnArgs : DataArgs {
    std::optional<double> min_cp;
    std::optional<double> alpha;
    std::string preset;
};

struct Loaded {
    Dataset data;
    std::vector<Literal> pool;
    Literal goal;
};

Loaded load_problem(const DataArgs& a) {
    const auto schema = load_case_schema(a.spec);
    auto data = load_cases_csv(a.data, schema.signature);
    auto d = discretize(data, schema.discretization);
    for (const auto& w : d.warnings) spdlog::warn("{}", w);
    const Literal goal = [&] {
        try {
            return parse_literal(a.target, schema.signature);
        } catch (const Error& e) {
            throw UsageError(std::string("--target: ") + e.what());
        }
    }();
    spdlog::info("{} cases, {} literals", data.size(), d.pool.size());
    return {std::move(data), std::move(d.pool), goal};
}

void check_goal(const Loaded& p) {
    std::size_t positives = 0;
    for (const auto& c : p.data.cases()) positives += satisfied(p.goal, c) ? 1 : 0;
    if (positives == 0 || positives == p.data.size()) {
        throw DegenerateData("target " + to_string(p.goal, p.data.signature()) + " is constant over the data");
    }
}

std::string rule_line(const AnnotatedRule& r, const AttributeSignature& sig) {
    std::string line = to_string(r.rule, sig) + "  p=" + std::to_string(r.annotation.probability.numerator()) + "/" +
                       std::to_string(r.annotation.probability.denominator()) +
                       " support=" + std::to_string(r.annotation.support);
    if (r.annotation.p_value) line += " p-value=" + fixed(*r.annotation.p_value, 6);
    return line;
}

int cmd_learn(const Globals& g, const LearnArgs& a) {
    const auto p = load_problem(a);
    check_goal(p);
    SearchConfig config = a.preset.empty() ? SearchConfig{a.max_premise, 0.0, std::nullopt}
                                           : preset_config(a.preset, a.max_premise);
    if (a.min_cp) config.min_conditional_probability = *a.min_cp;
    if (a.alpha) config.significance_alpha = *a.alpha;
    const auto target = TargetSpec::make(Conjunction{p.goal}, p.pool);
    const auto result = learn_classifier(p.goal, target.pool, p.data, config);
    if (result.diagnostic) throw DegenerateData(*result.diagnostic);
    if (!g.output.empty()) save_model(result.rules, g.output);
    if (g.json()) {
        emit(ruleset_to_json(result.rules));
        return kOk;
    }
    std::cout << "rules: " << result.rules.rules.size() << '\n';
    std::cout << "fixpoint: " << result.fixpoint.size() << '\n';
    for (const auto& r : result.rules.rules) std::cout << rule_line(r, p.data.signature()) << '\n';
    return kOk;
}

struct EvaluateArgs : DataArgs {
    std::vector<std::string> presets;
};

int cmd_evaluate(const Globals& g, const EvaluateArgs& a) {
    const auto p = load_problem(a);
    check_goal(p);
    const auto target = TargetSpec::make(Conjunction{p.goal}, p.pool);
    std::vector<std::string> presets = a.presets;
    if (presets.empty()) {
        for (const auto& pr : kPresets) presets.emplace_back(pr.name);
    }
    Json report = Json::array();
    for (const auto& name : presets) {
        const auto config = preset_config(name, a.max_premise);
        spdlog::info("round robin with {}", name);
        const auto m = evaluate_round_robin(p.data, target, config);
        report.push_back({{"preset", name},
                          {"min_cp", config.min_conditional_probability},
                          {"alpha", *config.significance_alpha},
                          {"cases", p.data.size()},
                          {"diagnosed", m.diagnosed},
                          {"refused", m.refused},
                          {"accuracy", m.accuracy},
                          {"fpr", m.false_positive_rate},
                          {"fnr", m.false_negative_rate}});
        if (!g.json()) {
            std::cout << name << " min-cp " << fixed(config.min_conditional_probability, 2) << " alpha "
                      << fixed(*config.significance_alpha, 2) << ": diagnosed " << m.diagnosed << " refused "
                      << m.refused << " accuracy " << fixed(m.accuracy) << " fpr " << fixed(m.false_positive_rate)
                      << " fnr " << fixed(m.false_negative_rate) << '\n';
        }
    }
    if (!g.output.empty()) write_text_file(g.output, canonical(report));
    if (g.json()) emit(report);
    return kOk;
}

// ---- compose

struct ComposeArgs {
    std::string f, g, h, hierarchy, eval;
};

Dnf load_dnf(const std::string& path) {
    const Json j = read_json_file(path);
    return dnf_from_json(j);
}

int cmd_compose(const Globals& gl, const ComposeArgs& a) {
    HierarchySpec spec;
    if (!a.hierarchy.empty()) {
        spec = hierarchy_from_json(read_json_file(a.hierarchy));
    } else {
        if (a.f.empty() || a.g.empty() || a.h.empty()) throw UsageError("give --hierarchy or all of --f, --g, --h");
        spec = {load_dnf(a.f), load_dnf(a.g), load_dnf(a.h)};
    }
    try {
        spec.validate();
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    std::string bits;
    for (const char c : a.eval) {
        if (c != ' ') bits += c;
    }
    if (bits.size() != 11) throw UsageError("--eval needs 11 bits: w1w2w3 y1..y5 x3x4x5");
    BitVector v;
    try {
        v = BitVector::parse(bits);
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    const bool value = compose(spec, v);
    if (gl.json()) {
        emit(Json{{"inputs", bits}, {"value", value ? 1 : 0}});
    } else {
        std::cout << (value ? 1 : 0) << '\n';
    }
    return kOk;
}

// ---- generate

struct GenerateArgs {
    std::size_t cases = 200;
    double noise = 0.05;
    std::string schema;
};

Json synthetic_schema(const AttributeSignature& sig) {
    Json attrs = Json::array();
    for (std::size_t i = 0; i < sig.size(); ++i) {
        Json a{{"name", sig[i].name}, {"kind", "binary"}};
        if (i + 1 == sig.size()) a["discretize"] = false;
        attrs.push_back(std::move(a));
    }
    return Json{{"attributes", std::move(attrs)}};
}

int cmd_generate(const Globals& g, const GenerateArgs& a) {
    if (a.noise < 0.0 || a.noise > 1.0) throw UsageError("--noise must be in [0, 1]");
    const auto data = synthetic_expert_dataset(expert_model(), {a.cases, a.noise, g.seed});
    if (!a.schema.empty()) write_text_file(a.schema, canonical(synthetic_schema(data.signature())));
    if (g.output.empty()) {
        std::cout << format_cases_csv(data);
    } else {
        write_cases_csv(data, g.output);
        spdlog::info("wrote {} cases to {}", data.size(), g.output);
    }
    return kOk;
}

// ---- serve

struct ServeArgs {
    std::optional<int> port;
    std::string host = "127.0.0.1";
    std::string static_dir;
    std::string snapshots;
    double ttl_hours = 24;
};

int cmd_serve(const Globals&, const ServeArgs& a) {
    service::ServiceConfig config;
    config.ttl = std::chrono::seconds(static_cast<std::int64_t>(a.ttl_hours * 3600));
    if (!a.snapshots.empty()) config.snapshot_dir = a.snapshots;
    service::InterviewService svc(config);
    service::HttpConfig http;
    http.host = a.host;
    try {
        http.port = service::resolve_port(a.port);
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    if (!a.static_dir.empty()) http.static_dir = a.static_dir;

    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    service::HttpServer server(svc, http);
    const int port = server.bind();
    spdlog::info("listening on http://{}:{} ({} restored sessions)", http.host, port, svc.session_count());
    std::cout << "listening on http://" << http.host << ":" << port << std::endl;

    std::mutex m;
    std::condition_variable cv;
    bool done = false;
    std::thread janitor([&] {
        std::unique_lock lock(m);
        while (!cv.wait_for(lock, std::chrono::minutes(1), [&] { return done; })) {
            if (const auto n = svc.evict_expired()) spdlog::info("evicted {} idle sessions", n);
        }
    });
    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        spdlog::info("signal {}, shutting down", sig);
        server.stop();
    });
    server.run();
    {
        std::lock_guard lock(m);
        done = true;
    }
    cv.notify_all();
    janitor.join();
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();
    CLI::App app{"Semantic probabilistic inference and monotone expert interviews"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
    app.add_option("--output", g.output, "Write the command's artifact here");
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"text", "json"}))->capture_default_str();

    std::function<int()> action;

    ChainsArgs chains;
    auto* c = app.add_subcommand("chains", "Print the Hansel chains of the n-cube");
    c->add_option("--n", chains.n, "Cube width (1..24)")->required();
    c->callback([&] { action = [&] { return cmd_chains(g, chains); }; });

    ElicitArgs elicit;
    auto* e = app.add_subcommand("elicit", "Interview an oracle or the operator for a monotone function");
    e->add_option("--n", elicit.n, "Number of variables");
    e->add_option("--oracle", elicit.oracle, "Truth table JSON answering the questions")->check(CLI::ExistingFile);
    e->add_flag("--interactive", elicit.interactive, "Ask on the terminal");
    e->add_option("--chain-order", elicit.chain_order, "Chain order JSON")->check(CLI::ExistingFile);
    e->add_option("--names", elicit.names, "Comma-separated variable names");
    e->callback([&] { action = [&] { return cmd_elicit(g, elicit); }; });

    EconomyArgs economy;
    auto* ec = app.add_subcommand("economy", "Question counts of the f and h interviews against the bounds");
    ec->set_help_flag("--help", "Print this help message and exit");
    ec->add_option("--f", economy.f, "Truth table for f")->required()->check(CLI::ExistingFile);
    ec->add_option("--h", economy.h, "Truth table for h")->required()->check(CLI::ExistingFile);
    ec->add_option("--g", economy.g, "Truth table for g")->check(CLI::ExistingFile);
    ec->add_option("--chain-order", economy.chain_order, "Chain order JSON for the 5-variable interviews")
        ->check(CLI::ExistingFile);
    ec->callback([&] { action = [&] { return cmd_economy(g, economy); }; });

    const auto data_options = [](CLI::App* sub, DataArgs& d) {
        sub->add_option("--data", d.data, "Cases CSV")->required()->check(CLI::ExistingFile);
        sub->add_option("--spec", d.spec, "Case schema JSON")->required()->check(CLI::ExistingFile);
        sub->add_option("--target", d.target, "Goal literal, e.g. malignant")->required();
        sub->add_option("--max-premise", d.max_premise, "Premise length bound")->capture_default_str();
    };

    LearnArgs learn_args;
    auto* l = app.add_subcommand("learn", "Learn diagnostic rules");
    data_options(l, learn_args);
    l->add_option("--min-cp", learn_args.min_cp, "Minimum conditional probability")->check(CLI::Range(0.0, 1.0));
    l->add_option("--alpha", learn_args.alpha, "Fisher significance level")->check(CLI::Range(0.0, 1.0));
    l->add_option("--preset", learn_args.preset, "discovery1|discovery2|discovery3")
        ->check(CLI::IsMember({"discovery1", "discovery2", "discovery3"}));
    l->callback([&] { action = [&] { return cmd_learn(g, learn_args); }; });

    EvaluateArgs eval_args;
    auto* ev = app.add_subcommand("evaluate", "Round-robin evaluation per preset");
    data_options(ev, eval_args);
    ev->add_option("--preset", eval_args.presets, "Presets to run (default: all)")
        ->check(CLI::IsMember({"discovery1", "discovery2", "discovery3"}));
    ev->callback([&] { action = [&] { return cmd_evaluate(g, eval_args); }; });

    ComposeArgs compose_args;
    auto* co = app.add_subcommand("compose", "Evaluate f(g(w), h(y), x3, x4, x5)");
    co->set_help_flag("--help", "Print this help message and exit");
    co->add_option("--f", compose_args.f, "DNF JSON over x1..x5")->check(CLI::ExistingFile);
    co->add_option("--g", compose_args.g, "DNF JSON over w1..w3")->check(CLI::ExistingFile);
    co->add_option("--h", compose_args.h, "DNF JSON over y1..y5")->check(CLI::ExistingFile);
    co->add_option("--hierarchy", compose_args.hierarchy, "Hierarchy JSON")->check(CLI::ExistingFile);
    co->add_option("--eval", compose_args.eval, "11 bits: w1w2w3 y1..y5 x3x4x5 (spaces allowed)")->required();
    co->callback([&] { action = [&] { return cmd_compose(g, compose_args); }; });

    GenerateArgs gen;
    auto* ge = app.add_subcommand("generate", "Synthetic cases labelled by the expert model");
    ge->add_option("--cases", gen.cases, "Number of cases")->capture_default_str();
    ge->add_option("--noise", gen.noise, "Label flip probability")->capture_default_str();
    ge->add_option("--schema", gen.schema, "Also write the case schema here");
    ge->callback([&] { action = [&] { return cmd_generate(g, gen); }; });

    ServeArgs serve;
    auto* s = app.add_subcommand("serve", "Run the interview HTTP service");
    s->add_option("--port", serve.port, "Port (default: SPI_DISCOVERY_PORT or 8714)");
    s->add_option("--host", serve.host, "Bind address")->capture_default_str();
    s->add_option("--static", serve.static_dir, "UI bundle served under /");
    s->add_option("--snapshots", serve.snapshots, "Directory for session snapshots");
    s->add_option("--ttl-hours", serve.ttl_hours, "Idle session lifetime")->capture_default_str();
    s->callback([&] { action = [&] { return cmd_serve(g, serve); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& ex) {
        return app.exit(ex);
    } catch (const CLI::CallForAllHelp& ex) {
        return app.exit(ex);
    } catch (const CLI::CallForVersion& ex) {
        return app.exit(ex);
    } catch (const CLI::ParseError& ex) {
        app.exit(ex);
        return kUsage;
    }

    try {
        return action();
    } catch (const UsageError& ex) {
        std::cerr << "error: " << ex.what() << '\n' << app.help();
        return kUsage;
    } catch (const InconsistentAnswer& ex) {
        std::cerr << "inconsistent: " << ex.what() << '\n';
        return kInconsistent;
    } catch (const DegenerateData& ex) {
        std::cerr << "degenerate data: " << ex.what() << '\n';
        return kDegenerate;
    } catch (const EmptyDataset& ex) {
        std::cerr << "degenerate data: " << ex.what() << '\n';
        return kDegenerate;
    } catch (const LoadError& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return kUsage;
    } catch (const ParseError& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return kUsage;
    } catch (const VersionError& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return kUsage;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return kFailure;
    }
}
