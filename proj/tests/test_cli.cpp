#include <doctest.h>
#include <httplib.h>

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>
#include <sys/wait.h>

#include "spi/persistence.hpp"
#include "spi/synthetic.hpp"

using namespace spi;

namespace {

const std::filesystem::path kData = SPI_DATA_DIR;
const std::string kCli = SPI_CLI;

struct Run {
    int exit = -1;
    std::string out;

    std::vector<std::string> lines() const {
        std::vector<std::string> v;
        std::istringstream in(out);
        for (std::string l; std::getline(in, l);) v.push_back(l);
        return v;
    }
    bool has_line(const std::string& l) const {
        const auto v = lines();
        return std::find(v.begin(), v.end(), l) != v.end();
    }
};

Run run(const std::string& args) {
    const std::string cmd = kCli + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    Run r;
    char buf[4096];
    while (const auto n = fread(buf, 1, sizeof buf, p)) r.out.append(buf, n);
    const int status = pclose(p);
    r.exit = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string data(const char* name) { return (kData / name).string(); }

std::filesystem::path temp(const std::string& name) { return std::filesystem::temp_directory_path() / name; }

}  // namespace

TEST_CASE("chains") {
    const auto five = run("chains --n 5");
    CHECK(five.exit == 0);
    const auto lines = five.lines();
    REQUIRE(lines.size() == 10);
    CHECK(lines.back() == "00000 < 00001 < 00011 < 00111 < 01111 < 11111");

    const auto one = run("chains --n 1");
    CHECK(one.exit == 0);
    CHECK(one.out == "0 < 1\n");
    CHECK(run("chains --n 0").exit == 2);
    CHECK(run("chains --n 25").exit == 2);
    CHECK(run("chains").exit == 2);
    CHECK(run("chains --n 3 --bogus").exit == 2);

    const auto j = run("--format json chains --n 3");
    CHECK(chain_plan_from_json(Json::parse(j.out)) == ChainPlan::hansel(3));
}

TEST_CASE("elicit replays the fixtures") {
    const auto f = run("elicit --n 5 --oracle " + data("f_table.json") + " --chain-order " + data("chain_order.json"));
    CHECK(f.exit == 0);
    CHECK(f.has_line("questions: 13"));
    CHECK(f.has_line("dnf: x1x2 ∨ x3 ∨ x1x5 ∨ x2x5 ∨ x4x5"));
    CHECK(f.has_line("01100:1* < 11100:1"));

    const auto h = run("elicit --n 5 --oracle " + data("h_table.json") + " --chain-order " + data("chain_order.json"));
    CHECK(h.has_line("questions: 12"));
    CHECK(h.has_line("dnf: y1 ∨ y2 ∨ y3y4y5"));

    const auto g = run("elicit --n 3 --oracle " + data("g_table.json"));
    CHECK(g.has_line("dnf: w2 ∨ w1w3"));

    const auto named = run("elicit --n 3 --oracle " + data("g_table.json") + " --names a,b,c");
    CHECK(named.has_line("dnf: b ∨ a·c"));

    // Saved session reloads complete.
    const auto path = temp("spi_cli_session.json");
    CHECK(run("--output " + path.string() + " elicit --oracle " + data("f_table.json") + " --chain-order " +
              data("chain_order.json"))
              .exit == 0);
    const auto state = std::get<ElicitationState>(load_model(path));
    CHECK(state.complete());
    CHECK(state.asked_log().size() == 13);
    std::filesystem::remove(path);

    const auto j = Json::parse(run("--format json elicit --oracle " + data("h_table.json") + " --chain-order " +
                                   data("chain_order.json"))
                                   .out);
    CHECK(j["questions"] == 12);
    CHECK(j["dnf"]["text"] == "y1 ∨ y2 ∨ y3y4y5");
}

TEST_CASE("elicit errors") {
    // 10 = 1 but 11 = 0.
    const auto bad = temp("spi_cli_bad.json");
    write_text_file(bad, R"({"n": 2, "values": {"00": 0, "10": 1, "01": 0, "11": 0}})");
    CHECK(run("elicit --oracle " + bad.string()).exit == 3);
    std::filesystem::remove(bad);

    CHECK(run("elicit --n 5").exit == 2);
    CHECK(run("elicit --n 4 --oracle " + data("f_table.json")).exit == 2);
    CHECK(run("elicit --n 3 --oracle " + data("g_table.json") + " --names a,b").exit == 2);
    CHECK(run("elicit --oracle /nonexistent.json").exit == 2);
}

TEST_CASE("interactive elicit reads answers from the terminal") {
    // g = w2 ∨ w1w3 answered by hand; the first answer is wrong and undone.
    const auto g = expert_model().g;
    ElicitationState s(ChainPlan::hansel(3));
    std::string script;
    while (const auto q = s.next_question()) {
        const bool x = g.evaluate(*q);
        if (script.empty()) script = std::string(x ? "0" : "1") + "\nu\n";
        script += x ? "1\n" : "0\n";
        s.submit_answer(*q, x);
    }
    const auto answers = temp("spi_cli_answers.txt");
    write_text_file(answers, script);
    const auto r = run("elicit --interactive --n 3 --names w1,w2,w3 < " + answers.string());
    std::filesystem::remove(answers);
    CHECK(r.exit == 0);
    CHECK(r.out.find("If w1 is ") != std::string::npos);
    CHECK(r.out.find("is a case suspicious of cancer or not?") != std::string::npos);
    CHECK(r.has_line("dnf: w2 ∨ w1w3"));
}

TEST_CASE("economy") {
    const auto r = run("economy --f " + data("f_table.json") + " --h " + data("h_table.json") + " --chain-order " +
                       data("chain_order.json"));
    CHECK(r.exit == 0);
    CHECK(r.has_line("f questions: 13 <= 20"));
    CHECK(r.has_line("h questions: 12 <= 20"));
    CHECK(r.has_line("f+h questions: 25 <= 40"));
    CHECK(r.has_line("without monotonicity and hierarchy: 2^11 = 2048"));

    const auto path = temp("spi_cli_hierarchy.json");
    CHECK(run("--output " + path.string() + " economy --f " + data("f_table.json") + " --h " + data("h_table.json") +
              " --g " + data("g_table.json") + " --chain-order " + data("chain_order.json"))
              .exit == 0);
    CHECK(std::get<HierarchySpec>(load_model(path)) == expert_model());
    std::filesystem::remove(path);
}

TEST_CASE("compose") {
    const auto model = expert_model();
    const auto dir = temp("spi_cli_dnfs");
    std::filesystem::create_directories(dir);
    write_text_file(dir / "f.json", canonical(dnf_to_json(model.f)));
    write_text_file(dir / "g.json", canonical(dnf_to_json(model.g, "w")));
    write_text_file(dir / "h.json", canonical(dnf_to_json(model.h, "y")));
    const std::string files = "--f " + (dir / "f.json").string() + " --g " + (dir / "g.json").string() + " --h " +
                              (dir / "h.json").string();
    CHECK(run("compose " + files + " --eval \"000 00000 100\"").out == "1\n");
    CHECK(run("compose " + files + " --eval \"000 00000 000\"").out == "0\n");
    CHECK(run("compose " + files + " --eval \"010 10000 000\"").out == "1\n");
    CHECK(run("compose --hierarchy " + data("hierarchy.json") + " --eval 01010000000").out == "1\n");
    CHECK(run("compose " + files + " --eval 0101").exit == 2);
    CHECK(run("compose --f " + (dir / "g.json").string() + " --g " + (dir / "g.json").string() + " --h " +
              (dir / "h.json").string() + " --eval 00000000000")
              .exit == 2);

    // Every input agrees with the library.
    std::mt19937 rng(7);
    for (int k = 0; k < 8; ++k) {
        const std::uint32_t m = rng() & 0x7FFU;
        const BitVector v(11, m);
        CHECK(run("compose " + files + " --eval " + v.to_string()).out == (compose(model, v) ? "1\n" : "0\n"));
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("generate is deterministic in the seed") {
    const auto a = run("--seed 3 generate --cases 20");
    const auto b = run("--seed 3 generate --cases 20");
    const auto c = run("--seed 4 generate --cases 20");
    CHECK(a.exit == 0);
    CHECK(a.out == b.out);
    CHECK(a.out != c.out);
    CHECK(a.lines().size() == 21);
    CHECK(run("generate --noise 2").exit == 2);
}

TEST_CASE("learn and evaluate") {
    const auto dir = temp("spi_cli_learn");
    std::filesystem::create_directories(dir);
    const auto csv = (dir / "cases.csv").string();
    const auto schema = (dir / "schema.json").string();

    // label copies a; b and c are noise.
    std::mt19937 rng(11);
    std::string text = "id,a,b,c,label\n";
    for (int i = 0; i < 30; ++i) {
        const int a = i % 2, b = rng() & 1U, c = rng() & 1U;
        text += "r" + std::to_string(i) + "," + std::to_string(a) + "," + std::to_string(b) + "," +
                std::to_string(c) + "," + std::to_string(a) + "\n";
    }
    write_text_file(csv, text);
    write_text_file(schema, R"({"attributes": [{"name": "a", "kind": "binary"}, {"name": "b", "kind": "binary"},
        {"name": "c", "kind": "binary"}, {"name": "label", "kind": "binary"}]})");
    const std::string io = "--data " + csv + " --spec " + schema + " --target label";

    const auto rules_path = dir / "rules.json";
    const auto learned = run("--output " + rules_path.string() + " learn " + io + " --min-cp 0.95");
    CHECK(learned.exit == 0);
    const auto rules = std::get<RuleSet>(load_model(rules_path));
    CHECK_FALSE(rules.rules.empty());
    for (const auto& r : rules.rules) CHECK(r.annotation.probability >= Probability(95, 100));

    const auto eval = run("evaluate " + io + " --preset discovery3");
    CHECK(eval.exit == 0);
    CHECK(eval.out.find("diagnosed 30 refused 0 accuracy 1.0000") != std::string::npos);

    // Filtering monotonicity on noisy synthetic data.
    const auto syn = "--data " + data("synthetic_cases.csv") + " --spec " + data("synthetic_schema.json") +
                     " --target malignant --max-premise 3";
    const auto count = [&](const char* cp) {
        const auto j = Json::parse(run("--format json learn " + std::string(syn) + " --min-cp " + cp).out);
        return j["rules"].size();
    };
    const auto n75 = count("0.75"), n85 = count("0.85"), n95 = count("0.95");
    CHECK(n95 <= n85);
    CHECK(n85 <= n75);
    CHECK(n95 > 0);

    // Noise-free model data, 100 cases, seed 0, default premise bound.
    const auto clean = (dir / "clean.csv").string();
    const auto clean_schema = (dir / "clean.json").string();
    REQUIRE(run("--output " + clean + " generate --cases 100 --noise 0 --schema " + clean_schema).exit == 0);
    const auto report = Json::parse(
        run("--format json evaluate --data " + clean + " --spec " + clean_schema + " --target malignant").out);
    REQUIRE(report.size() == 3);
    CHECK(report[0]["min_cp"] == 0.75);
    CHECK(report[1]["min_cp"] == 0.85);
    CHECK(report[2]["min_cp"] == 0.95);
    for (const auto& row : report) CHECK(row["diagnosed"].get<int>() + row["refused"].get<int>() == 100);
    CHECK(report[2]["accuracy"].get<double>() >= report[0]["accuracy"].get<double>());

    // Degenerate and malformed inputs.
    write_text_file(dir / "const.csv", "a,b,c,label\n1,0,1,1\n0,1,0,1\n");
    CHECK(run("learn --data " + (dir / "const.csv").string() + " --spec " + schema + " --target label").exit == 4);
    CHECK(run("evaluate --data " + (dir / "const.csv").string() + " --spec " + schema + " --target label").exit == 4);
    CHECK(run("learn --data " + csv + " --spec " + schema + " --target nope").exit == 2);
    CHECK(run("learn " + io + " --min-cp 1.5").exit == 2);
    CHECK(run("learn " + io + " --preset discovery9").exit == 2);
    write_text_file(dir / "ragged.csv", "a,b,c,label\n1,0\n");
    CHECK(run("learn --data " + (dir / "ragged.csv").string() + " --spec " + schema + " --target label").exit == 2);
    std::filesystem::remove_all(dir);
}

TEST_CASE("serve answers over http") {
    const std::string cmd = kCli + " serve --port 0 2>/dev/null & echo pid $!";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char line[256];
    int pid = 0;
    int port = 0;
    while ((pid == 0 || port == 0) && fgets(line, sizeof line, p)) {
        std::string s(line);
        if (s.rfind("pid ", 0) == 0) pid = std::stoi(s.substr(4));
        if (const auto colon = s.rfind(':'); s.rfind("listening", 0) == 0) port = std::stoi(s.substr(colon + 1));
    }
    REQUIRE(pid > 0);
    REQUIRE(port > 0);
    httplib::Client client("127.0.0.1", port);
    const auto res = client.Post("/sessions", R"({"kind": "flat", "n": 3})", "application/json");
    REQUIRE(res);
    CHECK(res->status == 201);
    ::kill(pid, SIGTERM);
    while (fgets(line, sizeof line, p)) {
    }
    pclose(p);
}
