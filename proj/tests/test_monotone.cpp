#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "oracles.hpp"
#include "spi/monotone.hpp"

using namespace spi;

namespace {

ChainPlan reference_plan() {
    std::vector<HanselChain> chains;
    for (const auto& chain : oracle::reference_chains()) {
        HanselChain c;
        for (const auto& row : chain) c.push_back(BitVector::parse(row.vector));
        chains.push_back(c);
    }
    return ChainPlan(5, chains);
}

std::function<bool(const BitVector&)> column_oracle(bool f_column) {
    auto values = oracle::reference_column(f_column);
    return [values](const BitVector& v) { return values.at(v.to_string()) == 1; };
}

std::set<std::string> as_strings(const std::vector<Answer>& asked) {
    std::set<std::string> out;
    for (const auto& a : asked) out.insert(a.vector.to_string());
    return out;
}

TruthTable table_of(const std::vector<int>& t, unsigned n) {
    TruthTable table(n);
    for (std::uint32_t m = 0; m < t.size(); ++m) table.set(m, t[m] != 0);
    return table;
}

}  // namespace

TEST_CASE("bit vectors parse leftmost character as variable 1") {
    const auto v = BitVector::parse("01100");
    CHECK(v.width() == 5);
    CHECK(v.bit(1));
    CHECK(v.bit(2));
    CHECK_FALSE(v.bit(0));
    CHECK(v.mask() == 0b00110U);
    CHECK(v.to_string() == "01100");
    CHECK(BitVector::parse("10100").leq(BitVector::parse("10110")));
    CHECK_FALSE(BitVector::parse("10110").leq(BitVector::parse("10100")));
    CHECK_THROWS_AS(BitVector::parse("01x"), InvalidArgument);
    CHECK_THROWS_AS(BitVector::parse(""), InvalidArgument);
}

TEST_CASE("hansel chains for n=1 and n=3") {
    const auto one = ChainPlan::hansel(1);
    REQUIRE(one.chains().size() == 1);
    CHECK(one.chains()[0] == HanselChain{BitVector::parse("0"), BitVector::parse("1")});

    const auto three = ChainPlan::hansel(3);
    CHECK(three.chains().size() == 3);
    std::set<std::uint32_t> covered;
    for (const auto& c : three.chains()) {
        for (const auto& v : c) covered.insert(v.mask());
    }
    CHECK(covered.size() == 8);

    CHECK_THROWS_AS(ChainPlan::hansel(0), InvalidArgument);
    CHECK_THROWS_AS(ChainPlan::hansel(kMaxCubeWidth + 1), InvalidArgument);
}

TEST_CASE("hansel chains partition the cube for n up to 12") {
    for (unsigned n = 1; n <= 12; ++n) {
        const auto plan = ChainPlan::hansel(n);
        CHECK(plan.chains().size() == oracle::binomial(n, n / 2));
        std::vector<int> seen(std::size_t{1} << n, 0);
        std::size_t last_length = 0;
        for (const auto& chain : plan.chains()) {
            CHECK(chain.size() >= last_length);
            last_length = chain.size();
            for (std::size_t i = 0; i < chain.size(); ++i) {
                ++seen[chain[i].mask()];
                if (i > 0) {
                    const auto diff = chain[i].mask() ^ chain[i - 1].mask();
                    CHECK(std::popcount(diff) == 1);
                    CHECK((chain[i - 1].mask() & diff) == 0);
                }
            }
        }
        CHECK(std::all_of(seen.begin(), seen.end(), [](int k) { return k == 1; }));
    }
}

TEST_CASE("n=5 chains equal the reference chains") {
    const auto plan = ChainPlan::hansel(5);
    std::set<std::vector<std::string>> ours;
    for (const auto& chain : plan.chains()) {
        std::vector<std::string> c;
        for (const auto& v : chain) c.push_back(v.to_string());
        ours.insert(c);
    }
    std::set<std::vector<std::string>> table;
    for (const auto& chain : oracle::reference_chains()) {
        std::vector<std::string> c;
        for (const auto& row : chain) c.push_back(row.vector);
        table.insert(c);
    }
    CHECK(ours == table);
    const auto& longest = plan.chains().back();
    REQUIRE(longest.size() == 6);
    CHECK(longest.front().to_string() == "00000");
    CHECK(longest.back().to_string() == "11111");
}

TEST_CASE("chain plan validation") {
    const auto v = [](const char* s) { return BitVector::parse(s); };
    CHECK_NOTHROW(ChainPlan(2, {{v("01"), v("11")}, {v("00"), v("10")}}));
    // Not covering.
    CHECK_THROWS_AS(ChainPlan(2, {{v("01"), v("11")}, {v("10")}}), InvalidArgument);
    // Two-bit step.
    CHECK_THROWS_AS(ChainPlan(2, {{v("00"), v("11")}, {v("01")}, {v("10")}}), InvalidArgument);
    // Decreasing length.
    CHECK_THROWS_AS(ChainPlan(2, {{v("00"), v("01"), v("11")}, {v("10")}}), InvalidArgument);
    // Duplicate vector.
    CHECK_THROWS_AS(ChainPlan(2, {{v("01"), v("11")}, {v("01"), v("11")}}), InvalidArgument);
}

TEST_CASE("question bound") {
    CHECK(question_bound(1) == 2);
    CHECK(question_bound(2) == 3);
    CHECK(question_bound(5) == 20);

    // Worst case over all monotone functions of 2 variables.
    std::size_t worst = 0;
    for (std::uint32_t bits = 0; bits < 16; ++bits) {
        std::vector<int> t(4);
        for (std::uint32_t m = 0; m < 4; ++m) t[m] = (bits >> m) & 1U;
        if (!oracle::monotone_by_pairs(t, 2)) continue;
        const auto r = run_interview(ChainPlan::hansel(2), [&](const BitVector& v) { return t[v.mask()] != 0; });
        worst = std::max(worst, r.asked.size());
    }
    CHECK(worst == 3);
}

TEST_CASE("propagation follows the order") {
    ElicitationState s(ChainPlan::hansel(5));
    s.propagate(BitVector::parse("10100"), true);
    CHECK(s.value(BitVector::parse("10110")) == true);
    CHECK(s.provenance(BitVector::parse("10110")) == Provenance::propagated);

    ElicitationState bottom(ChainPlan::hansel(5));
    const auto fresh = bottom.propagate(BitVector::parse("00000"), false);
    CHECK(fresh == std::vector<BitVector>{BitVector::parse("00000")});
    CHECK(bottom.known_count() == 1);

    ElicitationState t(reference_plan());
    const auto determined = t.propagate(BitVector::parse("01100"), true);
    for (const char* label : {"1.2", "6.3", "7.3"}) {
        CHECK(t.value(BitVector::parse(oracle::reference_vector(label))) == true);
    }
    CHECK(determined.front() == BitVector::parse("01100"));
    CHECK(determined.size() == 8);  // supersets of {x2, x3}

    // Repeating a known value is a no-op; contradicting it is not.
    CHECK(t.propagate(BitVector::parse("11100"), true).empty());
    CHECK_THROWS_AS(t.propagate(BitVector::parse("11110"), false), InconsistentAnswer);
    try {
        t.propagate(BitVector::parse("01110"), false);
        FAIL("expected an inconsistency");
    } catch (const InconsistentAnswer& e) {
        CHECK(e.vector() == "01110");
        CHECK(e.value() == 0);
        CHECK(e.conflicting_value() == 1);
        CHECK(BitVector::parse("01100").leq(BitVector::parse(e.conflicting())));
    }
}

TEST_CASE("next question and sequencing") {
    ElicitationState s(reference_plan());
    CHECK(s.next_question() == BitVector::parse("01100"));
    s.submit_answer(BitVector::parse("01100"), true);
    CHECK(s.next_question() == BitVector::parse("01010"));
    CHECK(s.asked_log().size() == 1);

    // Already propagated, either value.
    CHECK_THROWS_AS(s.submit_answer(BitVector::parse("11100"), true), SequencingError);
    CHECK_THROWS_AS(s.submit_answer(BitVector::parse("11100"), false), SequencingError);
    // Unknown but not pending.
    CHECK_THROWS_AS(s.submit_answer(BitVector::parse("00000"), false), SequencingError);
    CHECK(s.asked_log().size() == 1);

    s.submit_answer(BitVector::parse("01010"), false);
    CHECK(s.asked_log().size() == 2);
    CHECK(s.provenance(BitVector::parse("01010")) == Provenance::asked);
    CHECK(s.origin(BitVector::parse("00010")) == BitVector::parse("01010"));
}

TEST_CASE("undo restores the previous state") {
    ElicitationState s(reference_plan());
    CHECK_THROWS_AS(s.undo(), SequencingError);
    s.submit_answer(BitVector::parse("01100"), true);
    const ElicitationState before = s;
    s.submit_answer(BitVector::parse("01010"), false);
    const auto reverted = s.undo();
    CHECK(s == before);
    CHECK(std::find(reverted.begin(), reverted.end(), BitVector::parse("00010")) != reverted.end());
    CHECK(s.next_question() == BitVector::parse("01010"));
    s.undo();
    CHECK(s == ElicitationState(reference_plan()));
}

TEST_CASE("completed interview reports no question") {
    ElicitationState s(ChainPlan::hansel(1));
    s.submit_answer(BitVector::parse("0"), false);
    s.submit_answer(BitVector::parse("1"), true);
    CHECK(s.complete());
    CHECK_FALSE(s.next_question().has_value());
    CHECK_THROWS_AS(s.submit_answer(BitVector::parse("1"), true), SequencingError);
}

TEST_CASE("reference interview for f asks the starred cases") {
    const auto result = run_interview(reference_plan(), column_oracle(true));
    CHECK(result.asked.size() == 13);
    std::set<std::string> expected;
    for (const char* label :
         {"1.1", "2.1", "2.2", "3.1", "4.1", "4.2", "5.1", "6.2", "7.1", "8.2", "9.2", "10.2", "10.3"}) {
        expected.insert(oracle::reference_vector(label));
    }
    CHECK(as_strings(result.asked) == expected);
}

TEST_CASE("reference interview for h asks 12 questions") {
    const auto result = run_interview(reference_plan(), column_oracle(false));
    CHECK(result.asked.size() == 12);
    // 7.1 and 7.3 are settled by earlier answers; 10.3 is not.
    const auto asked = as_strings(result.asked);
    CHECK(asked.count(oracle::reference_vector("7.1")) == 0);
    CHECK(asked.count(oracle::reference_vector("7.3")) == 0);
    CHECK(asked.count(oracle::reference_vector("10.3")) == 1);
}

TEST_CASE("n=1 interview asks both vectors") {
    const auto r = run_interview(ChainPlan::hansel(1), [](const BitVector& v) { return v.bit(0); });
    CHECK(r.asked.size() == 2);
}

TEST_CASE("non-monotone oracle is rejected") {
    // f(00100)=1 but f(00110)=0.
    auto oracle_fn = [](const BitVector& v) { return v.to_string() == "00100" || v.to_string() == "11111"; };
    CHECK_THROWS_AS(run_interview(reference_plan(), oracle_fn), InconsistentAnswer);
}

TEST_CASE("monotonicity check") {
    const auto f = oracle::reference_column(true);
    TruthTable t(5);
    for (const auto& [v, x] : f) t.set(BitVector::parse(v).mask(), x == 1);
    CHECK(is_monotone(t));
    TruthTable bad(5);
    bad.set(BitVector::parse("00100").mask(), true);
    CHECK_FALSE(is_monotone(bad));
    CHECK(is_monotone(TruthTable(5, false)));
    CHECK(is_monotone(TruthTable(5, true)));
}

TEST_CASE("lower units of the f table") {
    TruthTable t(5);
    for (const auto& [v, x] : oracle::reference_column(true)) t.set(BitVector::parse(v).mask(), x == 1);
    const auto units = lower_units(t, reference_plan());
    std::vector<std::string> got;
    for (const auto& u : units) got.push_back(u.to_string());
    CHECK(got == std::vector<std::string>{"01100", "11010", "11000", "10110", "10100", "00110", "00100", "01001",
                                          "10001", "00011"});
    CHECK(minimize_absorption(dnf_of_units(5, units)).to_string() == "x1x2 ∨ x3 ∨ x1x5 ∨ x2x5 ∨ x4x5");

    CHECK(lower_units(TruthTable(5, false), reference_plan()).empty());
    const auto all = lower_units(TruthTable(5, true), reference_plan());
    CHECK(all.size() == 10);
    for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i] == reference_plan().chains()[i].front());

    TruthTable bad(5);
    bad.set(BitVector::parse("00100").mask(), true);
    CHECK_THROWS_AS(lower_units(bad, reference_plan()), InvalidArgument);
}

TEST_CASE("DNF construction, rendering and evaluation") {
    const std::vector<BitVector> one{BitVector::parse("01100")};
    CHECK(dnf_of_units(5, one).to_string() == "x2x3");
    CHECK(dnf_of_units(5, {}).to_string() == "0");
    const std::vector<BitVector> top{BitVector::parse("11111")};
    CHECK(dnf_of_units(5, top).to_string() == "x1x2x3x4x5");

    // h-terms as listed for h, plus chain 6's y2y3y4.
    const Dnf h_terms(5, {0b00011, 0b00110, 0b00001, 0b01001, 0b00101, 0b01110, 0b00010, 0b11100});
    CHECK(minimize_absorption(h_terms).to_string("y") == "y1 ∨ y2 ∨ y3y4y5");

    const Dnf g(3, {0b010, 0b101});
    CHECK(g.to_string("w") == "w2 ∨ w1w3");
    CHECK(g.evaluate(BitVector::parse("010")));
    CHECK_FALSE(g.evaluate(BitVector::parse("100")));
    CHECK_THROWS_AS(g.evaluate(BitVector::parse("0101")), InvalidArgument);

    const Dnf f(5, {0b00011, 0b00100, 0b10001, 0b10010, 0b11000});
    CHECK(f.evaluate(BitVector::parse("10100")));
    CHECK_FALSE(f.evaluate(BitVector::parse("00000")));
    CHECK(minimize_absorption(f) == f);

    const std::vector<std::string> names{"a", "b", "c"};
    CHECK(g.to_string(names) == "b ∨ a·c");
}

TEST_CASE("property: interviews reconstruct every monotone function with n <= 4") {
    std::size_t counts[5] = {0, 0, 0, 0, 0};
    for (unsigned n = 1; n <= 4; ++n) {
        const std::uint32_t size = 1U << n;
        const auto plan = ChainPlan::hansel(n);
        for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << size); ++bits) {
            std::vector<int> t(size);
            for (std::uint32_t m = 0; m < size; ++m) t[m] = (bits >> m) & 1U;
            if (!oracle::monotone_by_pairs(t, n)) continue;
            ++counts[n];
            ElicitationState s(plan);
            std::size_t questions = 0;
            while (auto q = s.next_question()) {
                REQUIRE(s.provenance(*q) == Provenance::unknown);
                s.submit_answer(*q, t[q->mask()] != 0);
                ++questions;
            }
            CHECK(s.table() == table_of(t, n));
            CHECK(questions <= question_bound(n));
        }
    }
    CHECK(counts[1] == 3);
    CHECK(counts[2] == 6);
    CHECK(counts[3] == 20);
    CHECK(counts[4] == 168);
}

TEST_CASE("property: DNF extraction is faithful on random monotone functions") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const unsigned n = 5 + trial % 4;
        const auto t = oracle::random_monotone(n, rng);
        const auto table = table_of(t, n);
        const auto plan = ChainPlan::hansel(n);
        const auto dnf = minimize_absorption(dnf_of_units(n, lower_units(table, plan)));
        for (std::uint32_t m = 0; m < t.size(); ++m) CHECK(dnf.evaluate(m) == (t[m] != 0));
        const auto minimal = oracle::minimal_ones(t, n);
        CHECK(std::set<std::uint32_t>(dnf.terms().begin(), dnf.terms().end()) == minimal);
    }
}

TEST_CASE("property: absorption is idempotent and evaluation-preserving") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        const unsigned n = 1 + static_cast<unsigned>(rng() % 7);
        std::vector<std::uint32_t> terms;
        const std::size_t k = rng() % 8;
        for (std::size_t i = 0; i < k; ++i) terms.push_back(static_cast<std::uint32_t>(rng() % (1U << n)));
        const Dnf d(n, terms);
        const auto m = minimize_absorption(d);
        CHECK(minimize_absorption(m) == m);
        for (std::uint32_t v = 0; v < (1U << n); ++v) CHECK(m.evaluate(v) == d.evaluate(v));
        for (const auto a : m.terms()) {
            for (const auto b : m.terms()) {
                if (a != b) CHECK((a & ~b) != 0);
            }
        }
    }
}

TEST_CASE("hierarchical composition") {
    const HierarchySpec model{Dnf(5, {0b00011, 0b00100, 0b10001, 0b10010, 0b11000}), Dnf(3, {0b010, 0b101}),
                              Dnf(5, {0b00001, 0b00010, 0b11100})};
    const auto b = [](const char* s) { return BitVector::parse(s); };
    CHECK(compose(model, b("010"), b("10000"), b("000")));
    CHECK_FALSE(compose(model, b("000"), b("00000"), b("000")));
    CHECK(compose(model, b("000"), b("00000"), b("100")));
    CHECK_THROWS_AS(compose(model, b("0100"), b("10000"), b("000")), InvalidArgument);

    // Flattened brute force over all 2^11 inputs.
    for (std::uint32_t m = 0; m < (1U << 11); ++m) {
        const auto bit = [&](unsigned i) { return ((m >> i) & 1U) != 0; };
        const bool w1 = bit(0), w2 = bit(1), w3 = bit(2);
        const bool y1 = bit(3), y2 = bit(4), y3 = bit(5), y4 = bit(6), y5 = bit(7);
        const bool x3 = bit(8), x4 = bit(9), x5 = bit(10);
        const bool x1 = w2 || (w1 && w3);
        const bool x2 = y1 || y2 || (y3 && y4 && y5);
        const bool expected = (x1 && x2) || x3 || (x1 && x5) || (x2 && x5) || (x4 && x5);
        CHECK(compose(model, BitVector(11, m)) == expected);
        if (x3) CHECK(compose(model, BitVector(11, m)));
    }

    HierarchySpec bad = model;
    bad.g = Dnf(4, {0b0010});
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}
