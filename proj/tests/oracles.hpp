#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the library beyond its value types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "spi/learner.hpp"
#include "spi/monotone.hpp"
#include "spi/rule_core.hpp"

namespace oracle {

// Reference chains: per chain, (vector, f, h) in row order.
struct TableRow {
    const char* vector;
    int f;
    int h;
};

inline const std::vector<std::vector<TableRow>>& reference_chains() {
    static const std::vector<std::vector<TableRow>> rows{
        {{"01100", 1, 1}, {"11100", 1, 1}},
        {{"01010", 0, 1}, {"11010", 1, 1}},
        {{"11000", 1, 1}, {"11001", 1, 1}},
        {{"10010", 0, 1}, {"10110", 1, 1}},
        {{"10100", 1, 1}, {"10101", 1, 1}},
        {{"00010", 0, 0}, {"00110", 1, 0}, {"01110", 1, 1}, {"11110", 1, 1}},
        {{"00100", 1, 0}, {"00101", 1, 0}, {"01101", 1, 1}, {"11101", 1, 1}},
        {{"01000", 0, 1}, {"01001", 1, 1}, {"01011", 1, 1}, {"11011", 1, 1}},
        {{"10000", 0, 1}, {"10001", 1, 1}, {"10011", 1, 1}, {"10111", 1, 1}},
        {{"00000", 0, 0}, {"00001", 0, 0}, {"00011", 1, 0}, {"00111", 1, 1}, {"01111", 1, 1}, {"11111", 1, 1}},
    };
    return rows;
}

// "c.k": k-th vector of reference chain c (both 1-based).
inline std::string reference_vector(const std::string& label) {
    const auto dot = label.find('.');
    const int chain = std::stoi(label.substr(0, dot));
    const int pos = std::stoi(label.substr(dot + 1));
    return reference_chains().at(chain - 1).at(pos - 1).vector;
}

inline std::uint32_t mask_of(const std::string& bits) {
    std::uint32_t m = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == '1') m |= 1U << i;
    }
    return m;
}

inline std::string bits_of(std::uint32_t mask, unsigned n) {
    std::string s(n, '0');
    for (unsigned i = 0; i < n; ++i) {
        if ((mask >> i) & 1U) s[i] = '1';
    }
    return s;
}

inline std::map<std::string, int> reference_column(bool f_column) {
    std::map<std::string, int> out;
    for (const auto& chain : reference_chains()) {
        for (const auto& row : chain) out[row.vector] = f_column ? row.f : row.h;
    }
    return out;
}

// Monotone iff no comparable pair v <= w has t(v)=1, t(w)=0 (all pairs, not covers).
inline bool monotone_by_pairs(const std::vector<int>& t, unsigned n) {
    const std::uint32_t size = 1U << n;
    for (std::uint32_t v = 0; v < size; ++v) {
        if (!t[v]) continue;
        for (std::uint32_t w = 0; w < size; ++w) {
            if ((v & ~w) == 0 && !t[w]) return false;
        }
    }
    return true;
}

// Minimal vectors of t^{-1}(1).
inline std::set<std::uint32_t> minimal_ones(const std::vector<int>& t, unsigned n) {
    std::set<std::uint32_t> out;
    const std::uint32_t size = 1U << n;
    for (std::uint32_t v = 0; v < size; ++v) {
        if (!t[v]) continue;
        bool minimal = true;
        for (std::uint32_t u = 0; u < size && minimal; ++u) {
            if (u != v && (u & ~v) == 0 && t[u]) minimal = false;
        }
        if (minimal) out.insert(v);
    }
    return out;
}

// Up-closure of a random generator set.
inline std::vector<int> random_monotone(unsigned n, std::mt19937_64& rng) {
    const std::uint32_t size = 1U << n;
    const std::size_t generators = rng() % (n + 2);
    std::vector<std::uint32_t> gens;
    for (std::size_t k = 0; k < generators; ++k) gens.push_back(static_cast<std::uint32_t>(rng() % size));
    std::vector<int> t(size, 0);
    for (std::uint32_t v = 0; v < size; ++v) {
        for (const auto g : gens) {
            if ((g & ~v) == 0) t[v] = 1;
        }
    }
    return t;
}

inline std::uint64_t binomial(unsigned n, unsigned k) {
    if (k > n) return 0;
    unsigned __int128 r = 1;
    for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return static_cast<std::uint64_t>(r);
}

// P(X >= a), X ~ Hypergeom(N, K = a + c, n = a + b), by exact integer tail summation.
inline long double hypergeometric_tail(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
    const unsigned N = static_cast<unsigned>(a + b + c + d);
    const unsigned K = static_cast<unsigned>(a + c);
    const unsigned n = static_cast<unsigned>(a + b);
    unsigned __int128 tail = 0;
    for (unsigned x = static_cast<unsigned>(a); x <= std::min(K, n); ++x) {
        if (n - x > N - K) continue;
        tail += static_cast<unsigned __int128>(binomial(K, x)) * binomial(N - K, n - x);
    }
    return static_cast<long double>(tail) / static_cast<long double>(binomial(N, n));
}

// Binary dataset with attributes a0..a{k-1} and a final "goal" attribute.
inline spi::Dataset random_binary_dataset(std::size_t attributes, std::size_t cases, std::mt19937_64& rng,
                                          double skew = 0.5) {
    std::vector<spi::Attribute> attrs;
    for (std::size_t i = 0; i < attributes; ++i) attrs.push_back({"a" + std::to_string(i), spi::AttributeKind::binary, {}});
    attrs.push_back({"goal", spi::AttributeKind::binary, {}});
    std::vector<spi::Case> rows;
    // The goal leans on the first two attributes so that rules exist.
    for (std::size_t k = 0; k < cases; ++k) {
        spi::Case c;
        c.id = "c" + std::to_string(k);
        for (std::size_t i = 0; i < attributes; ++i) c.values.emplace_back((rng() % 1000) < skew * 1000);
        const bool lean = attributes >= 2 && std::get<bool>(c.values[0]) && !std::get<bool>(c.values[1]);
        c.values.emplace_back(lean ? (rng() % 10) < 8 : (rng() % 10) < 3);
        rows.push_back(std::move(c));
    }
    return spi::Dataset(spi::AttributeSignature(std::move(attrs)), std::move(rows));
}

// eq(true) and its negation for every attribute except the last.
inline std::vector<spi::Literal> binary_pool(const spi::Dataset& data) {
    std::vector<spi::Literal> pool;
    for (std::size_t i = 0; i + 1 < data.signature().size(); ++i) {
        pool.push_back(spi::Literal::equals(i, true));
        pool.push_back(spi::Literal::equals(i, true, spi::Polarity::negated));
    }
    std::sort(pool.begin(), pool.end());
    return pool;
}

// Counting with plain loops over cases.
inline std::pair<std::size_t, std::size_t> count_rule(const std::vector<spi::Literal>& premise,
                                                      const std::vector<spi::Literal>& conclusion,
                                                      const spi::Dataset& data) {
    std::size_t support = 0;
    std::size_t joint = 0;
    for (const auto& c : data.cases()) {
        const bool p = std::all_of(premise.begin(), premise.end(), [&](const auto& l) { return spi::satisfied(l, c); });
        if (!p) continue;
        ++support;
        if (std::all_of(conclusion.begin(), conclusion.end(), [&](const auto& l) { return spi::satisfied(l, c); })) {
            ++joint;
        }
    }
    return {support, joint};
}

// a/b < c/d
inline bool less_ratio(std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
    return static_cast<unsigned __int128>(a) * d < static_cast<unsigned __int128>(c) * b;
}

// Every consistent premise over the pool with at most `bound` literals (including unsupported ones).
inline std::vector<std::vector<spi::Literal>> all_premises(const std::vector<spi::Literal>& pool, std::size_t bound) {
    std::vector<std::vector<spi::Literal>> out{{}};
    std::vector<spi::Literal> current;
    auto rec = [&](auto&& self, std::size_t start) -> void {
        if (current.size() == bound) return;
        for (std::size_t j = start; j < pool.size(); ++j) {
            const auto neg = spi::negate(pool[j]);
            if (std::find(current.begin(), current.end(), neg) != current.end()) continue;
            current.push_back(pool[j]);
            out.push_back(current);
            self(self, j + 1);
            current.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

// Admissibility by counting: conclusion inside the goal, premise inside the pool,
// strict gain for the conclusion and for each of its literals.
inline bool admissible_by_counting(const std::vector<spi::Literal>& premise, const std::vector<spi::Literal>& conclusion,
                                   const std::vector<spi::Literal>& goal, const std::vector<spi::Literal>& pool,
                                   const spi::Dataset& data) {
    for (const auto& l : conclusion) {
        if (std::find(goal.begin(), goal.end(), l) == goal.end()) return false;
    }
    for (const auto& l : premise) {
        if (std::find(pool.begin(), pool.end(), l) == pool.end()) return false;
    }
    const auto [support, joint] = count_rule(premise, conclusion, data);
    if (support == 0) return false;
    const auto prior = count_rule({}, conclusion, data).second;
    if (!less_ratio(prior, data.size(), joint, support)) return false;
    for (const auto& d : conclusion) {
        const auto prior_d = count_rule({}, {d}, data).second;
        const auto joint_d = count_rule(premise, {d}, data).second;
        if (!less_ratio(prior_d, data.size(), joint_d, support)) return false;
    }
    return true;
}

// Brute-force enumeration of ums rules for a fixed conclusion: admissible, and no
// admissible premise superset within the bound has strictly higher probability.
inline std::vector<spi::Rule> brute_force_ums(const std::vector<spi::Literal>& goal, const std::vector<spi::Literal>& pool,
                                              const spi::Dataset& data, std::size_t bound) {
    const auto premises = all_premises(pool, bound);
    struct Candidate {
        std::vector<spi::Literal> premise;
        std::size_t support;
        std::size_t joint;
    };
    std::vector<Candidate> admissible;
    for (const auto& p : premises) {
        if (admissible_by_counting(p, goal, goal, pool, data)) {
            const auto [s, j] = count_rule(p, goal, data);
            admissible.push_back({p, s, j});
        }
    }
    std::vector<spi::Rule> out;
    for (const auto& r : admissible) {
        bool improvable = false;
        for (const auto& c : admissible) {
            if (c.premise.size() <= r.premise.size()) continue;
            const bool superset = std::all_of(r.premise.begin(), r.premise.end(), [&](const auto& l) {
                return std::find(c.premise.begin(), c.premise.end(), l) != c.premise.end();
            });
            if (superset && less_ratio(r.joint, r.support, c.joint, c.support)) {
                improvable = true;
                break;
            }
        }
        if (!improvable) out.emplace_back(spi::Conjunction(r.premise), spi::Conjunction(goal));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace oracle
