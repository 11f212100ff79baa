#include "spi/monotone.hpp"

#include <algorithm>
#include <bit>
#include <cctype>

namespace spi {

namespace {

std::uint64_t binomial(unsigned n, unsigned k) {
    if (k > n) return 0;
    std::uint64_t r = 1;
    for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

void check_width(unsigned n) {
    if (n < 1 || n > kMaxCubeWidth) {
        throw InvalidArgument("cube width must be between 1 and " + std::to_string(kMaxCubeWidth) + ", got " +
                              std::to_string(n));
    }
}

}  // namespace

BitVector::BitVector(unsigned width, std::uint32_t mask) : width_(width), mask_(mask) {
    if (width > kMaxCubeWidth) throw InvalidArgument("bit vector wider than " + std::to_string(kMaxCubeWidth));
    if (width < 32 && (mask >> width) != 0) throw InvalidArgument("bit vector mask exceeds its width");
}

BitVector BitVector::parse(std::string_view bits) {
    if (bits.empty() || bits.size() > kMaxCubeWidth) {
        throw InvalidArgument("bitstring must have 1 to " + std::to_string(kMaxCubeWidth) + " characters");
    }
    std::uint32_t mask = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == '1') {
            mask |= std::uint32_t{1} << i;
        } else if (bits[i] != '0') {
            throw InvalidArgument("invalid bitstring '" + std::string(bits) + "'");
        }
    }
    return BitVector(static_cast<unsigned>(bits.size()), mask);
}

std::string BitVector::to_string() const {
    std::string s(width_, '0');
    for (unsigned i = 0; i < width_; ++i) {
        if (bit(i)) s[i] = '1';
    }
    return s;
}

std::vector<HanselChain> hansel_chains_construction_order(unsigned n) {
    check_width(n);
    std::vector<std::vector<std::uint32_t>> chains{{0U, 1U}};
    for (unsigned width = 2; width <= n; ++width) {
        std::vector<std::vector<std::uint32_t>> next;
        next.reserve(chains.size() * 2);
        for (const auto& c : chains) {
            // New variable 1 is prepended on the left; old variable i becomes i+1.
            std::vector<std::uint32_t> low;
            for (const auto a : c) low.push_back(a << 1);
            low.push_back((c.back() << 1) | 1U);
            next.push_back(std::move(low));
            if (c.size() >= 2) {
                std::vector<std::uint32_t> high;
                for (std::size_t i = 0; i + 1 < c.size(); ++i) high.push_back((c[i] << 1) | 1U);
                next.push_back(std::move(high));
            }
        }
        chains = std::move(next);
    }
    std::vector<HanselChain> out;
    out.reserve(chains.size());
    for (const auto& c : chains) {
        HanselChain chain;
        for (const auto m : c) chain.emplace_back(n, m);
        out.push_back(std::move(chain));
    }
    return out;
}

ChainPlan ChainPlan::hansel(unsigned n) {
    auto chains = hansel_chains_construction_order(n);
    std::stable_sort(chains.begin(), chains.end(),
                     [](const HanselChain& a, const HanselChain& b) { return a.size() < b.size(); });
    return ChainPlan(n, std::move(chains));
}

ChainPlan::ChainPlan(unsigned width, std::vector<HanselChain> chains) : width_(width), chains_(std::move(chains)) {
    check_width(width);
    std::vector<bool> seen(cube_size(), false);
    std::size_t previous_length = 0;
    for (const auto& chain : chains_) {
        if (chain.empty()) throw InvalidArgument("chain plan contains an empty chain");
        if (chain.size() < previous_length) throw InvalidArgument("chains must be ordered by non-decreasing length");
        previous_length = chain.size();
        for (std::size_t i = 0; i < chain.size(); ++i) {
            const BitVector& v = chain[i];
            if (v.width() != width) throw InvalidArgument("chain vector " + v.to_string() + " has the wrong width");
            if (seen[v.mask()]) throw InvalidArgument("vector " + v.to_string() + " appears in more than one chain");
            seen[v.mask()] = true;
            order_.push_back(v.mask());
            if (i > 0) {
                const std::uint32_t prev = chain[i - 1].mask();
                if (!chain[i - 1].leq(v) || std::popcount(v.mask() ^ prev) != 1) {
                    throw InvalidArgument("chain step " + chain[i - 1].to_string() + " -> " + v.to_string() +
                                          " does not add exactly one bit");
                }
            }
        }
    }
    if (order_.size() != cube_size()) throw InvalidArgument("chain plan does not cover the cube");
    if (chains_.size() != binomial(width, width / 2)) {
        throw InvalidArgument("chain plan must have C(n, n/2) chains, got " + std::to_string(chains_.size()));
    }
}

TruthTable::TruthTable(unsigned width, bool fill) : width_(width), values_(std::size_t{1} << width, fill ? 1 : 0) {
    check_width(width);
}

TruthTable TruthTable::from_function(unsigned width, const std::function<bool(const BitVector&)>& f) {
    TruthTable t(width);
    for (std::uint32_t m = 0; m < t.size(); ++m) t.set(m, f(BitVector(width, m)));
    return t;
}

bool is_monotone(const TruthTable& table) {
    for (std::uint32_t v = 0; v < table.size(); ++v) {
        if (!table.at(v)) continue;
        for (unsigned i = 0; i < table.width(); ++i) {
            const std::uint32_t w = v | (std::uint32_t{1} << i);
            if (w != v && !table.at(w)) return false;
        }
    }
    return true;
}

std::size_t question_bound(unsigned n) {
    if (n < 1) throw InvalidArgument("question bound needs n >= 1");
    return binomial(n, n / 2) + binomial(n, n / 2 + 1);
}

std::string_view to_string(Provenance provenance) {
    switch (provenance) {
        case Provenance::unknown: return "unknown";
        case Provenance::asked: return "asked";
        case Provenance::propagated: return "propagated";
    }
    return "unknown";
}

// Elicitation

ElicitationState::ElicitationState(ChainPlan plan)
    : plan_(std::move(plan)),
      known_(plan_.cube_size(), kUnknown),
      provenance_(plan_.cube_size(), Provenance::unknown),
      origin_(plan_.cube_size(), -1) {}

std::optional<bool> ElicitationState::value(const BitVector& v) const {
    const auto k = known_.at(v.mask());
    if (k == kUnknown) return std::nullopt;
    return k == 1;
}

Provenance ElicitationState::provenance(const BitVector& v) const { return provenance_.at(v.mask()); }

std::optional<BitVector> ElicitationState::origin(const BitVector& v) const {
    const auto o = origin_.at(v.mask());
    if (o < 0) return std::nullopt;
    return asked_[static_cast<std::size_t>(o)].vector;
}

std::optional<BitVector> ElicitationState::next_question() const {
    if (cursor_ >= plan_.order().size()) return std::nullopt;
    return BitVector(width(), plan_.order()[cursor_]);
}

void ElicitationState::advance_cursor() {
    const auto& order = plan_.order();
    while (cursor_ < order.size() && known_[order[cursor_]] != kUnknown) ++cursor_;
}

std::vector<BitVector> ElicitationState::close(const BitVector& v, bool value, std::int32_t origin,
                                               Provenance provenance) {
    if (v.width() != width()) throw InvalidArgument("vector " + v.to_string() + " has the wrong width");
    const std::int8_t val = value ? 1 : 0;
    const std::uint32_t m = v.mask();
    auto conflict = [&](std::uint32_t w) {
        InconsistentAnswer e(v.to_string(), val, BitVector(width(), w).to_string(), known_[w]);
        if (auto o = this->origin(BitVector(width(), w))) e.set_source(o->to_string());
        return e;
    };
    if (known_[m] != kUnknown) {
        if (known_[m] == val) return {};
        throw conflict(m);
    }

    // Up-set of v for 1, down-set for 0.
    std::vector<std::uint32_t> fresh{m};
    const std::uint32_t full = static_cast<std::uint32_t>(plan_.cube_size() - 1);
    const std::uint32_t free = value ? (full & ~m) : m;
    for (std::uint32_t sub = free; sub != 0; sub = (sub - 1) & free) {
        const std::uint32_t w = value ? (m | sub) : (m & ~sub);
        if (known_[w] == kUnknown) {
            fresh.push_back(w);
        } else if (known_[w] != val) {
            throw conflict(w);
        }
    }
    std::sort(fresh.begin() + 1, fresh.end());

    std::vector<BitVector> out;
    out.reserve(fresh.size());
    for (const auto w : fresh) {
        known_[w] = val;
        provenance_[w] = Provenance::propagated;
        origin_[w] = origin;
        out.emplace_back(width(), w);
    }
    provenance_[m] = provenance;
    known_count_ += fresh.size();
    if (origin >= 0) determined_.push_back(std::move(fresh));
    advance_cursor();
    return out;
}

std::vector<BitVector> ElicitationState::propagate(const BitVector& v, bool value) {
    return close(v, value, -1, Provenance::propagated);
}

std::vector<BitVector> ElicitationState::submit_answer(const BitVector& v, bool value) {
    if (v.width() != width()) throw InvalidArgument("vector " + v.to_string() + " has the wrong width");
    const auto pending = next_question();
    if (!pending || *pending != v) {
        throw SequencingError(pending ? "vector " + v.to_string() + " is not the pending question " +
                                            pending->to_string()
                                      : "interview is complete");
    }
    const auto index = static_cast<std::int32_t>(asked_.size());
    auto fresh = close(v, value, index, Provenance::asked);
    asked_.push_back({v, value});
    return fresh;
}

std::vector<BitVector> ElicitationState::undo() {
    if (asked_.empty()) throw SequencingError("nothing to undo");
    std::vector<BitVector> reverted;
    for (const auto w : determined_.back()) {
        known_[w] = kUnknown;
        provenance_[w] = Provenance::unknown;
        origin_[w] = -1;
        reverted.emplace_back(width(), w);
    }
    known_count_ -= determined_.back().size();
    determined_.pop_back();
    asked_.pop_back();
    cursor_ = 0;
    advance_cursor();
    return reverted;
}

TruthTable ElicitationState::table() const {
    if (!complete()) throw SequencingError("interview is not complete");
    TruthTable t(width());
    for (std::uint32_t m = 0; m < t.size(); ++m) t.set(m, known_[m] == 1);
    return t;
}

InterviewResult run_interview(const ChainPlan& plan, const std::function<bool(const BitVector&)>& oracle) {
    ElicitationState state(plan);
    while (const auto q = state.next_question()) {
        const bool value = oracle(*q);
        for (const auto& w : state.submit_answer(*q, value)) {
            if (w == *q) continue;
            const bool actual = oracle(w);
            if (actual != value) {
                InconsistentAnswer e(w.to_string(), actual, q->to_string(), value);
                e.set_source(q->to_string());
                throw e;
            }
        }
    }
    return {state.table(), state.asked_log()};
}

// DNF

Dnf::Dnf(unsigned width, std::vector<std::uint32_t> terms) : width_(width), terms_(std::move(terms)) {
    check_width(width);
    for (const auto t : terms_) {
        if ((t >> width) != 0) throw InvalidArgument("DNF term mentions a variable beyond the width");
    }
    std::sort(terms_.begin(), terms_.end());
    terms_.erase(std::unique(terms_.begin(), terms_.end()), terms_.end());
}

bool Dnf::evaluate(std::uint32_t mask) const {
    return std::any_of(terms_.begin(), terms_.end(), [&](std::uint32_t t) { return (t & ~mask) == 0; });
}

bool Dnf::evaluate(const BitVector& v) const {
    if (v.width() != width_) {
        throw InvalidArgument("DNF over " + std::to_string(width_) + " variables evaluated on " + v.to_string());
    }
    return evaluate(v.mask());
}

std::string Dnf::to_string(std::span<const std::string> names) const {
    if (names.size() < width_) throw InvalidArgument("not enough variable names for the DNF");
    if (terms_.empty()) return "0";
    // Indexed names (x1, w2) read unambiguously when juxtaposed.
    const bool juxtapose = std::all_of(names.begin(), names.begin() + width_, [](const std::string& name) {
        return !name.empty() && std::isdigit(static_cast<unsigned char>(name.back()));
    });
    std::string out;
    for (const auto t : terms_) {
        if (!out.empty()) out += " ∨ ";
        if (t == 0) {
            out += "1";
            continue;
        }
        bool first = true;
        for (unsigned i = 0; i < width_; ++i) {
            if (!((t >> i) & 1U)) continue;
            if (!first && !juxtapose) out += "·";
            out += names[i];
            first = false;
        }
    }
    return out;
}

std::string Dnf::to_string(std::string_view prefix) const { return to_string(variable_names(prefix, width_)); }

std::vector<std::string> variable_names(std::string_view prefix, unsigned width) {
    std::vector<std::string> names;
    for (unsigned i = 1; i <= width; ++i) names.push_back(std::string(prefix) + std::to_string(i));
    return names;
}

std::vector<BitVector> lower_units(const TruthTable& table, const ChainPlan& plan) {
    if (table.width() != plan.width()) throw InvalidArgument("table and chain plan widths differ");
    if (!is_monotone(table)) throw InvalidArgument("table is not monotone");
    std::vector<BitVector> units;
    for (const auto& chain : plan.chains()) {
        const auto it = std::find_if(chain.begin(), chain.end(), [&](const BitVector& v) { return table(v); });
        if (it != chain.end()) units.push_back(*it);
    }
    return units;
}

std::vector<BitVector> known_lower_units(const ElicitationState& state) {
    std::vector<BitVector> units;
    for (const auto& chain : state.plan().chains()) {
        const auto it = std::find_if(chain.begin(), chain.end(), [&](const BitVector& v) { return state.value(v) == true; });
        if (it != chain.end()) units.push_back(*it);
    }
    return units;
}

Dnf dnf_of_units(unsigned width, std::span<const BitVector> units) {
    std::vector<std::uint32_t> terms;
    for (const auto& u : units) {
        if (u.width() != width) throw InvalidArgument("unit " + u.to_string() + " has the wrong width");
        terms.push_back(u.mask());
    }
    return Dnf(width, std::move(terms));
}

Dnf minimize_absorption(const Dnf& dnf) {
    const auto& terms = dnf.terms();
    std::vector<std::uint32_t> kept;
    for (const auto t : terms) {
        const bool absorbed =
            std::any_of(terms.begin(), terms.end(), [&](std::uint32_t u) { return u != t && (u & ~t) == 0; });
        if (!absorbed) kept.push_back(t);
    }
    return Dnf(dnf.width(), std::move(kept));
}

void HierarchySpec::validate() const {
    if (f.width() != 5 || g.width() != 3 || h.width() != 5) {
        throw InvalidArgument("hierarchy needs f over 5, g over 3 and h over 5 variables");
    }
}

bool compose(const HierarchySpec& hierarchy, const BitVector& w, const BitVector& y, const BitVector& x345) {
    hierarchy.validate();
    if (w.width() != 3 || y.width() != 5 || x345.width() != 3) {
        throw InvalidArgument("compose expects 3, 5 and 3 input bits");
    }
    const bool x1 = hierarchy.g.evaluate(w);
    const bool x2 = hierarchy.h.evaluate(y);
    const std::uint32_t x = (x1 ? 1U : 0U) | (x2 ? 2U : 0U) | (x345.mask() << 2);
    return hierarchy.f.evaluate(x);
}

bool compose(const HierarchySpec& hierarchy, const BitVector& inputs) {
    if (inputs.width() != 11) throw InvalidArgument("compose expects 11 input bits");
    const std::uint32_t m = inputs.mask();
    return compose(hierarchy, BitVector(3, m & 0x7U), BitVector(5, (m >> 3) & 0x1FU), BitVector(3, (m >> 8) & 0x7U));
}

}  // namespace spi
