#include "spi/rule_core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <tuple>
#include <unordered_set>

namespace spi {

std::string_view to_string(AttributeKind kind) {
    switch (kind) {
        case AttributeKind::binary: return "binary";
        case AttributeKind::categorical: return "categorical";
        case AttributeKind::numeric: return "numeric";
    }
    return "unknown";
}

AttributeSignature::AttributeSignature(std::vector<Attribute> attributes) : attributes_(std::move(attributes)) {
    std::unordered_set<std::string> seen;
    for (const auto& a : attributes_) {
        if (a.name.empty()) throw InvalidArgument("attribute name must be non-empty");
        if (!seen.insert(a.name).second) throw InvalidArgument("duplicate attribute name '" + a.name + "'");
        if (a.kind == AttributeKind::categorical && a.values.empty()) {
            throw InvalidArgument("categorical attribute '" + a.name + "' has no values");
        }
    }
}

std::optional<std::size_t> AttributeSignature::find(std::string_view name) const {
    for (std::size_t i = 0; i < attributes_.size(); ++i) {
        if (attributes_[i].name == name) return i;
    }
    return std::nullopt;
}

std::size_t AttributeSignature::index_of(std::string_view name) const {
    if (auto i = find(name)) return *i;
    throw InvalidArgument("unknown attribute '" + std::string(name) + "'");
}

namespace {

void check_conforms(const Case& c, const AttributeSignature& signature) {
    if (c.values.size() != signature.size()) {
        throw InvalidArgument("case '" + c.id + "' has " + std::to_string(c.values.size()) + " values, signature has " +
                              std::to_string(signature.size()));
    }
    for (std::size_t i = 0; i < signature.size(); ++i) {
        const auto& a = signature[i];
        const auto& v = c.values[i];
        bool ok = false;
        switch (a.kind) {
            case AttributeKind::binary: ok = std::holds_alternative<bool>(v); break;
            case AttributeKind::categorical:
                ok = std::holds_alternative<Category>(v) && std::get<Category>(v).index < a.values.size();
                break;
            case AttributeKind::numeric: ok = std::holds_alternative<double>(v) && std::isfinite(std::get<double>(v)); break;
        }
        if (!ok) throw TypeError("case '" + c.id + "' value for '" + a.name + "' does not match its kind");
    }
}

}  // namespace

Dataset::Dataset(AttributeSignature signature, std::vector<Case> cases)
    : signature_(std::move(signature)), cases_(std::move(cases)) {
    std::unordered_set<std::string> ids;
    for (const auto& c : cases_) {
        check_conforms(c, signature_);
        if (!ids.insert(c.id).second) throw InvalidArgument("duplicate case id '" + c.id + "'");
    }
}

Dataset Dataset::without(std::size_t index) const {
    Dataset out;
    out.signature_ = signature_;
    out.cases_.reserve(cases_.size() - 1);
    for (std::size_t i = 0; i < cases_.size(); ++i) {
        if (i != index) out.cases_.push_back(cases_[i]);
    }
    return out;
}

// Literals

Literal Literal::equals(std::size_t attribute, Value value, Polarity polarity) {
    if (const auto* d = std::get_if<double>(&value); d != nullptr && !std::isfinite(*d)) {
        throw InvalidArgument("equality value must be finite");
    }
    return Literal(attribute, Equals{value}, polarity);
}

Literal Literal::greater(std::size_t attribute, double threshold, Polarity polarity) {
    if (!std::isfinite(threshold)) throw InvalidArgument("threshold must be finite");
    return Literal(attribute, GreaterThan{threshold}, polarity);
}

Literal Literal::less(std::size_t attribute, double threshold, Polarity polarity) {
    if (!std::isfinite(threshold)) throw InvalidArgument("threshold must be finite");
    return Literal(attribute, LessThan{threshold}, polarity);
}

Literal Literal::in_range(std::size_t attribute, double lo, double hi, Polarity polarity) {
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw InvalidArgument("range bounds must be finite");
    if (!(lo < hi)) throw InvalidArgument("range requires lo < hi");
    return Literal(attribute, InRange{lo, hi}, polarity);
}

namespace {

double value_key(const Value& v) {
    return std::visit(
        [](const auto& x) -> double {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, bool>) {
                return x ? 1.0 : 0.0;
            } else if constexpr (std::is_same_v<T, Category>) {
                return static_cast<double>(x.index);
            } else {
                return x;
            }
        },
        v);
}

std::tuple<std::size_t, std::size_t, double, double, int> literal_key(const Literal& l) {
    const auto& p = l.predicate();
    double a = 0;
    double b = 0;
    std::size_t kind = p.index();
    if (const auto* e = std::get_if<Equals>(&p)) {
        a = static_cast<double>(e->value.index());
        b = value_key(e->value);
    } else if (const auto* g = std::get_if<GreaterThan>(&p)) {
        a = g->threshold;
    } else if (const auto* lt = std::get_if<LessThan>(&p)) {
        a = lt->threshold;
    } else {
        const auto& r = std::get<InRange>(p);
        a = r.lo;
        b = r.hi;
    }
    return {l.attribute(), kind, a, b, static_cast<int>(l.polarity())};
}

std::string format_number(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

}  // namespace

std::weak_ordering operator<=>(const Literal& a, const Literal& b) {
    const auto ka = literal_key(a);
    const auto kb = literal_key(b);
    if (ka < kb) return std::weak_ordering::less;
    if (kb < ka) return std::weak_ordering::greater;
    return std::weak_ordering::equivalent;
}

Literal negate(const Literal& literal) {
    const Polarity flipped = literal.is_negated() ? Polarity::positive : Polarity::negated;
    return std::visit(
        [&](const auto& p) -> Literal {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Equals>) {
                return Literal::equals(literal.attribute(), p.value, flipped);
            } else if constexpr (std::is_same_v<T, GreaterThan>) {
                return Literal::greater(literal.attribute(), p.threshold, flipped);
            } else if constexpr (std::is_same_v<T, LessThan>) {
                return Literal::less(literal.attribute(), p.threshold, flipped);
            } else {
                return Literal::in_range(literal.attribute(), p.lo, p.hi, flipped);
            }
        },
        literal.predicate());
}

bool satisfied(const Literal& literal, const Case& c) {
    if (literal.attribute() >= c.values.size()) {
        throw TypeError("literal attribute " + std::to_string(literal.attribute()) + " not present in case '" + c.id +
                        "'");
    }
    const Value& v = c.values[literal.attribute()];
    const bool holds = std::visit(
        [&](const auto& p) -> bool {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Equals>) {
                if (p.value.index() != v.index()) throw TypeError("equality literal compared with a value of another kind");
                return p.value == v;
            } else {
                const auto* x = std::get_if<double>(&v);
                if (x == nullptr) throw TypeError("ordering literal applied to a non-numeric value");
                if constexpr (std::is_same_v<T, GreaterThan>) {
                    return *x > p.threshold;
                } else if constexpr (std::is_same_v<T, LessThan>) {
                    return *x < p.threshold;
                } else {
                    return p.lo < *x && *x < p.hi;
                }
            }
        },
        literal.predicate());
    return holds != literal.is_negated();
}

std::string to_string(const Literal& literal, const AttributeSignature& signature) {
    const Attribute& a = signature[literal.attribute()];
    std::string body;
    bool bare = false;
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Equals>) {
                if (const auto* b = std::get_if<bool>(&p.value)) {
                    bare = *b;
                    body = *b ? a.name : a.name + "=0";
                } else if (const auto* cat = std::get_if<Category>(&p.value)) {
                    body = a.name + "=" + (cat->index < a.values.size() ? a.values[cat->index] : std::to_string(cat->index));
                } else {
                    body = a.name + "=" + format_number(std::get<double>(p.value));
                }
            } else if constexpr (std::is_same_v<T, GreaterThan>) {
                body = a.name + ">" + format_number(p.threshold);
            } else if constexpr (std::is_same_v<T, LessThan>) {
                body = a.name + "<" + format_number(p.threshold);
            } else {
                body = format_number(p.lo) + "<" + a.name + "<" + format_number(p.hi);
            }
        },
        literal.predicate());
    if (!literal.is_negated()) return body;
    return bare ? "¬" + body : "¬(" + body + ")";
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

double parse_number(std::string_view s, std::string_view context) {
    s = trim(s);
    double x = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(x)) {
        throw InvalidArgument("cannot parse number '" + std::string(s) + "' in literal '" + std::string(context) + "'");
    }
    return x;
}

Value parse_value(const Attribute& a, std::string_view s, std::string_view context) {
    s = trim(s);
    switch (a.kind) {
        case AttributeKind::binary:
            if (s == "1" || s == "true") return true;
            if (s == "0" || s == "false") return false;
            break;
        case AttributeKind::categorical:
            for (std::size_t i = 0; i < a.values.size(); ++i) {
                if (a.values[i] == s) return Category{i};
            }
            break;
        case AttributeKind::numeric: return parse_number(s, context);
    }
    throw InvalidArgument("value '" + std::string(s) + "' is not valid for attribute '" + a.name + "' in literal '" +
                          std::string(context) + "'");
}

}  // namespace

Literal parse_literal(std::string_view text, const AttributeSignature& signature) {
    const std::string_view original = text;
    text = trim(text);
    bool negated = false;
    for (;;) {
        if (text.starts_with("!") && !text.starts_with("!=")) {
            text.remove_prefix(1);
        } else if (text.starts_with("¬")) {
            text.remove_prefix(std::string_view("¬").size());
        } else if (text.starts_with("not ")) {
            text.remove_prefix(4);
        } else {
            break;
        }
        negated = !negated;
        text = trim(text);
    }
    if (text.starts_with("(") && text.ends_with(")")) text = trim(text.substr(1, text.size() - 2));
    if (text.empty()) throw InvalidArgument("empty literal");

    auto polarity = [&](bool extra_negation = false) {
        return (negated != extra_negation) ? Polarity::negated : Polarity::positive;
    };

    // lo<NAME<hi
    if (const auto first = text.find('<'); first != std::string_view::npos) {
        if (const auto second = text.find('<', first + 1); second != std::string_view::npos) {
            const double lo = parse_number(text.substr(0, first), original);
            const auto name = trim(text.substr(first + 1, second - first - 1));
            const double hi = parse_number(text.substr(second + 1), original);
            return Literal::in_range(signature.index_of(name), lo, hi, polarity());
        }
    }
    if (const auto ne = text.find("!="); ne != std::string_view::npos) {
        const auto idx = signature.index_of(trim(text.substr(0, ne)));
        return Literal::equals(idx, parse_value(signature[idx], text.substr(ne + 2), original), polarity(true));
    }
    if (const auto op = text.find_first_of("<>="); op != std::string_view::npos) {
        const auto idx = signature.index_of(trim(text.substr(0, op)));
        const auto rest = text.substr(op + 1);
        const Attribute& a = signature[idx];
        if (text[op] == '=') return Literal::equals(idx, parse_value(a, rest, original), polarity());
        if (a.kind != AttributeKind::numeric) {
            throw InvalidArgument("ordering literal on non-numeric attribute '" + a.name + "'");
        }
        const double t = parse_number(rest, original);
        return text[op] == '>' ? Literal::greater(idx, t, polarity()) : Literal::less(idx, t, polarity());
    }
    const auto idx = signature.index_of(text);
    if (signature[idx].kind != AttributeKind::binary) {
        throw InvalidArgument("bare literal '" + std::string(text) + "' requires a binary attribute");
    }
    return Literal::equals(idx, true, polarity());
}

// Conjunctions and rules

Conjunction::Conjunction(std::initializer_list<Literal> literals) : Conjunction(std::vector<Literal>(literals)) {}

Conjunction::Conjunction(std::vector<Literal> literals) : literals_(std::move(literals)) {
    std::sort(literals_.begin(), literals_.end());
    literals_.erase(std::unique(literals_.begin(), literals_.end()), literals_.end());
    for (const auto& l : literals_) {
        if (!l.is_negated() && contains(negate(l))) {
            throw InconsistentConjunction("conjunction contains a literal together with its negation");
        }
    }
}

bool Conjunction::contains(const Literal& literal) const {
    return std::binary_search(literals_.begin(), literals_.end(), literal);
}

bool Conjunction::subset_of(const Conjunction& other) const {
    return std::includes(other.literals_.begin(), other.literals_.end(), literals_.begin(), literals_.end());
}

bool Conjunction::mentions_attribute(std::size_t attribute) const {
    return std::any_of(literals_.begin(), literals_.end(), [&](const Literal& l) { return l.attribute() == attribute; });
}

bool Conjunction::admits(const Literal& literal) const { return !contains(negate(literal)); }

Conjunction Conjunction::with(const Literal& literal) const {
    auto lits = literals_;
    lits.push_back(literal);
    return Conjunction(std::move(lits));
}

std::weak_ordering operator<=>(const Conjunction& a, const Conjunction& b) {
    return std::lexicographical_compare_three_way(a.literals_.begin(), a.literals_.end(), b.literals_.begin(),
                                                  b.literals_.end());
}

bool satisfied(const Conjunction& conjunction, const Case& c) {
    return std::all_of(conjunction.begin(), conjunction.end(), [&](const Literal& l) { return satisfied(l, c); });
}

std::string to_string(const Conjunction& conjunction, const AttributeSignature& signature) {
    if (conjunction.empty()) return "⊤";
    std::string out;
    for (const auto& l : conjunction) {
        if (!out.empty()) out += " ∧ ";
        out += to_string(l, signature);
    }
    return out;
}

Rule::Rule(Conjunction premise, Conjunction conclusion) : premise_(std::move(premise)), conclusion_(std::move(conclusion)) {
    if (conclusion_.empty()) throw InvalidArgument("rule conclusion must be non-empty");
    for (const auto& l : conclusion_) {
        if (premise_.mentions_attribute(l.attribute())) {
            throw InvalidArgument("rule premise and conclusion share an attribute");
        }
    }
}

std::weak_ordering operator<=>(const Rule& a, const Rule& b) {
    if (auto c = a.premise().size() <=> b.premise().size(); c != 0) return c;
    if (auto c = a.premise() <=> b.premise(); c != 0) return c;
    return a.conclusion() <=> b.conclusion();
}

std::string to_string(const Rule& rule, const AttributeSignature& signature) {
    return to_string(rule.conclusion(), signature) + " <= " + to_string(rule.premise(), signature);
}

// Probability

Probability::Probability(std::uint64_t numerator, std::uint64_t denominator) : num_(numerator), den_(denominator) {
    if (den_ == 0) throw UndefinedMeasure("probability with zero denominator");
    if (num_ > den_) throw InvalidArgument("probability numerator exceeds denominator");
}

std::strong_ordering operator<=>(const Probability& a, const Probability& b) {
    const unsigned __int128 lhs = static_cast<unsigned __int128>(a.num_) * b.den_;
    const unsigned __int128 rhs = static_cast<unsigned __int128>(b.num_) * a.den_;
    return lhs <=> rhs;
}

bool Probability::at_least(double threshold) const {
    constexpr std::uint64_t scale = 1'000'000;
    const auto t = static_cast<std::int64_t>(std::llround(threshold * static_cast<double>(scale)));
    if (t <= 0) return true;
    return static_cast<unsigned __int128>(num_) * scale >= static_cast<unsigned __int128>(t) * den_;
}

std::vector<Rule> RuleSet::plain_rules() const {
    std::vector<Rule> out;
    out.reserve(rules.size());
    for (const auto& r : rules) out.push_back(r.rule);
    return out;
}

// Generality

bool more_general(const Rule& r1, const Rule& r2) {
    return r1.premise().subset_of(r2.premise()) && r2.conclusion().subset_of(r1.conclusion()) && !(r1 == r2);
}

bool at_least_as_general(const Rule& r1, const Rule& r2) { return r1 == r2 || more_general(r1, r2); }

bool not_less_general(std::span<const Rule> s, std::span<const Rule> s2) {
    return std::all_of(s2.begin(), s2.end(), [&](const Rule& r2) {
        return std::any_of(s.begin(), s.end(), [&](const Rule& r) { return at_least_as_general(r, r2); });
    });
}

bool more_mu_general(std::span<const Rule> s, std::span<const Rule> s2, const Dataset& data) {
    std::vector<Probability> ps;
    ps.reserve(s.size());
    for (const auto& r : s) ps.push_back(conditional_probability(r, data));
    bool strict = false;
    for (const auto& r2 : s2) {
        const Probability p2 = conditional_probability(r2, data);
        bool witnessed = false;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (at_least_as_general(s[i], r2) && ps[i] >= p2) {
                witnessed = true;
                if (!(s[i] == r2)) strict = true;
            }
        }
        if (!witnessed) return false;
    }
    return strict;
}

std::set<Literal> predicted_facts(std::span<const Rule> rules, std::span<const Literal> observations) {
    const Conjunction observed(std::vector<Literal>(observations.begin(), observations.end()));
    std::set<Literal> out;
    for (const auto& r : rules) {
        if (r.premise().subset_of(observed)) out.insert(r.conclusion().begin(), r.conclusion().end());
    }
    return out;
}

// Measure

CaseSet cases_satisfying(const Literal& literal, const Dataset& data) {
    CaseSet out(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (satisfied(literal, data.cases()[i])) out.set(i);
    }
    return out;
}

CaseSet cases_satisfying(const Conjunction& conjunction, const Dataset& data) {
    CaseSet out(data.size(), true);
    for (const auto& l : conjunction) out &= cases_satisfying(l, data);
    return out;
}

Probability mu(const Conjunction& conjunction, const Dataset& data) {
    if (data.empty()) throw EmptyDataset("measure over an empty dataset");
    return Probability(cases_satisfying(conjunction, data).count(), data.size());
}

std::optional<Probability> mu_cond(const Rule& rule, const Dataset& data) {
    const CaseSet premise = cases_satisfying(rule.premise(), data);
    const std::size_t support = premise.count();
    if (support == 0) return std::nullopt;
    const CaseSet conclusion = cases_satisfying(rule.conclusion(), data);
    return Probability(intersection_count(premise, conclusion), support);
}

bool in_prod_mu(const Rule& rule, const Dataset& data) {
    return !data.empty() && cases_satisfying(rule.premise(), data).count() > 0;
}

Probability conditional_probability(const Rule& rule, const Dataset& data) {
    if (auto p = mu_cond(rule, data)) return *p;
    throw UndefinedMeasure("rule premise is never satisfied");
}

}  // namespace spi
