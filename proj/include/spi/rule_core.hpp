#pragma once

// Attribute-value literals, conjunctions, rules and the empirical measure over a
// case table. Everything here is a value type; all functions are pure.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "spi/case_set.hpp"
#include "spi/errors.hpp"

namespace spi {

enum class AttributeKind { binary, categorical, numeric };

std::string_view to_string(AttributeKind kind);

struct Attribute {
    std::string name;
    AttributeKind kind = AttributeKind::binary;
    std::vector<std::string> values;  // categorical only

    friend bool operator==(const Attribute&, const Attribute&) = default;
};

/// Ordered, finite attribute vocabulary. The order is used for tie-breaking.
class AttributeSignature {
public:
    AttributeSignature() = default;
    explicit AttributeSignature(std::vector<Attribute> attributes);

    std::size_t size() const { return attributes_.size(); }
    const Attribute& operator[](std::size_t i) const { return attributes_.at(i); }
    const std::vector<Attribute>& attributes() const { return attributes_; }

    std::optional<std::size_t> find(std::string_view name) const;
    /// Like find() but throws InvalidArgument naming the attribute.
    std::size_t index_of(std::string_view name) const;

    friend bool operator==(const AttributeSignature&, const AttributeSignature&) = default;

private:
    std::vector<Attribute> attributes_;
};

struct Category {
    std::size_t index = 0;
    friend auto operator<=>(const Category&, const Category&) = default;
};

/// Cell value: binary, categorical (index into the attribute's value list) or numeric.
using Value = std::variant<bool, Category, double>;

struct Case {
    std::string id;
    std::vector<Value> values;

    friend bool operator==(const Case&, const Case&) = default;
};

class Dataset {
public:
    Dataset() = default;
    /// Validates that every case conforms to the signature and ids are unique.
    Dataset(AttributeSignature signature, std::vector<Case> cases);

    const AttributeSignature& signature() const { return signature_; }
    const std::vector<Case>& cases() const { return cases_; }
    std::size_t size() const { return cases_.size(); }
    bool empty() const { return cases_.empty(); }

    /// Copy of the dataset with one case removed.
    Dataset without(std::size_t index) const;

private:
    AttributeSignature signature_;
    std::vector<Case> cases_;
};

struct Equals {
    Value value;
};
struct GreaterThan {
    double threshold;
};
struct LessThan {
    double threshold;
};
/// lo < x < hi
struct InRange {
    double lo;
    double hi;
};
using Predicate = std::variant<Equals, GreaterThan, LessThan, InRange>;

enum class Polarity : std::uint8_t { positive, negated };

class Literal {
public:
    static Literal equals(std::size_t attribute, Value value, Polarity polarity = Polarity::positive);
    static Literal greater(std::size_t attribute, double threshold, Polarity polarity = Polarity::positive);
    static Literal less(std::size_t attribute, double threshold, Polarity polarity = Polarity::positive);
    static Literal in_range(std::size_t attribute, double lo, double hi, Polarity polarity = Polarity::positive);

    std::size_t attribute() const { return attribute_; }
    const Predicate& predicate() const { return predicate_; }
    Polarity polarity() const { return polarity_; }
    bool is_negated() const { return polarity_ == Polarity::negated; }

    /// Total order: attribute, predicate kind, predicate values, then polarity.
    friend std::weak_ordering operator<=>(const Literal& a, const Literal& b);
    friend bool operator==(const Literal& a, const Literal& b) { return (a <=> b) == 0; }

private:
    Literal(std::size_t attribute, Predicate predicate, Polarity polarity)
        : attribute_(attribute), predicate_(std::move(predicate)), polarity_(polarity) {}

    std::size_t attribute_ = 0;
    Predicate predicate_;
    Polarity polarity_ = Polarity::positive;
};

Literal negate(const Literal& literal);

/// Throws TypeError when the predicate does not fit the case's value kind.
bool satisfied(const Literal& literal, const Case& c);

std::string to_string(const Literal& literal, const AttributeSignature& signature);

/// Parses "VOL>5", "TOT<30", "10<NUM<20", "DEN=moderate", "x3", "x3=0", and
/// negations written with a leading "!", "not " or "¬".
Literal parse_literal(std::string_view text, const AttributeSignature& signature);

/// Set of literals; construction rejects {l, ¬l}.
class Conjunction {
public:
    Conjunction() = default;
    Conjunction(std::initializer_list<Literal> literals);
    explicit Conjunction(std::vector<Literal> literals);

    const std::vector<Literal>& literals() const { return literals_; }
    std::size_t size() const { return literals_.size(); }
    bool empty() const { return literals_.empty(); }
    auto begin() const { return literals_.begin(); }
    auto end() const { return literals_.end(); }

    bool contains(const Literal& literal) const;
    bool subset_of(const Conjunction& other) const;
    bool mentions_attribute(std::size_t attribute) const;
    /// True when adding the literal keeps the set consistent.
    bool admits(const Literal& literal) const;
    Conjunction with(const Literal& literal) const;

    friend std::weak_ordering operator<=>(const Conjunction& a, const Conjunction& b);
    friend bool operator==(const Conjunction& a, const Conjunction& b) { return a.literals_ == b.literals_; }

private:
    std::vector<Literal> literals_;  // sorted, unique
};

/// Empty conjunction is true.
bool satisfied(const Conjunction& conjunction, const Case& c);

std::string to_string(const Conjunction& conjunction, const AttributeSignature& signature);

/// conclusion <= premise. Conclusion non-empty; premise and conclusion share no attribute.
class Rule {
public:
    Rule(Conjunction premise, Conjunction conclusion);

    const Conjunction& premise() const { return premise_; }
    const Conjunction& conclusion() const { return conclusion_; }

    /// Orders by premise length, then premise literals, then conclusion.
    friend std::weak_ordering operator<=>(const Rule& a, const Rule& b);
    friend bool operator==(const Rule& a, const Rule& b) = default;

private:
    Conjunction premise_;
    Conjunction conclusion_;
};

std::string to_string(const Rule& rule, const AttributeSignature& signature);

/// Exact ratio of counts in [0, 1]. Comparisons are by value (cross-multiplied).
class Probability {
public:
    Probability(std::uint64_t numerator, std::uint64_t denominator);

    std::uint64_t numerator() const { return num_; }
    std::uint64_t denominator() const { return den_; }
    double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    friend std::strong_ordering operator<=>(const Probability& a, const Probability& b);
    friend bool operator==(const Probability& a, const Probability& b) { return (a <=> b) == 0; }

    /// p >= threshold, where threshold is taken exactly to six decimal places.
    bool at_least(double threshold) const;

private:
    std::uint64_t num_;
    std::uint64_t den_;
};

struct RuleAnnotation {
    Probability probability{0, 1};
    std::size_t support = 0;  // cases satisfying the premise
    std::optional<double> p_value;

    friend bool operator==(const RuleAnnotation&, const RuleAnnotation&) = default;
};

struct AnnotatedRule {
    Rule rule;
    RuleAnnotation annotation;

    friend bool operator==(const AnnotatedRule&, const AnnotatedRule&) = default;
};

struct RuleSet {
    AttributeSignature signature;
    Conjunction target;
    std::vector<AnnotatedRule> rules;

    std::vector<Rule> plain_rules() const;

    friend bool operator==(const RuleSet&, const RuleSet&) = default;
};

// Generality.

/// premise(r1) ⊆ premise(r2), conclusion(r1) ⊇ conclusion(r2), and r1 != r2.
bool more_general(const Rule& r1, const Rule& r2);
/// Reflexive closure of more_general.
bool at_least_as_general(const Rule& r1, const Rule& r2);
/// Every rule of s2 has an at-least-as-general witness in s.
bool not_less_general(std::span<const Rule> s, std::span<const Rule> s2);
/// Generality with non-decreasing conditional probability, strict in at least one pairing.
bool more_mu_general(std::span<const Rule> s, std::span<const Rule> s2, const Dataset& data);

/// Conclusion literals of every rule whose premise is contained in the observations.
std::set<Literal> predicted_facts(std::span<const Rule> rules, std::span<const Literal> observations);

// Empirical measure.

CaseSet cases_satisfying(const Literal& literal, const Dataset& data);
CaseSet cases_satisfying(const Conjunction& conjunction, const Dataset& data);

/// Frequency of the conjunction over the dataset. Throws EmptyDataset.
Probability mu(const Conjunction& conjunction, const Dataset& data);
/// mu(premise ∧ conclusion) / mu(premise); nullopt when the premise never holds.
std::optional<Probability> mu_cond(const Rule& rule, const Dataset& data);
bool in_prod_mu(const Rule& rule, const Dataset& data);
/// mu_cond or UndefinedMeasure.
Probability conditional_probability(const Rule& rule, const Dataset& data);

}  // namespace spi
