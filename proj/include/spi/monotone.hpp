#pragma once

// Monotone Boolean functions on the n-cube: Hansel chain decomposition, question
// sequencing with monotone closure, and DNF extraction from lower units.
//
// Bit convention: variable i (1-based) is bit i-1 of the mask and the i-th
// character, from the left, of the bitstring form. "01100" is {x2, x3}.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spi/errors.hpp"

namespace spi {

inline constexpr unsigned kMaxCubeWidth = 24;

class BitVector {
public:
    BitVector() = default;
    BitVector(unsigned width, std::uint32_t mask);

    /// Parses '0'/'1' characters; leftmost character is variable 1.
    static BitVector parse(std::string_view bits);

    unsigned width() const { return width_; }
    std::uint32_t mask() const { return mask_; }
    /// Value of variable i+1.
    bool bit(unsigned i) const { return (mask_ >> i) & 1U; }

    /// Componentwise order.
    bool leq(const BitVector& other) const { return (mask_ & ~other.mask_) == 0; }

    std::string to_string() const;

    friend bool operator==(const BitVector&, const BitVector&) = default;
    friend auto operator<=>(const BitVector&, const BitVector&) = default;

private:
    unsigned width_ = 0;
    std::uint32_t mask_ = 0;
};

using HanselChain = std::vector<BitVector>;

/// Ordered partition of the cube into saturated chains.
class ChainPlan {
public:
    /// Recursive Hansel construction, stably sorted by chain length.
    static ChainPlan hansel(unsigned n);

    /// Validates: one-bit increasing steps, disjoint chains covering the cube,
    /// C(n, n/2) chains, non-decreasing length.
    ChainPlan(unsigned width, std::vector<HanselChain> chains);

    unsigned width() const { return width_; }
    const std::vector<HanselChain>& chains() const { return chains_; }
    std::size_t cube_size() const { return std::size_t{1} << width_; }

    /// Every vector's mask in question order: chains in plan order, each ascending.
    const std::vector<std::uint32_t>& order() const { return order_; }

    friend bool operator==(const ChainPlan& a, const ChainPlan& b) {
        return a.width_ == b.width_ && a.chains_ == b.chains_;
    }

private:
    unsigned width_ = 0;
    std::vector<HanselChain> chains_;
    std::vector<std::uint32_t> order_;
};

/// Chains as produced by the recursion, before sorting by length.
std::vector<HanselChain> hansel_chains_construction_order(unsigned n);

/// Total Boolean function on the n-cube.
class TruthTable {
public:
    TruthTable() = default;
    explicit TruthTable(unsigned width, bool fill = false);
    static TruthTable from_function(unsigned width, const std::function<bool(const BitVector&)>& f);

    unsigned width() const { return width_; }
    std::size_t size() const { return values_.size(); }
    bool operator()(const BitVector& v) const { return values_.at(v.mask()) != 0; }
    bool at(std::uint32_t mask) const { return values_.at(mask) != 0; }
    void set(std::uint32_t mask, bool value) { values_.at(mask) = value ? 1 : 0; }

    friend bool operator==(const TruthTable&, const TruthTable&) = default;

private:
    unsigned width_ = 0;
    std::vector<std::uint8_t> values_;
};

/// No one-bit cover v < w with f(v)=1, f(w)=0.
bool is_monotone(const TruthTable& table);

/// C(n, n/2) + C(n, n/2 + 1): worst-case question count of the chain interview.
std::size_t question_bound(unsigned n);

enum class Provenance : std::uint8_t { unknown, asked, propagated };

std::string_view to_string(Provenance provenance);

struct Answer {
    BitVector vector;
    bool value = false;

    friend bool operator==(const Answer&, const Answer&) = default;
};

/// Partial knowledge of a monotone function during an interview.
class ElicitationState {
public:
    explicit ElicitationState(ChainPlan plan);

    const ChainPlan& plan() const { return plan_; }
    unsigned width() const { return plan_.width(); }

    std::optional<bool> value(const BitVector& v) const;
    Provenance provenance(const BitVector& v) const;
    /// Asked vector whose answer determined v.
    std::optional<BitVector> origin(const BitVector& v) const;
    const std::vector<Answer>& asked_log() const { return asked_; }
    std::size_t known_count() const { return known_count_; }
    bool complete() const { return known_count_ == plan_.cube_size(); }

    /// First unknown vector in plan order; nullopt when every vector is known.
    std::optional<BitVector> next_question() const;

    /// Sets v and closes: 1 flows to every w >= v, 0 to every w <= v. Returns the
    /// newly determined vectors, v first when it was unknown. Throws
    /// InconsistentAnswer naming the conflicting pair.
    std::vector<BitVector> propagate(const BitVector& v, bool value);

    /// Answers the pending question. Throws SequencingError for any other vector,
    /// including vectors already determined.
    std::vector<BitVector> submit_answer(const BitVector& v, bool value);

    /// Reverts the last asked answer and everything it determined; returns those
    /// vectors. Throws SequencingError when nothing has been asked.
    std::vector<BitVector> undo();

    /// Requires complete().
    TruthTable table() const;

    friend bool operator==(const ElicitationState& a, const ElicitationState& b) {
        return a.plan_ == b.plan_ && a.known_ == b.known_ && a.provenance_ == b.provenance_ && a.asked_ == b.asked_;
    }

private:
    static constexpr std::int8_t kUnknown = -1;

    std::vector<BitVector> close(const BitVector& v, bool value, std::int32_t origin, Provenance provenance);
    void advance_cursor();

    ChainPlan plan_;
    std::vector<std::int8_t> known_;
    std::vector<Provenance> provenance_;
    std::vector<std::int32_t> origin_;  // index into asked_, -1 if none
    std::vector<Answer> asked_;
    std::vector<std::vector<std::uint32_t>> determined_;  // per asked answer
    std::size_t known_count_ = 0;
    std::size_t cursor_ = 0;  // position in plan_.order()
};

struct InterviewResult {
    TruthTable table;
    std::vector<Answer> asked;
};

/// Drives the interview to completion against a scripted oracle. A non-monotone
/// oracle raises InconsistentAnswer at the first closure value it disagrees with.
InterviewResult run_interview(const ChainPlan& plan, const std::function<bool(const BitVector&)>& oracle);

/// Positive DNF; each term is a mask of variables. Terms are kept sorted as
/// integers, which orders them by highest variable first (x1x2 < x3 < x1x5).
class Dnf {
public:
    Dnf() = default;
    Dnf(unsigned width, std::vector<std::uint32_t> terms);

    unsigned width() const { return width_; }
    const std::vector<std::uint32_t>& terms() const { return terms_; }

    bool evaluate(std::uint32_t mask) const;
    /// Throws InvalidArgument on width mismatch.
    bool evaluate(const BitVector& v) const;

    /// "x1x2 ∨ x3"; names[i] labels variable i+1. "0" for the empty DNF.
    std::string to_string(std::span<const std::string> names) const;
    std::string to_string(std::string_view prefix = "x") const;

    friend bool operator==(const Dnf&, const Dnf&) = default;

private:
    unsigned width_ = 0;
    std::vector<std::uint32_t> terms_;
};

std::vector<std::string> variable_names(std::string_view prefix, unsigned width);

/// Least vector with value 1 of every chain that has one, in plan order.
/// Throws InvalidArgument for non-monotone tables.
std::vector<BitVector> lower_units(const TruthTable& table, const ChainPlan& plan);

/// Lower units of the vectors currently known to be 1 (a partial interview).
std::vector<BitVector> known_lower_units(const ElicitationState& state);

/// One term per unit: the positions holding 1.
Dnf dnf_of_units(unsigned width, std::span<const BitVector> units);

/// Removes every term that is a superset of another term.
Dnf minimize_absorption(const Dnf& dnf);

/// f(g(w1,w2,w3), h(y1..y5), x3, x4, x5).
struct HierarchySpec {
    Dnf f;  // over x1..x5
    Dnf g;  // over w1..w3
    Dnf h;  // over y1..y5

    /// Throws InvalidArgument unless widths are 5/3/5.
    void validate() const;

    friend bool operator==(const HierarchySpec&, const HierarchySpec&) = default;
};

bool compose(const HierarchySpec& hierarchy, const BitVector& w, const BitVector& y, const BitVector& x345);

/// All eleven inputs in the order w1 w2 w3 y1..y5 x3 x4 x5.
bool compose(const HierarchySpec& hierarchy, const BitVector& inputs);

}  // namespace spi
