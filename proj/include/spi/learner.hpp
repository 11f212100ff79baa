#pragma once

// Semantic probabilistic inference over a finite literal pool.
//
// Rules are refined by adding premise literals; a refinement is accepted only when
// it strictly raises the exact conditional probability. The learning operator maps a
// rule set to the minimal followers of its members (keeping members that have none)
// and is iterated to its fix-point. All searches are bounded by max_premise_len and
// keep the conclusion fixed.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spi/rule_core.hpp"

namespace spi {

struct TargetSpec {
    Conjunction goal;
    std::vector<Literal> pool;  // premise vocabulary, sorted

    /// Pool restricted to attributes the goal does not mention.
    static TargetSpec make(Conjunction goal, std::span<const Literal> full_pool);

    /// Throws InvalidArgument when goal and pool overlap or the pool is not closed under negation.
    void validate() const;
};

struct SearchConfig {
    std::size_t max_premise_len = 4;
    double min_conditional_probability = 0.0;
    std::optional<double> significance_alpha;
};

struct Preset {
    std::string_view name;
    double min_conditional_probability;
    double significance_alpha;
};

inline constexpr std::array<Preset, 3> kPresets{{
    {"discovery1", 0.75, 0.05},
    {"discovery2", 0.85, 0.05},
    {"discovery3", 0.95, 0.05},
}};

/// Throws InvalidArgument for unknown names.
SearchConfig preset_config(std::string_view name, std::size_t max_premise_len = 4);

struct SignificanceReport {
    // premise∧conclusion, premise∧¬conclusion, ¬premise∧conclusion, ¬premise∧¬conclusion
    std::array<std::uint64_t, 4> table{};
    double p_value = 1.0;
    bool degenerate = false;
};

enum class Verdict { positive, negative, refused };

std::string_view to_string(Verdict verdict);

struct Prediction {
    Verdict verdict = Verdict::refused;
    std::optional<Rule> winning_rule;
    std::optional<Probability> probability;
};

struct EvalMetrics {
    std::size_t diagnosed = 0;
    std::size_t refused = 0;
    std::size_t correct = 0;
    std::size_t false_positives = 0;
    std::size_t false_negatives = 0;
    double false_positive_rate = 0.0;  // over diagnosed cases
    double false_negative_rate = 0.0;  // over diagnosed cases
    double accuracy = 0.0;             // correct / diagnosed
};

struct LearnResult {
    RuleSet rules;                          // fix-point after filtering, annotated
    std::vector<Rule> fixpoint;             // before filtering
    std::vector<std::vector<Rule>> trace;   // successive operator iterates, starting with the seed
    std::optional<std::string> diagnostic;  // set when the goal is constant over the data
};

/// r1 more general than r2 and mu(r1) < mu(r2), exactly.
bool probabilistic_inference(const Rule& r1, const Rule& r2, const Dataset& data);

/// Conclusion within the goal, premise within the pool, and the premise strictly
/// raises the probability of the conclusion and of each conclusion literal.
bool admissible(const Rule& rule, const TargetSpec& target, const Dataset& data);

/// One-literal premise extensions from the pool, in pool order.
std::vector<Rule> refine(const Rule& rule, const TargetSpec& target, const SearchConfig& config = {});

std::vector<Rule> minimal_followers(const Rule& rule, const TargetSpec& target, const Dataset& data,
                                    const SearchConfig& config = {});

/// One application of the learning operator. Result is sorted and duplicate-free.
std::vector<Rule> apply_learning_operator(std::span<const Rule> rules, const TargetSpec& target, const Dataset& data,
                                          const SearchConfig& config = {});

bool is_fixpoint(std::span<const Rule> rules, const TargetSpec& target, const Dataset& data,
                 const SearchConfig& config = {});

/// Admissible and no admissible premise extension within the bound raises the probability.
bool is_ums(const Rule& rule, const TargetSpec& target, const Dataset& data, const SearchConfig& config = {});

/// Every member is a ums rule (the direct fix-point characterization).
bool all_ums(std::span<const Rule> rules, const TargetSpec& target, const Dataset& data,
             const SearchConfig& config = {});

LearnResult learn(const TargetSpec& target, const Dataset& data, const SearchConfig& config = {});

/// Learns rules for the single-literal goal and, separately, for its negation.
/// The returned rule set has target = {goal} and holds both sides.
LearnResult learn_classifier(const Literal& goal, std::span<const Literal> pool, const Dataset& data,
                             const SearchConfig& config = {});

SignificanceReport significance(const Rule& rule, const Dataset& data);

/// Highest-probability fired rule wins; exact cross-side ties or no fired rule refuse.
Prediction predict_case(const RuleSet& rules, const Case& c);

/// Leave-one-out evaluation of learn_classifier. Target goal must be a single literal.
EvalMetrics evaluate_round_robin(const Dataset& data, const TargetSpec& target, const SearchConfig& config = {});

}  // namespace spi
