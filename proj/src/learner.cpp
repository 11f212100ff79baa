#include "spi/learner.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "spi/significance.hpp"

namespace spi {

std::string_view to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::positive: return "positive";
        case Verdict::negative: return "negative";
        case Verdict::refused: return "refused";
    }
    return "unknown";
}

SearchConfig preset_config(std::string_view name, std::size_t max_premise_len) {
    for (const auto& p : kPresets) {
        if (p.name == name) {
            SearchConfig cfg;
            cfg.max_premise_len = max_premise_len;
            cfg.min_conditional_probability = p.min_conditional_probability;
            cfg.significance_alpha = p.significance_alpha;
            return cfg;
        }
    }
    throw InvalidArgument("unknown preset '" + std::string(name) + "'");
}

TargetSpec TargetSpec::make(Conjunction goal, std::span<const Literal> full_pool) {
    TargetSpec t;
    for (const auto& l : full_pool) {
        if (!goal.mentions_attribute(l.attribute())) t.pool.push_back(l);
    }
    std::sort(t.pool.begin(), t.pool.end());
    t.pool.erase(std::unique(t.pool.begin(), t.pool.end()), t.pool.end());
    t.goal = std::move(goal);
    return t;
}

void TargetSpec::validate() const {
    if (goal.empty()) throw InvalidArgument("target goal must be non-empty");
    if (!std::is_sorted(pool.begin(), pool.end())) throw InvalidArgument("literal pool must be sorted");
    for (const auto& l : pool) {
        if (goal.mentions_attribute(l.attribute())) throw InvalidArgument("literal pool mentions a goal attribute");
        if (!std::binary_search(pool.begin(), pool.end(), negate(l))) {
            throw InvalidArgument("literal pool is not closed under negation");
        }
    }
}

namespace {

void check_config(const SearchConfig& config) {
    if (config.max_premise_len < 1) throw InvalidArgument("max_premise_len must be at least 1");
}

bool in_pool(const Literal& l, const TargetSpec& target) {
    return std::binary_search(target.pool.begin(), target.pool.end(), l);
}

// a/b < c/d for counts
bool ratio_less(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) { return a * d < c * b; }

// Premise refinement lattice for one conclusion: every consistent premise drawn from
// the pool with at most `bound` literals and non-zero support, linked by one-literal
// extensions.
class RuleLattice {
public:
    using Id = std::uint32_t;

    RuleLattice(const Conjunction& conclusion, const TargetSpec& target, const Dataset& data, std::size_t bound)
        : conclusion_(conclusion), pool_(target.pool), bound_(bound), n_cases_(data.size()) {
        conclusion_in_goal_ = !conclusion.empty() && conclusion.subset_of(target.goal);
        literal_cases_.reserve(pool_.size());
        for (const auto& l : pool_) literal_cases_.push_back(cases_satisfying(l, data));
        negation_.resize(pool_.size());
        for (std::size_t j = 0; j < pool_.size(); ++j) {
            const auto it = std::lower_bound(pool_.begin(), pool_.end(), negate(pool_[j]));
            negation_[j] = (it != pool_.end() && *it == negate(pool_[j])) ? static_cast<std::uint32_t>(it - pool_.begin())
                                                                        : kNone;
        }
        conclusion_cases_ = cases_satisfying(conclusion, data);
        conclusion_count_ = conclusion_cases_.count();
        for (const auto& l : conclusion) {
            literal_goal_cases_.push_back(cases_satisfying(l, data));
            literal_goal_counts_.push_back(literal_goal_cases_.back().count());
        }

        std::vector<std::uint32_t> premise;
        const CaseSet all(n_cases_, true);
        add_node(premise, all);
        grow(all, premise, 0);
        link();

        stamp_.assign(nodes_.size(), 0);
        between_.assign(nodes_.size(), {0, 0});
        followers_.resize(nodes_.size());
    }

    static constexpr Id kRoot = 0;

    std::optional<Id> find(const Conjunction& premise) const {
        std::vector<std::uint32_t> key;
        for (const auto& l : premise) {
            const auto it = std::lower_bound(pool_.begin(), pool_.end(), l);
            if (it == pool_.end() || !(*it == l)) return std::nullopt;
            key.push_back(static_cast<std::uint32_t>(it - pool_.begin()));
        }
        const auto it = index_.find(encode(key));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    bool admissible(Id id) const { return nodes_[id].admissible; }

    Probability probability(Id id) const { return Probability(nodes_[id].joint, nodes_[id].support); }

    std::size_t support(Id id) const { return nodes_[id].support; }
    std::size_t joint(Id id) const { return nodes_[id].joint; }
    std::size_t conclusion_count() const { return conclusion_count_; }

    Rule rule(Id id) const {
        std::vector<Literal> lits;
        for (const auto j : nodes_[id].premise) lits.push_back(pool_[j]);
        return Rule(Conjunction(std::move(lits)), conclusion_);
    }

    // Admissible supersets c of r with p(c) > p(r) and no admissible r'' strictly
    // between them with p(r) < p(r'') < p(c).
    const std::vector<Id>& minimal_followers(Id r) {
        if (followers_[r]) return *followers_[r];
        std::vector<Id> out;
        const Node& base = nodes_[r];
        const auto region = superset_region(r);
        for (const Id c : region) {
            // Least admissible probability above p(r) strictly between r and c; den 0 = none.
            std::pair<std::uint64_t, std::uint64_t> best{0, 0};
            auto consider = [&](std::uint64_t num, std::uint64_t den) {
                if (den != 0 && (best.second == 0 || ratio_less(num, den, best.first, best.second))) best = {num, den};
            };
            for (const Id p : nodes_[c].down) {
                if (p == r || stamp_[p] != generation_) continue;
                consider(between_[p].first, between_[p].second);
                const Node& pn = nodes_[p];
                if (pn.admissible && ratio_less(base.joint, base.support, pn.joint, pn.support)) {
                    consider(pn.joint, pn.support);
                }
            }
            between_[c] = best;
            const Node& cn = nodes_[c];
            if (cn.admissible && ratio_less(base.joint, base.support, cn.joint, cn.support) &&
                !(best.second != 0 && ratio_less(best.first, best.second, cn.joint, cn.support))) {
                out.push_back(c);
            }
        }
        followers_[r] = std::move(out);
        return *followers_[r];
    }

    // Any admissible superset within the bound with strictly higher probability.
    bool has_improvement(Id r) {
        const Node& base = nodes_[r];
        for (const Id c : superset_region(r)) {
            const Node& cn = nodes_[c];
            if (cn.admissible && ratio_less(base.joint, base.support, cn.joint, cn.support)) return true;
        }
        return false;
    }

    std::vector<Id> apply(const std::vector<Id>& rules) {
        std::vector<Id> out;
        for (const Id r : rules) {
            const auto& f = minimal_followers(r);
            if (f.empty()) {
                if (nodes_[r].admissible) out.push_back(r);
            } else {
                out.insert(out.end(), f.begin(), f.end());
            }
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

private:
    static constexpr std::uint32_t kNone = ~std::uint32_t{0};

    struct Node {
        std::vector<std::uint32_t> premise;  // sorted pool indices
        std::uint32_t support = 0;
        std::uint32_t joint = 0;
        bool admissible = false;
        std::vector<Id> up;
        std::vector<Id> down;
    };

    static std::string encode(const std::vector<std::uint32_t>& key) {
        return std::string(reinterpret_cast<const char*>(key.data()), key.size() * sizeof(std::uint32_t));
    }

    void add_node(const std::vector<std::uint32_t>& premise, const CaseSet& cases) {
        Node n;
        n.premise = premise;
        n.support = static_cast<std::uint32_t>(cases.count());
        n.joint = static_cast<std::uint32_t>(intersection_count(cases, conclusion_cases_));
        // Strict gain of the conclusion and of each conclusion literal.
        bool gain = conclusion_in_goal_ && ratio_less(conclusion_count_, n_cases_, n.joint, n.support);
        for (std::size_t i = 0; gain && i < literal_goal_cases_.size(); ++i) {
            const auto joint_d = intersection_count(cases, literal_goal_cases_[i]);
            gain = ratio_less(literal_goal_counts_[i], n_cases_, joint_d, n.support);
        }
        n.admissible = gain;
        index_.emplace(encode(premise), static_cast<Id>(nodes_.size()));
        nodes_.push_back(std::move(n));
    }

    void grow(const CaseSet& cases, std::vector<std::uint32_t>& premise, std::uint32_t start) {
        if (premise.size() >= bound_) return;
        for (std::uint32_t j = start; j < pool_.size(); ++j) {
            if (negation_[j] != kNone && std::find(premise.begin(), premise.end(), negation_[j]) != premise.end()) continue;
            CaseSet next = cases & literal_cases_[j];
            if (next.count() == 0) continue;
            premise.push_back(j);
            add_node(premise, next);
            grow(next, premise, j + 1);
            premise.pop_back();
        }
    }

    void link() {
        for (Id c = 0; c < nodes_.size(); ++c) {
            const auto& premise = nodes_[c].premise;
            for (std::size_t i = 0; i < premise.size(); ++i) {
                std::vector<std::uint32_t> sub;
                sub.reserve(premise.size() - 1);
                for (std::size_t k = 0; k < premise.size(); ++k) {
                    if (k != i) sub.push_back(premise[k]);
                }
                const Id p = index_.at(encode(sub));
                nodes_[c].down.push_back(p);
                nodes_[p].up.push_back(c);
            }
        }
    }

    // Proper supersets of r in non-decreasing premise length; marks them with the
    // current generation.
    std::vector<Id> superset_region(Id r) {
        ++generation_;
        std::vector<Id> queue;
        for (const Id u : nodes_[r].up) {
            if (stamp_[u] != generation_) {
                stamp_[u] = generation_;
                queue.push_back(u);
            }
        }
        for (std::size_t head = 0; head < queue.size(); ++head) {
            for (const Id u : nodes_[queue[head]].up) {
                if (stamp_[u] != generation_) {
                    stamp_[u] = generation_;
                    queue.push_back(u);
                }
            }
        }
        return queue;
    }

    Conjunction conclusion_;
    std::vector<Literal> pool_;
    std::size_t bound_;
    std::size_t n_cases_;
    bool conclusion_in_goal_ = false;
    std::vector<CaseSet> literal_cases_;
    std::vector<std::uint32_t> negation_;
    CaseSet conclusion_cases_;
    std::size_t conclusion_count_ = 0;
    std::vector<CaseSet> literal_goal_cases_;
    std::vector<std::size_t> literal_goal_counts_;

    std::vector<Node> nodes_;
    std::unordered_map<std::string, Id> index_;

    std::vector<std::uint32_t> stamp_;
    std::uint32_t generation_ = 0;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> between_;
    std::vector<std::optional<std::vector<Id>>> followers_;
};

// Lattices keyed by conclusion, built on demand for rule-level queries.
class LatticeCache {
public:
    LatticeCache(const TargetSpec& target, const Dataset& data, const SearchConfig& config)
        : target_(target), data_(data), config_(config) {
        check_config(config);
        if (data.empty()) throw EmptyDataset("learning over an empty dataset");
    }

    RuleLattice& lattice(const Conjunction& conclusion) {
        auto it = lattices_.find(conclusion);
        if (it == lattices_.end()) {
            it = lattices_.try_emplace(conclusion, conclusion, target_, data_, config_.max_premise_len).first;
        }
        return it->second;
    }

    // Node of the rule, or nullopt when the rule lies outside the bounded lattice.
    // Throws UndefinedMeasure for rules outside Prod^mu.
    std::optional<RuleLattice::Id> locate(const Rule& rule) {
        if (!in_prod_mu(rule, data_)) throw UndefinedMeasure("rule premise is never satisfied");
        return lattice(rule.conclusion()).find(rule.premise());
    }

    std::vector<Rule> followers(const Rule& rule) {
        std::vector<Rule> out;
        if (const auto id = locate(rule)) {
            auto& lat = lattice(rule.conclusion());
            for (const auto f : lat.minimal_followers(*id)) out.push_back(lat.rule(f));
        }
        return out;
    }

    bool ums(const Rule& rule) {
        if (!admissible(rule, target_, data_)) return false;
        const auto id = locate(rule);
        return !id || !lattice(rule.conclusion()).has_improvement(*id);
    }

    const TargetSpec& target() const { return target_; }
    const Dataset& data() const { return data_; }

private:
    const TargetSpec& target_;
    const Dataset& data_;
    SearchConfig config_;
    std::map<Conjunction, RuleLattice> lattices_;
};

std::vector<Rule> sorted_unique(std::vector<Rule> rules) {
    std::sort(rules.begin(), rules.end());
    rules.erase(std::unique(rules.begin(), rules.end()), rules.end());
    return rules;
}

RuleAnnotation annotate(std::size_t support, std::size_t joint, std::size_t conclusion_count, std::size_t n) {
    RuleAnnotation a;
    a.probability = Probability(joint, support);
    a.support = support;
    const std::size_t b = support - joint;
    const std::size_t c = conclusion_count - joint;
    const std::size_t d = n - support - c;
    const bool degenerate = (c + d == 0) || conclusion_count == 0 || conclusion_count == n;
    a.p_value = degenerate ? 1.0 : fisher_exact_greater(joint, b, c, d);
    return a;
}

bool passes_filters(const RuleAnnotation& a, const SearchConfig& config) {
    if (!a.probability.at_least(config.min_conditional_probability)) return false;
    if (config.significance_alpha && !(a.p_value.value_or(1.0) <= *config.significance_alpha)) return false;
    return true;
}

}  // namespace

bool probabilistic_inference(const Rule& r1, const Rule& r2, const Dataset& data) {
    const Probability p1 = conditional_probability(r1, data);
    const Probability p2 = conditional_probability(r2, data);
    return more_general(r1, r2) && p1 < p2;
}

bool admissible(const Rule& rule, const TargetSpec& target, const Dataset& data) {
    const Probability p = conditional_probability(rule, data);
    if (!rule.conclusion().subset_of(target.goal)) return false;
    for (const auto& l : rule.premise()) {
        if (!in_pool(l, target)) return false;
    }
    if (!(mu(rule.conclusion(), data) < p)) return false;
    for (const auto& d : rule.conclusion()) {
        const Rule single(rule.premise(), Conjunction{d});
        if (!(mu(Conjunction{d}, data) < conditional_probability(single, data))) return false;
    }
    return true;
}

std::vector<Rule> refine(const Rule& rule, const TargetSpec& target, const SearchConfig& config) {
    check_config(config);
    std::vector<Rule> out;
    if (rule.premise().size() >= config.max_premise_len) return out;
    for (const auto& l : target.pool) {
        if (rule.premise().contains(l) || !rule.premise().admits(l)) continue;
        if (rule.conclusion().mentions_attribute(l.attribute())) continue;
        out.emplace_back(rule.premise().with(l), rule.conclusion());
    }
    return out;
}

std::vector<Rule> minimal_followers(const Rule& rule, const TargetSpec& target, const Dataset& data,
                                    const SearchConfig& config) {
    LatticeCache cache(target, data, config);
    return cache.followers(rule);
}

std::vector<Rule> apply_learning_operator(std::span<const Rule> rules, const TargetSpec& target, const Dataset& data,
                                          const SearchConfig& config) {
    LatticeCache cache(target, data, config);
    std::vector<Rule> out;
    for (const auto& r : rules) {
        auto f = cache.followers(r);
        if (f.empty()) {
            if (admissible(r, target, data)) out.push_back(r);
        } else {
            out.insert(out.end(), f.begin(), f.end());
        }
    }
    return sorted_unique(std::move(out));
}

bool is_fixpoint(std::span<const Rule> rules, const TargetSpec& target, const Dataset& data,
                 const SearchConfig& config) {
    const auto s = sorted_unique(std::vector<Rule>(rules.begin(), rules.end()));
    return apply_learning_operator(s, target, data, config) == s;
}

bool is_ums(const Rule& rule, const TargetSpec& target, const Dataset& data, const SearchConfig& config) {
    LatticeCache cache(target, data, config);
    return cache.ums(rule);
}

bool all_ums(std::span<const Rule> rules, const TargetSpec& target, const Dataset& data, const SearchConfig& config) {
    LatticeCache cache(target, data, config);
    return std::all_of(rules.begin(), rules.end(), [&](const Rule& r) { return cache.ums(r); });
}

LearnResult learn(const TargetSpec& target, const Dataset& data, const SearchConfig& config) {
    check_config(config);
    target.validate();
    if (data.empty()) throw EmptyDataset("learning over an empty dataset");

    LearnResult result;
    result.rules.signature = data.signature();
    result.rules.target = target.goal;

    const std::size_t goal_count = cases_satisfying(target.goal, data).count();
    if (goal_count == 0 || goal_count == data.size()) {
        result.diagnostic = "goal " + to_string(target.goal, data.signature()) +
                            " is constant over the dataset; no rule can raise its probability";
        return result;
    }

    RuleLattice lattice(target.goal, target, data, config.max_premise_len);
    auto to_rules = [&](const std::vector<RuleLattice::Id>& ids) {
        std::vector<Rule> rules;
        rules.reserve(ids.size());
        for (const auto id : ids) rules.push_back(lattice.rule(id));
        std::sort(rules.begin(), rules.end());
        return rules;
    };

    std::vector<RuleLattice::Id> current{RuleLattice::kRoot};
    result.trace.push_back(to_rules(current));
    for (;;) {
        auto next = lattice.apply(current);
        if (next == current) break;
        current = std::move(next);
        result.trace.push_back(to_rules(current));
    }

    std::vector<std::pair<Rule, RuleLattice::Id>> ordered;
    for (const auto id : current) ordered.emplace_back(lattice.rule(id), id);
    std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [rule, id] : ordered) {
        result.fixpoint.push_back(rule);
        auto a = annotate(lattice.support(id), lattice.joint(id), lattice.conclusion_count(), data.size());
        if (passes_filters(a, config)) result.rules.rules.push_back({rule, a});
    }
    return result;
}

LearnResult learn_classifier(const Literal& goal, std::span<const Literal> pool, const Dataset& data,
                             const SearchConfig& config) {
    LearnResult positive = learn(TargetSpec::make(Conjunction{goal}, pool), data, config);
    LearnResult negative = learn(TargetSpec::make(Conjunction{negate(goal)}, pool), data, config);

    LearnResult out = std::move(positive);
    out.rules.rules.insert(out.rules.rules.end(), negative.rules.rules.begin(), negative.rules.rules.end());
    out.fixpoint.insert(out.fixpoint.end(), negative.fixpoint.begin(), negative.fixpoint.end());
    out.trace.insert(out.trace.end(), negative.trace.begin(), negative.trace.end());
    if (!out.diagnostic) out.diagnostic = negative.diagnostic;
    return out;
}

SignificanceReport significance(const Rule& rule, const Dataset& data) {
    const CaseSet premise = cases_satisfying(rule.premise(), data);
    const CaseSet conclusion = cases_satisfying(rule.conclusion(), data);
    const std::uint64_t support = premise.count();
    if (support == 0) throw UndefinedMeasure("rule premise is never satisfied");
    const std::uint64_t n = data.size();
    const std::uint64_t k = conclusion.count();
    const std::uint64_t a = intersection_count(premise, conclusion);

    SignificanceReport report;
    report.table = {a, support - a, k - a, n - support - (k - a)};
    report.degenerate = support == n || k == 0 || k == n;
    report.p_value = report.degenerate ? 1.0 : fisher_exact_greater(a, support - a, k - a, n - support - (k - a));
    return report;
}

Prediction predict_case(const RuleSet& rules, const Case& c) {
    if (rules.target.size() != 1) throw InvalidArgument("prediction requires a single-literal target");
    const Conjunction positive = rules.target;
    const Conjunction negative{negate(rules.target.literals().front())};

    const AnnotatedRule* best_pos = nullptr;
    const AnnotatedRule* best_neg = nullptr;
    for (const auto& r : rules.rules) {
        const AnnotatedRule** slot = nullptr;
        if (r.rule.conclusion() == positive) {
            slot = &best_pos;
        } else if (r.rule.conclusion() == negative) {
            slot = &best_neg;
        } else {
            continue;
        }
        if (!satisfied(r.rule.premise(), c)) continue;
        if (*slot == nullptr || (*slot)->annotation.probability < r.annotation.probability) *slot = &r;
    }

    Prediction out;
    const AnnotatedRule* winner = nullptr;
    if (best_pos != nullptr && best_neg != nullptr) {
        const auto cmp = best_pos->annotation.probability <=> best_neg->annotation.probability;
        if (cmp > 0) {
            winner = best_pos;
        } else if (cmp < 0) {
            winner = best_neg;
        }
    } else {
        winner = best_pos != nullptr ? best_pos : best_neg;
    }
    if (winner == nullptr) return out;
    out.verdict = winner == best_pos ? Verdict::positive : Verdict::negative;
    out.winning_rule = winner->rule;
    out.probability = winner->annotation.probability;
    return out;
}

EvalMetrics evaluate_round_robin(const Dataset& data, const TargetSpec& target, const SearchConfig& config) {
    if (target.goal.size() != 1) throw InvalidArgument("round-robin evaluation requires a single-literal goal");
    if (data.size() < 2) throw InvalidArgument("round-robin evaluation needs at least two cases");
    const Literal& goal = target.goal.literals().front();

    EvalMetrics m;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const Dataset train = data.without(i);
        const LearnResult learned = learn_classifier(goal, target.pool, train, config);
        const Case& held_out = data.cases()[i];
        const Prediction p = predict_case(learned.rules, held_out);
        if (p.verdict == Verdict::refused) {
            ++m.refused;
            continue;
        }
        ++m.diagnosed;
        const bool actual = satisfied(goal, held_out);
        const bool predicted = p.verdict == Verdict::positive;
        if (actual == predicted) {
            ++m.correct;
        } else if (predicted) {
            ++m.false_positives;
        } else {
            ++m.false_negatives;
        }
    }
    if (m.diagnosed > 0) {
        const auto d = static_cast<double>(m.diagnosed);
        m.accuracy = static_cast<double>(m.correct) / d;
        m.false_positive_rate = static_cast<double>(m.false_positives) / d;
        m.false_negative_rate = static_cast<double>(m.false_negatives) / d;
    }
    return m;
}

}  // namespace spi
