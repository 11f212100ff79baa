#include "spi/persistence.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace spi {

namespace {

template <class F>
auto guarded(std::string_view document, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string(document) + ": " + e.what());
    } catch (const InvalidArgument& e) {
        throw ParseError(std::string(document) + ": " + e.what());
    } catch (const InconsistentConjunction& e) {
        throw ParseError(std::string(document) + ": " + e.what());
    }
}

void check_header(const Json& j, std::string_view kind) {
    if (!j.is_object()) throw ParseError(std::string(kind) + ": expected a JSON object");
    if (!j.contains("schema_version")) throw ParseError(std::string(kind) + ": missing schema_version");
    const auto& version = j["schema_version"];
    if (!version.is_number_integer() || version.get<int>() != kSchemaVersion) {
        throw VersionError(std::string(kind) + ": unsupported schema_version " + version.dump() + " (expected " +
                           std::to_string(kSchemaVersion) + ")");
    }
    if (j.contains("kind") && j["kind"] != kind) {
        throw ParseError("expected kind '" + std::string(kind) + "', found " + j["kind"].dump());
    }
}

Json conjunction_to_json(const Conjunction& c, const AttributeSignature& signature) {
    Json out = Json::array();
    for (const auto& l : c) out.push_back(literal_to_json(l, signature));
    return out;
}

Conjunction conjunction_from_json(const Json& j, const AttributeSignature& signature) {
    std::vector<Literal> literals;
    for (const auto& item : j) literals.push_back(literal_from_json(item, signature));
    return Conjunction(std::move(literals));
}

std::vector<BitVector> chain_from_json(const Json& j) {
    std::vector<BitVector> chain;
    for (const auto& item : j) chain.push_back(BitVector::parse(item.get<std::string>()));
    return chain;
}

}  // namespace

Json parse_json(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(e.what());
    }
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        return Json::parse(buffer.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

std::string canonical(const Json& document) { return document.dump(2) + "\n"; }

Json literal_to_json(const Literal& literal, const AttributeSignature& signature) {
    const Attribute& a = signature[literal.attribute()];
    Json out{{"attribute", a.name}, {"negated", literal.is_negated()}, {"text", to_string(literal, signature)}};
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, Equals>) {
                out["op"] = "eq";
                if (const auto* b = std::get_if<bool>(&p.value)) {
                    out["value"] = *b;
                } else if (const auto* cat = std::get_if<Category>(&p.value)) {
                    out["value"] = a.values.at(cat->index);
                } else {
                    out["value"] = std::get<double>(p.value);
                }
            } else if constexpr (std::is_same_v<P, GreaterThan>) {
                out["op"] = "gt";
                out["threshold"] = p.threshold;
            } else if constexpr (std::is_same_v<P, LessThan>) {
                out["op"] = "lt";
                out["threshold"] = p.threshold;
            } else {
                out["op"] = "in_range";
                out["lo"] = p.lo;
                out["hi"] = p.hi;
            }
        },
        literal.predicate());
    return out;
}

Literal literal_from_json(const Json& j, const AttributeSignature& signature) {
    const std::size_t index = signature.index_of(j.at("attribute").get<std::string>());
    const Attribute& a = signature[index];
    const Polarity polarity = j.value("negated", false) ? Polarity::negated : Polarity::positive;
    const auto op = j.at("op").get<std::string>();
    if (op == "eq") {
        const auto& v = j.at("value");
        switch (a.kind) {
            case AttributeKind::binary:
                if (v.is_boolean()) return Literal::equals(index, v.get<bool>(), polarity);
                if (v.is_number_integer() && (v == 0 || v == 1)) return Literal::equals(index, v == 1, polarity);
                break;
            case AttributeKind::categorical:
                if (v.is_string()) {
                    const auto name = v.get<std::string>();
                    for (std::size_t i = 0; i < a.values.size(); ++i) {
                        if (a.values[i] == name) return Literal::equals(index, Category{i}, polarity);
                    }
                }
                break;
            case AttributeKind::numeric:
                if (v.is_number()) return Literal::equals(index, v.get<double>(), polarity);
                break;
        }
        throw ParseError("literal value " + v.dump() + " does not fit attribute '" + a.name + "'");
    }
    if (op == "gt") return Literal::greater(index, j.at("threshold").get<double>(), polarity);
    if (op == "lt") return Literal::less(index, j.at("threshold").get<double>(), polarity);
    if (op == "in_range") return Literal::in_range(index, j.at("lo").get<double>(), j.at("hi").get<double>(), polarity);
    throw ParseError("unknown literal op '" + op + "'");
}

Json signature_to_json(const AttributeSignature& signature) {
    Json out = Json::array();
    for (const auto& a : signature.attributes()) {
        Json entry{{"name", a.name}, {"kind", std::string(to_string(a.kind))}};
        if (a.kind == AttributeKind::categorical) entry["values"] = a.values;
        out.push_back(std::move(entry));
    }
    return out;
}

AttributeSignature signature_from_json(const Json& j) {
    return guarded("signature", [&] {
        std::vector<Attribute> attributes;
        for (const auto& entry : j) {
            Attribute a;
            a.name = entry.at("name").get<std::string>();
            const auto kind = entry.at("kind").get<std::string>();
            if (kind == "binary") {
                a.kind = AttributeKind::binary;
            } else if (kind == "categorical") {
                a.kind = AttributeKind::categorical;
                a.values = entry.at("values").get<std::vector<std::string>>();
            } else if (kind == "numeric") {
                a.kind = AttributeKind::numeric;
            } else {
                throw ParseError("signature: unknown attribute kind '" + kind + "'");
            }
            attributes.push_back(std::move(a));
        }
        return AttributeSignature(std::move(attributes));
    });
}

Json ruleset_to_json(const RuleSet& rules) {
    Json list = Json::array();
    for (const auto& r : rules.rules) {
        Json entry{
            {"premise", conjunction_to_json(r.rule.premise(), rules.signature)},
            {"conclusion", conjunction_to_json(r.rule.conclusion(), rules.signature)},
            {"probability",
             {{"num", r.annotation.probability.numerator()}, {"den", r.annotation.probability.denominator()}}},
            {"support", r.annotation.support},
            {"text", to_string(r.rule, rules.signature)},
        };
        entry["p_value"] = r.annotation.p_value ? Json(*r.annotation.p_value) : Json(nullptr);
        list.push_back(std::move(entry));
    }
    return Json{
        {"schema_version", kSchemaVersion},
        {"kind", "ruleset"},
        {"signature", signature_to_json(rules.signature)},
        {"target", conjunction_to_json(rules.target, rules.signature)},
        {"rules", std::move(list)},
    };
}

RuleSet ruleset_from_json(const Json& j) {
    check_header(j, "ruleset");
    RuleSet out;
    out.signature = signature_from_json(j.at("signature"));
    return guarded("ruleset", [&] {
        out.target = conjunction_from_json(j.at("target"), out.signature);
        for (const auto& entry : j.at("rules")) {
            Rule rule(conjunction_from_json(entry.at("premise"), out.signature),
                      conjunction_from_json(entry.at("conclusion"), out.signature));
            const auto& p = entry.at("probability");
            RuleAnnotation annotation{Probability(p.at("num").get<std::uint64_t>(), p.at("den").get<std::uint64_t>()),
                                      entry.at("support").get<std::size_t>(), std::nullopt};
            if (entry.contains("p_value") && !entry["p_value"].is_null()) {
                annotation.p_value = entry["p_value"].get<double>();
            }
            out.rules.push_back({std::move(rule), annotation});
        }
        return out;
    });
}

Json session_to_json(const ElicitationState& state) {
    Json answers = Json::array();
    for (const auto& a : state.asked_log()) answers.push_back(Json::array({a.vector.to_string(), a.value ? 1 : 0}));
    Json provenance = Json::object();
    const unsigned n = state.width();
    for (std::uint32_t m = 0; m < state.plan().cube_size(); ++m) {
        const BitVector v(n, m);
        const auto p = state.provenance(v);
        if (p != Provenance::unknown) provenance[v.to_string()] = std::string(to_string(p));
    }
    return Json{
        {"schema_version", kSchemaVersion},
        {"kind", "elicitation-session"},
        {"n", n},
        {"chain_order", chain_plan_to_json(state.plan())["chains"]},
        {"answers", std::move(answers)},
        {"provenance", std::move(provenance)},
    };
}

ElicitationState session_from_json(const Json& j) {
    check_header(j, "elicitation-session");
    return guarded("session", [&] {
        const unsigned n = j.at("n").get<unsigned>();
        ElicitationState state(chain_plan_from_json(Json{{"n", n}, {"chains", j.at("chain_order")}}));
        for (const auto& entry : j.at("answers")) {
            const auto v = BitVector::parse(entry.at(0).get<std::string>());
            const auto& value = entry.at(1);
            if (!(value == 0 || value == 1 || value.is_boolean())) {
                throw ParseError("session: answer value must be 0 or 1, found " + value.dump());
            }
            try {
                state.submit_answer(v, value == 1 || value == true);
            } catch (const Error& e) {
                throw ParseError(std::string("session: answers do not replay: ") + e.what());
            }
        }
        if (j.contains("provenance")) {
            if (session_to_json(state)["provenance"] != j["provenance"]) {
                throw ParseError("session: provenance does not match the replayed answers");
            }
        }
        return state;
    });
}

Json dnf_to_json(const Dnf& dnf, std::string_view prefix) {
    Json terms = Json::array();
    for (const auto t : dnf.terms()) {
        Json term = Json::array();
        for (unsigned i = 0; i < dnf.width(); ++i) {
            if ((t >> i) & 1U) term.push_back(i + 1);
        }
        terms.push_back(std::move(term));
    }
    return Json{{"n", dnf.width()}, {"terms", std::move(terms)}, {"text", dnf.to_string(prefix)}};
}

Dnf dnf_from_json(const Json& j) {
    return guarded("dnf", [&] {
        const unsigned n = j.at("n").get<unsigned>();
        if (n == 0 || n > kMaxCubeWidth) throw ParseError("dnf: width out of range");
        std::vector<std::uint32_t> terms;
        for (const auto& term : j.at("terms")) {
            std::uint32_t mask = 0;
            for (const auto& var : term) {
                const unsigned i = var.get<unsigned>();
                if (i < 1 || i > n) throw ParseError("dnf: variable " + std::to_string(i) + " out of range");
                mask |= 1U << (i - 1);
            }
            terms.push_back(mask);
        }
        return Dnf(n, std::move(terms));
    });
}

Json hierarchy_to_json(const HierarchySpec& hierarchy) {
    return Json{
        {"schema_version", kSchemaVersion},
        {"kind", "hierarchy"},
        {"f", dnf_to_json(hierarchy.f, "x")},
        {"g", dnf_to_json(hierarchy.g, "w")},
        {"h", dnf_to_json(hierarchy.h, "y")},
    };
}

HierarchySpec hierarchy_from_json(const Json& j) {
    check_header(j, "hierarchy");
    return guarded("hierarchy", [&] {
        HierarchySpec spec{dnf_from_json(j.at("f")), dnf_from_json(j.at("g")), dnf_from_json(j.at("h"))};
        spec.validate();
        return spec;
    });
}

Json chain_plan_to_json(const ChainPlan& plan) {
    Json chains = Json::array();
    for (const auto& chain : plan.chains()) {
        Json c = Json::array();
        for (const auto& v : chain) c.push_back(v.to_string());
        chains.push_back(std::move(c));
    }
    return Json{{"n", plan.width()}, {"chains", std::move(chains)}};
}

ChainPlan chain_plan_from_json(const Json& j) {
    return guarded("chain order", [&] {
        const Json& list = j.is_array() ? j : j.at("chains");
        std::vector<HanselChain> chains;
        for (const auto& c : list) chains.push_back(chain_from_json(c));
        if (chains.empty() || chains.front().empty()) throw ParseError("chain order: no chains");
        const unsigned n = j.is_object() ? j.at("n").get<unsigned>() : chains.front().front().width();
        return ChainPlan(n, std::move(chains));
    });
}

Json truth_table_to_json(const TruthTable& table) {
    Json values = Json::object();
    for (std::uint32_t m = 0; m < table.size(); ++m) values[BitVector(table.width(), m).to_string()] = table.at(m) ? 1 : 0;
    return Json{{"n", table.width()}, {"values", std::move(values)}};
}

TruthTable truth_table_from_json(const Json& j) {
    return guarded("truth table", [&] {
        const unsigned n = j.at("n").get<unsigned>();
        if (n == 0 || n > kMaxCubeWidth) throw ParseError("truth table: width out of range");
        TruthTable table(n);
        std::vector<bool> seen(table.size(), false);
        for (const auto& [key, value] : j.at("values").items()) {
            const auto v = BitVector::parse(key);
            if (v.width() != n) throw ParseError("truth table: vector '" + key + "' has the wrong width");
            if (!(value == 0 || value == 1 || value.is_boolean())) {
                throw ParseError("truth table: value for '" + key + "' must be 0 or 1");
            }
            table.set(v.mask(), value == 1 || value == true);
            seen[v.mask()] = true;
        }
        for (std::uint32_t m = 0; m < seen.size(); ++m) {
            if (!seen[m]) throw ParseError("truth table: no value for '" + BitVector(n, m).to_string() + "'");
        }
        return table;
    });
}

Json model_to_json(const StoredModel& model) {
    return std::visit(
        [](const auto& m) -> Json {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, RuleSet>) {
                return ruleset_to_json(m);
            } else if constexpr (std::is_same_v<M, ElicitationState>) {
                return session_to_json(m);
            } else {
                return hierarchy_to_json(m);
            }
        },
        model);
}

StoredModel model_from_json(const Json& j) {
    if (!j.is_object()) throw ParseError("model: expected a JSON object");
    if (!j.contains("kind") || !j["kind"].is_string()) throw ParseError("model: missing \"kind\"");
    const auto kind = j["kind"].get<std::string>();
    if (kind == "ruleset") return ruleset_from_json(j);
    if (kind == "elicitation-session") return session_from_json(j);
    if (kind == "hierarchy") return hierarchy_from_json(j);
    throw ParseError("model: unknown kind '" + kind + "'");
}

void save_model(const StoredModel& model, const std::filesystem::path& path) {
    write_text_file(path, canonical(model_to_json(model)));
}

StoredModel load_model(const std::filesystem::path& path) { return model_from_json(read_json_file(path)); }

}  // namespace spi
