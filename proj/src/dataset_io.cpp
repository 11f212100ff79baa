#include "spi/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace spi {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::string format_number(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

// RFC 4180 record splitting: quoted fields may contain commas and doubled quotes.
std::vector<std::string> split_record(std::string_view line, std::size_t row) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += ch;
            }
        } else if (ch == '"' && trim(field).empty()) {
            quoted = true;
            was_quoted = true;
            field.clear();
        } else if (ch == ',') {
            fields.push_back(was_quoted ? field : std::string(trim(field)));
            field.clear();
            was_quoted = false;
        } else {
            field += ch;
        }
    }
    if (quoted) throw LoadError("unterminated quoted field", row);
    fields.push_back(was_quoted ? field : std::string(trim(field)));
    return fields;
}

Value parse_cell(const Attribute& a, const std::string& text, std::size_t row, std::size_t column) {
    switch (a.kind) {
        case AttributeKind::binary:
            if (text == "1" || text == "true") return true;
            if (text == "0" || text == "false") return false;
            break;
        case AttributeKind::categorical:
            for (std::size_t i = 0; i < a.values.size(); ++i) {
                if (a.values[i] == text) return Category{i};
            }
            break;
        case AttributeKind::numeric: {
            double x = 0;
            auto res = std::from_chars(text.data(), text.data() + text.size(), x);
            if (res.ec == std::errc{} && res.ptr == text.data() + text.size() && std::isfinite(x)) return x;
            break;
        }
    }
    throw LoadError("invalid " + std::string(to_string(a.kind)) + " value '" + text + "' for '" + a.name + "'", row,
                    column);
}

std::string format_cell(const Attribute& a, const Value& v) {
    switch (a.kind) {
        case AttributeKind::binary: return std::get<bool>(v) ? "1" : "0";
        case AttributeKind::categorical: return a.values.at(std::get<Category>(v).index);
        case AttributeKind::numeric: return format_number(std::get<double>(v));
    }
    return {};
}

std::string quote_if_needed(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos && trim(s) == s) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

void add_pair(std::vector<Literal>& pool, Literal positive) {
    pool.push_back(negate(positive));
    pool.push_back(std::move(positive));
}

}  // namespace

Discretization discretize(const Dataset& data, const DiscretizationSpec& spec) {
    const auto& signature = data.signature();
    Discretization out;
    std::set<std::size_t> seen;
    for (const auto& rule : spec.attributes) {
        const std::size_t index = signature.index_of(rule.attribute);
        if (!seen.insert(index).second) throw InvalidArgument("attribute '" + rule.attribute + "' discretized twice");
        const Attribute& a = signature[index];
        using Mode = AttributeDiscretization::Mode;
        switch (rule.mode) {
            case Mode::binary:
                if (a.kind != AttributeKind::binary) {
                    throw InvalidArgument("attribute '" + a.name + "' is not binary");
                }
                add_pair(out.pool, Literal::equals(index, true));
                break;
            case Mode::categorical:
                if (a.kind != AttributeKind::categorical) {
                    throw InvalidArgument("attribute '" + a.name + "' is not categorical");
                }
                if (a.values.empty()) throw InvalidArgument("attribute '" + a.name + "' has no values");
                for (std::size_t v = 0; v < a.values.size(); ++v) add_pair(out.pool, Literal::equals(index, Category{v}));
                break;
            case Mode::thresholds: {
                if (a.kind != AttributeKind::numeric) {
                    throw InvalidArgument("attribute '" + a.name + "' is not numeric");
                }
                const auto& t = rule.thresholds;
                if (t.empty()) throw InvalidArgument("attribute '" + a.name + "' has no thresholds");
                for (std::size_t i = 0; i < t.size(); ++i) {
                    if (!std::isfinite(t[i])) throw InvalidArgument("non-finite threshold for '" + a.name + "'");
                    if (i > 0 && !(t[i - 1] < t[i])) {
                        throw InvalidArgument("thresholds for '" + a.name + "' are not strictly increasing");
                    }
                }
                for (double x : t) add_pair(out.pool, Literal::greater(index, x));
                for (std::size_t i = 0; i + 1 < t.size(); ++i) add_pair(out.pool, Literal::in_range(index, t[i], t[i + 1]));
                if (!data.empty()) {
                    double lo = INFINITY;
                    double hi = -INFINITY;
                    for (const auto& c : data.cases()) {
                        const double x = std::get<double>(c.values[index]);
                        lo = std::min(lo, x);
                        hi = std::max(hi, x);
                    }
                    for (double x : t) {
                        if (x < lo || x >= hi) {
                            out.warnings.push_back("threshold " + format_number(x) + " for '" + a.name +
                                                   "' does not split the observed range [" + format_number(lo) + ", " +
                                                   format_number(hi) + "]");
                        }
                    }
                }
                break;
            }
        }
    }
    std::sort(out.pool.begin(), out.pool.end());
    out.view.reserve(out.pool.size());
    for (const auto& literal : out.pool) out.view.push_back(cases_satisfying(literal, data));
    return out;
}

CaseSchema parse_case_schema(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("schema: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("attributes") || !doc["attributes"].is_array()) {
        throw ParseError("schema: expected an object with an \"attributes\" array");
    }
    std::vector<Attribute> attributes;
    DiscretizationSpec spec;
    try {
        for (const auto& entry : doc["attributes"]) {
            Attribute a;
            a.name = entry.at("name").get<std::string>();
            const auto kind = entry.at("kind").get<std::string>();
            const bool wanted = entry.value("discretize", true);
            AttributeDiscretization d{a.name, AttributeDiscretization::Mode::binary, {}};
            if (kind == "binary") {
                a.kind = AttributeKind::binary;
            } else if (kind == "categorical") {
                a.kind = AttributeKind::categorical;
                a.values = entry.at("values").get<std::vector<std::string>>();
                d.mode = AttributeDiscretization::Mode::categorical;
            } else if (kind == "numeric") {
                a.kind = AttributeKind::numeric;
                d.mode = AttributeDiscretization::Mode::thresholds;
                if (entry.contains("thresholds")) {
                    d.thresholds = entry["thresholds"].get<std::vector<double>>();
                } else {
                    attributes.push_back(std::move(a));
                    continue;
                }
            } else {
                throw ParseError("schema: unknown attribute kind '" + kind + "' for '" + a.name + "'");
            }
            attributes.push_back(std::move(a));
            if (wanted) spec.attributes.push_back(std::move(d));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("schema: ") + e.what());
    }
    CaseSchema schema{AttributeSignature(std::move(attributes)), std::move(spec)};
    return schema;
}

CaseSchema load_case_schema(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_case_schema(buffer.str());
}

Dataset parse_cases_csv(const std::string& text, const AttributeSignature& signature) {
    std::vector<std::pair<std::size_t, std::string>> lines;  // (1-based row, content)
    {
        std::istringstream in(text);
        std::string line;
        std::size_t row = 0;
        while (std::getline(in, line)) {
            ++row;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (trim(line).empty()) continue;
            lines.emplace_back(row, std::move(line));
        }
    }
    if (lines.empty()) throw LoadError("empty case table");

    const auto header = split_record(lines.front().second, lines.front().first);
    const std::size_t header_row = lines.front().first;
    std::optional<std::size_t> id_column;
    std::vector<std::optional<std::size_t>> column_attribute(header.size());
    std::vector<bool> present(signature.size(), false);
    for (std::size_t col = 0; col < header.size(); ++col) {
        const auto& name = header[col];
        if (auto index = signature.find(name)) {
            if (present[*index]) throw LoadError("duplicate column '" + name + "'", header_row, col + 1);
            present[*index] = true;
            column_attribute[col] = *index;
        } else if (name == "id" && !id_column) {
            id_column = col;
        } else {
            throw LoadError("unexpected column '" + name + "'", header_row, col + 1);
        }
    }
    for (std::size_t i = 0; i < signature.size(); ++i) {
        if (!present[i]) throw LoadError("missing column '" + signature[i].name + "'", header_row);
    }
    if (lines.size() == 1) throw LoadError("case table has a header but no cases", header_row);

    std::vector<Case> cases;
    std::set<std::string> ids;
    for (std::size_t k = 1; k < lines.size(); ++k) {
        const auto& [row, line] = lines[k];
        const auto fields = split_record(line, row);
        if (fields.size() != header.size()) {
            throw LoadError("expected " + std::to_string(header.size()) + " fields, found " +
                                std::to_string(fields.size()),
                            row);
        }
        Case c;
        c.values.resize(signature.size());
        for (std::size_t col = 0; col < fields.size(); ++col) {
            if (column_attribute[col]) {
                const std::size_t a = *column_attribute[col];
                c.values[a] = parse_cell(signature[a], fields[col], row, col + 1);
            }
        }
        if (id_column) {
            c.id = fields[*id_column];
            if (c.id.empty()) throw LoadError("empty case id", row, *id_column + 1);
        } else {
            c.id = "row-" + std::to_string(k);
        }
        if (!ids.insert(c.id).second) {
            throw LoadError("duplicate case id '" + c.id + "'", row, id_column ? *id_column + 1 : 0);
        }
        cases.push_back(std::move(c));
    }
    return Dataset(signature, std::move(cases));
}

Dataset load_cases_csv(const std::filesystem::path& path, const AttributeSignature& signature) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_cases_csv(buffer.str(), signature);
}

std::string format_cases_csv(const Dataset& data) {
    const auto& signature = data.signature();
    std::string out = "id";
    for (const auto& a : signature.attributes()) out += "," + quote_if_needed(a.name);
    out += "\n";
    for (const auto& c : data.cases()) {
        out += quote_if_needed(c.id);
        for (std::size_t i = 0; i < signature.size(); ++i) out += "," + quote_if_needed(format_cell(signature[i], c.values[i]));
        out += "\n";
    }
    return out;
}

void write_cases_csv(const Dataset& data, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw LoadError("cannot write '" + path.string() + "'");
    out << format_cases_csv(data);
}

}  // namespace spi
