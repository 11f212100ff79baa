#pragma once

// Case tables and their discretization into a literal pool.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "spi/case_set.hpp"
#include "spi/rule_core.hpp"

namespace spi {

struct AttributeDiscretization {
    enum class Mode { binary, categorical, thresholds };

    std::string attribute;
    Mode mode = Mode::binary;
    std::vector<double> thresholds;  // strictly increasing; thresholds mode only
};

/// Attributes not listed contribute no literals.
struct DiscretizationSpec {
    std::vector<AttributeDiscretization> attributes;
};

struct Discretization {
    std::vector<Literal> pool;          // sorted, closed under negation
    std::vector<CaseSet> view;          // view[j]: cases satisfying pool[j]
    std::vector<std::string> warnings;  // e.g. thresholds outside the observed range
};

/// binary: eq(1); categorical: eq(v) per value; numeric: x>t per threshold and
/// t_i<x<t_{i+1} per consecutive pair. Each literal comes with its negation.
Discretization discretize(const Dataset& data, const DiscretizationSpec& spec);

/// Signature plus discretization, as read from a schema document:
///   {"attributes": [{"name": "VOL", "kind": "numeric", "thresholds": [5]},
///                   {"name": "DEN", "kind": "categorical", "values": ["mild", "moderate"]},
///                   {"name": "malignant", "kind": "binary"}]}
/// Numeric attributes without "thresholds" are loaded but not discretized.
struct CaseSchema {
    AttributeSignature signature;
    DiscretizationSpec discretization;
};

CaseSchema parse_case_schema(const std::string& json_text);
CaseSchema load_case_schema(const std::filesystem::path& path);

/// Header row must name every signature attribute, plus an optional "id" column.
/// Numbers use '.' decimals regardless of locale. Throws LoadError with row/column.
Dataset load_cases_csv(const std::filesystem::path& path, const AttributeSignature& signature);
Dataset parse_cases_csv(const std::string& text, const AttributeSignature& signature);

/// Writes the dataset with a leading id column.
void write_cases_csv(const Dataset& data, const std::filesystem::path& path);
std::string format_cases_csv(const Dataset& data);

}  // namespace spi
