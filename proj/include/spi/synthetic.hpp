#pragma once

#include <cstddef>
#include <cstdint>

#include "spi/monotone.hpp"
#include "spi/rule_core.hpp"

namespace spi {

/// The elicited breast-cancer model:
///   g = w2 ∨ w1w3,  h = y1 ∨ y2 ∨ y3y4y5,  f = x1x2 ∨ x3 ∨ x1x5 ∨ x2x5 ∨ x4x5.
HierarchySpec expert_model();

struct SyntheticOptions {
    std::size_t cases = 200;
    double label_noise = 0.05;
    std::uint64_t seed = 0;
};

/// Cases drawn uniformly over w1 w2 w3 y1..y5 x3 x4 x5 (all binary) and labelled
/// "malignant" by the composed model, each label flipped with probability label_noise.
/// Deterministic for a given seed on every platform.
Dataset synthetic_expert_dataset(const HierarchySpec& model, const SyntheticOptions& options);

}  // namespace spi
