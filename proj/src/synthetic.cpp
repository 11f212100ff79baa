#include "spi/synthetic.hpp"

#include <cmath>
#include <random>
#include <string>

namespace spi {

HierarchySpec expert_model() {
    // Masks: bit i is variable i+1.
    return HierarchySpec{
        Dnf(5, {0b00011, 0b00100, 0b10001, 0b10010, 0b11000}),
        Dnf(3, {0b010, 0b101}),
        Dnf(5, {0b00001, 0b00010, 0b11100}),
    };
}

Dataset synthetic_expert_dataset(const HierarchySpec& model, const SyntheticOptions& options) {
    model.validate();
    if (!(options.label_noise >= 0.0 && options.label_noise <= 1.0)) {
        throw InvalidArgument("label noise must lie in [0, 1]");
    }
    std::vector<Attribute> attributes;
    for (const auto& name : {"w1", "w2", "w3", "y1", "y2", "y3", "y4", "y5", "x3", "x4", "x5", "malignant"}) {
        attributes.push_back({name, AttributeKind::binary, {}});
    }
    AttributeSignature signature(std::move(attributes));

    // Raw engine output only: distributions are implementation-defined.
    std::mt19937_64 engine(options.seed);
    const long double scaled = std::ldexp(static_cast<long double>(options.label_noise), 64);
    const bool always_flip = options.label_noise >= 1.0;
    const std::uint64_t flip_below = always_flip ? 0 : static_cast<std::uint64_t>(scaled);

    std::vector<Case> cases;
    cases.reserve(options.cases);
    for (std::size_t k = 0; k < options.cases; ++k) {
        const std::uint64_t bits = engine();
        const std::uint64_t coin = engine();
        const std::uint32_t inputs = static_cast<std::uint32_t>(bits & 0x7FFU);
        bool label = compose(model, BitVector(11, inputs));
        if (always_flip || coin < flip_below) label = !label;

        Case c;
        c.id = "case-" + std::to_string(k + 1);
        for (unsigned i = 0; i < 11; ++i) c.values.emplace_back(static_cast<bool>((inputs >> i) & 1U));
        c.values.emplace_back(label);
        cases.push_back(std::move(c));
    }
    return Dataset(std::move(signature), std::move(cases));
}

}  // namespace spi
