#pragma once

#include <cstdint>

namespace spi {

/// One-sided Fisher exact test on the 2x2 table
///
///               conclusion   ¬conclusion
///   premise         a             b
///   ¬premise        c             d
///
/// Returns P(X >= a) for X ~ Hypergeometric(N = a+b+c+d, K = a+c, n = a+b).
double fisher_exact_greater(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d);

}  // namespace spi
