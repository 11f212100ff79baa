#include "spi/significance.hpp"

#include <algorithm>
#include <cmath>

namespace spi {

namespace {

long double log_choose(std::uint64_t n, std::uint64_t k) {
    return std::lgamma(static_cast<long double>(n) + 1) - std::lgamma(static_cast<long double>(k) + 1) -
           std::lgamma(static_cast<long double>(n - k) + 1);
}

}  // namespace

double fisher_exact_greater(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
    const std::uint64_t n_total = a + b + c + d;
    const std::uint64_t k = a + c;  // conclusion margin
    const std::uint64_t n = a + b;  // premise margin
    const std::uint64_t x_max = std::min(k, n);

    // pmf(a), then the ratio recurrence pmf(x+1)/pmf(x) up the tail.
    long double p = std::exp(log_choose(k, a) + log_choose(n_total - k, n - a) - log_choose(n_total, n));
    long double sum = p;
    for (std::uint64_t x = a; x < x_max; ++x) {
        const long double num = static_cast<long double>(k - x) * static_cast<long double>(n - x);
        const long double den = static_cast<long double>(x + 1) * static_cast<long double>(n_total - k - n + x + 1);
        p *= num / den;
        sum += p;
    }
    return static_cast<double>(std::min<long double>(sum, 1.0L));
}

}  // namespace spi
