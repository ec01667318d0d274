#include "relcon/rng.hpp"

#include <cmath>
#include <numbers>

namespace relcon {

std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t bandwidth_index, std::uint64_t trial_index) noexcept {
    return mix64(mix64(mix64(base) ^ bandwidth_index) ^ (trial_index + 0x632BE59BD9B4E019ULL));
}

double CounterRng::uniform(std::uint64_t counter) const noexcept {
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t index) const noexcept {
    const std::uint64_t pair = index / 2;
    const double u1 = uniform(2 * pair);
    const double u2 = uniform(2 * pair + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    return (index % 2 == 0) ? r * std::cos(a) : r * std::sin(a);
}

std::vector<double> CounterRng::normals(std::size_t n) const {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; i += 2) {
        const double u1 = uniform(i);
        const double u2 = uniform(i + 1);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        out[i] = r * std::cos(a);
        if (i + 1 < n) {
            out[i + 1] = r * std::sin(a);
        }
    }
    return out;
}

}  // namespace relcon
