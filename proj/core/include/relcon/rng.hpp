#pragma once

// Counter-based random numbers. Every draw is a pure function of
// (seed, counter), so sequences are identical on every platform and do not
// depend on how work is split across threads.
//
//   mix64(z):  z += 0x9E3779B97F4A7C15
//              z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//              z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//              return z ^ (z >> 31)                      (SplitMix64 finalizer)
//   bits(seed, i)    = mix64(mix64(seed) ^ i)
//   uniform(seed, i) = ((bits >> 11) + 0.5) * 2^-53    in (0, 1)
//   normal pair i    = Box-Muller on uniform(seed, 2i), uniform(seed, 2i+1)

#include <cstdint>
#include <vector>

namespace relcon {

std::uint64_t mix64(std::uint64_t z) noexcept;

/// Child seed for one Monte Carlo cell, independent of scheduling.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t bandwidth_index, std::uint64_t trial_index) noexcept;

class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) noexcept : key_(mix64(seed)) {}

    [[nodiscard]] std::uint64_t bits(std::uint64_t counter) const noexcept { return mix64(key_ ^ counter); }
    [[nodiscard]] double uniform(std::uint64_t counter) const noexcept;
    /// Standard normal sample number `index`.
    [[nodiscard]] double normal(std::uint64_t index) const noexcept;

    [[nodiscard]] std::vector<double> normals(std::size_t n) const;

private:
    std::uint64_t key_;
};

}  // namespace relcon
