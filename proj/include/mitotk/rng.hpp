#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace mitotk {

// splitmix64 generator. Every random draw in the toolkit flows through this
// so that a run is a pure function of its root seed, independent of the
// standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();

    // [0,1) with 53 random bits.
    double uniform01();

    // [lo,hi); returns lo exactly when hi == lo.
    double uniform(double lo, double hi);

    // [0,n), n > 0. Multiply-shift bounding.
    std::uint64_t bounded(std::uint64_t n);

    // Fisher-Yates.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(bounded(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

// Derives a stage seed from the root seed and a fixed label (plus up to two
// numeric qualifiers such as fold or patch index). Stages can be rerun in
// isolation and still see the same draws.
std::uint64_t derive_seed(std::uint64_t root, std::string_view label,
                          std::uint64_t a = 0, std::uint64_t b = 0);

} // namespace mitotk
