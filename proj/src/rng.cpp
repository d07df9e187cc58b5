#include "mitotk/rng.hpp"

namespace mitotk {

namespace {

std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace

std::uint64_t Rng::next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
}

double Rng::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
}

std::uint64_t Rng::bounded(std::uint64_t n) {
    // Lemire's multiply-shift; the slight modulo bias over a 64-bit stream
    // is far below anything observable here.
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
    return static_cast<std::uint64_t>(m >> 64);
}

std::uint64_t derive_seed(std::uint64_t root, std::string_view label,
                          std::uint64_t a, std::uint64_t b) {
    std::uint64_t h = 0xCBF29CE484222325ULL; // FNV-1a
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    h = mix(h ^ mix(root));
    h = mix(h ^ mix(a + 0x9E3779B97F4A7C15ULL));
    h = mix(h ^ mix(b + 0x3C6EF372FE94F82AULL));
    return h;
}

} // namespace mitotk
