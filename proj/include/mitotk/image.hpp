#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mitotk {

// 8-bit RGB patch, row-major, 3 interleaved channels.
struct Patch {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    Patch() = default;
    Patch(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, 0) {}

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
    bool valid() const { return width > 0 && height > 0 && data.size() == pixel_count() * 3; }
};

// Only 8-bit RGB PNG is accepted; anything else (grayscale, palette, alpha,
// 16-bit) is rejected so pixel digests stay format-independent.
Patch read_png_rgb8(const std::string& path);
void write_png_rgb8(const std::string& path, const Patch& p);

// SHA-256 over width, height (little-endian u64 each) and the raw RGB bytes,
// as lowercase hex. Identifies decoded pixel content regardless of encoding.
std::string pixel_digest(const Patch& p);

} // namespace mitotk
