#include "mitotk/image.hpp"

#include <cstdio>
#include <memory>

#include <png.h>

#include "mitotk/digest.hpp"
#include "mitotk/error.hpp"

namespace mitotk {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f)
            std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

} // namespace

Patch read_png_rgb8(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f)
        throw Error("cannot open " + path);

    png_byte header[8];
    if (std::fread(header, 1, 8, f.get()) != 8 || png_sig_cmp(header, 0, 8) != 0)
        throw Error(path + ": not a PNG file");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png)
        throw Error("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw Error("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error(path + ": PNG decode error");
    }
    png_init_io(png, f.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    int bit_depth = png_get_bit_depth(png, info);
    int color_type = png_get_color_type(png, info);
    if (bit_depth != 8 || color_type != PNG_COLOR_TYPE_RGB) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error(path + ": only 8-bit RGB PNG is supported");
    }

    Patch p(static_cast<int>(png_get_image_width(png, info)),
            static_cast<int>(png_get_image_height(png, info)));
    std::vector<png_bytep> rows(static_cast<std::size_t>(p.height));
    std::size_t stride = static_cast<std::size_t>(p.width) * 3;
    for (int y = 0; y < p.height; ++y)
        rows[static_cast<std::size_t>(y)] = p.data.data() + static_cast<std::size_t>(y) * stride;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return p;
}

void write_png_rgb8(const std::string& path, const Patch& p) {
    if (!p.valid())
        throw Error("write_png_rgb8: invalid patch");
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f)
        throw Error("cannot write " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png)
        throw Error("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw Error("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error(path + ": PNG encode error");
    }
    png_init_io(png, f.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(p.width), static_cast<png_uint_32>(p.height),
                 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::size_t stride = static_cast<std::size_t>(p.width) * 3;
    for (int y = 0; y < p.height; ++y)
        png_write_row(png, const_cast<png_bytep>(p.data.data() + static_cast<std::size_t>(y) * stride));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

std::string pixel_digest(const Patch& p) {
    if (!p.valid())
        throw Error("pixel_digest: invalid patch");
    std::string buf;
    buf.reserve(16 + p.data.size());
    auto put_le64 = [&buf](std::uint64_t v) {
        for (int i = 0; i < 8; ++i)
            buf.push_back(static_cast<char>(static_cast<std::uint8_t>(v >> (8 * i))));
    };
    put_le64(static_cast<std::uint64_t>(p.width));
    put_le64(static_cast<std::uint64_t>(p.height));
    buf.append(reinterpret_cast<const char*>(p.data.data()), p.data.size());
    return sha256_hex(buf);
}

} // namespace mitotk
