#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace attnswap {

// 8-bit RGB raster, row-major, channels interleaved.
struct Raster {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> pixels;  // height * width * 3

    bool empty() const { return height == 0 || width == 0; }
    std::size_t pixel_count() const {
        return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
    }

    std::uint8_t channel(int row, int col, int c) const {
        return pixels[(static_cast<std::size_t>(row) * width + col) * 3 + c];
    }
    void set_pixel(int row, int col, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        auto* p = &pixels[(static_cast<std::size_t>(row) * width + col) * 3];
        p[0] = r;
        p[1] = g;
        p[2] = b;
    }

    static Raster filled(int height, int width, std::uint8_t r, std::uint8_t g,
                         std::uint8_t b);
};

// Portable pixmap I/O. Reading accepts P6 (binary) and P3 (ASCII) with
// maxval 255; writing always emits P6.
Raster load_ppm(const std::string& path);
void save_ppm(const Raster& raster, const std::string& path);

}  // namespace attnswap
