#include "attnswap/raster.hpp"

#include <cctype>
#include <fstream>
#include <string>

#include "attnswap/error.hpp"

namespace attnswap {

namespace {

// Reads one PNM header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
    std::string token;
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    while (c != EOF && !std::isspace(c)) {
        token.push_back(static_cast<char>(c));
        c = in.get();
    }
    return token;
}

int parse_header_int(std::istream& in, const std::string& path, const char* what) {
    std::string token = next_token(in);
    if (token.empty()) {
        fail(ErrorCode::UnreadableRaster, path + ": truncated header, missing " + what);
    }
    try {
        return std::stoi(token);
    } catch (const std::exception&) {
        fail(ErrorCode::UnreadableRaster, path + ": bad " + std::string(what) + " \"" + token + "\"");
    }
}

}  // namespace

Raster Raster::filled(int height, int width, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    Raster out;
    out.height = height;
    out.width = width;
    out.pixels.resize(static_cast<std::size_t>(height) * width * 3);
    for (std::size_t i = 0; i < out.pixels.size(); i += 3) {
        out.pixels[i] = r;
        out.pixels[i + 1] = g;
        out.pixels[i + 2] = b;
    }
    return out;
}

Raster load_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::UnreadableRaster, path + ": cannot open");
    }

    std::string magic = next_token(in);
    if (magic != "P6" && magic != "P3") {
        fail(ErrorCode::UnreadableRaster, path + ": unsupported format \"" + magic + "\"");
    }

    Raster raster;
    raster.width = parse_header_int(in, path, "width");
    raster.height = parse_header_int(in, path, "height");
    int maxval = parse_header_int(in, path, "maxval");
    if (raster.width <= 0 || raster.height <= 0) {
        fail(ErrorCode::UnreadableRaster, path + ": non-positive dimensions");
    }
    if (maxval != 255) {
        fail(ErrorCode::UnreadableRaster, path + ": only 8-bit rasters supported (maxval 255)");
    }

    std::size_t count = raster.pixel_count() * 3;
    raster.pixels.resize(count);
    if (magic == "P6") {
        in.get();  // single whitespace after maxval
        in.read(reinterpret_cast<char*>(raster.pixels.data()),
                static_cast<std::streamsize>(count));
        if (static_cast<std::size_t>(in.gcount()) != count) {
            fail(ErrorCode::UnreadableRaster, path + ": truncated pixel data");
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            int value = parse_header_int(in, path, "pixel value");
            if (value < 0 || value > 255) {
                fail(ErrorCode::UnreadableRaster, path + ": pixel value out of range");
            }
            raster.pixels[i] = static_cast<std::uint8_t>(value);
        }
    }
    return raster;
}

void save_ppm(const Raster& raster, const std::string& path) {
    if (raster.empty()) {
        fail(ErrorCode::EmptyInput, "refusing to write empty raster to " + path);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        fail(ErrorCode::IoFailure, path + ": cannot open for writing");
    }
    out << "P6\n" << raster.width << " " << raster.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(raster.pixels.data()),
              static_cast<std::streamsize>(raster.pixels.size()));
    if (!out) {
        fail(ErrorCode::IoFailure, path + ": write failed");
    }
}

}  // namespace attnswap
