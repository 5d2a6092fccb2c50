#include "attnswap/matrix_io.hpp"

#include <cstring>
#include <fstream>

#include "attnswap/error.hpp"

namespace attnswap {

namespace {

constexpr char kFileMagic[4] = {'A', 'X', 'C', '1'};
constexpr char kMatrixMagic[4] = {'A', 'X', 'M', 'X'};
constexpr char kJsonMagic[4] = {'A', 'X', 'J', 'S'};
constexpr std::uint32_t kFormatVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
    char buf[4];
    for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out.write(buf, 4);
}

void write_u64(std::ostream& out, std::uint64_t v) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out.write(buf, 8);
}

void write_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    write_u64(out, bits);
}

std::uint32_t read_u32(std::istream& in, const std::string& path) {
    unsigned char buf[4];
    in.read(reinterpret_cast<char*>(buf), 4);
    if (!in) fail(ErrorCode::IoFailure, path + ": truncated file");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
    return v;
}

std::uint64_t read_u64(std::istream& in, const std::string& path) {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), 8);
    if (!in) fail(ErrorCode::IoFailure, path + ": truncated file");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}

double read_f64(std::istream& in, const std::string& path) {
    std::uint64_t bits = read_u64(in, path);
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
}

void write_string(std::ostream& out, const std::string& s) {
    write_u32(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in, const std::string& path) {
    std::uint32_t len = read_u32(in, path);
    std::string s(len, '\0');
    in.read(s.data(), static_cast<std::streamsize>(len));
    if (!in) fail(ErrorCode::IoFailure, path + ": truncated string");
    return s;
}

}  // namespace

const MatrixSection* Container::find_matrix(const std::string& name) const {
    for (const auto& section : matrices) {
        if (section.name == name) return &section;
    }
    return nullptr;
}

const JsonSection* Container::find_blob(const std::string& name) const {
    for (const auto& section : blobs) {
        if (section.name == name) return &section;
    }
    return nullptr;
}

void save_container(const Container& container, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::IoFailure, path + ": cannot open for writing");

    out.write(kFileMagic, 4);
    write_u32(out, kFormatVersion);
    write_u64(out, container.config_hash);
    write_string(out, container.tool_version);

    for (const auto& section : container.matrices) {
        out.write(kMatrixMagic, 4);
        write_string(out, section.name);
        write_u64(out, static_cast<std::uint64_t>(section.matrix.rows()));
        write_u64(out, static_cast<std::uint64_t>(section.matrix.cols()));
        for (Eigen::Index r = 0; r < section.matrix.rows(); ++r) {
            for (Eigen::Index c = 0; c < section.matrix.cols(); ++c) {
                write_f64(out, section.matrix(r, c));
            }
        }
    }
    for (const auto& section : container.blobs) {
        out.write(kJsonMagic, 4);
        write_string(out, section.name);
        write_u64(out, section.payload.size());
        out.write(section.payload.data(), static_cast<std::streamsize>(section.payload.size()));
    }
    if (!out) fail(ErrorCode::IoFailure, path + ": write failed");
}

Container load_container(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::MissingFile, path + ": cannot open");

    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kFileMagic, 4) != 0) {
        fail(ErrorCode::SchemaViolation, path + ": not an attnswap container");
    }
    std::uint32_t version = read_u32(in, path);
    if (version != kFormatVersion) {
        fail(ErrorCode::SchemaViolation, path + ": unsupported container version");
    }

    Container container;
    container.config_hash = read_u64(in, path);
    container.tool_version = read_string(in, path);

    while (in.read(magic, 4)) {
        if (std::memcmp(magic, kMatrixMagic, 4) == 0) {
            MatrixSection section;
            section.name = read_string(in, path);
            auto rows = static_cast<Eigen::Index>(read_u64(in, path));
            auto cols = static_cast<Eigen::Index>(read_u64(in, path));
            section.matrix.resize(rows, cols);
            for (Eigen::Index r = 0; r < rows; ++r) {
                for (Eigen::Index c = 0; c < cols; ++c) {
                    section.matrix(r, c) = read_f64(in, path);
                }
            }
            container.matrices.push_back(std::move(section));
        } else if (std::memcmp(magic, kJsonMagic, 4) == 0) {
            JsonSection section;
            section.name = read_string(in, path);
            std::uint64_t len = read_u64(in, path);
            section.payload.resize(len);
            in.read(section.payload.data(), static_cast<std::streamsize>(len));
            if (!in) fail(ErrorCode::IoFailure, path + ": truncated blob");
            container.blobs.push_back(std::move(section));
        } else {
            fail(ErrorCode::SchemaViolation, path + ": unknown section magic");
        }
    }
    return container;
}

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t seed) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t hash = seed;
    for (std::size_t i = 0; i < size; ++i) {
        hash ^= bytes[i];
        hash *= 0x100000001B3ULL;
    }
    return hash;
}

std::uint64_t fnv1a64(const std::string& text, std::uint64_t seed) {
    return fnv1a64(text.data(), text.size(), seed);
}

std::uint64_t hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::MissingFile, path + ": cannot open for hashing");
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    char buf[65536];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        hash = fnv1a64(buf, static_cast<std::size_t>(in.gcount()), hash);
        if (!in) break;
    }
    return hash;
}

}  // namespace attnswap
