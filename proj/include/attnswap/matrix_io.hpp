#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace attnswap {

// Little-endian binary container shared by features.bin and index.bin.
//
//   file   := "AXC1" u32:format_version u64:config_hash
//             u32:tool_len bytes:tool_version section*
//   section:= "AXMX" u32:name_len bytes:name u64:rows u64:cols f64[rows*cols]
//           | "AXJS" u32:name_len bytes:name u64:byte_len bytes:utf8_json
//
// Matrix payloads are row-major 64-bit floats.
struct MatrixSection {
    std::string name;
    Eigen::MatrixXd matrix;
};

struct JsonSection {
    std::string name;
    std::string payload;  // UTF-8 JSON text
};

struct Container {
    std::uint64_t config_hash = 0;
    std::string tool_version;
    std::vector<MatrixSection> matrices;
    std::vector<JsonSection> blobs;

    const MatrixSection* find_matrix(const std::string& name) const;
    const JsonSection* find_blob(const std::string& name) const;
};

void save_container(const Container& container, const std::string& path);
Container load_container(const std::string& path);

// FNV-1a over bytes; used for config hashes and pipeline cache keys.
std::uint64_t fnv1a64(const void* data, std::size_t size,
                      std::uint64_t seed = 0xCBF29CE484222325ULL);
std::uint64_t fnv1a64(const std::string& text, std::uint64_t seed = 0xCBF29CE484222325ULL);
std::uint64_t hash_file(const std::string& path);

}  // namespace attnswap
