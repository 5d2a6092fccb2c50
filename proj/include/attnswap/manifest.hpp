#pragma once

#include <string>
#include <vector>

namespace attnswap {

// One manifest entry describes one real-valued feature. Kinds:
//   dist_top|dist_left|dist_right|dist_bottom|area  geometry, no source attr
//   color_r|color_g|color_b|color_a                 one channel of a CSS color
//   space_top|space_left|space_right|space_bottom   one side of margin/padding
//   length                                          numeric CSS value ("16px")
//   enum                                            keyword mapped to its index
//                                                   in enum_values
struct ManifestEntry {
    std::string feature_name;
    std::string kind;
    std::string source_attr;
    double default_value = 0.0;
    std::vector<std::string> enum_values;
};

struct FeatureManifest {
    std::vector<ManifestEntry> entries;

    std::size_t size() const { return entries.size(); }
};

// The 70-entry text manifest shipped with the toolkit: 5 positional entries,
// 3 color attributes (12), margin + padding (8) and 45 scalar entries.
FeatureManifest default_text_manifest();

FeatureManifest load_manifest(const std::string& path);
void save_manifest(const FeatureManifest& manifest, const std::string& path);

// Enforces the structural rules: exactly 70 entries, each positional kind
// exactly once, color attributes expand to contiguous (r,g,b,a) runs and
// space attributes to contiguous (top,left,right,bottom) runs.
void validate_text_manifest(const FeatureManifest& manifest);

}  // namespace attnswap
