#include "attnswap/manifest.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "attnswap/error.hpp"
#include "attnswap/features.hpp"

using nlohmann::json;

namespace attnswap {

namespace {

ManifestEntry positional(const char* name) { return {name, name, "", 0.0, {}}; }

void push_color(std::vector<ManifestEntry>& entries, const std::string& attr, double default_a) {
    entries.push_back({attr + ".r", "color_r", attr, 0.0, {}});
    entries.push_back({attr + ".g", "color_g", attr, 0.0, {}});
    entries.push_back({attr + ".b", "color_b", attr, 0.0, {}});
    entries.push_back({attr + ".a", "color_a", attr, default_a, {}});
}

void push_space(std::vector<ManifestEntry>& entries, const std::string& attr) {
    entries.push_back({attr + ".top", "space_top", attr, 0.0, {}});
    entries.push_back({attr + ".left", "space_left", attr, 0.0, {}});
    entries.push_back({attr + ".right", "space_right", attr, 0.0, {}});
    entries.push_back({attr + ".bottom", "space_bottom", attr, 0.0, {}});
}

ManifestEntry length(const std::string& attr, double default_value) {
    return {attr, "length", attr, default_value, {}};
}

ManifestEntry keyword(const std::string& attr, std::vector<std::string> values,
                      double default_index = 0.0) {
    return {attr, "enum", attr, default_index, std::move(values)};
}

bool is_positional_kind(const std::string& kind) {
    return kind == "dist_top" || kind == "dist_left" || kind == "dist_right" ||
           kind == "dist_bottom" || kind == "area";
}

}  // namespace

FeatureManifest default_text_manifest() {
    FeatureManifest manifest;
    auto& e = manifest.entries;
    e.reserve(kTextFeatureCount);

    e.push_back(positional("dist_top"));
    e.push_back(positional("dist_left"));
    e.push_back(positional("dist_right"));
    e.push_back(positional("dist_bottom"));
    e.push_back(positional("area"));

    push_color(e, "color", 1.0);
    push_color(e, "background-color", 0.0);  // default transparent
    push_color(e, "border-color", 1.0);

    push_space(e, "margin");
    push_space(e, "padding");

    e.push_back(length("font-size", 16.0));
    e.push_back(length("font-weight", 400.0));
    e.push_back(length("line-height", 19.2));
    e.push_back(length("letter-spacing", 0.0));
    e.push_back(length("word-spacing", 0.0));
    e.push_back(length("text-indent", 0.0));
    e.push_back(length("border-top-width", 0.0));
    e.push_back(length("border-right-width", 0.0));
    e.push_back(length("border-bottom-width", 0.0));
    e.push_back(length("border-left-width", 0.0));
    e.push_back(length("border-top-left-radius", 0.0));
    e.push_back(length("border-top-right-radius", 0.0));
    e.push_back(length("border-bottom-right-radius", 0.0));
    e.push_back(length("border-bottom-left-radius", 0.0));
    e.push_back(length("outline-width", 0.0));
    e.push_back(length("width", 0.0));
    e.push_back(length("height", 0.0));
    e.push_back(length("min-width", 0.0));
    e.push_back(length("min-height", 0.0));
    e.push_back(length("max-width", 0.0));
    e.push_back(length("max-height", 0.0));
    e.push_back(length("opacity", 1.0));
    e.push_back(length("z-index", 0.0));
    e.push_back(length("top", 0.0));
    e.push_back(length("left", 0.0));
    e.push_back(length("right", 0.0));
    e.push_back(length("bottom", 0.0));

    e.push_back(keyword("font-style", {"normal", "italic", "oblique"}));
    e.push_back(keyword("font-variant", {"normal", "small-caps"}));
    e.push_back(keyword("font-stretch",
                        {"ultra-condensed", "extra-condensed", "condensed", "semi-condensed",
                         "normal", "semi-expanded", "expanded", "extra-expanded",
                         "ultra-expanded"},
                        4.0));
    e.push_back(keyword("text-align", {"left", "center", "right", "justify"}));
    e.push_back(keyword("text-decoration-line", {"none", "underline", "overline", "line-through"}));
    e.push_back(keyword("text-decoration-style", {"solid", "double", "dotted", "dashed", "wavy"}));
    e.push_back(keyword("text-transform", {"none", "capitalize", "uppercase", "lowercase"}));
    e.push_back(keyword("white-space", {"normal", "nowrap", "pre", "pre-wrap", "pre-line"}));
    e.push_back(keyword("word-break", {"normal", "break-all", "keep-all", "break-word"}));
    e.push_back(keyword("overflow-wrap", {"normal", "break-word", "anywhere"}));
    e.push_back(keyword("visibility", {"visible", "hidden", "collapse"}));
    e.push_back(keyword("display",
                        {"inline", "block", "inline-block", "flex", "grid", "list-item", "none"}));
    e.push_back(keyword("position", {"static", "relative", "absolute", "fixed", "sticky"}));
    e.push_back(keyword("float", {"none", "left", "right"}));
    e.push_back(keyword("direction", {"ltr", "rtl"}));
    e.push_back(keyword("border-style", {"none", "solid", "dashed", "dotted", "double"}));
    e.push_back(keyword("vertical-align", {"baseline", "top", "middle", "bottom", "sub", "super"}));
    e.push_back(keyword("list-style-type", {"none", "disc", "circle", "square", "decimal"}));

    validate_text_manifest(manifest);
    return manifest;
}

FeatureManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::MissingFile, path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        fail(ErrorCode::SchemaViolation, path + ": " + e.what());
    }
    if (!doc.is_array()) fail(ErrorCode::SchemaViolation, path + ": expected an array of entries");

    FeatureManifest manifest;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const json& rec = doc[i];
        std::string where = path + "[" + std::to_string(i) + "]";
        if (!rec.is_object() || !rec.contains("name") || !rec.contains("kind")) {
            fail(ErrorCode::SchemaViolation, where + ": entries need name and kind");
        }
        ManifestEntry entry;
        entry.feature_name = rec["name"].get<std::string>();
        entry.kind = rec["kind"].get<std::string>();
        entry.source_attr = rec.value("attr", std::string{});
        entry.default_value = rec.value("default", 0.0);
        if (rec.contains("values")) {
            for (const json& v : rec["values"]) entry.enum_values.push_back(v.get<std::string>());
        }
        if (entry.kind == "enum" && entry.enum_values.empty()) {
            fail(ErrorCode::SchemaViolation, where + ": enum entries need a values list");
        }
        if (!is_positional_kind(entry.kind) && entry.source_attr.empty()) {
            fail(ErrorCode::SchemaViolation, where + ": non-positional entries need attr");
        }
        manifest.entries.push_back(std::move(entry));
    }
    validate_text_manifest(manifest);
    return manifest;
}

void save_manifest(const FeatureManifest& manifest, const std::string& path) {
    json doc = json::array();
    for (const ManifestEntry& entry : manifest.entries) {
        json rec;
        rec["name"] = entry.feature_name;
        rec["kind"] = entry.kind;
        if (!entry.source_attr.empty()) rec["attr"] = entry.source_attr;
        rec["default"] = entry.default_value;
        if (!entry.enum_values.empty()) rec["values"] = entry.enum_values;
        doc.push_back(rec);
    }
    std::ofstream out(path);
    if (!out) fail(ErrorCode::IoFailure, path + ": cannot open for writing");
    out << doc.dump(2) << "\n";
}

void validate_text_manifest(const FeatureManifest& manifest) {
    if (manifest.size() != kTextFeatureCount) {
        fail(ErrorCode::SchemaViolation,
             "text manifest must have exactly " + std::to_string(kTextFeatureCount) +
                 " entries, got " + std::to_string(manifest.size()));
    }

    static const std::vector<std::string> positional_kinds = {
        "dist_top", "dist_left", "dist_right", "dist_bottom", "area"};
    for (const std::string& kind : positional_kinds) {
        int count = 0;
        for (const ManifestEntry& entry : manifest.entries) {
            if (entry.kind == kind) ++count;
        }
        if (count != 1) {
            fail(ErrorCode::SchemaViolation,
                 "manifest must contain exactly one \"" + kind + "\" entry");
        }
    }

    // Color attributes expand to contiguous (r,g,b,a); space attributes to
    // contiguous (top,left,right,bottom).
    static const std::vector<std::string> color_order = {"color_r", "color_g", "color_b",
                                                         "color_a"};
    static const std::vector<std::string> space_order = {"space_top", "space_left", "space_right",
                                                         "space_bottom"};
    const auto& entries = manifest.entries;
    std::set<std::string> checked;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        for (const auto& order : {color_order, space_order}) {
            if (entries[i].kind != order[0]) continue;
            if (!checked.insert(entries[i].kind + ":" + entries[i].source_attr).second) {
                fail(ErrorCode::SchemaViolation,
                     "attribute \"" + entries[i].source_attr + "\" expands more than once");
            }
            for (std::size_t j = 0; j < order.size(); ++j) {
                if (i + j >= entries.size() || entries[i + j].kind != order[j] ||
                    entries[i + j].source_attr != entries[i].source_attr) {
                    fail(ErrorCode::SchemaViolation,
                         "attribute \"" + entries[i].source_attr +
                             "\" must expand to exactly 4 contiguous entries");
                }
            }
        }
        // A color/space component kind appearing outside its run start is only
        // valid as part of a run validated above.
    }
    for (const auto& order : {color_order, space_order}) {
        for (std::size_t i = 0; i < entries.size(); ++i) {
            for (std::size_t j = 1; j < order.size(); ++j) {
                if (entries[i].kind != order[j]) continue;
                bool in_run = i >= j && entries[i - j].kind == order[0] &&
                              entries[i - j].source_attr == entries[i].source_attr;
                if (!in_run) {
                    fail(ErrorCode::SchemaViolation,
                         "entry \"" + entries[i].feature_name + "\" is not part of a complete " +
                             order[0].substr(0, 5) + " expansion");
                }
            }
        }
    }
}

}  // namespace attnswap
