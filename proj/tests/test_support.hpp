#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "attnswap/error.hpp"
#include "attnswap/raster.hpp"

namespace testsupport {

namespace fs = std::filesystem;

inline fs::path make_temp_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("attnswap_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

template <typename F>
std::optional<attnswap::ErrorCode> error_code_of(F&& f) {
    try {
        f();
    } catch (const attnswap::Error& e) {
        return e.code();
    }
    return std::nullopt;
}

// A two-element corpus: one text, one image, three fixations (text hit,
// image hit, miss). Tests mutate the JSON documents before writing.
struct CorpusFiles {
    nlohmann::json pages;
    nlohmann::json elements;
    nlohmann::json fixations;

    void write(const fs::path& root, bool with_rasters = true) const {
        fs::create_directories(root);
        auto dump = [&](const nlohmann::json& doc, const char* name) {
            std::ofstream out(root / name);
            out << doc.dump(2) << "\n";
        };
        dump(pages, "pages.json");
        dump(elements, "elements.json");
        dump(fixations, "fixations.json");
        if (with_rasters) {
            attnswap::save_ppm(attnswap::Raster::filled(4, 4, 120, 120, 120),
                               (root / "shot_p1.ppm").string());
            attnswap::save_ppm(attnswap::Raster::filled(4, 4, 200, 40, 40),
                               (root / "i1.ppm").string());
        }
    }
};

inline CorpusFiles baseline_corpus() {
    CorpusFiles files;
    files.pages = nlohmann::json::array(
        {{{"page_id", "p1"},
          {"viewport", {{"width_px", 1680}, {"height_px", 1050}}},
          {"screenshot_ref", "shot_p1.ppm"}}});
    files.elements = nlohmann::json::array(
        {{{"element_id", "t1"},
          {"page_id", "p1"},
          {"modality", "text"},
          {"bbox", {{"x", 0}, {"y", 0}, {"w", 100}, {"h", 100}}},
          {"style_attrs",
           {{"font-size", "20px"}, {"color", "rgba(255,0,0,0.5)"}}}},
         {{"element_id", "i1"},
          {"page_id", "p1"},
          {"modality", "image"},
          {"bbox", {{"x", 200}, {"y", 0}, {"w", 100}, {"h", 100}}},
          {"raster_ref", "i1.ppm"}}});
    files.fixations = nlohmann::json::array(
        {{{"participant_id", "u1"},
          {"page_id", "p1"},
          {"x", 10.0},
          {"y", 10.0},
          {"onset_ms", 100},
          {"duration_ms", 150}},
         {{"participant_id", "u1"},
          {"page_id", "p1"},
          {"x", 250.0},
          {"y", 50.0},
          {"onset_ms", 300},
          {"duration_ms", 200}},
         {{"participant_id", "u1"},
          {"page_id", "p1"},
          {"x", 900.0},
          {"y", 900.0},
          {"onset_ms", 500},
          {"duration_ms", 150}}});
    return files;
}

}  // namespace testsupport
