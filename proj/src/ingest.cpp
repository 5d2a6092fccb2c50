#include "attnswap/ingest.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <utility>

#include <json.hpp>

#include "attnswap/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace attnswap {

namespace {

json load_json_array(const fs::path& path) {
    if (!fs::exists(path)) {
        fail(ErrorCode::MissingFile, path.string());
    }
    std::ifstream in(path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        fail(ErrorCode::SchemaViolation, path.string() + ": " + e.what());
    }
    if (!doc.is_array()) {
        fail(ErrorCode::SchemaViolation, path.string() + ": top-level value must be an array");
    }
    return doc;
}

std::string field_path(const std::string& file, std::size_t idx, const std::string& field) {
    return file + "[" + std::to_string(idx) + "]." + field;
}

const json& require_field(const json& obj, const std::string& file, std::size_t idx,
                          const std::string& field) {
    auto it = obj.find(field);
    if (it == obj.end()) {
        fail(ErrorCode::SchemaViolation, field_path(file, idx, field) + ": missing");
    }
    return *it;
}

std::string require_string(const json& obj, const std::string& file, std::size_t idx,
                           const std::string& field) {
    const json& v = require_field(obj, file, idx, field);
    if (!v.is_string() || v.get<std::string>().empty()) {
        fail(ErrorCode::SchemaViolation, field_path(file, idx, field) + ": must be a non-empty string");
    }
    return v.get<std::string>();
}

double require_number(const json& obj, const std::string& file, std::size_t idx,
                      const std::string& field) {
    const json& v = require_field(obj, file, idx, field);
    if (!v.is_number()) {
        fail(ErrorCode::SchemaViolation, field_path(file, idx, field) + ": must be a number");
    }
    return v.get<double>();
}

std::int64_t require_integer(const json& obj, const std::string& file, std::size_t idx,
                             const std::string& field) {
    const json& v = require_field(obj, file, idx, field);
    if (!v.is_number_integer()) {
        fail(ErrorCode::SchemaViolation, field_path(file, idx, field) + ": must be an integer");
    }
    return v.get<std::int64_t>();
}

bool bbox_intersects_viewport(const BBox& bbox, const Viewport& viewport) {
    return bbox.x < viewport.width_px && bbox.x + bbox.w > 0 && bbox.y < viewport.height_px &&
           bbox.y + bbox.h > 0;
}

std::vector<Page> load_pages(const fs::path& root) {
    const std::string file = "pages.json";
    json doc = load_json_array(root / file);
    std::vector<Page> pages;
    std::set<std::string> seen_ids;
    pages.reserve(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const json& rec = doc[i];
        if (!rec.is_object()) {
            fail(ErrorCode::SchemaViolation, file + "[" + std::to_string(i) + "]: must be an object");
        }
        Page page;
        page.page_id = require_string(rec, file, i, "page_id");
        if (!seen_ids.insert(page.page_id).second) {
            fail(ErrorCode::SchemaViolation,
                 field_path(file, i, "page_id") + ": duplicate \"" + page.page_id + "\"");
        }
        const json& vp = require_field(rec, file, i, "viewport");
        if (!vp.is_object()) {
            fail(ErrorCode::SchemaViolation, field_path(file, i, "viewport") + ": must be an object");
        }
        page.viewport.width_px = static_cast<int>(require_integer(vp, file, i, "width_px"));
        page.viewport.height_px = static_cast<int>(require_integer(vp, file, i, "height_px"));
        if (page.viewport.width_px <= 0 || page.viewport.height_px <= 0) {
            fail(ErrorCode::SchemaViolation,
                 field_path(file, i, "viewport") + ": dimensions must be positive");
        }
        page.screenshot_ref = require_string(rec, file, i, "screenshot_ref");
        pages.push_back(std::move(page));
    }
    return pages;
}

std::vector<Element> load_elements(const fs::path& root, const std::vector<Page>& pages) {
    const std::string file = "elements.json";
    json doc = load_json_array(root / file);

    std::map<std::string, const Page*> page_by_id;
    for (const Page& p : pages) page_by_id[p.page_id] = &p;

    std::vector<Element> elements;
    std::set<std::string> seen_ids;
    elements.reserve(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const json& rec = doc[i];
        if (!rec.is_object()) {
            fail(ErrorCode::SchemaViolation, file + "[" + std::to_string(i) + "]: must be an object");
        }
        Element element;
        element.element_id = require_string(rec, file, i, "element_id");
        if (!seen_ids.insert(element.element_id).second) {
            fail(ErrorCode::SchemaViolation,
                 field_path(file, i, "element_id") + ": duplicate \"" + element.element_id + "\"");
        }
        element.page_id = require_string(rec, file, i, "page_id");
        auto page_it = page_by_id.find(element.page_id);
        if (page_it == page_by_id.end()) {
            fail(ErrorCode::DanglingReference,
                 field_path(file, i, "page_id") + ": unknown page \"" + element.page_id + "\"");
        }
        element.modality = modality_from_name(require_string(rec, file, i, "modality"));

        const json& bbox = require_field(rec, file, i, "bbox");
        if (!bbox.is_object()) {
            fail(ErrorCode::SchemaViolation, field_path(file, i, "bbox") + ": must be an object");
        }
        element.bbox.x = require_number(bbox, file, i, "bbox.x");
        element.bbox.y = require_number(bbox, file, i, "bbox.y");
        element.bbox.w = require_number(bbox, file, i, "bbox.w");
        element.bbox.h = require_number(bbox, file, i, "bbox.h");
        if (element.bbox.w <= 0 || element.bbox.h <= 0) {
            fail(ErrorCode::SchemaViolation,
                 field_path(file, i, "bbox") + ": w and h must be positive");
        }
        if (!bbox_intersects_viewport(element.bbox, page_it->second->viewport)) {
            fail(ErrorCode::SchemaViolation,
                 field_path(file, i, "bbox") + ": does not intersect the page viewport");
        }

        if (auto it = rec.find("z_order"); it != rec.end()) {
            if (!it->is_number_integer()) {
                fail(ErrorCode::SchemaViolation, field_path(file, i, "z_order") + ": must be an integer");
            }
            element.z_order = it->get<int>();
        }

        bool has_style = rec.contains("style_attrs");
        bool has_raster = rec.contains("raster_ref");
        if (element.modality == Modality::Text) {
            if (!has_style || has_raster) {
                fail(ErrorCode::SchemaViolation,
                     field_path(file, i, "style_attrs") +
                         ": text elements carry style_attrs and no raster_ref");
            }
            const json& attrs = rec["style_attrs"];
            if (!attrs.is_object()) {
                fail(ErrorCode::SchemaViolation,
                     field_path(file, i, "style_attrs") + ": must be an object");
            }
            for (auto it = attrs.begin(); it != attrs.end(); ++it) {
                if (!it.value().is_string()) {
                    fail(ErrorCode::SchemaViolation,
                         field_path(file, i, "style_attrs." + it.key()) + ": must be a string");
                }
                element.style_attrs[it.key()] = it.value().get<std::string>();
            }
        } else {
            if (!has_raster || has_style) {
                fail(ErrorCode::SchemaViolation,
                     field_path(file, i, "raster_ref") +
                         ": image elements carry raster_ref and no style_attrs");
            }
            element.raster_ref = require_string(rec, file, i, "raster_ref");
            if (!fs::exists(root / element.raster_ref)) {
                fail(ErrorCode::DanglingReference,
                     field_path(file, i, "raster_ref") + ": file not found \"" +
                         element.raster_ref + "\"");
            }
        }
        elements.push_back(std::move(element));
    }
    return elements;
}

std::vector<Fixation> load_fixations(const fs::path& root, const std::vector<Page>& pages) {
    const std::string file = "fixations.json";
    json doc = load_json_array(root / file);

    std::set<std::string> page_ids;
    for (const Page& p : pages) page_ids.insert(p.page_id);

    std::vector<Fixation> fixations;
    fixations.reserve(doc.size());
    std::map<std::pair<std::string, std::string>, std::int64_t> last_onset;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const json& rec = doc[i];
        if (!rec.is_object()) {
            fail(ErrorCode::SchemaViolation, file + "[" + std::to_string(i) + "]: must be an object");
        }
        Fixation fx;
        fx.participant_id = require_string(rec, file, i, "participant_id");
        fx.page_id = require_string(rec, file, i, "page_id");
        if (page_ids.find(fx.page_id) == page_ids.end()) {
            fail(ErrorCode::DanglingReference,
                 field_path(file, i, "page_id") + ": unknown page \"" + fx.page_id + "\"");
        }
        fx.x = require_number(rec, file, i, "x");
        fx.y = require_number(rec, file, i, "y");
        fx.onset_ms = require_integer(rec, file, i, "onset_ms");
        fx.duration_ms = require_integer(rec, file, i, "duration_ms");
        if (fx.duration_ms < 0) {
            fail(ErrorCode::SchemaViolation,
                 field_path(file, i, "duration_ms") + ": must be >= 0");
        }
        auto key = std::make_pair(fx.participant_id, fx.page_id);
        auto it = last_onset.find(key);
        if (it != last_onset.end() && fx.onset_ms <= it->second) {
            fail(ErrorCode::SchemaViolation,
                 field_path(file, i, "onset_ms") +
                     ": must be strictly increasing within a (participant, page) session");
        }
        last_onset[key] = fx.onset_ms;
        fixations.push_back(std::move(fx));
    }
    return fixations;
}

}  // namespace

Corpus load_corpus(const std::string& root_path) {
    fs::path root(root_path);
    if (!fs::is_directory(root)) {
        fail(ErrorCode::MissingFile, root_path + ": not a directory");
    }
    Corpus corpus;
    corpus.root = root_path;
    corpus.pages = load_pages(root);
    for (const Page& page : corpus.pages) {
        if (!fs::exists(root / page.screenshot_ref)) {
            fail(ErrorCode::DanglingReference,
                 "pages.json: screenshot_ref \"" + page.screenshot_ref + "\" not found for page \"" +
                     page.page_id + "\"");
        }
    }
    corpus.elements = load_elements(root, corpus.pages);
    corpus.fixations = load_fixations(root, corpus.pages);
    return corpus;
}

std::vector<Fixation> filter_fixations(const std::vector<Fixation>& samples,
                                       std::int64_t min_duration_ms) {
    std::vector<Fixation> kept;
    kept.reserve(samples.size());
    std::copy_if(samples.begin(), samples.end(), std::back_inserter(kept),
                 [&](const Fixation& fx) { return fx.duration_ms >= min_duration_ms; });
    return kept;
}

std::vector<AttendedEvent> map_fixations_to_elements(const std::vector<Fixation>& fixations,
                                                     const std::vector<Element>& elements,
                                                     const Viewport& viewport,
                                                     HitTestDiagnostics* diagnostics) {
    (void)viewport;  // hits are decided by element geometry alone
    std::map<std::string, std::vector<const Element*>> by_page;
    for (const Element& e : elements) by_page[e.page_id].push_back(&e);

    std::vector<AttendedEvent> events;
    HitTestDiagnostics local;
    for (const Fixation& fx : fixations) {
        const Element* best = nullptr;
        auto it = by_page.find(fx.page_id);
        if (it != by_page.end()) {
            for (const Element* e : it->second) {
                if (!e->bbox.contains(fx.x, fx.y)) continue;
                if (best == nullptr) {
                    best = e;
                    continue;
                }
                // Smallest area, then highest z_order, then smallest id.
                double a = e->bbox.area();
                double b = best->bbox.area();
                if (a < b ||
                    (a == b && (e->z_order > best->z_order ||
                                (e->z_order == best->z_order && e->element_id < best->element_id)))) {
                    best = e;
                }
            }
        }
        if (best == nullptr) {
            ++local.misses;
            continue;
        }
        ++local.hits;
        events.push_back({fx.participant_id, fx.page_id, best->element_id, fx.onset_ms});
    }
    if (diagnostics != nullptr) {
        *diagnostics = local;
    }
    return events;
}

}  // namespace attnswap
