#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "attnswap/types.hpp"

namespace attnswap {

constexpr std::int64_t kDefaultMinFixationMs = 100;

struct HitTestDiagnostics {
    std::size_t hits = 0;
    std::size_t misses = 0;
};

// Loads pages.json, elements.json and fixations.json from root_path and
// validates every referential link (element -> page, fixation -> page,
// raster paths). Throws MissingFile, SchemaViolation or DanglingReference.
Corpus load_corpus(const std::string& root_path);

// Keeps fixations with duration_ms >= min_duration_ms, order preserved.
std::vector<Fixation> filter_fixations(const std::vector<Fixation>& samples,
                                       std::int64_t min_duration_ms = kDefaultMinFixationMs);

// Maps each fixation to the element whose bbox contains it on the same page.
// Rectangles are half-open; overlaps resolve to the smallest area, then the
// highest z_order, then the lexicographically smallest element_id. Fixations
// hitting nothing are dropped and counted in diagnostics.
std::vector<AttendedEvent> map_fixations_to_elements(
    const std::vector<Fixation>& fixations, const std::vector<Element>& elements,
    const Viewport& viewport, HitTestDiagnostics* diagnostics = nullptr);

}  // namespace attnswap
