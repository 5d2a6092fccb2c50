#pragma once

#include <string>
#include <vector>

#include "attnswap/types.hpp"

namespace attnswap {

// 2016 per-user international bandwidth figures, in kilobits per second.
constexpr double kBandwidthLdcKbps = 6.0;
constexpr double kBandwidthDevelopingKbps = 53.0;
constexpr double kBandwidthDevelopedKbps = 140.0;

struct CostParams {
    Viewport viewport;                  // 1680 x 1050
    int font_px = 16;
    int bytes_per_char = 4;             // Unicode worst case
    int formatting_bytes_per_char = 1;  // markup overhead
    double kilo = 1024.0;               // bytes per kB
    double bandwidth_kbps = kBandwidthDevelopingKbps;
};

// Cost of a screen filled with text: floor(area / font_px^2) characters at
// (bytes_per_char + formatting_bytes_per_char) bytes each, reported in kB.
double screen_text_cost_kB(const CostParams& params);

// (replaced_cost - text_cost) * 100 / text_cost.
double saving_pct(double replaced_cost_kB, double text_cost_kB);

// (avg_page_image_cost * micro_f1 - text_cost) * 100 / text_cost.
double achieved_saving_pct(double avg_page_image_cost_kB, double micro_f1,
                           double text_cost_kB);

// Transfer seconds for cost_kB at bandwidth_kbps (kilobits per second).
double render_time_s(double cost_kB, double bandwidth_kbps);

struct PageImageCost {
    std::string page_id;
    int image_count = 0;
    double image_kB = 0.0;
};

struct CorpusImageCosts {
    double total_kB = 0.0;
    double mean_per_image_kB = 0.0;
    double mean_per_page_kB = 0.0;
    int image_count = 0;
    std::vector<PageImageCost> per_page;
};

// Sums on-disk raster byte sizes; raises UnreadableRaster when a file is
// missing or unreadable.
CorpusImageCosts corpus_image_costs(const Corpus& corpus);

struct CostReport {
    double text_cost_kB = 0.0;
    CorpusImageCosts images;
    double micro_f1_used = 0.0;
    double min_saving_pct = 0.0;       // single average image replaced
    double max_saving_pct = 0.0;       // page's worth of images replaced
    double achieved_saving_pct = 0.0;  // scaled by replacement micro-F1
    double render_time_before_s = 0.0;
    double render_time_after_s = 0.0;
    double bandwidth_kbps = 0.0;
};

CostReport build_cost_report(const Corpus& corpus, const CostParams& params, double micro_f1);

}  // namespace attnswap
