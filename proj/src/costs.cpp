#include "attnswap/costs.hpp"

#include <cmath>
#include <filesystem>
#include <map>

#include "attnswap/error.hpp"

namespace fs = std::filesystem;

namespace attnswap {

double screen_text_cost_kB(const CostParams& params) {
    double area = static_cast<double>(params.viewport.width_px) * params.viewport.height_px;
    double chars = std::floor(area / (static_cast<double>(params.font_px) * params.font_px));
    double bytes = chars * (params.bytes_per_char + params.formatting_bytes_per_char);
    return bytes / params.kilo;
}

double saving_pct(double replaced_cost_kB, double text_cost_kB) {
    if (text_cost_kB <= 0.0) {
        fail(ErrorCode::ZeroTextCost, "saving_pct needs text_cost_kB > 0");
    }
    return (replaced_cost_kB - text_cost_kB) * 100.0 / text_cost_kB;
}

double achieved_saving_pct(double avg_page_image_cost_kB, double micro_f1, double text_cost_kB) {
    if (micro_f1 < 0.0 || micro_f1 > 1.0) {
        fail(ErrorCode::InvalidArgument, "micro_f1 must be in [0, 1]");
    }
    return saving_pct(avg_page_image_cost_kB * micro_f1, text_cost_kB);
}

double render_time_s(double cost_kB, double bandwidth_kbps) {
    if (bandwidth_kbps <= 0.0) {
        fail(ErrorCode::ZeroBandwidth, "render_time_s needs bandwidth_kbps > 0");
    }
    return cost_kB * 8.0 / bandwidth_kbps;
}

CorpusImageCosts corpus_image_costs(const Corpus& corpus) {
    constexpr double kKilo = 1024.0;
    CorpusImageCosts costs;
    std::map<std::string, PageImageCost> per_page;
    for (const Page& page : corpus.pages) {
        per_page[page.page_id].page_id = page.page_id;
    }
    for (const Element& element : corpus.elements) {
        if (element.modality != Modality::Image) continue;
        fs::path path = fs::path(corpus.root) / element.raster_ref;
        std::error_code ec;
        std::uintmax_t bytes = fs::file_size(path, ec);
        if (ec) {
            fail(ErrorCode::UnreadableRaster,
                 path.string() + ": " + ec.message() + " (element \"" + element.element_id + "\")");
        }
        double kB = static_cast<double>(bytes) / kKilo;
        costs.total_kB += kB;
        ++costs.image_count;
        PageImageCost& page = per_page[element.page_id];
        page.image_kB += kB;
        ++page.image_count;
    }
    costs.mean_per_image_kB = costs.image_count > 0 ? costs.total_kB / costs.image_count : 0.0;
    costs.mean_per_page_kB =
        corpus.pages.empty() ? 0.0 : costs.total_kB / static_cast<double>(corpus.pages.size());
    for (const auto& [page_id, page] : per_page) {
        costs.per_page.push_back(page);
    }
    return costs;
}

CostReport build_cost_report(const Corpus& corpus, const CostParams& params, double micro_f1) {
    CostReport report;
    report.text_cost_kB = screen_text_cost_kB(params);
    report.images = corpus_image_costs(corpus);
    report.micro_f1_used = micro_f1;
    report.bandwidth_kbps = params.bandwidth_kbps;
    report.min_saving_pct = saving_pct(report.images.mean_per_image_kB, report.text_cost_kB);
    report.max_saving_pct = saving_pct(report.images.mean_per_page_kB, report.text_cost_kB);
    report.achieved_saving_pct =
        achieved_saving_pct(report.images.mean_per_page_kB, micro_f1, report.text_cost_kB);
    report.render_time_before_s =
        render_time_s(report.images.mean_per_page_kB * micro_f1, params.bandwidth_kbps);
    report.render_time_after_s = render_time_s(report.text_cost_kB, params.bandwidth_kbps);
    return report;
}

}  // namespace attnswap
