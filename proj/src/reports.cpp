#include "attnswap/reports.hpp"

using nlohmann::json;

namespace attnswap {

json reference_study_json() {
    return {
        {"note",
         "figures reported by the original eye-tracking study; they depend on its "
         "proprietary webpage set and gaze data and are recorded for comparison only"},
        {"pages", ReferenceStudy::pages},
        {"participants", ReferenceStudy::participants},
        {"n_pairs", ReferenceStudy::n_pairs},
        {"subspace_dim", ReferenceStudy::subspace_dim},
        {"leading_rho", ReferenceStudy::leading_rho},
        {"micro_f1", ReferenceStudy::micro_f1},
        {"images", ReferenceStudy::images},
        {"total_image_kB", ReferenceStudy::total_image_kB},
        {"mean_image_kB", ReferenceStudy::mean_image_kB},
        {"mean_page_image_kB", ReferenceStudy::mean_page_image_kB},
        {"text_cost_kB", ReferenceStudy::text_cost_kB},
    };
}

json evaluation_report_to_json(const EvaluationReport& report) {
    json per_fi = json::array();
    for (const PerFiStats& stats : report.per_fi) {
        per_fi.push_back({{"fi", stats.fi},
                          {"precision", stats.precision},
                          {"recall", stats.recall},
                          {"f1", stats.f1},
                          {"support", stats.support},
                          {"predicted", stats.predicted},
                          {"correct", stats.correct}});
    }
    return {
        {"micro_f1", report.micro_f1},
        {"fold_micro_f1", report.fold_micro_f1},
        {"per_fi", per_fi},
        {"median_fi", report.median_fi},
        {"n_queries", report.n_queries},
        {"leading_rho", report.leading_rho},
        {"mean_rho", report.mean_rho},
        {"d", report.d},
        {"d_requested", report.d_requested},
        {"lambda", report.lambda},
        {"folds", report.folds},
        {"reference_study", reference_study_json()},
    };
}

json cost_report_to_json(const CostReport& report) {
    json per_page = json::array();
    for (const PageImageCost& page : report.images.per_page) {
        per_page.push_back({{"page_id", page.page_id},
                            {"image_count", page.image_count},
                            {"image_kB", page.image_kB}});
    }
    return {
        {"text_cost_kB", report.text_cost_kB},
        {"image_total_kB", report.images.total_kB},
        {"image_count", report.images.image_count},
        {"mean_image_kB", report.images.mean_per_image_kB},
        {"mean_page_image_kB", report.images.mean_per_page_kB},
        {"per_page", per_page},
        {"micro_f1_used", report.micro_f1_used},
        {"min_saving_pct", report.min_saving_pct},
        {"max_saving_pct", report.max_saving_pct},
        {"achieved_saving_pct", report.achieved_saving_pct},
        {"render_time_before_s", report.render_time_before_s},
        {"render_time_after_s", report.render_time_after_s},
        {"bandwidth_kbps", report.bandwidth_kbps},
        {"reference_study", reference_study_json()},
    };
}

}  // namespace attnswap
