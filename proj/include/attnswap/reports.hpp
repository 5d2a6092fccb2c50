#pragma once

#include <json.hpp>

#include "attnswap/costs.hpp"
#include "attnswap/evaluate.hpp"

namespace attnswap {

// Scale and outcome figures reported by the original eye-tracking study.
// They depend on its proprietary webpage set and gaze recordings, so the
// toolkit embeds them in reports for comparison instead of reproducing them.
struct ReferenceStudy {
    static constexpr int pages = 22;
    static constexpr int participants = 43;
    static constexpr int n_pairs = 14330;
    static constexpr int subspace_dim = 28;
    static constexpr double leading_rho = 0.9948;
    static constexpr double micro_f1 = 0.52;
    static constexpr int images = 139;
    static constexpr double total_image_kB = 8573.05;
    static constexpr double mean_image_kB = 61.68;
    static constexpr double mean_page_image_kB = 389.8;
    static constexpr double text_cost_kB = 33.64;
};

nlohmann::json reference_study_json();
nlohmann::json evaluation_report_to_json(const EvaluationReport& report);
nlohmann::json cost_report_to_json(const CostReport& report);

}  // namespace attnswap
