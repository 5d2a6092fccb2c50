#include "attnswap/evaluate.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "attnswap/error.hpp"
#include "attnswap/matrix_io.hpp"
#include "attnswap/rng.hpp"

namespace attnswap {

int median_fi(const PairedDataset& pairs, MedianBasis basis) {
    if (pairs.empty()) {
        fail(ErrorCode::EmptyDataset, "median_fi on an empty paired dataset");
    }
    std::vector<int> fis;
    fis.reserve(pairs.size());
    for (const PairRow& row : pairs) fis.push_back(row.fixation_index);
    if (basis == MedianBasis::DistinctFis) {
        std::sort(fis.begin(), fis.end());
        fis.erase(std::unique(fis.begin(), fis.end()), fis.end());
    } else {
        std::sort(fis.begin(), fis.end());
    }
    // Lower median for even counts.
    int median = fis[(fis.size() - 1) / 2];
    return std::max(median, 1);
}

MicroF1Result micro_f1_detailed(const std::vector<int>& true_fis,
                                const std::vector<int>& pred_fis, int max_fi) {
    if (true_fis.size() != pred_fis.size()) {
        fail(ErrorCode::LengthMismatch,
             "true (" + std::to_string(true_fis.size()) + ") and predicted (" +
                 std::to_string(pred_fis.size()) + ") label counts disagree");
    }
    if (true_fis.empty()) {
        fail(ErrorCode::EmptyInput, "micro_f1 needs at least one query");
    }

    struct Counts {
        int tp = 0;
        int fp = 0;
        int fn = 0;
    };
    std::map<int, Counts> per_class;
    for (std::size_t i = 0; i < true_fis.size(); ++i) {
        if (true_fis[i] == pred_fis[i]) {
            ++per_class[true_fis[i]].tp;
        } else {
            ++per_class[true_fis[i]].fn;
            ++per_class[pred_fis[i]].fp;
        }
    }

    // Micro aggregation runs over every observed class (stray predictions
    // included), so with one prediction per query it equals exact-match
    // accuracy.
    long total_tp = 0, total_fp = 0, total_fn = 0;
    for (const auto& [fi, counts] : per_class) {
        total_tp += counts.tp;
        total_fp += counts.fp;
        total_fn += counts.fn;
    }

    MicroF1Result result;
    result.n_queries = static_cast<int>(true_fis.size());
    double denom = static_cast<double>(2 * total_tp + total_fp + total_fn);
    result.micro_f1 = denom > 0.0 ? 2.0 * static_cast<double>(total_tp) / denom : 0.0;

    for (int fi = 1; fi <= max_fi; ++fi) {
        Counts counts;
        if (auto it = per_class.find(fi); it != per_class.end()) counts = it->second;
        PerFiStats stats;
        stats.fi = fi;
        stats.support = counts.tp + counts.fn;
        stats.predicted = counts.tp + counts.fp;
        stats.correct = counts.tp;
        stats.precision = stats.predicted > 0 ? static_cast<double>(counts.tp) / stats.predicted : 0.0;
        stats.recall = stats.support > 0 ? static_cast<double>(counts.tp) / stats.support : 0.0;
        stats.f1 = stats.precision + stats.recall > 0.0
                       ? 2.0 * stats.precision * stats.recall / (stats.precision + stats.recall)
                       : 0.0;
        result.per_fi.push_back(stats);
    }
    return result;
}

double micro_f1(const std::vector<int>& true_fis, const std::vector<int>& pred_fis, int max_fi) {
    return micro_f1_detailed(true_fis, pred_fis, max_fi).micro_f1;
}

MicroF1Result score_queries(const CcaModel& model, const RetrievalIndex& index,
                            const std::vector<QueryCase>& queries, int max_fi, QuerySpace space,
                            bool same_page_only) {
    // Page-restricted candidate sets, built on demand.
    std::map<std::string, RetrievalIndex> per_page;
    auto page_index = [&](const std::string& page_id) -> const RetrievalIndex& {
        auto it = per_page.find(page_id);
        if (it != per_page.end()) return it->second;
        RetrievalIndex sub;
        for (std::size_t i = 0; i < index.refs.size(); ++i) {
            if (index.refs[i].page_id == page_id) sub.refs.push_back(index.refs[i]);
        }
        sub.z_text.resize(static_cast<Eigen::Index>(sub.refs.size()), index.z_text.cols());
        Eigen::Index at = 0;
        for (std::size_t i = 0; i < index.refs.size(); ++i) {
            if (index.refs[i].page_id == page_id) {
                sub.z_text.row(at++) = index.z_text.row(static_cast<Eigen::Index>(i));
            }
        }
        return per_page.emplace(page_id, std::move(sub)).first->second;
    };

    std::vector<int> true_fis;
    std::vector<int> pred_fis;
    for (const QueryCase& query : queries) {
        if (query.true_fi > max_fi) continue;
        const RetrievalIndex& candidates = same_page_only ? page_index(query.page_id) : index;
        if (candidates.refs.empty()) continue;  // page without candidate texts
        RankedResult top = nearest_text(model, candidates, query.image_features, 1, space);
        true_fis.push_back(query.true_fi);
        pred_fis.push_back(top.front().ref.fixation_index);
    }
    if (true_fis.empty()) {
        MicroF1Result empty;
        empty.n_queries = 0;
        return empty;
    }
    return micro_f1_detailed(true_fis, pred_fis, max_fi);
}

namespace {

// Stratified fold ids: pages sorted by id, each page's rows shuffled with a
// page-specific stream and dealt round-robin.
std::vector<int> assign_folds(const PairedDataset& rows, const EvalOptions& options) {
    std::map<std::string, std::vector<std::size_t>> by_page;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        by_page[rows[i].page_id].push_back(i);
    }
    std::vector<int> fold_of(rows.size(), 0);
    if (options.protocol == Protocol::LeaveOnePageOut) {
        int page_rank = 0;
        for (const auto& [page_id, indices] : by_page) {
            for (std::size_t i : indices) fold_of[i] = page_rank;
            ++page_rank;
        }
        return fold_of;
    }
    for (const auto& [page_id, indices] : by_page) {
        std::vector<std::size_t> shuffled = indices;
        CounterRng rng(options.seed, fnv1a64(page_id));
        for (std::size_t i = shuffled.size(); i > 1; --i) {
            std::size_t j = rng.next_below(i);
            std::swap(shuffled[i - 1], shuffled[j]);
        }
        for (std::size_t pos = 0; pos < shuffled.size(); ++pos) {
            fold_of[shuffled[pos]] = static_cast<int>(pos % options.folds);
        }
    }
    return fold_of;
}

}  // namespace

EvaluationReport evaluate_retrieval(const PairedFeatures& data, const EvalOptions& options) {
    if (data.rows.empty()) {
        fail(ErrorCode::EmptyDataset, "evaluate_retrieval on an empty paired dataset");
    }
    if (options.protocol == Protocol::KFold && options.folds < 2) {
        fail(ErrorCode::InvalidArgument, "k-fold evaluation needs folds >= 2");
    }

    const Eigen::Index n = data.text.rows();
    const Eigen::Index p_t = data.text.cols();
    const Eigen::Index p_i = data.image.cols();
    int median = median_fi(data.rows, options.median_basis);

    std::vector<int> fold_of = assign_folds(data.rows, options);
    int fold_count = *std::max_element(fold_of.begin(), fold_of.end()) + 1;

    EvaluationReport report;
    report.median_fi = median;
    report.d_requested = options.d;
    report.lambda = options.lambda;
    report.folds = fold_count;

    // rho summary from a fit on the full dataset
    int d_full = static_cast<int>(std::min<Eigen::Index>(options.d, std::min({p_t, p_i, n - 1})));
    d_full = std::max(d_full, 1);
    CcaModel full_model = fit(data.text, data.image, {d_full, options.lambda, CrossMap::Identity});
    report.d = d_full;
    report.leading_rho = full_model.rho[0];
    report.mean_rho = full_model.rho.mean();

    std::map<int, PerFiStats> pooled;
    for (int fold = 0; fold < fold_count; ++fold) {
        std::vector<std::size_t> train_rows, test_rows;
        for (std::size_t i = 0; i < data.rows.size(); ++i) {
            (fold_of[i] == fold ? test_rows : train_rows).push_back(i);
        }
        if (train_rows.size() < 2 || test_rows.empty()) continue;

        Eigen::MatrixXd train_text(train_rows.size(), p_t);
        Eigen::MatrixXd train_image(train_rows.size(), p_i);
        std::vector<IndexEntry> refs;
        refs.reserve(train_rows.size());
        for (std::size_t r = 0; r < train_rows.size(); ++r) {
            const PairRow& row = data.rows[train_rows[r]];
            train_text.row(static_cast<Eigen::Index>(r)) =
                data.text.row(static_cast<Eigen::Index>(train_rows[r]));
            train_image.row(static_cast<Eigen::Index>(r)) =
                data.image.row(static_cast<Eigen::Index>(train_rows[r]));
            refs.push_back({row.text_element_id, row.page_id, row.participant_id,
                            row.fixation_index});
        }

        int d_fold = static_cast<int>(std::min<Eigen::Index>(
            options.d, std::min({p_t, p_i, static_cast<Eigen::Index>(train_rows.size()) - 1})));
        d_fold = std::max(d_fold, 1);
        CcaModel model = fit(train_text, train_image, {d_fold, options.lambda, CrossMap::Identity});
        RetrievalIndex index = build_index(model, train_text, std::move(refs));

        std::vector<QueryCase> queries;
        queries.reserve(test_rows.size());
        for (std::size_t i : test_rows) {
            queries.push_back({data.image.row(static_cast<Eigen::Index>(i)).transpose(),
                               data.rows[i].fixation_index, data.rows[i].page_id});
        }
        MicroF1Result fold_result =
            score_queries(model, index, queries, median, options.space, options.same_page_only);
        if (fold_result.n_queries == 0) continue;

        report.fold_micro_f1.push_back(fold_result.micro_f1);
        report.n_queries += fold_result.n_queries;
        for (const PerFiStats& stats : fold_result.per_fi) {
            PerFiStats& agg = pooled[stats.fi];
            agg.fi = stats.fi;
            agg.support += stats.support;
            agg.predicted += stats.predicted;
            agg.correct += stats.correct;
        }
    }

    if (report.fold_micro_f1.empty()) {
        fail(ErrorCode::EmptyInput,
             "no fold produced any query at or below the median fixation index");
    }
    double sum = 0.0;
    for (double f1 : report.fold_micro_f1) sum += f1;
    report.micro_f1 = sum / static_cast<double>(report.fold_micro_f1.size());

    for (auto& [fi, stats] : pooled) {
        stats.precision = stats.predicted > 0
                              ? static_cast<double>(stats.correct) / stats.predicted
                              : 0.0;
        stats.recall = stats.support > 0 ? static_cast<double>(stats.correct) / stats.support : 0.0;
        stats.f1 = stats.precision + stats.recall > 0.0
                       ? 2.0 * stats.precision * stats.recall / (stats.precision + stats.recall)
                       : 0.0;
        report.per_fi.push_back(stats);
    }
    return report;
}

}  // namespace attnswap
