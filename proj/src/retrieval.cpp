#include "attnswap/retrieval.hpp"

#include <algorithm>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "attnswap/error.hpp"
#include "attnswap/matrix_io.hpp"
#include "attnswap/version.hpp"

using nlohmann::json;

namespace attnswap {

RetrievalIndex build_index(const CcaModel& model, const Eigen::MatrixXd& raw_text_features,
                           std::vector<IndexEntry> refs) {
    if (static_cast<std::size_t>(raw_text_features.rows()) != refs.size()) {
        fail(ErrorCode::RowCountMismatch,
             "feature rows (" + std::to_string(raw_text_features.rows()) +
                 ") and refs (" + std::to_string(refs.size()) + ") disagree");
    }
    RetrievalIndex index;
    index.z_text = model.text_stats.apply(raw_text_features);
    index.refs = std::move(refs);
    return index;
}

Eigen::VectorXd back_project_to_text(const CcaModel& model,
                                     const Eigen::VectorXd& raw_image_features) {
    Eigen::VectorXd z_q = model.image_stats.apply(raw_image_features);
    Eigen::VectorXd subspace = model.cross_map * (model.p_image.transpose() * z_q);
    // Minimum-norm solution of P_T^T t = subspace; P_T has full column rank,
    // so pinv(P_T^T) = P_T (P_T^T P_T)^{-1}.
    Eigen::MatrixXd gram = model.p_text.transpose() * model.p_text;
    return model.p_text * gram.ldlt().solve(subspace);
}

namespace {

RankedResult rank_rows(const RetrievalIndex& index, const Eigen::MatrixXd& candidates,
                       const Eigen::VectorXd& target, int k) {
    std::vector<std::size_t> order(index.refs.size());
    std::vector<double> distance(index.refs.size());
    for (std::size_t i = 0; i < index.refs.size(); ++i) {
        order[i] = i;
        distance[i] = (candidates.row(static_cast<Eigen::Index>(i)).transpose() - target).norm();
    }
    auto closer = [&](std::size_t lhs, std::size_t rhs) {
        if (distance[lhs] != distance[rhs]) return distance[lhs] < distance[rhs];
        return std::tie(index.refs[lhs].element_id, index.refs[lhs].page_id,
                        index.refs[lhs].participant_id, index.refs[lhs].fixation_index) <
               std::tie(index.refs[rhs].element_id, index.refs[rhs].page_id,
                        index.refs[rhs].participant_id, index.refs[rhs].fixation_index);
    };
    std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(k), order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep),
                      order.end(), closer);

    RankedResult result;
    result.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) {
        result.push_back({index.refs[order[i]], distance[order[i]]});
    }
    return result;
}

}  // namespace

RankedResult nearest_text(const CcaModel& model, const RetrievalIndex& index,
                          const Eigen::VectorXd& raw_image_query, int k, QuerySpace space) {
    if (index.refs.empty()) {
        fail(ErrorCode::EmptyIndex, "nearest_text on an empty index");
    }
    if (k < 1) {
        fail(ErrorCode::InvalidArgument, "k must be >= 1");
    }
    if (space == QuerySpace::TextSpace) {
        Eigen::VectorXd t_hat = back_project_to_text(model, raw_image_query);
        return rank_rows(index, index.z_text, t_hat, k);
    }
    // Subspace mode compares d-dimensional coordinates on both sides.
    Eigen::VectorXd z_q = model.image_stats.apply(raw_image_query);
    Eigen::VectorXd target = model.cross_map * (model.p_image.transpose() * z_q);
    Eigen::MatrixXd candidates = index.z_text * model.p_text;
    return rank_rows(index, candidates, target, k);
}

std::vector<RankedResult> nearest_text_batch(const CcaModel& model, const RetrievalIndex& index,
                                             const Eigen::MatrixXd& raw_image_queries, int k,
                                             QuerySpace space) {
    std::vector<RankedResult> results(static_cast<std::size_t>(raw_image_queries.rows()));
    unsigned workers = std::min<unsigned>(std::thread::hardware_concurrency(),
                                          static_cast<unsigned>(results.size()));
    if (workers <= 1) {
        for (Eigen::Index q = 0; q < raw_image_queries.rows(); ++q) {
            results[static_cast<std::size_t>(q)] =
                nearest_text(model, index, raw_image_queries.row(q).transpose(), k, space);
        }
        return results;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (std::size_t q = w; q < results.size(); q += workers) {
                results[q] = nearest_text(
                    model, index, raw_image_queries.row(static_cast<Eigen::Index>(q)).transpose(),
                    k, space);
            }
        });
    }
    for (std::thread& t : pool) t.join();
    return results;
}

void save_index(const RetrievalIndex& index, const std::string& path, std::uint64_t config_hash) {
    Container container;
    container.config_hash = config_hash;
    container.tool_version = kToolVersion;
    container.matrices.push_back({"z_text", index.z_text});

    json refs = json::array();
    for (const IndexEntry& ref : index.refs) {
        refs.push_back({{"element_id", ref.element_id},
                        {"page_id", ref.page_id},
                        {"participant_id", ref.participant_id},
                        {"fixation_index", ref.fixation_index}});
    }
    container.blobs.push_back({"refs", refs.dump()});
    save_container(container, path);
}

RetrievalIndex load_index(const std::string& path) {
    Container container = load_container(path);
    const MatrixSection* z_text = container.find_matrix("z_text");
    const JsonSection* refs_blob = container.find_blob("refs");
    if (z_text == nullptr || refs_blob == nullptr) {
        fail(ErrorCode::SchemaViolation, path + ": missing index sections");
    }
    RetrievalIndex index;
    index.z_text = z_text->matrix;
    json refs = json::parse(refs_blob->payload);
    for (const json& rec : refs) {
        index.refs.push_back({rec.at("element_id").get<std::string>(),
                              rec.at("page_id").get<std::string>(),
                              rec.at("participant_id").get<std::string>(),
                              rec.at("fixation_index").get<int>()});
    }
    if (static_cast<std::size_t>(index.z_text.rows()) != index.refs.size()) {
        fail(ErrorCode::SchemaViolation, path + ": row/ref count mismatch");
    }
    return index;
}

}  // namespace attnswap
