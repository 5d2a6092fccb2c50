#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "attnswap/cca.hpp"

namespace attnswap {

struct IndexEntry {
    std::string element_id;
    std::string page_id;
    std::string participant_id;
    int fixation_index = 0;
};

struct RetrievalIndex {
    Eigen::MatrixXd z_text;  // n x p_T, standardized with the model's text stats
    std::vector<IndexEntry> refs;

    std::size_t size() const { return refs.size(); }
};

RetrievalIndex build_index(const CcaModel& model, const Eigen::MatrixXd& raw_text_features,
                           std::vector<IndexEntry> refs);

// t_hat = pinv(P_T^T) * P * (P_I^T z_q): the minimum-norm text-space preimage
// of the query's subspace coordinates.
Eigen::VectorXd back_project_to_text(const CcaModel& model,
                                     const Eigen::VectorXd& raw_image_features);

enum class QuerySpace { TextSpace, Subspace };

struct RankedHit {
    IndexEntry ref;
    double distance = 0.0;
};

using RankedResult = std::vector<RankedHit>;

// Exact linear scan. TextSpace ranks by Euclidean distance between t_hat and
// each index row; Subspace ranks between P * P_I^T z_q and P_T^T z_t.
// Distance ties resolve by lexicographic element_id.
RankedResult nearest_text(const CcaModel& model, const RetrievalIndex& index,
                          const Eigen::VectorXd& raw_image_query, int k,
                          QuerySpace space = QuerySpace::TextSpace);

std::vector<RankedResult> nearest_text_batch(const CcaModel& model, const RetrievalIndex& index,
                                             const Eigen::MatrixXd& raw_image_queries, int k,
                                             QuerySpace space = QuerySpace::TextSpace);

void save_index(const RetrievalIndex& index, const std::string& path,
                std::uint64_t config_hash = 0);
RetrievalIndex load_index(const std::string& path);

}  // namespace attnswap
