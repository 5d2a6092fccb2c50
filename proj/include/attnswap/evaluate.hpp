#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "attnswap/retrieval.hpp"

namespace attnswap {

enum class Protocol { KFold, LeaveOnePageOut };
enum class MedianBasis { Pairs, DistinctFis };

// Lower median of the pair fixation indices, clamped to >= 1.
int median_fi(const PairedDataset& pairs, MedianBasis basis = MedianBasis::Pairs);

struct PerFiStats {
    int fi = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    int support = 0;    // queries with this true FI
    int predicted = 0;  // queries assigned this FI
    int correct = 0;    // queries with both
};

struct MicroF1Result {
    double micro_f1 = 0.0;
    std::vector<PerFiStats> per_fi;  // classes 1..max_fi
    int n_queries = 0;
};

// Micro-averaged F1 over FI classes. Every query carries exactly one
// prediction, so the micro average equals exact-match accuracy; stray
// predictions outside 1..max_fi still count as false positives of their own
// class to keep that identity. Queries with true FI > max_fi must be
// excluded by the caller.
double micro_f1(const std::vector<int>& true_fis, const std::vector<int>& pred_fis, int max_fi);
MicroF1Result micro_f1_detailed(const std::vector<int>& true_fis,
                                const std::vector<int>& pred_fis, int max_fi);

struct QueryCase {
    Eigen::VectorXd image_features;  // raw 91-vector
    int true_fi = 0;
    std::string page_id;
};

// Scores top-1 retrieval: predicted FI = retrieved text's FI, restricted to
// queries with true_fi <= max_fi. same_page_only narrows candidates to the
// query's page.
MicroF1Result score_queries(const CcaModel& model, const RetrievalIndex& index,
                            const std::vector<QueryCase>& queries, int max_fi,
                            QuerySpace space = QuerySpace::TextSpace,
                            bool same_page_only = false);

struct EvalOptions {
    int d = kDefaultSubspaceDim;  // clamped per fold to min(p_T, p_I, n_train - 1)
    double lambda = kDefaultRidgeLambda;
    int folds = 5;
    Protocol protocol = Protocol::KFold;
    QuerySpace space = QuerySpace::TextSpace;
    bool same_page_only = false;
    MedianBasis median_basis = MedianBasis::Pairs;
    std::uint64_t seed = 0;
};

struct EvaluationReport {
    double micro_f1 = 0.0;  // mean over folds
    std::vector<double> fold_micro_f1;
    std::vector<PerFiStats> per_fi;  // pooled over folds
    int median_fi = 0;
    int n_queries = 0;
    double leading_rho = 0.0;
    double mean_rho = 0.0;
    int d = 0;
    int d_requested = 0;
    double lambda = 0.0;
    int folds = 0;
};

// Cross-validated retrieval scoring over paired features. KFold stratifies
// the fold assignment by page with a seeded shuffle; LeaveOnePageOut makes
// one fold per page. The rho summary comes from a fit on all pairs.
EvaluationReport evaluate_retrieval(const PairedFeatures& data, const EvalOptions& options);

}  // namespace attnswap
