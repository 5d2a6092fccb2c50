#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>

#include "attnswap/features.hpp"

namespace attnswap {

constexpr int kDefaultSubspaceDim = 28;
constexpr double kDefaultRidgeLambda = 1e-4;

struct CovarianceSet {
    Eigen::MatrixXd sigma_tt;  // p_T x p_T, ridge-regularized
    Eigen::MatrixXd sigma_ii;  // p_I x p_I, ridge-regularized
    Eigen::MatrixXd sigma_ti;  // p_T x p_I
};

// Sigma_AB = (1/n) Z_A^T Z_B on centered inputs, then each auto-covariance
// gets lambda * trace/p added to its diagonal.
CovarianceSet covariances(const Eigen::MatrixXd& z_text, const Eigen::MatrixXd& z_image,
                          double lambda);

enum class CrossMap { Identity, DiagRho };

struct FitOptions {
    int d = kDefaultSubspaceDim;
    double lambda = kDefaultRidgeLambda;
    CrossMap cross_map = CrossMap::Identity;
};

struct CcaModel {
    int d = 0;
    double lambda = 0.0;
    Standardization text_stats;
    Standardization image_stats;
    Eigen::MatrixXd p_text;     // p_T x d, columns Sigma_TT-orthonormal
    Eigen::MatrixXd p_image;    // p_I x d, columns Sigma_II-orthonormal
    Eigen::MatrixXd cross_map;  // d x d map from image-side to text-side coordinates
    Eigen::VectorXd rho;        // canonical correlations, descending in [0, 1]

    int text_dim() const { return static_cast<int>(p_text.rows()); }
    int image_dim() const { return static_cast<int>(p_image.rows()); }
};

// Fits the correlated subspace on raw (unstandardized) paired feature
// matrices. Standardizes internally and keeps the stats in the model.
// Directions come from the SVD of Sigma_TT^{-1/2} Sigma_TI Sigma_II^{-1/2},
// de-whitened by Sigma^{-1/2} on each side; signs are fixed so the leading
// entry of each text direction is positive and the per-component training
// correlation is nonnegative.
CcaModel fit(const Eigen::MatrixXd& text, const Eigen::MatrixXd& image,
             const FitOptions& options = {});

// P_T^T z_t / P_I^T z_i on the standardized input; raw features are
// standardized with the model's stored stats first.
Eigen::VectorXd project_text(const CcaModel& model, const Eigen::VectorXd& text_features);
Eigen::VectorXd project_image(const CcaModel& model, const Eigen::VectorXd& image_features);

inline const Eigen::VectorXd& canonical_correlations(const CcaModel& model) {
    return model.rho;
}

// Keeps the leading d components; d must not exceed model.d.
CcaModel truncate_model(const CcaModel& model, int d);

// Largest d with rho[d-1] >= threshold, at least 1.
int auto_select_d(const Eigen::VectorXd& rho, double threshold = 0.1);

// Single little-endian binary file; a human-readable rho summary is written
// next to it as <path>.json.
void save_cca_model(const CcaModel& model, const std::string& path,
                    std::uint64_t config_hash = 0);
CcaModel load_cca_model(const std::string& path);

}  // namespace attnswap
