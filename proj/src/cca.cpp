#include "attnswap/cca.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "attnswap/error.hpp"
#include "attnswap/matrix_io.hpp"
#include "attnswap/version.hpp"

using nlohmann::json;

namespace attnswap {

namespace {

constexpr double kEigClampFloor = 1e-12;
constexpr double kSingularRelTol = 1e-10;

// Symmetric inverse square root with eigenvalue clamping. Raises
// SingularCovariance when the matrix is numerically rank-deficient.
Eigen::MatrixXd inverse_sqrt(const Eigen::MatrixXd& sigma, const char* label) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sigma);
    if (solver.info() != Eigen::Success) {
        fail(ErrorCode::SingularCovariance, std::string(label) + ": eigendecomposition failed");
    }
    const Eigen::VectorXd& eig = solver.eigenvalues();
    double max_eig = eig.maxCoeff();
    if (eig.minCoeff() <= kSingularRelTol * std::max(max_eig, 1.0)) {
        fail(ErrorCode::SingularCovariance,
             std::string(label) + " is singular; refit with lambda > 0");
    }
    Eigen::VectorXd inv_sqrt_eig(eig.size());
    for (Eigen::Index i = 0; i < eig.size(); ++i) {
        inv_sqrt_eig[i] = 1.0 / std::sqrt(std::max(eig[i], kEigClampFloor));
    }
    return solver.eigenvectors() * inv_sqrt_eig.asDiagonal() *
           solver.eigenvectors().transpose();
}

}  // namespace

CovarianceSet covariances(const Eigen::MatrixXd& z_text, const Eigen::MatrixXd& z_image,
                          double lambda) {
    if (z_text.rows() != z_image.rows()) {
        fail(ErrorCode::RowCountMismatch,
             "paired matrices disagree: " + std::to_string(z_text.rows()) + " vs " +
                 std::to_string(z_image.rows()) + " rows");
    }
    if (z_text.rows() < 2) {
        fail(ErrorCode::TooFewRows, "covariances need at least 2 rows");
    }
    if (lambda < 0.0) {
        fail(ErrorCode::InvalidArgument, "lambda must be >= 0");
    }
    const double inv_n = 1.0 / static_cast<double>(z_text.rows());
    CovarianceSet cov;
    cov.sigma_tt = z_text.transpose() * z_text * inv_n;
    cov.sigma_ii = z_image.transpose() * z_image * inv_n;
    cov.sigma_ti = z_text.transpose() * z_image * inv_n;
    if (lambda > 0.0) {
        double scale_t = cov.sigma_tt.trace() / static_cast<double>(cov.sigma_tt.rows());
        double scale_i = cov.sigma_ii.trace() / static_cast<double>(cov.sigma_ii.rows());
        cov.sigma_tt.diagonal().array() += lambda * scale_t;
        cov.sigma_ii.diagonal().array() += lambda * scale_i;
    }
    return cov;
}

CcaModel fit(const Eigen::MatrixXd& text, const Eigen::MatrixXd& image,
             const FitOptions& options) {
    const Eigen::Index n = text.rows();
    const Eigen::Index p_t = text.cols();
    const Eigen::Index p_i = image.cols();
    if (n != image.rows()) {
        fail(ErrorCode::RowCountMismatch,
             "paired matrices disagree: " + std::to_string(n) + " vs " +
                 std::to_string(image.rows()) + " rows");
    }
    if (n < 2) {
        fail(ErrorCode::TooFewRows, "fit needs at least 2 paired rows");
    }
    Eigen::Index max_d = std::min({p_t, p_i, n - 1});
    if (options.d < 1 || options.d > max_d) {
        fail(ErrorCode::DimensionTooLarge,
             "d must be in [1, " + std::to_string(max_d) + "], got " + std::to_string(options.d));
    }

    StandardizedMatrix z_t = standardize(text);
    StandardizedMatrix z_i = standardize(image);
    CovarianceSet cov = covariances(z_t.z, z_i.z, options.lambda);

    Eigen::MatrixXd white_t = inverse_sqrt(cov.sigma_tt, "Sigma_TT");
    Eigen::MatrixXd white_i = inverse_sqrt(cov.sigma_ii, "Sigma_II");

    // Whitened cross-covariance; its singular pairs are the canonical
    // directions of Sigma_TT^{-1/2} Sigma_TI Sigma_II^{-1} Sigma_IT Sigma_TT^{-1/2}
    // (and the mirrored image-side product), with jointly consistent columns
    // even when the spectrum has ties.
    Eigen::MatrixXd k = white_t * cov.sigma_ti * white_i;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(k, Eigen::ComputeThinU | Eigen::ComputeThinV);

    CcaModel model;
    model.d = options.d;
    model.lambda = options.lambda;
    model.text_stats = z_t.stats;
    model.image_stats = z_i.stats;
    model.rho.resize(options.d);
    model.p_text.resize(p_t, options.d);
    model.p_image.resize(p_i, options.d);
    for (int j = 0; j < options.d; ++j) {
        model.rho[j] = std::clamp(svd.singularValues()[j], 0.0, 1.0);
        Eigen::VectorXd a = white_t * svd.matrixU().col(j);
        Eigen::VectorXd b = white_i * svd.matrixV().col(j);
        // Canonical sign: leading entry of the text direction positive; the
        // image side flips with it so the training correlation stays >= 0.
        Eigen::Index lead;
        a.cwiseAbs().maxCoeff(&lead);
        if (a[lead] < 0.0) {
            a = -a;
            b = -b;
        }
        if ((z_t.z * a).dot(z_i.z * b) < 0.0) {
            b = -b;
        }
        model.p_text.col(j) = a;
        model.p_image.col(j) = b;
    }
    if (options.cross_map == CrossMap::Identity) {
        model.cross_map = Eigen::MatrixXd::Identity(options.d, options.d);
    } else {
        model.cross_map = model.rho.asDiagonal();
    }
    return model;
}

Eigen::VectorXd project_text(const CcaModel& model, const Eigen::VectorXd& text_features) {
    return model.p_text.transpose() * model.text_stats.apply(text_features);
}

Eigen::VectorXd project_image(const CcaModel& model, const Eigen::VectorXd& image_features) {
    return model.p_image.transpose() * model.image_stats.apply(image_features);
}

CcaModel truncate_model(const CcaModel& model, int d) {
    if (d < 1 || d > model.d) {
        fail(ErrorCode::DimensionTooLarge,
             "cannot truncate model of dimension " + std::to_string(model.d) + " to " +
                 std::to_string(d));
    }
    CcaModel out = model;
    out.d = d;
    out.rho = model.rho.head(d);
    out.p_text = model.p_text.leftCols(d);
    out.p_image = model.p_image.leftCols(d);
    out.cross_map = model.cross_map.topLeftCorner(d, d);
    return out;
}

int auto_select_d(const Eigen::VectorXd& rho, double threshold) {
    int d = 0;
    while (d < rho.size() && rho[d] >= threshold) ++d;
    return std::max(d, 1);
}

void save_cca_model(const CcaModel& model, const std::string& path, std::uint64_t config_hash) {
    Container container;
    container.config_hash = config_hash;
    container.tool_version = kToolVersion;
    container.matrices.push_back({"text_means", model.text_stats.means.transpose()});
    container.matrices.push_back({"text_stds", model.text_stats.stds.transpose()});
    container.matrices.push_back({"image_means", model.image_stats.means.transpose()});
    container.matrices.push_back({"image_stds", model.image_stats.stds.transpose()});
    container.matrices.push_back({"p_text", model.p_text});
    container.matrices.push_back({"p_image", model.p_image});
    container.matrices.push_back({"cross_map", model.cross_map});
    container.matrices.push_back({"rho", model.rho.transpose()});

    json meta;
    meta["d"] = model.d;
    meta["lambda"] = model.lambda;
    meta["text_dim"] = model.text_dim();
    meta["image_dim"] = model.image_dim();
    container.blobs.push_back({"meta", meta.dump()});
    save_container(container, path);

    json summary;
    summary["tool_version"] = kToolVersion;
    summary["d"] = model.d;
    summary["lambda"] = model.lambda;
    summary["rho"] = std::vector<double>(model.rho.data(), model.rho.data() + model.rho.size());
    summary["leading_rho"] = model.d > 0 ? model.rho[0] : 0.0;
    summary["mean_rho"] = model.d > 0 ? model.rho.mean() : 0.0;
    std::ofstream out(path + ".json");
    if (!out) fail(ErrorCode::IoFailure, path + ".json: cannot open for writing");
    out << summary.dump(2) << "\n";
}

CcaModel load_cca_model(const std::string& path) {
    Container container = load_container(path);
    const JsonSection* meta_blob = container.find_blob("meta");
    if (meta_blob == nullptr) {
        fail(ErrorCode::SchemaViolation, path + ": missing model metadata");
    }
    json meta = json::parse(meta_blob->payload);

    auto matrix = [&](const char* name) -> const Eigen::MatrixXd& {
        const MatrixSection* section = container.find_matrix(name);
        if (section == nullptr) {
            fail(ErrorCode::SchemaViolation, path + ": missing section \"" + name + "\"");
        }
        return section->matrix;
    };

    CcaModel model;
    model.d = meta.at("d").get<int>();
    model.lambda = meta.at("lambda").get<double>();
    model.text_stats.means = matrix("text_means").row(0).transpose();
    model.text_stats.stds = matrix("text_stds").row(0).transpose();
    model.image_stats.means = matrix("image_means").row(0).transpose();
    model.image_stats.stds = matrix("image_stds").row(0).transpose();
    model.p_text = matrix("p_text");
    model.p_image = matrix("p_image");
    model.cross_map = matrix("cross_map");
    model.rho = matrix("rho").row(0).transpose();
    return model;
}

}  // namespace attnswap
