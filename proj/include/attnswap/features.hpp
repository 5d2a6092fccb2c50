#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "attnswap/manifest.hpp"
#include "attnswap/pairing.hpp"
#include "attnswap/raster.hpp"
#include "attnswap/types.hpp"

namespace attnswap {

constexpr int kTextFeatureCount = 70;
constexpr int kImageFeatureCount = 91;
constexpr int kIntrinsicFeatureCount = 43;

// (dist_top, dist_left, dist_right, dist_bottom, area) in px / px^2.
std::array<double, 5> positional_features(const BBox& bbox, const Viewport& viewport);

// Assembles the 70-vector in manifest order; missing attributes take manifest
// defaults, malformed ones raise UnparsableAttribute.
Eigen::VectorXd extract_text_features(const Element& element, const Viewport& viewport,
                                      const FeatureManifest& manifest);

// Eight uniform bins over 0..255 (bin b covers [32b, 32b+31]), normalized by
// pixel count so the bins sum to 1. Raises EmptyInput on an empty channel.
std::array<double, 8> histogram8(const std::vector<std::uint8_t>& channel);

// 43 order-free statistics of one raster:
//   [hist8(R), hist8(G), hist8(B), hist8(gray)]                (32)
//   [brightness, luminance, mean_hue, mean_saturation, mean_value]  (5)
//   [mean R, mean G, mean B, var R, var G, var B]               (6)
// gray is per-pixel Rec.601 luminance rounded to nearest integer; hue is the
// circular mean in degrees [0, 360); variance divides by n.
Eigen::VectorXd intrinsic_image_features(const Raster& pixels);

// positional(5) ++ intrinsic(element)(43) ++ (intrinsic(element) - intrinsic(page))(43).
Eigen::VectorXd extract_image_features(const Raster& element_raster, const Raster& page_raster,
                                       const BBox& bbox, const Viewport& viewport);

struct Standardization {
    Eigen::VectorXd means;
    Eigen::VectorXd stds;  // population std; 0 recorded for constant columns

    // (x - mean) / std, with a constant column scaled by 1.
    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
    Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
};

struct StandardizedMatrix {
    Eigen::MatrixXd z;
    Standardization stats;
};

// Column-wise standardization (ddof = 0). Raises TooFewRows for n < 2.
StandardizedMatrix standardize(const Eigen::MatrixXd& x);

// Feature assembly over a corpus, with per-element and per-page caching.
class FeatureExtractor {
public:
    FeatureExtractor(const Corpus& corpus, FeatureManifest manifest);

    Eigen::VectorXd text_features(const Element& element);
    Eigen::VectorXd image_features(const Element& element);
    const FeatureManifest& manifest() const { return manifest_; }

private:
    const Corpus& corpus_;
    FeatureManifest manifest_;
    std::map<std::string, Eigen::VectorXd> element_cache_;
    std::map<std::string, Eigen::VectorXd> page_intrinsic_cache_;

    const Eigen::VectorXd& page_intrinsic(const std::string& page_id);
};

// Pair rows joined with their feature vectors: text is n x 70, image n x 91,
// rows[i] describes row i of both matrices.
struct PairedFeatures {
    Eigen::MatrixXd text;
    Eigen::MatrixXd image;
    PairedDataset rows;
};

PairedFeatures extract_paired_features(const Corpus& corpus, const PairedDataset& pairs,
                                       const FeatureManifest& manifest);

}  // namespace attnswap
