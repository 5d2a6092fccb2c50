#include "attnswap/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>

#include "attnswap/css.hpp"
#include "attnswap/error.hpp"

namespace attnswap {

namespace {

constexpr double kPi = 3.14159265358979323846;

double rec601_luma(double r, double g, double b) {
    return 0.299 * r + 0.587 * g + 0.114 * b;
}

std::string lowercase_trimmed(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t\r\n");
    std::string out = s.substr(begin, end - begin + 1);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// hue of one pixel in [0, 360); 0 for achromatic pixels
double pixel_hue(double r, double g, double b) {
    double maxc = std::max({r, g, b});
    double minc = std::min({r, g, b});
    double delta = maxc - minc;
    if (delta <= 0.0) return 0.0;
    double h;
    if (maxc == r) {
        h = 60.0 * (g - b) / delta;
    } else if (maxc == g) {
        h = 60.0 * ((b - r) / delta + 2.0);
    } else {
        h = 60.0 * ((r - g) / delta + 4.0);
    }
    if (h < 0.0) h += 360.0;
    if (h >= 360.0) h -= 360.0;
    return h;
}

const std::string* find_attr(const Element& element, const std::string& name) {
    auto it = element.style_attrs.find(name);
    return it == element.style_attrs.end() ? nullptr : &it->second;
}

double space_component(const Element& element, const ManifestEntry& entry) {
    static const std::map<std::string, std::string> suffix = {{"space_top", "-top"},
                                                              {"space_left", "-left"},
                                                              {"space_right", "-right"},
                                                              {"space_bottom", "-bottom"}};
    const std::string longhand = entry.source_attr + suffix.at(entry.kind);
    if (const std::string* v = find_attr(element, longhand)) {
        return parse_css_length(longhand, *v);
    }
    if (const std::string* v = find_attr(element, entry.source_attr)) {
        BoxSides sides = parse_box_shorthand(entry.source_attr, *v);
        if (entry.kind == "space_top") return sides.top;
        if (entry.kind == "space_left") return sides.left;
        if (entry.kind == "space_right") return sides.right;
        return sides.bottom;
    }
    return entry.default_value;
}

double color_component(const Element& element, const ManifestEntry& entry) {
    const std::string* v = find_attr(element, entry.source_attr);
    if (v == nullptr) return entry.default_value;
    Rgba color = parse_css_color(entry.source_attr, *v);
    if (entry.kind == "color_r") return color.r;
    if (entry.kind == "color_g") return color.g;
    if (entry.kind == "color_b") return color.b;
    return color.a;
}

}  // namespace

std::array<double, 5> positional_features(const BBox& bbox, const Viewport& viewport) {
    // Clip to the viewport before measuring edge distances.
    double x0 = std::max(bbox.x, 0.0);
    double y0 = std::max(bbox.y, 0.0);
    double x1 = std::min(bbox.x + bbox.w, static_cast<double>(viewport.width_px));
    double y1 = std::min(bbox.y + bbox.h, static_cast<double>(viewport.height_px));
    double w = std::max(x1 - x0, 0.0);
    double h = std::max(y1 - y0, 0.0);
    return {y0, x0, viewport.width_px - (x0 + w), viewport.height_px - (y0 + h), w * h};
}

Eigen::VectorXd extract_text_features(const Element& element, const Viewport& viewport,
                                      const FeatureManifest& manifest) {
    if (element.modality != Modality::Text) {
        fail(ErrorCode::InvalidArgument,
             "text features requested for non-text element \"" + element.element_id + "\"");
    }
    std::array<double, 5> pos = positional_features(element.bbox, viewport);

    Eigen::VectorXd out(static_cast<Eigen::Index>(manifest.size()));
    for (std::size_t i = 0; i < manifest.size(); ++i) {
        const ManifestEntry& entry = manifest.entries[i];
        double value;
        if (entry.kind == "dist_top") {
            value = pos[0];
        } else if (entry.kind == "dist_left") {
            value = pos[1];
        } else if (entry.kind == "dist_right") {
            value = pos[2];
        } else if (entry.kind == "dist_bottom") {
            value = pos[3];
        } else if (entry.kind == "area") {
            value = pos[4];
        } else if (entry.kind.rfind("color_", 0) == 0) {
            value = color_component(element, entry);
        } else if (entry.kind.rfind("space_", 0) == 0) {
            value = space_component(element, entry);
        } else if (entry.kind == "length") {
            const std::string* v = find_attr(element, entry.source_attr);
            value = v == nullptr ? entry.default_value : parse_css_length(entry.source_attr, *v);
        } else if (entry.kind == "enum") {
            const std::string* v = find_attr(element, entry.source_attr);
            if (v == nullptr) {
                value = entry.default_value;
            } else {
                std::string needle = lowercase_trimmed(*v);
                auto it = std::find(entry.enum_values.begin(), entry.enum_values.end(), needle);
                if (it == entry.enum_values.end()) {
                    fail(ErrorCode::UnparsableAttribute,
                         entry.source_attr + ": \"" + *v + "\" is not a known keyword");
                }
                value = static_cast<double>(it - entry.enum_values.begin());
            }
        } else {
            fail(ErrorCode::SchemaViolation,
                 "manifest entry \"" + entry.feature_name + "\" has unknown kind \"" + entry.kind +
                     "\"");
        }
        out[static_cast<Eigen::Index>(i)] = value;
    }
    return out;
}

std::array<double, 8> histogram8(const std::vector<std::uint8_t>& channel) {
    if (channel.empty()) {
        fail(ErrorCode::EmptyInput, "histogram8 needs a nonempty channel");
    }
    std::array<double, 8> bins{};
    for (std::uint8_t v : channel) {
        bins[v / 32] += 1.0;
    }
    for (double& b : bins) b /= static_cast<double>(channel.size());
    return bins;
}

Eigen::VectorXd intrinsic_image_features(const Raster& pixels) {
    if (pixels.empty()) {
        fail(ErrorCode::EmptyInput, "intrinsic features need a nonempty raster");
    }
    const std::size_t n = pixels.pixel_count();
    std::vector<std::uint8_t> red(n), green(n), blue(n), gray(n);
    double sum_r = 0, sum_g = 0, sum_b = 0;
    double sum_brightness = 0, sum_luma = 0, sum_sat = 0, sum_value = 0;
    double sum_cos = 0, sum_sin = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = pixels.pixels[i * 3];
        double g = pixels.pixels[i * 3 + 1];
        double b = pixels.pixels[i * 3 + 2];
        red[i] = static_cast<std::uint8_t>(r);
        green[i] = static_cast<std::uint8_t>(g);
        blue[i] = static_cast<std::uint8_t>(b);
        double luma = rec601_luma(r, g, b);
        gray[i] = static_cast<std::uint8_t>(std::min(255.0, std::round(luma)));

        sum_r += r;
        sum_g += g;
        sum_b += b;
        sum_brightness += (r + g + b) / 3.0;
        sum_luma += luma;
        double maxc = std::max({r, g, b});
        double minc = std::min({r, g, b});
        sum_value += maxc;
        sum_sat += maxc > 0.0 ? (maxc - minc) / maxc : 0.0;
        double hue = pixel_hue(r, g, b) * kPi / 180.0;
        sum_cos += std::cos(hue);
        sum_sin += std::sin(hue);
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    double mean_r = sum_r * inv_n;
    double mean_g = sum_g * inv_n;
    double mean_b = sum_b * inv_n;

    // Second pass for numerically clean variances.
    double var_r = 0, var_g = 0, var_b = 0;
    for (std::size_t i = 0; i < n; ++i) {
        var_r += (red[i] - mean_r) * (red[i] - mean_r);
        var_g += (green[i] - mean_g) * (green[i] - mean_g);
        var_b += (blue[i] - mean_b) * (blue[i] - mean_b);
    }
    var_r *= inv_n;
    var_g *= inv_n;
    var_b *= inv_n;

    double mean_hue = 0.0;
    if (std::hypot(sum_cos * inv_n, sum_sin * inv_n) > 1e-12) {
        mean_hue = std::atan2(sum_sin, sum_cos) * 180.0 / kPi;
        if (mean_hue < 0.0) mean_hue += 360.0;
        if (mean_hue >= 360.0) mean_hue -= 360.0;
    }

    Eigen::VectorXd out(kIntrinsicFeatureCount);
    Eigen::Index at = 0;
    for (const auto& channel : {red, green, blue, gray}) {
        std::array<double, 8> bins = histogram8(channel);
        for (double b : bins) out[at++] = b;
    }
    out[at++] = sum_brightness * inv_n;
    out[at++] = sum_luma * inv_n;
    out[at++] = mean_hue;
    out[at++] = sum_sat * inv_n;
    out[at++] = sum_value * inv_n;
    out[at++] = mean_r;
    out[at++] = mean_g;
    out[at++] = mean_b;
    out[at++] = var_r;
    out[at++] = var_g;
    out[at++] = var_b;
    return out;
}

Eigen::VectorXd extract_image_features(const Raster& element_raster, const Raster& page_raster,
                                       const BBox& bbox, const Viewport& viewport) {
    if (element_raster.empty() || page_raster.empty()) {
        fail(ErrorCode::EmptyInput, "image features need nonempty element and page rasters");
    }
    std::array<double, 5> pos = positional_features(bbox, viewport);
    Eigen::VectorXd intrinsic = intrinsic_image_features(element_raster);
    Eigen::VectorXd page = intrinsic_image_features(page_raster);

    Eigen::VectorXd out(kImageFeatureCount);
    for (int i = 0; i < 5; ++i) out[i] = pos[i];
    out.segment(5, kIntrinsicFeatureCount) = intrinsic;
    out.segment(5 + kIntrinsicFeatureCount, kIntrinsicFeatureCount) = intrinsic - page;
    return out;
}

Eigen::VectorXd Standardization::apply(const Eigen::VectorXd& x) const {
    if (x.size() != means.size()) {
        fail(ErrorCode::LengthMismatch,
             "expected vector of length " + std::to_string(means.size()) + ", got " +
                 std::to_string(x.size()));
    }
    Eigen::VectorXd z(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        double scale = stds[i] > 0.0 ? stds[i] : 1.0;
        z[i] = (x[i] - means[i]) / scale;
    }
    return z;
}

Eigen::MatrixXd Standardization::apply(const Eigen::MatrixXd& x) const {
    if (x.cols() != means.size()) {
        fail(ErrorCode::LengthMismatch,
             "expected matrix with " + std::to_string(means.size()) + " columns, got " +
                 std::to_string(x.cols()));
    }
    Eigen::MatrixXd z(x.rows(), x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        double scale = stds[j] > 0.0 ? stds[j] : 1.0;
        z.col(j) = (x.col(j).array() - means[j]) / scale;
    }
    return z;
}

StandardizedMatrix standardize(const Eigen::MatrixXd& x) {
    if (x.rows() < 2) {
        fail(ErrorCode::TooFewRows, "standardize needs at least 2 rows");
    }
    Standardization stats;
    stats.means = x.colwise().mean();
    stats.stds.resize(x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        double var = (x.col(j).array() - stats.means[j]).square().sum() /
                     static_cast<double>(x.rows());
        stats.stds[j] = std::sqrt(var);
    }
    return {stats.apply(x), stats};
}

FeatureExtractor::FeatureExtractor(const Corpus& corpus, FeatureManifest manifest)
    : corpus_(corpus), manifest_(std::move(manifest)) {
    validate_text_manifest(manifest_);
}

const Eigen::VectorXd& FeatureExtractor::page_intrinsic(const std::string& page_id) {
    auto it = page_intrinsic_cache_.find(page_id);
    if (it != page_intrinsic_cache_.end()) return it->second;
    const Page* page = corpus_.find_page(page_id);
    if (page == nullptr) {
        fail(ErrorCode::DanglingReference, "unknown page \"" + page_id + "\"");
    }
    std::filesystem::path path = std::filesystem::path(corpus_.root) / page->screenshot_ref;
    Eigen::VectorXd features = intrinsic_image_features(load_ppm(path.string()));
    return page_intrinsic_cache_.emplace(page_id, std::move(features)).first->second;
}

Eigen::VectorXd FeatureExtractor::text_features(const Element& element) {
    auto it = element_cache_.find(element.element_id);
    if (it != element_cache_.end()) return it->second;
    const Page* page = corpus_.find_page(element.page_id);
    if (page == nullptr) {
        fail(ErrorCode::DanglingReference, "unknown page \"" + element.page_id + "\"");
    }
    Eigen::VectorXd features = extract_text_features(element, page->viewport, manifest_);
    element_cache_.emplace(element.element_id, features);
    return features;
}

Eigen::VectorXd FeatureExtractor::image_features(const Element& element) {
    auto it = element_cache_.find(element.element_id);
    if (it != element_cache_.end()) return it->second;
    if (element.modality != Modality::Image) {
        fail(ErrorCode::InvalidArgument,
             "image features requested for non-image element \"" + element.element_id + "\"");
    }
    const Page* page = corpus_.find_page(element.page_id);
    if (page == nullptr) {
        fail(ErrorCode::DanglingReference, "unknown page \"" + element.page_id + "\"");
    }
    std::filesystem::path path = std::filesystem::path(corpus_.root) / element.raster_ref;
    Raster raster = load_ppm(path.string());
    Eigen::VectorXd intrinsic = intrinsic_image_features(raster);
    const Eigen::VectorXd& page_features = page_intrinsic(element.page_id);
    std::array<double, 5> pos = positional_features(element.bbox, page->viewport);

    Eigen::VectorXd features(kImageFeatureCount);
    for (int i = 0; i < 5; ++i) features[i] = pos[i];
    features.segment(5, kIntrinsicFeatureCount) = intrinsic;
    features.segment(5 + kIntrinsicFeatureCount, kIntrinsicFeatureCount) =
        intrinsic - page_features;
    element_cache_.emplace(element.element_id, features);
    return features;
}

PairedFeatures extract_paired_features(const Corpus& corpus, const PairedDataset& pairs,
                                       const FeatureManifest& manifest) {
    FeatureExtractor extractor(corpus, manifest);
    PairedFeatures out;
    out.rows = pairs;
    out.text.resize(static_cast<Eigen::Index>(pairs.size()), kTextFeatureCount);
    out.image.resize(static_cast<Eigen::Index>(pairs.size()), kImageFeatureCount);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const Element* text = corpus.find_element(pairs[i].text_element_id);
        const Element* image = corpus.find_element(pairs[i].image_element_id);
        if (text == nullptr || image == nullptr) {
            fail(ErrorCode::DanglingReference,
                 "pair row " + std::to_string(i) + " references unknown elements");
        }
        out.text.row(static_cast<Eigen::Index>(i)) = extractor.text_features(*text);
        out.image.row(static_cast<Eigen::Index>(i)) = extractor.image_features(*image);
    }
    return out;
}

}  // namespace attnswap
