#include "attnswap/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "attnswap/error.hpp"
#include "attnswap/matrix_io.hpp"
#include "attnswap/raster.hpp"
#include "attnswap/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace attnswap {

namespace {

constexpr int kMaxLayoutColumns = 16;

std::uint8_t clamp_channel(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
}

std::string zero_pad(int value, int width) {
    std::string s = std::to_string(value);
    while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
    return s;
}

}  // namespace

void validate_spec(const SynthSpec& spec) {
    if (spec.n_pairs < 2) {
        fail(ErrorCode::InvalidSpec, "n_pairs must be >= 2");
    }
    if (spec.latent_dim < 0 ||
        spec.latent_dim > std::min(spec.dim_text, spec.dim_image)) {
        fail(ErrorCode::InvalidSpec, "latent_dim must be in [0, min(dim_text, dim_image)]");
    }
    if (static_cast<int>(spec.target_rhos.size()) != spec.latent_dim) {
        fail(ErrorCode::InvalidSpec, "target_rhos must have latent_dim entries");
    }
    for (std::size_t k = 0; k < spec.target_rhos.size(); ++k) {
        double rho = spec.target_rhos[k];
        if (rho <= 0.0 || rho > 1.0) {
            fail(ErrorCode::InvalidSpec, "target_rhos must lie in (0, 1]");
        }
        if (k > 0 && rho > spec.target_rhos[k - 1]) {
            fail(ErrorCode::InvalidSpec, "target_rhos must be descending");
        }
    }
    if (spec.dim_text < 1 || spec.dim_image < 1) {
        fail(ErrorCode::InvalidSpec, "feature dimensions must be positive");
    }
    if (spec.noise_sigma < 0.0) {
        fail(ErrorCode::InvalidSpec, "noise_sigma must be >= 0");
    }
    if (spec.fi_signal_strength < 0.0) {
        fail(ErrorCode::InvalidSpec, "fi_signal_strength must be >= 0");
    }
    if (spec.n_pages < 1 || spec.n_participants < 1) {
        fail(ErrorCode::InvalidSpec, "n_pages and n_participants must be positive");
    }
    if (spec.max_fi < 1 || spec.max_fi > kMaxLayoutColumns) {
        fail(ErrorCode::InvalidSpec,
             "max_fi must be in [1, " + std::to_string(kMaxLayoutColumns) + "]");
    }
}

SynthSpec synth_spec_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::MissingFile, path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        fail(ErrorCode::InvalidSpec, path + ": " + e.what());
    }
    if (!doc.is_object()) fail(ErrorCode::InvalidSpec, path + ": spec must be an object");

    SynthSpec spec;
    spec.n_pairs = doc.value("n_pairs", spec.n_pairs);
    spec.latent_dim = doc.value("latent_dim", spec.latent_dim);
    if (doc.contains("target_rhos")) {
        spec.target_rhos = doc["target_rhos"].get<std::vector<double>>();
    }
    spec.dim_text = doc.value("dim_text", spec.dim_text);
    spec.dim_image = doc.value("dim_image", spec.dim_image);
    spec.n_pages = doc.value("n_pages", spec.n_pages);
    spec.n_participants = doc.value("n_participants", spec.n_participants);
    spec.max_fi = doc.value("max_fi", spec.max_fi);
    spec.noise_sigma = doc.value("noise_sigma", spec.noise_sigma);
    spec.fi_signal_strength = doc.value("fi_signal_strength", spec.fi_signal_strength);
    spec.seed = doc.value("seed", spec.seed);
    validate_spec(spec);
    return spec;
}

CorrelatedPairs gen_correlated_pairs(const SynthSpec& spec) {
    validate_spec(spec);
    const int n = spec.n_pairs;

    CorrelatedPairs out;
    out.true_rhos = spec.target_rhos;
    out.text.resize(n, spec.dim_text);
    out.image.resize(n, spec.dim_image);

    CounterRng text_noise(spec.seed, 1);
    CounterRng image_noise(spec.seed, 2);
    CounterRng latent(spec.seed, 3);

    for (int j = 0; j < spec.dim_text; ++j) {
        for (int i = 0; i < n; ++i) out.text(i, j) = text_noise.next_gaussian();
    }
    for (int j = 0; j < spec.dim_image; ++j) {
        for (int i = 0; i < n; ++i) out.image(i, j) = image_noise.next_gaussian();
    }
    for (int k = 0; k < spec.latent_dim; ++k) {
        double rho = spec.target_rhos[static_cast<std::size_t>(k)];
        double sigma = std::sqrt((1.0 - rho) / rho);
        for (int i = 0; i < n; ++i) {
            double z = latent.next_gaussian();
            out.text(i, k) = z + sigma * latent.next_gaussian();
            out.image(i, k) = z + sigma * latent.next_gaussian();
        }
    }
    return out;
}

PairedDataset gen_attention_corpus(const SynthSpec& spec, const std::string& out_root) {
    validate_spec(spec);
    fs::create_directories(fs::path(out_root) / "rasters");

    const double s = spec.fi_signal_strength;
    const double noise = spec.noise_sigma;
    const Viewport viewport;  // 1680 x 1050

    json pages = json::array();
    json elements = json::array();
    json fixations = json::array();
    PairedDataset ground_truth;

    CounterRng style_rng(spec.seed, fnv1a64("style"));
    CounterRng raster_rng(spec.seed, fnv1a64("raster"));
    CounterRng session_rng(spec.seed, fnv1a64("session"));

    auto text_slot = [](int rank) {
        return BBox{20.0 + 100.0 * (rank - 1), 100.0, 90.0, 60.0};
    };
    auto image_slot = [](int rank) {
        return BBox{20.0 + 100.0 * (rank - 1), 600.0, 90.0, 80.0};
    };

    for (int p = 0; p < spec.n_pages; ++p) {
        std::string page_id = "page" + zero_pad(p, 3);
        std::string screenshot_ref = "rasters/" + page_id + ".ppm";

        Raster screenshot = Raster::filled(60, 96, 120, 120, 120);
        for (int row = 0; row < screenshot.height; ++row) {
            for (int col = 0; col < screenshot.width; ++col) {
                double jitter = 12.0 * raster_rng.next_gaussian();
                std::uint8_t v = clamp_channel(120.0 + jitter);
                screenshot.set_pixel(row, col, v, v, v);
            }
        }
        save_ppm(screenshot, (fs::path(out_root) / screenshot_ref).string());

        pages.push_back({{"page_id", page_id},
                         {"viewport", {{"width_px", viewport.width_px},
                                       {"height_px", viewport.height_px}}},
                         {"screenshot_ref", screenshot_ref}});

        for (int rank = 1; rank <= spec.max_fi; ++rank) {
            // Text element: CSS attributes drift with the fixation rank.
            std::string text_id = page_id + "_t" + zero_pad(rank, 2);
            BBox tb = text_slot(rank);
            double font_size = std::max(4.0, 10.0 + 3.0 * rank * s + 3.0 * noise * style_rng.next_gaussian());
            double font_weight = std::clamp(
                300.0 + 40.0 * rank * s + 40.0 * noise * style_rng.next_gaussian(), 100.0, 900.0);
            double spacing = 0.5 * rank * s + noise * style_rng.next_gaussian();
            double margin = std::max(0.0, 2.0 + rank * s + noise * style_rng.next_gaussian());
            int cr = clamp_channel(230.0 - 20.0 * rank * s + 40.0 * noise * style_rng.next_gaussian());
            int cg = clamp_channel(30.0 + 18.0 * rank * s + 40.0 * noise * style_rng.next_gaussian());
            int cb = clamp_channel(60.0 + 10.0 * rank * s + 40.0 * noise * style_rng.next_gaussian());
            static const char* aligns[3] = {"left", "center", "right"};
            json style = {
                {"font-size", std::to_string(font_size) + "px"},
                {"font-weight", std::to_string(font_weight)},
                {"letter-spacing", std::to_string(spacing) + "px"},
                {"margin", std::to_string(margin) + "px " + std::to_string(margin * 0.5) + "px"},
                {"color", "rgb(" + std::to_string(cr) + "," + std::to_string(cg) + "," +
                              std::to_string(cb) + ")"},
                {"text-align", aligns[style_rng.next_below(3)]},
            };
            elements.push_back({{"element_id", text_id},
                                {"page_id", page_id},
                                {"modality", "text"},
                                {"bbox", {{"x", tb.x}, {"y", tb.y}, {"w", tb.w}, {"h", tb.h}}},
                                {"style_attrs", style}});

            // Image element: raster color drifts with the fixation rank.
            std::string image_id = page_id + "_i" + zero_pad(rank, 2);
            BBox ib = image_slot(rank);
            std::string raster_ref = "rasters/" + image_id + ".ppm";
            double base_r = 40.0 + 22.0 * rank * s + 60.0 * noise * raster_rng.next_gaussian();
            double base_g = 200.0 - 16.0 * rank * s + 60.0 * noise * raster_rng.next_gaussian();
            double base_b = 90.0 + 12.0 * rank * s + 60.0 * noise * raster_rng.next_gaussian();
            Raster raster = Raster::filled(28, 40, 0, 0, 0);
            for (int row = 0; row < raster.height; ++row) {
                for (int col = 0; col < raster.width; ++col) {
                    raster.set_pixel(row, col,
                                     clamp_channel(base_r + 20.0 * noise * raster_rng.next_gaussian()),
                                     clamp_channel(base_g + 20.0 * noise * raster_rng.next_gaussian()),
                                     clamp_channel(base_b + 20.0 * noise * raster_rng.next_gaussian()));
                }
            }
            save_ppm(raster, (fs::path(out_root) / raster_ref).string());
            elements.push_back({{"element_id", image_id},
                                {"page_id", page_id},
                                {"modality", "image"},
                                {"bbox", {{"x", ib.x}, {"y", ib.y}, {"w", ib.w}, {"h", ib.h}}},
                                {"raster_ref", raster_ref}});
        }
    }

    // Sessions: every participant views every page, fixating the first k
    // elements of each modality in rank order. Sub-threshold fixations hit
    // the empty band between the rows; a closing refixation exercises dedup.
    for (int q = 0; q < spec.n_participants; ++q) {
        std::string participant_id = "part" + zero_pad(q, 2);
        for (int p = 0; p < spec.n_pages; ++p) {
            std::string page_id = "page" + zero_pad(p, 3);
            int span = std::min(spec.max_fi - 1, 2);
            int k_text = spec.max_fi - static_cast<int>(session_rng.next_below(span + 1));
            int k_image = spec.max_fi - static_cast<int>(session_rng.next_below(span + 1));

            std::int64_t onset = 120;
            auto emit = [&](double x, double y, std::int64_t duration) {
                fixations.push_back({{"participant_id", participant_id},
                                     {"page_id", page_id},
                                     {"x", x},
                                     {"y", y},
                                     {"onset_ms", onset},
                                     {"duration_ms", duration}});
                onset += 180;
            };

            for (int rank = 1; rank <= std::max(k_text, k_image); ++rank) {
                if (rank <= k_text) {
                    BBox b = text_slot(rank);
                    emit(b.x + b.w / 2, b.y + b.h / 2, 150);
                }
                if (rank <= k_image) {
                    BBox b = image_slot(rank);
                    emit(b.x + b.w / 2, b.y + b.h / 2, 150);
                }
                if (rank == 2) {
                    emit(800.0, 400.0, 60);  // too short to count, hits nothing
                }
            }
            if (k_text >= 1) {
                BBox b = text_slot(1);
                emit(b.x + b.w / 2, b.y + b.h / 2, 130);  // refixation on the first text
            }

            for (int rank = 1; rank <= std::min(k_text, k_image); ++rank) {
                ground_truth.push_back({page_id + "_t" + zero_pad(rank, 2),
                                        page_id + "_i" + zero_pad(rank, 2), participant_id,
                                        page_id, rank});
            }
        }
    }

    auto dump = [&](const json& doc, const char* name) {
        std::ofstream out(fs::path(out_root) / name);
        if (!out) fail(ErrorCode::IoFailure, std::string(name) + ": cannot open for writing");
        out << doc.dump(2) << "\n";
    };
    dump(pages, "pages.json");
    dump(elements, "elements.json");
    dump(fixations, "fixations.json");

    json truth = json::array();
    for (const PairRow& row : ground_truth) {
        truth.push_back({{"text_element_id", row.text_element_id},
                         {"image_element_id", row.image_element_id},
                         {"participant_id", row.participant_id},
                         {"page_id", row.page_id},
                         {"fixation_index", row.fixation_index}});
    }
    dump(truth, "ground_truth.json");
    return ground_truth;
}

PairedDataset load_ground_truth(const std::string& corpus_root) {
    fs::path path = fs::path(corpus_root) / "ground_truth.json";
    std::ifstream in(path);
    if (!in) fail(ErrorCode::MissingFile, path.string());
    json doc = json::parse(in);
    PairedDataset pairs;
    for (const json& rec : doc) {
        pairs.push_back({rec.at("text_element_id").get<std::string>(),
                         rec.at("image_element_id").get<std::string>(),
                         rec.at("participant_id").get<std::string>(),
                         rec.at("page_id").get<std::string>(),
                         rec.at("fixation_index").get<int>()});
    }
    return pairs;
}

BruteForce2dResult brute_force_cca_2d(const Eigen::MatrixXd& t_cols,
                                      const Eigen::MatrixXd& i_cols, double step_deg) {
    if (t_cols.cols() != 2 || i_cols.cols() != 2) {
        fail(ErrorCode::InvalidArgument, "brute_force_cca_2d needs exactly 2 columns per side");
    }
    if (t_cols.rows() != i_cols.rows()) {
        fail(ErrorCode::RowCountMismatch, "paired matrices disagree on row count");
    }
    if (t_cols.rows() < 2) {
        fail(ErrorCode::TooFewRows, "brute_force_cca_2d needs at least 2 rows");
    }
    if (step_deg <= 0.0) {
        fail(ErrorCode::InvalidArgument, "step_deg must be > 0");
    }

    Eigen::MatrixXd tc = t_cols.rowwise() - t_cols.colwise().mean();
    Eigen::MatrixXd ic = i_cols.rowwise() - i_cols.colwise().mean();
    Eigen::Matrix2d c_tt = tc.transpose() * tc;
    Eigen::Matrix2d c_ii = ic.transpose() * ic;
    Eigen::Matrix2d c_ti = tc.transpose() * ic;

    // Directions live on the half-circle; correlation signs fold into it, so
    // the grid maximizes |corr(T u, I v)|.
    constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
    BruteForce2dResult best;
    best.rho_hat = -1.0;
    for (double theta_t = 0.0; theta_t < 180.0; theta_t += step_deg) {
        Eigen::Vector2d u(std::cos(theta_t * kDegToRad), std::sin(theta_t * kDegToRad));
        double var_t = u.dot(c_tt * u);
        if (var_t <= 0.0) continue;
        for (double theta_i = 0.0; theta_i < 180.0; theta_i += step_deg) {
            Eigen::Vector2d v(std::cos(theta_i * kDegToRad), std::sin(theta_i * kDegToRad));
            double var_i = v.dot(c_ii * v);
            if (var_i <= 0.0) continue;
            double corr = std::abs(u.dot(c_ti * v)) / std::sqrt(var_t * var_i);
            if (corr > best.rho_hat) {
                best.rho_hat = corr;
                best.angle_t_deg = theta_t;
                best.angle_i_deg = theta_i;
            }
        }
    }
    if (best.rho_hat < 0.0) {
        fail(ErrorCode::InvalidArgument, "degenerate inputs: no direction has positive variance");
    }
    return best;
}

}  // namespace attnswap
