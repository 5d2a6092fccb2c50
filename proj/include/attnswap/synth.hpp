#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "attnswap/features.hpp"
#include "attnswap/types.hpp"

namespace attnswap {

struct SynthSpec {
    // gen_correlated_pairs
    int n_pairs = 5000;
    int latent_dim = 3;
    std::vector<double> target_rhos = {0.95, 0.80, 0.50};  // descending, in (0, 1]
    int dim_text = kTextFeatureCount;
    int dim_image = kImageFeatureCount;

    // gen_attention_corpus
    int n_pages = 8;
    int n_participants = 8;
    int max_fi = 8;                  // elements per modality on each page
    double noise_sigma = 0.1;
    double fi_signal_strength = 1.0;  // 0 = features carry no fixation-order signal

    std::uint64_t seed = 1;
};

void validate_spec(const SynthSpec& spec);

// JSON object with any subset of the SynthSpec fields; missing fields keep
// their defaults.
SynthSpec synth_spec_from_file(const std::string& path);

struct CorrelatedPairs {
    Eigen::MatrixXd text;   // n x dim_text
    Eigen::MatrixXd image;  // n x dim_image
    std::vector<double> true_rhos;
};

// Latent-plus-noise construction: column k of both sides is z_k + sigma_k eps
// with sigma_k^2 = (1 - rho_k) / rho_k, so the population correlation of the
// paired columns is exactly rho_k. Remaining columns are independent unit
// Gaussians. Fully determined by spec.seed.
CorrelatedPairs gen_correlated_pairs(const SynthSpec& spec);

// Writes a complete corpus (pages.json, elements.json, fixations.json,
// rasters) under out_root plus ground_truth.json with the intended pair set.
// Element appearance encodes the element's fixation rank scaled by
// fi_signal_strength, perturbed by noise_sigma; fixation logs visit elements
// in rank order so the ground-truth pairs are exact.
PairedDataset gen_attention_corpus(const SynthSpec& spec, const std::string& out_root);

PairedDataset load_ground_truth(const std::string& corpus_root);

struct BruteForce2dResult {
    double rho_hat = 0.0;
    double angle_t_deg = 0.0;
    double angle_i_deg = 0.0;
};

// Exhaustive grid over unit direction pairs u(theta_t), v(theta_i) with
// theta in [0, 180) at step_deg, maximizing the sample Pearson correlation
// corr(T u, I v). Ties resolve to the smaller (theta_t, theta_i).
BruteForce2dResult brute_force_cca_2d(const Eigen::MatrixXd& t_cols,
                                      const Eigen::MatrixXd& i_cols, double step_deg);

}  // namespace attnswap
