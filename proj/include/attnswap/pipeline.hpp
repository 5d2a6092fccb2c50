#pragma once

#include <cstdint>
#include <string>

#include "attnswap/evaluate.hpp"

namespace attnswap {

struct PipelineConfig {
    std::string corpus_root;
    std::string manifest_path;  // empty = built-in default manifest
    int d = kDefaultSubspaceDim;
    bool auto_d = false;
    double lambda = kDefaultRidgeLambda;
    int min_fixation_ms = 100;
    int folds = 5;
    std::string protocol = "kfold";  // kfold | lopo
    bool same_page_only = false;
    std::string retrieval_space = "text";  // text | subspace
    double bandwidth_kbps = 53.0;
    std::uint64_t seed = 0;
    std::string output_dir;
    bool use_cache = true;
};

PipelineConfig pipeline_config_from_file(const std::string& path);
std::string pipeline_config_to_json(const PipelineConfig& config);

// Hash over the canonical JSON form of the config (output_dir and cache flag
// excluded so artifact bytes do not depend on where they land).
std::uint64_t pipeline_config_hash(const PipelineConfig& config);

// validate -> pair -> features -> fit -> evaluate -> cost. Writes pairs.json,
// features.bin, model.cca (+ .json), index.bin, report.json and cost.json to
// output_dir. Stage outputs are cached by input hash and reused when
// unchanged; failures remove the stage's partial artifact. Identical config
// and seed reproduce identical bytes.
void run_pipeline(const PipelineConfig& config);

}  // namespace attnswap
