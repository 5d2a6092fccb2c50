#include "attnswap/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "attnswap/cca.hpp"
#include "attnswap/costs.hpp"
#include "attnswap/error.hpp"
#include "attnswap/ingest.hpp"
#include "attnswap/matrix_io.hpp"
#include "attnswap/reports.hpp"
#include "attnswap/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace attnswap {

namespace {

json config_to_json_object(const PipelineConfig& config) {
    return {
        {"corpus_root", config.corpus_root},
        {"manifest_path", config.manifest_path},
        {"d", config.d},
        {"auto_d", config.auto_d},
        {"lambda", config.lambda},
        {"min_fixation_ms", config.min_fixation_ms},
        {"folds", config.folds},
        {"protocol", config.protocol},
        {"same_page_only", config.same_page_only},
        {"retrieval_space", config.retrieval_space},
        {"bandwidth_kbps", config.bandwidth_kbps},
        {"seed", config.seed},
        {"output_dir", config.output_dir},
        {"use_cache", config.use_cache},
    };
}

QuerySpace parse_space(const std::string& name) {
    if (name == "text") return QuerySpace::TextSpace;
    if (name == "subspace") return QuerySpace::Subspace;
    fail(ErrorCode::InvalidArgument, "retrieval_space must be \"text\" or \"subspace\"");
}

Protocol parse_protocol(const std::string& name) {
    if (name == "kfold") return Protocol::KFold;
    if (name == "lopo") return Protocol::LeaveOnePageOut;
    fail(ErrorCode::InvalidArgument, "protocol must be \"kfold\" or \"lopo\"");
}

// Atomic-ish write: temp file then rename, so failures never leave a
// truncated artifact behind.
class ArtifactWriter {
public:
    ArtifactWriter(const fs::path& dir, const std::string& name)
        : final_(dir / name), temp_(dir / (name + ".tmp")) {}

    const std::string path() const { return temp_.string(); }

    void commit() {
        fs::rename(temp_, final_);
        committed_ = true;
    }

    ~ArtifactWriter() {
        if (!committed_) {
            std::error_code ec;
            fs::remove(temp_, ec);
        }
    }

private:
    fs::path final_;
    fs::path temp_;
    bool committed_ = false;
};

void write_text_artifact(const fs::path& dir, const std::string& name, const std::string& body) {
    ArtifactWriter writer(dir, name);
    {
        std::ofstream out(writer.path(), std::ios::binary);
        if (!out) fail(ErrorCode::IoFailure, name + ": cannot open for writing");
        out << body;
        if (!out) fail(ErrorCode::IoFailure, name + ": write failed");
    }
    writer.commit();
}

json pairs_to_json(const PairedDataset& pairs) {
    json rows = json::array();
    for (const PairRow& row : pairs) {
        rows.push_back({{"text_element_id", row.text_element_id},
                        {"image_element_id", row.image_element_id},
                        {"participant_id", row.participant_id},
                        {"page_id", row.page_id},
                        {"fixation_index", row.fixation_index}});
    }
    return rows;
}

PairedDataset pairs_from_json(const json& rows) {
    PairedDataset pairs;
    for (const json& rec : rows) {
        pairs.push_back({rec.at("text_element_id").get<std::string>(),
                         rec.at("image_element_id").get<std::string>(),
                         rec.at("participant_id").get<std::string>(),
                         rec.at("page_id").get<std::string>(),
                         rec.at("fixation_index").get<int>()});
    }
    return pairs;
}

std::uint64_t corpus_content_hash(const Corpus& corpus) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const char* name : {"pages.json", "elements.json", "fixations.json"}) {
        h = fnv1a64(std::to_string(hash_file((fs::path(corpus.root) / name).string())), h);
    }
    for (const Page& page : corpus.pages) {
        h = fnv1a64(std::to_string(hash_file((fs::path(corpus.root) / page.screenshot_ref).string())), h);
    }
    for (const Element& element : corpus.elements) {
        if (element.modality != Modality::Image) continue;
        h = fnv1a64(std::to_string(hash_file((fs::path(corpus.root) / element.raster_ref).string())), h);
    }
    return h;
}

class StageCache {
public:
    StageCache(fs::path dir, bool enabled) : path_(dir / "cache_manifest.json"), enabled_(enabled) {
        if (!enabled_) return;
        std::ifstream in(path_);
        if (!in) return;
        try {
            manifest_ = json::parse(in);
        } catch (const json::parse_error&) {
            manifest_ = json::object();
        }
    }

    bool fresh(const std::string& stage, std::uint64_t key,
               const std::vector<fs::path>& artifacts) const {
        if (!enabled_) return false;
        auto it = manifest_.find(stage);
        if (it == manifest_.end() || it->get<std::string>() != std::to_string(key)) return false;
        for (const fs::path& artifact : artifacts) {
            if (!fs::exists(artifact)) return false;
        }
        return true;
    }

    void record(const std::string& stage, std::uint64_t key) {
        manifest_[stage] = std::to_string(key);
        std::ofstream out(path_);
        out << manifest_.dump(2) << "\n";
    }

private:
    fs::path path_;
    bool enabled_;
    json manifest_ = json::object();
};

[[noreturn]] void stage_failure(const char* stage, const Error& e) {
    throw Error(e.code(), std::string("stage ") + stage + ": " + e.what());
}

}  // namespace

PipelineConfig pipeline_config_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::MissingFile, path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        fail(ErrorCode::SchemaViolation, path + ": " + e.what());
    }
    if (!doc.is_object()) fail(ErrorCode::SchemaViolation, path + ": config must be an object");

    static const std::vector<std::string> known = {
        "corpus_root", "manifest_path", "d", "auto_d", "lambda", "min_fixation_ms",
        "folds", "protocol", "same_page_only", "retrieval_space", "bandwidth_kbps",
        "seed", "output_dir", "use_cache"};
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
            fail(ErrorCode::SchemaViolation, path + ": unknown config key \"" + it.key() + "\"");
        }
    }

    PipelineConfig config;
    config.corpus_root = doc.value("corpus_root", config.corpus_root);
    config.manifest_path = doc.value("manifest_path", config.manifest_path);
    config.d = doc.value("d", config.d);
    config.auto_d = doc.value("auto_d", config.auto_d);
    config.lambda = doc.value("lambda", config.lambda);
    config.min_fixation_ms = doc.value("min_fixation_ms", config.min_fixation_ms);
    config.folds = doc.value("folds", config.folds);
    config.protocol = doc.value("protocol", config.protocol);
    config.same_page_only = doc.value("same_page_only", config.same_page_only);
    config.retrieval_space = doc.value("retrieval_space", config.retrieval_space);
    config.bandwidth_kbps = doc.value("bandwidth_kbps", config.bandwidth_kbps);
    config.seed = doc.value("seed", config.seed);
    config.output_dir = doc.value("output_dir", config.output_dir);
    config.use_cache = doc.value("use_cache", config.use_cache);
    return config;
}

std::string pipeline_config_to_json(const PipelineConfig& config) {
    return config_to_json_object(config).dump(2);
}

std::uint64_t pipeline_config_hash(const PipelineConfig& config) {
    json canonical = config_to_json_object(config);
    canonical.erase("output_dir");
    canonical.erase("use_cache");
    return fnv1a64(canonical.dump());
}

void run_pipeline(const PipelineConfig& config) {
    if (config.corpus_root.empty() || config.output_dir.empty()) {
        fail(ErrorCode::InvalidArgument, "pipeline needs corpus_root and output_dir");
    }
    QuerySpace space = parse_space(config.retrieval_space);
    Protocol protocol = parse_protocol(config.protocol);

    fs::path out_dir(config.output_dir);
    fs::create_directories(out_dir);
    StageCache cache(out_dir, config.use_cache);
    std::uint64_t cfg_hash = pipeline_config_hash(config);

    // --- validate ---------------------------------------------------------
    Corpus corpus = load_corpus(config.corpus_root);
    std::uint64_t corpus_hash = corpus_content_hash(corpus);
    std::cout << "[pipeline] validate: " << corpus.pages.size() << " pages, "
              << corpus.elements.size() << " elements, " << corpus.fixations.size()
              << " fixations\n";

    FeatureManifest manifest = config.manifest_path.empty()
                                   ? default_text_manifest()
                                   : load_manifest(config.manifest_path);
    std::uint64_t manifest_hash =
        config.manifest_path.empty() ? fnv1a64("builtin") : hash_file(config.manifest_path);

    // --- pair -------------------------------------------------------------
    std::uint64_t pairs_key = fnv1a64(std::string(kToolVersion) + "|pair|" +
                                      std::to_string(config.min_fixation_ms) + "|" +
                                      std::to_string(corpus_hash));
    fs::path pairs_path = out_dir / "pairs.json";
    PairedDataset pairs;
    if (cache.fresh("pairs", pairs_key, {pairs_path})) {
        std::ifstream in(pairs_path);
        pairs = pairs_from_json(json::parse(in));
        std::cout << "[pipeline] pair: cached (" << pairs.size() << " pairs)\n";
    } else {
        try {
            auto kept = filter_fixations(corpus.fixations, config.min_fixation_ms);
            HitTestDiagnostics diag;
            auto events = map_fixations_to_elements(kept, corpus.elements, Viewport{}, &diag);
            auto indexed = assign_fixation_indices(events, corpus.elements);
            pairs = build_pairs(indexed);
            if (pairs.empty()) {
                fail(ErrorCode::EmptyDataset, "no text/image pairs share a fixation index");
            }
            write_text_artifact(out_dir, "pairs.json", pairs_to_json(pairs).dump(2) + "\n");
            cache.record("pairs", pairs_key);
            std::cout << "[pipeline] pair: " << pairs.size() << " pairs (" << diag.hits
                      << " hits, " << diag.misses << " misses)\n";
        } catch (const Error& e) {
            stage_failure("pair", e);
        }
    }

    // --- features ---------------------------------------------------------
    std::uint64_t features_key =
        fnv1a64(std::string(kToolVersion) + "|features|" + std::to_string(pairs_key) + "|" +
                std::to_string(manifest_hash));
    fs::path features_path = out_dir / "features.bin";
    PairedFeatures features;
    if (cache.fresh("features", features_key, {features_path})) {
        Container container = load_container(features_path.string());
        const MatrixSection* t = container.find_matrix("T");
        const MatrixSection* i = container.find_matrix("I");
        const JsonSection* rows = container.find_blob("pairs");
        if (t == nullptr || i == nullptr || rows == nullptr) {
            fail(ErrorCode::SchemaViolation, "features.bin: missing sections");
        }
        features.text = t->matrix;
        features.image = i->matrix;
        features.rows = pairs_from_json(json::parse(rows->payload));
        std::cout << "[pipeline] features: cached (" << features.text.rows() << " rows)\n";
    } else {
        try {
            features = extract_paired_features(corpus, pairs, manifest);
            Container container;
            container.config_hash = cfg_hash;
            container.tool_version = kToolVersion;
            container.matrices.push_back({"T", features.text});
            container.matrices.push_back({"I", features.image});
            container.blobs.push_back({"pairs", pairs_to_json(features.rows).dump()});
            ArtifactWriter writer(out_dir, "features.bin");
            save_container(container, writer.path());
            writer.commit();
            cache.record("features", features_key);
            std::cout << "[pipeline] features: " << features.text.rows() << " x ("
                      << features.text.cols() << "+" << features.image.cols() << ")\n";
        } catch (const Error& e) {
            stage_failure("features", e);
        }
    }

    // --- fit ---------------------------------------------------------------
    std::uint64_t model_key = fnv1a64(std::string(kToolVersion) + "|fit|" +
                                      std::to_string(features_key) + "|" + std::to_string(config.d) +
                                      "|" + (config.auto_d ? "auto" : "fixed") + "|" +
                                      std::to_string(config.lambda));
    fs::path model_path = out_dir / "model.cca";
    fs::path index_path = out_dir / "index.bin";
    CcaModel model;
    if (cache.fresh("fit", model_key, {model_path, index_path})) {
        model = load_cca_model(model_path.string());
        std::cout << "[pipeline] fit: cached (d=" << model.d << ")\n";
    } else {
        try {
            Eigen::Index n = features.text.rows();
            int d_max = static_cast<int>(std::min<Eigen::Index>(
                {features.text.cols(), features.image.cols(), n - 1}));
            int d_used = std::max(1, std::min(config.d, d_max));
            model = fit(features.text, features.image, {d_used, config.lambda, CrossMap::Identity});
            if (config.auto_d) {
                model = truncate_model(model, auto_select_d(model.rho));
            }
            {
                ArtifactWriter writer(out_dir, "model.cca");
                save_cca_model(model, writer.path(), cfg_hash);
                fs::rename(writer.path() + ".json", (out_dir / "model.cca.json").string());
                writer.commit();
            }
            std::vector<IndexEntry> refs;
            for (const PairRow& row : features.rows) {
                refs.push_back({row.text_element_id, row.page_id, row.participant_id,
                                row.fixation_index});
            }
            RetrievalIndex index = build_index(model, features.text, std::move(refs));
            {
                ArtifactWriter writer(out_dir, "index.bin");
                save_index(index, writer.path(), cfg_hash);
                writer.commit();
            }
            cache.record("fit", model_key);
            std::cout << "[pipeline] fit: d=" << model.d << ", leading rho=" << model.rho[0]
                      << "\n";
        } catch (const Error& e) {
            stage_failure("fit", e);
        }
    }

    // --- evaluate -----------------------------------------------------------
    std::uint64_t report_key = fnv1a64(
        std::string(kToolVersion) + "|evaluate|" + std::to_string(features_key) + "|" +
        std::to_string(config.d) + "|" + std::to_string(config.lambda) + "|" +
        std::to_string(config.folds) + "|" + config.protocol + "|" +
        (config.same_page_only ? "same" : "all") + "|" + config.retrieval_space + "|" +
        std::to_string(config.seed));
    fs::path report_path = out_dir / "report.json";
    double micro_f1_used = 0.0;
    if (cache.fresh("evaluate", report_key, {report_path})) {
        std::ifstream in(report_path);
        micro_f1_used = json::parse(in).at("micro_f1").get<double>();
        std::cout << "[pipeline] evaluate: cached (micro_f1=" << micro_f1_used << ")\n";
    } else {
        try {
            EvalOptions options;
            options.d = config.d;
            options.lambda = config.lambda;
            options.folds = config.folds;
            options.protocol = protocol;
            options.space = space;
            options.same_page_only = config.same_page_only;
            options.seed = config.seed;
            EvaluationReport report = evaluate_retrieval(features, options);
            micro_f1_used = report.micro_f1;

            json doc = evaluation_report_to_json(report);
            doc["config"] = config_to_json_object(config);
            doc["config_hash"] = std::to_string(cfg_hash);
            doc["tool_version"] = kToolVersion;
            write_text_artifact(out_dir, "report.json", doc.dump(2) + "\n");
            cache.record("evaluate", report_key);
            std::cout << "[pipeline] evaluate: micro_f1=" << report.micro_f1
                      << " over " << report.n_queries << " queries\n";
        } catch (const Error& e) {
            stage_failure("evaluate", e);
        }
    }

    // --- cost ---------------------------------------------------------------
    std::uint64_t cost_key = fnv1a64(std::string(kToolVersion) + "|cost|" +
                                     std::to_string(corpus_hash) + "|" +
                                     std::to_string(config.bandwidth_kbps) + "|" +
                                     std::to_string(report_key));
    fs::path cost_path = out_dir / "cost.json";
    if (cache.fresh("cost", cost_key, {cost_path})) {
        std::cout << "[pipeline] cost: cached\n";
    } else {
        try {
            CostParams params;
            params.bandwidth_kbps = config.bandwidth_kbps;
            CostReport cost = build_cost_report(corpus, params, micro_f1_used);
            json doc = cost_report_to_json(cost);
            doc["config"] = config_to_json_object(config);
            doc["config_hash"] = std::to_string(cfg_hash);
            doc["tool_version"] = kToolVersion;
            write_text_artifact(out_dir, "cost.json", doc.dump(2) + "\n");
            cache.record("cost", cost_key);
            std::cout << "[pipeline] cost: achieved saving " << cost.achieved_saving_pct << "%\n";
        } catch (const Error& e) {
            stage_failure("cost", e);
        }
    }
}

}  // namespace attnswap
