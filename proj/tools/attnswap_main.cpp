#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>

#include <json.hpp>

#include "attnswap/cca.hpp"
#include "attnswap/costs.hpp"
#include "attnswap/error.hpp"
#include "attnswap/ingest.hpp"
#include "attnswap/matrix_io.hpp"
#include "attnswap/pipeline.hpp"
#include "attnswap/reports.hpp"
#include "attnswap/synth.hpp"
#include "attnswap/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace attnswap;

namespace {

void write_json_file(const std::string& path, const json& doc) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::IoFailure, path + ": cannot open for writing");
    out << doc.dump(2) << "\n";
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

PairedDataset pairs_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::MissingFile, path);
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

PairedDataset compute_pairs(const Corpus& corpus, int min_fixation_ms, Dedup dedup,
                            HitTestDiagnostics* diag = nullptr) {
    auto kept = filter_fixations(corpus.fixations, min_fixation_ms);
    auto events = map_fixations_to_elements(kept, corpus.elements, Viewport{}, diag);
    auto indexed = assign_fixation_indices(events, corpus.elements, dedup);
    return build_pairs(indexed);
}

QuerySpace space_from_name(const std::string& name) {
    if (name == "text") return QuerySpace::TextSpace;
    if (name == "subspace") return QuerySpace::Subspace;
    fail(ErrorCode::InvalidArgument, "--space must be text or subspace");
}

FeatureManifest manifest_from_path(const std::string& path) {
    return path.empty() ? default_text_manifest() : load_manifest(path);
}

// Query files accept a bare feature array, an object with "features", or an
// array of either.
std::vector<Eigen::VectorXd> load_query_vectors(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::MissingFile, path);
    json doc = json::parse(in);

    auto to_vector = [&](const json& node) {
        const json& values = node.is_object() ? node.at("features") : node;
        if (!values.is_array()) {
            fail(ErrorCode::SchemaViolation, path + ": expected an array of feature values");
        }
        Eigen::VectorXd v(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) v[static_cast<Eigen::Index>(i)] = values[i].get<double>();
        return v;
    };

    std::vector<Eigen::VectorXd> queries;
    if (doc.is_array() && !doc.empty() && doc[0].is_number()) {
        queries.push_back(to_vector(doc));
    } else if (doc.is_array()) {
        for (const json& node : doc) queries.push_back(to_vector(node));
    } else {
        queries.push_back(to_vector(doc));
    }
    if (queries.empty()) fail(ErrorCode::EmptyInput, path + ": no queries");
    return queries;
}

json ranked_to_json(const RankedResult& result) {
    json out = json::array();
    for (const RankedHit& hit : result) {
        out.push_back({{"element_id", hit.ref.element_id},
                       {"page_id", hit.ref.page_id},
                       {"participant_id", hit.ref.participant_id},
                       {"fixation_index", hit.ref.fixation_index},
                       {"distance", hit.distance}});
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"learn an attention-correlated text/image subspace, query equivalent text, "
                 "and quantify page-weight savings"};
    app.set_version_flag("--version", std::string("attnswap ") + kToolVersion);
    app.require_subcommand(1);
    std::function<void()> run;

    // validate ---------------------------------------------------------------
    auto* validate = app.add_subcommand("validate", "load and validate a corpus");
    {
        auto root = std::make_shared<std::string>();
        auto min_ms = std::make_shared<int>(100);
        validate->add_option("root", *root, "corpus directory")->required();
        validate->add_option("--min-fixation-ms", *min_ms, "fixation duration threshold");
        validate->callback([=]() {
            run = [=]() {
                Corpus corpus = load_corpus(*root);
                std::size_t text_count = 0, image_count = 0;
                for (const Element& e : corpus.elements) {
                    (e.modality == Modality::Text ? text_count : image_count)++;
                }
                auto kept = filter_fixations(corpus.fixations, *min_ms);
                HitTestDiagnostics diag;
                map_fixations_to_elements(kept, corpus.elements, Viewport{}, &diag);
                std::cout << "pages: " << corpus.pages.size() << "\n"
                          << "elements: " << corpus.elements.size() << " (text " << text_count
                          << ", image " << image_count << ")\n"
                          << "fixations: " << corpus.fixations.size() << " (>= " << *min_ms
                          << " ms: " << kept.size() << ")\n"
                          << "attended events: " << diag.hits << " (misses " << diag.misses
                          << ")\n";
            };
        });
    }

    // pair ---------------------------------------------------------------------
    auto* pair_cmd = app.add_subcommand("pair", "build the paired dataset");
    {
        auto root = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>("pairs.json");
        auto min_ms = std::make_shared<int>(100);
        auto dedup = std::make_shared<std::string>("first");
        pair_cmd->add_option("root", *root, "corpus directory")->required();
        pair_cmd->add_option("-o,--output", *out, "output JSON path");
        pair_cmd->add_option("--min-fixation-ms", *min_ms, "fixation duration threshold");
        pair_cmd->add_option("--dedup", *dedup, "refixation handling: first|every")
            ->check(CLI::IsMember({"first", "every"}));
        pair_cmd->callback([=]() {
            run = [=]() {
                Corpus corpus = load_corpus(*root);
                Dedup mode = *dedup == "first" ? Dedup::FirstFixation : Dedup::EveryFixation;
                PairedDataset pairs = compute_pairs(corpus, *min_ms, mode);
                write_json_file(*out, pairs_to_json(pairs));
                std::cout << pairs.size() << " pairs -> " << *out << "\n";
            };
        });
    }

    // features -------------------------------------------------------------------
    auto* features_cmd = app.add_subcommand("features", "extract feature matrices");
    {
        auto root = std::make_shared<std::string>();
        auto manifest_path = std::make_shared<std::string>();
        auto pairs_path = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>("features.bin");
        auto per_element = std::make_shared<bool>(false);
        auto min_ms = std::make_shared<int>(100);
        features_cmd->add_option("root", *root, "corpus directory")->required();
        features_cmd->add_option("--manifest", *manifest_path, "text feature manifest JSON");
        features_cmd->add_option("--pairs", *pairs_path,
                                 "pairs.json to join with features (default: recompute)");
        features_cmd->add_option("-o,--output", *out, "output container path");
        features_cmd->add_flag("--per-element", *per_element,
                               "emit per-element matrices instead of paired rows");
        features_cmd->add_option("--min-fixation-ms", *min_ms, "fixation duration threshold");
        features_cmd->callback([=]() {
            run = [=]() {
                Corpus corpus = load_corpus(*root);
                FeatureManifest manifest = manifest_from_path(*manifest_path);
                Container container;
                container.config_hash = 0;
                container.tool_version = kToolVersion;
                if (*per_element) {
                    FeatureExtractor extractor(corpus, manifest);
                    std::vector<const Element*> texts, images;
                    for (const Element& e : corpus.elements) {
                        (e.modality == Modality::Text ? texts : images).push_back(&e);
                    }
                    Eigen::MatrixXd t(texts.size(), kTextFeatureCount);
                    Eigen::MatrixXd i(images.size(), kImageFeatureCount);
                    json text_ids = json::array(), image_ids = json::array();
                    for (std::size_t r = 0; r < texts.size(); ++r) {
                        t.row(static_cast<Eigen::Index>(r)) = extractor.text_features(*texts[r]);
                        text_ids.push_back({{"element_id", texts[r]->element_id},
                                            {"page_id", texts[r]->page_id}});
                    }
                    for (std::size_t r = 0; r < images.size(); ++r) {
                        i.row(static_cast<Eigen::Index>(r)) = extractor.image_features(*images[r]);
                        image_ids.push_back({{"element_id", images[r]->element_id},
                                             {"page_id", images[r]->page_id}});
                    }
                    container.matrices.push_back({"text_elements", t});
                    container.matrices.push_back({"image_elements", i});
                    container.blobs.push_back({"text_ids", text_ids.dump()});
                    container.blobs.push_back({"image_ids", image_ids.dump()});
                } else {
                    PairedDataset pairs = pairs_path->empty()
                                              ? compute_pairs(corpus, *min_ms, Dedup::FirstFixation)
                                              : pairs_from_file(*pairs_path);
                    if (pairs.empty()) fail(ErrorCode::EmptyDataset, "no pairs to featurize");
                    PairedFeatures features = extract_paired_features(corpus, pairs, manifest);
                    container.matrices.push_back({"T", features.text});
                    container.matrices.push_back({"I", features.image});
                    container.blobs.push_back({"pairs", pairs_to_json(features.rows).dump()});
                }
                save_container(container, *out);
                std::cout << "features -> " << *out << "\n";
            };
        });
    }

    // fit ---------------------------------------------------------------------
    auto* fit_cmd = app.add_subcommand("fit", "fit the correlated subspace");
    {
        auto pairs_path = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>("model.cca");
        auto index_out = std::make_shared<std::string>();
        auto d = std::make_shared<int>(kDefaultSubspaceDim);
        auto lambda = std::make_shared<double>(kDefaultRidgeLambda);
        auto auto_d = std::make_shared<bool>(false);
        auto cross = std::make_shared<std::string>("identity");
        fit_cmd->add_option("--pairs", *pairs_path, "paired features container")->required();
        fit_cmd->add_option("-d,--dim", *d, "subspace dimension");
        fit_cmd->add_option("--lambda", *lambda, "ridge regularization weight");
        fit_cmd->add_flag("--auto-d", *auto_d, "keep the largest d with rho >= 0.1");
        fit_cmd->add_option("--cross-map", *cross, "subspace map: identity|diag-rho")
            ->check(CLI::IsMember({"identity", "diag-rho"}));
        fit_cmd->add_option("-o,--output", *out, "model output path");
        fit_cmd->add_option("--index-out", *index_out, "also build a retrieval index here");
        fit_cmd->callback([=]() {
            run = [=]() {
                Container container = load_container(*pairs_path);
                const MatrixSection* t = container.find_matrix("T");
                const MatrixSection* i = container.find_matrix("I");
                if (t == nullptr || i == nullptr) {
                    fail(ErrorCode::SchemaViolation,
                         *pairs_path + ": needs matrices \"T\" and \"I\" (run `features`)");
                }
                FitOptions options;
                options.d = *d;
                options.lambda = *lambda;
                options.cross_map = *cross == "identity" ? CrossMap::Identity : CrossMap::DiagRho;
                CcaModel model = fit(t->matrix, i->matrix, options);
                if (*auto_d) model = truncate_model(model, auto_select_d(model.rho));
                save_cca_model(model, *out);
                std::cout << "model (d=" << model.d << ", leading rho=" << model.rho[0] << ") -> "
                          << *out << "\n";
                if (!index_out->empty()) {
                    const JsonSection* rows = container.find_blob("pairs");
                    if (rows == nullptr) {
                        fail(ErrorCode::SchemaViolation,
                             *pairs_path + ": no pair metadata for index building");
                    }
                    std::vector<IndexEntry> refs;
                    for (const json& rec : json::parse(rows->payload)) {
                        refs.push_back({rec.at("text_element_id").get<std::string>(),
                                        rec.at("page_id").get<std::string>(),
                                        rec.at("participant_id").get<std::string>(),
                                        rec.at("fixation_index").get<int>()});
                    }
                    RetrievalIndex index = build_index(model, t->matrix, std::move(refs));
                    save_index(index, *index_out);
                    std::cout << "index (" << index.size() << " texts) -> " << *index_out << "\n";
                }
            };
        });
    }

    // query ---------------------------------------------------------------------
    auto* query_cmd = app.add_subcommand("query", "nearest equivalent text for image features");
    {
        auto model_path = std::make_shared<std::string>();
        auto index_path = std::make_shared<std::string>();
        auto features_path = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto k = std::make_shared<int>(5);
        auto space = std::make_shared<std::string>("text");
        query_cmd->add_option("--model", *model_path, "fitted model")->required();
        query_cmd->add_option("--index", *index_path, "retrieval index")->required();
        query_cmd->add_option("--image-features", *features_path, "query JSON")->required();
        query_cmd->add_option("-k", *k, "results per query");
        query_cmd->add_option("--space", *space, "ranking space: text|subspace")
            ->check(CLI::IsMember({"text", "subspace"}));
        query_cmd->add_option("-o,--output", *out, "write results here instead of stdout");
        query_cmd->callback([=]() {
            run = [=]() {
                CcaModel model = load_cca_model(*model_path);
                RetrievalIndex index = load_index(*index_path);
                std::vector<Eigen::VectorXd> queries = load_query_vectors(*features_path);
                json results = json::array();
                for (const Eigen::VectorXd& q : queries) {
                    results.push_back(
                        ranked_to_json(nearest_text(model, index, q, *k, space_from_name(*space))));
                }
                json doc = queries.size() == 1 ? results[0] : results;
                if (out->empty()) {
                    std::cout << doc.dump(2) << "\n";
                } else {
                    write_json_file(*out, doc);
                }
            };
        });
    }

    // evaluate ---------------------------------------------------------------------
    auto* eval_cmd = app.add_subcommand("evaluate", "cross-validated replacement scoring");
    {
        auto root = std::make_shared<std::string>();
        auto manifest_path = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>("report.json");
        auto d = std::make_shared<int>(kDefaultSubspaceDim);
        auto lambda = std::make_shared<double>(kDefaultRidgeLambda);
        auto folds = std::make_shared<int>(5);
        auto protocol = std::make_shared<std::string>("kfold");
        auto space = std::make_shared<std::string>("text");
        auto same_page = std::make_shared<bool>(false);
        auto seed = std::make_shared<std::uint64_t>(0);
        auto min_ms = std::make_shared<int>(100);
        eval_cmd->add_option("--root", *root, "corpus directory")->required();
        eval_cmd->add_option("--manifest", *manifest_path, "text feature manifest JSON");
        eval_cmd->add_option("--d", *d, "subspace dimension");
        eval_cmd->add_option("--lambda", *lambda, "ridge regularization weight");
        eval_cmd->add_option("--folds", *folds, "cross-validation folds");
        eval_cmd->add_option("--protocol", *protocol, "kfold|lopo")
            ->check(CLI::IsMember({"kfold", "lopo"}));
        eval_cmd->add_option("--space", *space, "ranking space: text|subspace")
            ->check(CLI::IsMember({"text", "subspace"}));
        eval_cmd->add_flag("--same-page-only", *same_page, "restrict candidates to the query's page");
        eval_cmd->add_option("--seed", *seed, "fold shuffle seed");
        eval_cmd->add_option("--min-fixation-ms", *min_ms, "fixation duration threshold");
        eval_cmd->add_option("-o,--output", *out, "report output path");
        eval_cmd->callback([=]() {
            run = [=]() {
                Corpus corpus = load_corpus(*root);
                PairedDataset pairs = compute_pairs(corpus, *min_ms, Dedup::FirstFixation);
                if (pairs.empty()) fail(ErrorCode::EmptyDataset, "corpus yields no pairs");
                PairedFeatures features =
                    extract_paired_features(corpus, pairs, manifest_from_path(*manifest_path));
                EvalOptions options;
                options.d = *d;
                options.lambda = *lambda;
                options.folds = *folds;
                options.protocol = *protocol == "kfold" ? Protocol::KFold
                                                        : Protocol::LeaveOnePageOut;
                options.space = space_from_name(*space);
                options.same_page_only = *same_page;
                options.seed = *seed;
                EvaluationReport report = evaluate_retrieval(features, options);
                json doc = evaluation_report_to_json(report);
                doc["tool_version"] = kToolVersion;
                write_json_file(*out, doc);
                std::cout << "micro_f1=" << report.micro_f1 << " over " << report.n_queries
                          << " queries -> " << *out << "\n";
            };
        });
    }

    // cost ---------------------------------------------------------------------
    auto* cost_cmd = app.add_subcommand("cost", "memory and render-time savings");
    {
        auto root = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>("cost.json");
        auto bandwidth = std::make_shared<double>(kBandwidthDevelopingKbps);
        auto micro = std::make_shared<double>(ReferenceStudy::micro_f1);
        auto font_px = std::make_shared<int>(16);
        cost_cmd->add_option("--root", *root, "corpus directory")->required();
        cost_cmd->add_option("--bandwidth", *bandwidth, "bandwidth in kbps");
        cost_cmd->add_option("--micro-f1", *micro, "replacement micro-F1 to scale savings");
        cost_cmd->add_option("--font-px", *font_px, "replacement font size");
        cost_cmd->add_option("-o,--output", *out, "cost report output path");
        cost_cmd->callback([=]() {
            run = [=]() {
                Corpus corpus = load_corpus(*root);
                CostParams params;
                params.bandwidth_kbps = *bandwidth;
                params.font_px = *font_px;
                CostReport report = build_cost_report(corpus, params, *micro);
                json doc = cost_report_to_json(report);
                doc["tool_version"] = kToolVersion;
                write_json_file(*out, doc);
                std::cout << "achieved saving " << report.achieved_saving_pct << "% -> " << *out
                          << "\n";
            };
        });
    }

    // synth ---------------------------------------------------------------------
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic corpus");
    {
        auto spec_path = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto seed = std::make_shared<std::int64_t>(-1);
        auto pages = std::make_shared<int>(-1);
        auto participants = std::make_shared<int>(-1);
        auto max_fi = std::make_shared<int>(-1);
        auto noise = std::make_shared<double>(-1.0);
        auto signal = std::make_shared<double>(-1.0);
        synth_cmd->add_option("--spec", *spec_path, "SynthSpec JSON");
        synth_cmd->add_option("-o,--output", *out, "corpus output directory")->required();
        synth_cmd->add_option("--seed", *seed, "override spec seed");
        synth_cmd->add_option("--pages", *pages, "override page count");
        synth_cmd->add_option("--participants", *participants, "override participant count");
        synth_cmd->add_option("--max-fi", *max_fi, "override elements per modality");
        synth_cmd->add_option("--noise", *noise, "override noise sigma");
        synth_cmd->add_option("--signal", *signal, "override fixation-order signal strength");
        synth_cmd->callback([=]() {
            run = [=]() {
                SynthSpec spec =
                    spec_path->empty() ? SynthSpec{} : synth_spec_from_file(*spec_path);
                if (*seed >= 0) spec.seed = static_cast<std::uint64_t>(*seed);
                if (*pages > 0) spec.n_pages = *pages;
                if (*participants > 0) spec.n_participants = *participants;
                if (*max_fi > 0) spec.max_fi = *max_fi;
                if (*noise >= 0.0) spec.noise_sigma = *noise;
                if (*signal >= 0.0) spec.fi_signal_strength = *signal;
                PairedDataset truth = gen_attention_corpus(spec, *out);
                std::cout << "corpus with " << truth.size() << " ground-truth pairs -> " << *out
                          << "\n";
            };
        });
    }

    // pipeline ---------------------------------------------------------------------
    auto* pipeline_cmd = app.add_subcommand("pipeline", "run every stage from one config");
    {
        auto config_path = std::make_shared<std::string>();
        auto root = std::make_shared<std::string>();
        auto out_dir = std::make_shared<std::string>();
        auto d = std::make_shared<int>(-1);
        auto lambda = std::make_shared<double>(-1.0);
        auto folds = std::make_shared<int>(-1);
        auto seed = std::make_shared<std::int64_t>(-1);
        auto no_cache = std::make_shared<bool>(false);
        pipeline_cmd->add_option("--config", *config_path, "pipeline config JSON");
        pipeline_cmd->add_option("--root", *root, "override corpus_root");
        pipeline_cmd->add_option("--out", *out_dir, "override output_dir");
        pipeline_cmd->add_option("--d", *d, "override subspace dimension");
        pipeline_cmd->add_option("--lambda", *lambda, "override ridge weight");
        pipeline_cmd->add_option("--folds", *folds, "override fold count");
        pipeline_cmd->add_option("--seed", *seed, "override seed");
        pipeline_cmd->add_flag("--no-cache", *no_cache, "recompute every stage");
        pipeline_cmd->callback([=]() {
            run = [=]() {
                PipelineConfig config = config_path->empty()
                                            ? PipelineConfig{}
                                            : pipeline_config_from_file(*config_path);
                if (!root->empty()) config.corpus_root = *root;
                if (!out_dir->empty()) config.output_dir = *out_dir;
                if (*d > 0) config.d = *d;
                if (*lambda >= 0.0) config.lambda = *lambda;
                if (*folds > 0) config.folds = *folds;
                if (*seed >= 0) config.seed = static_cast<std::uint64_t>(*seed);
                if (*no_cache) config.use_cache = false;
                run_pipeline(config);
            };
        });
    }

    try {
        app.parse(argc, argv);
        run();
        return 0;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
}
