#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "attnswap/costs.hpp"
#include "attnswap/error.hpp"

using namespace attnswap;
namespace fs = std::filesystem;

namespace {

bool within(double value, double expected, double tol) {
    return std::abs(value - expected) <= tol;
}

fs::path make_temp_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("attnswap_costs_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_bytes(const fs::path& path, std::size_t count) {
    std::ofstream out(path, std::ios::binary);
    std::string body(count, 'x');
    out << body;
}

Corpus corpus_with_rasters(const fs::path& root, const std::vector<std::size_t>& sizes) {
    Corpus corpus;
    corpus.root = root.string();
    corpus.pages.push_back({"p1", Viewport{}, "shot.ppm"});
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        std::string name = "img" + std::to_string(i) + ".bin";
        write_bytes(root / name, sizes[i]);
        Element e;
        e.element_id = "e" + std::to_string(i);
        e.page_id = "p1";
        e.modality = Modality::Image;
        e.bbox = {0, 0, 10, 10};
        e.raster_ref = name;
        corpus.elements.push_back(e);
    }
    return corpus;
}

}  // namespace

TEST_CASE("screen text cost matches the published arithmetic") {
    CostParams params;  // 1680x1050, 16px, 4+1 bytes/char
    // floor(1680*1050/256) = 6890 chars -> 34450 B -> 33.642578125 kB
    CHECK(within(screen_text_cost_kB(params), 33.64, 0.01));

    CostParams unit;
    unit.viewport = {16, 16};
    CHECK(screen_text_cost_kB(unit) == doctest::Approx(5.0 / 1024.0));

    CostParams small;
    small.viewport = {256, 256};
    CHECK(screen_text_cost_kB(small) == doctest::Approx(1.25));
}

TEST_CASE("saving percentages reproduce the published figures") {
    CHECK(within(saving_pct(61.68, 33.64), 83.35, 0.01));
    CHECK(within(saving_pct(389.8, 33.64), 1058.74, 0.01));
    CHECK(saving_pct(33.64, 33.64) == doctest::Approx(0.0));
    CHECK_THROWS_AS(saving_pct(10.0, 0.0), Error);
}

TEST_CASE("achieved saving scales with micro-F1") {
    CHECK(within(achieved_saving_pct(389.8, 0.52, 33.64), 502.54, 0.01));
    CHECK(achieved_saving_pct(389.8, 0.0, 33.64) == doctest::Approx(-100.0));
    CHECK(within(achieved_saving_pct(389.8, 1.0, 33.64), 1058.74, 0.01));
    CHECK_THROWS_AS(achieved_saving_pct(389.8, 1.5, 33.64), Error);
}

TEST_CASE("achieved saving at micro-F1 = 1 equals the plain saving exactly") {
    for (double cost : {10.0, 61.68, 389.8, 1000.0}) {
        CHECK(achieved_saving_pct(cost, 1.0, 33.64) == saving_pct(cost, 33.64));
    }
}

TEST_CASE("render times reproduce the published figures") {
    CHECK(within(render_time_s(202.696, 53.0), 30.60, 0.01));
    CHECK(within(render_time_s(33.64, 53.0), 5.078, 0.01));
    CHECK(render_time_s(7.5, 6.0) == doctest::Approx(10.0));
    CHECK_THROWS_AS(render_time_s(1.0, 0.0), Error);

    // linear in cost, inversely linear in bandwidth
    CHECK(render_time_s(20.0, 53.0) == doctest::Approx(2.0 * render_time_s(10.0, 53.0)));
    CHECK(render_time_s(10.0, 106.0) == doctest::Approx(0.5 * render_time_s(10.0, 53.0)));
}

TEST_CASE("corpus image costs sum on-disk bytes") {
    fs::path root = make_temp_dir("sizes");

    SUBCASE("single 1024-byte image") {
        Corpus corpus = corpus_with_rasters(root, {1024});
        CorpusImageCosts costs = corpus_image_costs(corpus);
        CHECK(costs.total_kB == doctest::Approx(1.0));
        CHECK(costs.mean_per_image_kB == doctest::Approx(1.0));
        CHECK(costs.mean_per_page_kB == doctest::Approx(1.0));
        CHECK(costs.image_count == 1);
    }

    SUBCASE("two images on one page") {
        Corpus corpus = corpus_with_rasters(root, {1024, 3072});
        CorpusImageCosts costs = corpus_image_costs(corpus);
        CHECK(costs.total_kB == doctest::Approx(4.0));
        CHECK(costs.mean_per_image_kB == doctest::Approx(2.0));
        CHECK(costs.mean_per_page_kB == doctest::Approx(4.0));
        CHECK(costs.image_count == 2);
        REQUIRE(costs.per_page.size() == 1);
        CHECK(costs.per_page[0].image_count == 2);
    }

    SUBCASE("missing raster raises UnreadableRaster") {
        Corpus corpus = corpus_with_rasters(root, {1024});
        corpus.elements[0].raster_ref = "gone.bin";
        try {
            corpus_image_costs(corpus);
            FAIL("expected UnreadableRaster");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::UnreadableRaster);
        }
    }

    fs::remove_all(root);
}

TEST_CASE("cost report wires the pieces together") {
    fs::path root = make_temp_dir("report");
    Corpus corpus = corpus_with_rasters(
        root, {static_cast<std::size_t>(61.68 * 1024), static_cast<std::size_t>(61.68 * 1024)});
    CostParams params;
    CostReport report = build_cost_report(corpus, params, 0.52);
    CHECK(within(report.text_cost_kB, 33.64, 0.01));
    CHECK(within(report.min_saving_pct, 83.35, 0.05));
    CHECK(report.images.mean_per_image_kB == doctest::Approx(61.68).epsilon(0.001));
    CHECK(within(report.render_time_after_s, 5.078, 0.01));
    fs::remove_all(root);
}
