#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "attnswap/ingest.hpp"

#include "test_support.hpp"

using namespace attnswap;
using namespace testsupport;

TEST_CASE("load_corpus accepts the baseline corpus") {
    auto root = make_temp_dir("ingest_ok");
    baseline_corpus().write(root);
    Corpus corpus = load_corpus(root.string());
    CHECK(corpus.pages.size() == 1);
    CHECK(corpus.elements.size() == 2);
    CHECK(corpus.fixations.size() == 3);
    CHECK(corpus.find_element("t1")->modality == Modality::Text);
    CHECK(corpus.find_element("i1")->raster_ref == "i1.ppm");
    fs::remove_all(root);
}

TEST_CASE("load_corpus handles an empty element list") {
    auto root = make_temp_dir("ingest_empty");
    CorpusFiles files = baseline_corpus();
    files.elements = nlohmann::json::array();
    files.fixations = nlohmann::json::array();
    files.write(root);
    Corpus corpus = load_corpus(root.string());
    CHECK(corpus.elements.empty());
    auto events = map_fixations_to_elements(corpus.fixations, corpus.elements, Viewport{});
    CHECK(events.empty());
    fs::remove_all(root);
}

TEST_CASE("load_corpus scales to a 22-page corpus") {
    auto root = make_temp_dir("ingest_22");
    CorpusFiles files = baseline_corpus();
    files.pages = nlohmann::json::array();
    files.elements = nlohmann::json::array();
    files.fixations = nlohmann::json::array();
    for (int p = 0; p < 22; ++p) {
        files.pages.push_back({{"page_id", "p" + std::to_string(p)},
                               {"viewport", {{"width_px", 1680}, {"height_px", 1050}}},
                               {"screenshot_ref", "shot_p1.ppm"}});
    }
    files.write(root);
    CHECK(load_corpus(root.string()).pages.size() == 22);
    fs::remove_all(root);
}

TEST_CASE("load_corpus reports missing and malformed inputs") {
    SUBCASE("missing fixations.json") {
        auto root = make_temp_dir("ingest_missing");
        baseline_corpus().write(root);
        fs::remove(root / "fixations.json");
        CHECK(error_code_of([&] { load_corpus(root.string()); }) == ErrorCode::MissingFile);
        fs::remove_all(root);
    }

    SUBCASE("fixation referencing an unknown page") {
        auto root = make_temp_dir("ingest_dangle");
        CorpusFiles files = baseline_corpus();
        files.fixations[0]["page_id"] = "nope";
        files.write(root);
        CHECK(error_code_of([&] { load_corpus(root.string()); }) == ErrorCode::DanglingReference);
        fs::remove_all(root);
    }

    SUBCASE("element referencing an unknown page") {
        auto root = make_temp_dir("ingest_dangle_el");
        CorpusFiles files = baseline_corpus();
        files.elements[0]["page_id"] = "nope";
        files.write(root);
        CHECK(error_code_of([&] { load_corpus(root.string()); }) == ErrorCode::DanglingReference);
        fs::remove_all(root);
    }

    SUBCASE("missing raster file") {
        auto root = make_temp_dir("ingest_noraster");
        CorpusFiles files = baseline_corpus();
        files.elements[1]["raster_ref"] = "nope.ppm";
        files.write(root);
        CHECK(error_code_of([&] { load_corpus(root.string()); }) == ErrorCode::DanglingReference);
        fs::remove_all(root);
    }

    SUBCASE("field-level schema message") {
        auto root = make_temp_dir("ingest_schema");
        CorpusFiles files = baseline_corpus();
        files.elements[0]["bbox"]["w"] = -5;
        files.write(root);
        try {
            load_corpus(root.string());
            FAIL("expected SchemaViolation");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::SchemaViolation);
            CHECK(std::string(e.what()).find("elements.json[0].bbox") != std::string::npos);
        }
        fs::remove_all(root);
    }

    SUBCASE("text element with a raster_ref") {
        auto root = make_temp_dir("ingest_mixed");
        CorpusFiles files = baseline_corpus();
        files.elements[0]["raster_ref"] = "i1.ppm";
        files.write(root);
        CHECK(error_code_of([&] { load_corpus(root.string()); }) == ErrorCode::SchemaViolation);
        fs::remove_all(root);
    }

    SUBCASE("non-increasing onsets within a session") {
        auto root = make_temp_dir("ingest_onset");
        CorpusFiles files = baseline_corpus();
        files.fixations[1]["onset_ms"] = 100;
        files.write(root);
        CHECK(error_code_of([&] { load_corpus(root.string()); }) == ErrorCode::SchemaViolation);
        fs::remove_all(root);
    }
}

TEST_CASE("filter_fixations keeps only long-enough dwells") {
    std::vector<Fixation> samples = {{"u1", "p1", 0, 0, 100, 99},
                                     {"u1", "p1", 0, 0, 200, 100},
                                     {"u1", "p1", 0, 0, 300, 250}};

    SUBCASE("threshold 100 drops the 99 ms sample") {
        auto kept = filter_fixations(samples, 100);
        REQUIRE(kept.size() == 2);
        CHECK(kept[0].duration_ms == 100);
        CHECK(kept[1].duration_ms == 250);
    }

    SUBCASE("threshold 0 is the identity") {
        CHECK(filter_fixations(samples, 0).size() == samples.size());
    }

    SUBCASE("empty input stays empty") {
        CHECK(filter_fixations({}, 100).empty());
    }

    SUBCASE("idempotence") {
        auto once = filter_fixations(samples, 100);
        auto twice = filter_fixations(once, 100);
        REQUIRE(once.size() == twice.size());
        for (std::size_t i = 0; i < once.size(); ++i) {
            CHECK(once[i].onset_ms == twice[i].onset_ms);
        }
    }
}

namespace {

Element text_element(const std::string& id, BBox bbox, int z = 0) {
    Element e;
    e.element_id = id;
    e.page_id = "p1";
    e.modality = Modality::Text;
    e.bbox = bbox;
    e.z_order = z;
    return e;
}

}  // namespace

TEST_CASE("hit-testing maps fixations onto elements") {
    Viewport viewport;

    SUBCASE("single containing element") {
        std::vector<Element> elements = {text_element("a", {0, 0, 100, 100})};
        std::vector<Fixation> fixations = {{"u1", "p1", 10, 10, 100, 150}};
        auto events = map_fixations_to_elements(fixations, elements, viewport);
        REQUIRE(events.size() == 1);
        CHECK(events[0].element_id == "a");
    }

    SUBCASE("nested boxes resolve to the smaller area") {
        // Oracle: enumerate containing elements by hand. Point (10,10) lies in
        // both; "inner" has area 400 < 10000, so it wins.
        std::vector<Element> elements = {text_element("outer", {0, 0, 100, 100}),
                                         text_element("inner", {5, 5, 20, 20})};
        std::vector<Fixation> fixations = {{"u1", "p1", 10, 10, 100, 150}};
        auto events = map_fixations_to_elements(fixations, elements, viewport);
        REQUIRE(events.size() == 1);
        CHECK(events[0].element_id == "inner");
    }

    SUBCASE("equal area resolves to higher z-order, then smaller id") {
        std::vector<Element> overlap = {text_element("b", {0, 0, 50, 50}, 1),
                                        text_element("a", {0, 0, 50, 50}, 0)};
        std::vector<Fixation> fixations = {{"u1", "p1", 10, 10, 100, 150}};
        auto events = map_fixations_to_elements(fixations, overlap, viewport);
        REQUIRE(events.size() == 1);
        CHECK(events[0].element_id == "b");

        std::vector<Element> tie = {text_element("b", {0, 0, 50, 50}),
                                    text_element("a", {0, 0, 50, 50})};
        events = map_fixations_to_elements(fixations, tie, viewport);
        REQUIRE(events.size() == 1);
        CHECK(events[0].element_id == "a");
    }

    SUBCASE("misses are dropped and counted") {
        std::vector<Element> elements = {text_element("a", {0, 0, 100, 100})};
        std::vector<Fixation> fixations = {{"u1", "p1", 500, 500, 100, 150}};
        HitTestDiagnostics diag;
        auto events = map_fixations_to_elements(fixations, elements, viewport, &diag);
        CHECK(events.empty());
        CHECK(diag.misses == 1);
        CHECK(diag.hits == 0);
    }

    SUBCASE("half-open boundaries") {
        std::vector<Element> elements = {text_element("left", {0, 0, 100, 100}),
                                         text_element("right", {100, 0, 100, 100})};
        // x = 100 is outside "left" (right edge) and inside "right" (left edge).
        std::vector<Fixation> fixations = {{"u1", "p1", 100, 50, 100, 150}};
        auto events = map_fixations_to_elements(fixations, elements, viewport);
        REQUIRE(events.size() == 1);
        CHECK(events[0].element_id == "right");

        std::vector<Fixation> bottom = {{"u1", "p1", 50, 100, 100, 150}};
        events = map_fixations_to_elements(bottom, {text_element("a", {0, 0, 100, 100})}, viewport);
        CHECK(events.empty());
    }

    SUBCASE("output length never exceeds input length and mapping is deterministic") {
        std::vector<Element> elements = {text_element("a", {0, 0, 100, 100}),
                                         text_element("b", {50, 50, 100, 100})};
        std::vector<Fixation> fixations;
        for (int i = 0; i < 40; ++i) {
            fixations.push_back({"u1", "p1", (i * 17) % 220 + 0.5, (i * 29) % 220 + 0.5,
                                 100 + 10 * i, 150});
        }
        auto first = map_fixations_to_elements(fixations, elements, viewport);
        auto second = map_fixations_to_elements(fixations, elements, viewport);
        CHECK(first.size() <= fixations.size());
        REQUIRE(first.size() == second.size());
        for (std::size_t i = 0; i < first.size(); ++i) {
            CHECK(first[i].element_id == second[i].element_id);
            CHECK(first[i].onset_ms == second[i].onset_ms);
        }
    }
}
