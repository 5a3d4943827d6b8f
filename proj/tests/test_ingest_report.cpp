#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "atlas/ingest.hpp"
#include "atlas/report.hpp"
#include "atlas/uncertainty.hpp"
#include "test_support.hpp"

using namespace atlas;

TEST_CASE("shipped taxonomy config") {
    const TaxonomyConfig config = test::default_config();
    CHECK(config.dimensions.size() == 8);
    int components = 0;
    long total = 0;
    for (const auto& dim : config.dimensions) {
        for (const auto& comp : dim.components) {
            ++components;
            if (comp.is_sliced())
                for (const auto& [slice, n] : comp.counts) total += n;
            else
                total += comp.total_count;
        }
    }
    CHECK(components == 9);
    CHECK(config.grid.slices.size() == 8);
    CHECK(total == 6438);
    CHECK(config.scopes == std::vector<Tokens>{131072, 1048576});
    // the code component starts above the grid minimum
    const ComponentConfig* code = config.find_component("longcodebench");
    REQUIRE(code);
    CHECK(code->slices->front() == 32768);
    CHECK(config.find_component("mrcr_8needle")->estimator == EstimatorKind::cluster);
    CHECK(config.find_component("aa_lcr")->estimator == EstimatorKind::cluster);
    CHECK(config.find_component("longcodebench")->estimator == EstimatorKind::weighted);
    CHECK(config.find_component("oolong_synth")->estimator == EstimatorKind::clt);
}

TEST_CASE("taxonomy parse failures name the problem") {
    CHECK_THROWS_AS(parse_taxonomy(""), InputError);
    CHECK_THROWS_AS(parse_taxonomy("{"), InputError);
    CHECK_THROWS_AS(parse_taxonomy(R"({"grid":[8192,16384],"scopes":[16384]})"), InputError);
    // dimension in two layers
    const char* dup = R"({
      "grid": [8192, 16384], "scopes": [16384],
      "dimensions": [
        {"name": "d", "layer": "foundational", "components":
          [{"name": "c1", "metric": "em", "estimator": "clt", "slices": [8192, 16384]}]},
        {"name": "d", "layer": "application", "components":
          [{"name": "c2", "metric": "em", "estimator": "clt", "slices": [8192, 16384]}]}
      ]})";
    CHECK_THROWS_WITH_AS(parse_taxonomy(dup),
                         "dimension 'd' appears in more than one layer", InputError);
}

TEST_CASE("instance ingestion end to end") {
    const TaxonomyConfig config = test::default_config();
    std::vector<std::string> diagnostics;
    const auto records = read_instance_records(test::data_dir() / "examples/demo_instances.jsonl",
                                               config, diagnostics);
    CHECK(diagnostics.empty());
    CHECK(records.size() == 448);

    const ScoreSurface surface = ingest_instances(records, config, diagnostics);
    CHECK(diagnostics.empty());
    CHECK(validate_surface(surface, config, ReportingScope{1048576}).empty());
    CHECK(surface.models() == std::vector<std::string>{"model-alpha", "model-beta"});

    SUBCASE("parallel and sequential ingestion agree exactly") {
        IngestOptions sequential;
        sequential.parallel = false;
        std::vector<std::string> diag2;
        const ScoreSurface other = ingest_instances(records, config, diag2, sequential);
        REQUIRE(other.cells.size() == surface.cells.size());
        for (const auto& [key, score] : surface.cells) {
            const SliceScore* cell = other.find(key);
            REQUIRE(cell);
            CHECK(cell->mean == score.mean);
            CHECK(cell->variance == score.variance);
        }
    }
    SUBCASE("all-correct group scores 100 with zero variance") {
        // model-alpha at 8K: 4 of 4 correct on the ICL component
        const SliceScore* cell = surface.find({"model-alpha", "icl", "helmet_icl_extend", 8192});
        REQUIRE(cell);
        CHECK(cell->mean == 100.0);
        CHECK(cell->variance == 0.0);
        CHECK(cell->n == 4);
    }
    SUBCASE("cluster estimator applied to clustered components") {
        // model-beta mrcr at 1M: 1 of 4 correct in clusters {1,0},{0,0}
        std::vector<ClusteredScore> expect = {{1, "ctx-0"}, {0, "ctx-0"}, {0, "ctx-1"}, {0, "ctx-1"}};
        const CiEstimate oracle = scale_to_reporting(cluster_variance(expect));
        const SliceScore* cell = surface.find({"model-beta", "retrieval", "mrcr_8needle", 1048576});
        REQUIRE(cell);
        CHECK(cell->mean == doctest::Approx(oracle.mean).epsilon(1e-12));
        CHECK(cell->variance == doctest::Approx(oracle.variance).epsilon(1e-12));
        // whole-cluster hits at alpha/256K ({1,1},{0,0}) separate the two
        // estimators: cluster-robust 0.25 vs CLT 1/12 (on the 0-1 scale)
        const SliceScore* correlated =
            surface.find({"model-alpha", "retrieval", "mrcr_8needle", 262144});
        REQUIRE(correlated);
        CHECK(correlated->variance == doctest::Approx(0.25 * 1e4).epsilon(1e-12));
        const CiEstimate clt = scale_to_reporting(clt_variance(std::vector<double>{1, 1, 0, 0}));
        CHECK(correlated->variance != doctest::Approx(clt.variance));
    }
    SUBCASE("weighted composite for the code component") {
        // model-alpha at 32K: longcodeqa {1,1}, longswe {1,0}
        std::vector<SubcomponentScores> subs = {{"longcodeqa", {1, 1}, 2.0},
                                                {"longswe", {1, 0}, 2.0}};
        const CiEstimate oracle = scale_to_reporting(weighted_binary_composite(subs));
        const SliceScore* cell = surface.find({"model-alpha", "code", "longcodebench", 32768});
        REQUIRE(cell);
        CHECK(cell->mean == doctest::Approx(oracle.mean).epsilon(1e-12));
        CHECK(cell->variance == doctest::Approx(oracle.variance).epsilon(1e-12));
    }
}

TEST_CASE("instance diagnostics") {
    const TaxonomyConfig config = test::default_config();
    test::TempDir tmp("diag");
    const auto path = tmp.path / "records.jsonl";

    SUBCASE("unreadable line cited by number") {
        write_text_file(path,
                        R"({"model":"m","component":"helmet_icl_extend","slice":8192,"instance_id":"a","prediction":"B","gold":"B"})"
                        "\nnot json\n");
        std::vector<std::string> diagnostics;
        read_instance_records(path, config, diagnostics);
        REQUIRE(diagnostics.size() == 1);
        CHECK(diagnostics.front().find("line 2") != std::string::npos);
    }
    SUBCASE("unknown component") {
        write_text_file(path,
                        R"({"model":"m","component":"mystery","slice":8192,"instance_id":"a","prediction":"B","gold":"B"})"
                        "\n");
        std::vector<std::string> diagnostics;
        read_instance_records(path, config, diagnostics);
        REQUIRE(diagnostics.size() == 1);
        CHECK(diagnostics.front().find("unknown component") != std::string::npos);
    }
    SUBCASE("slice not supported by the component") {
        write_text_file(path,
                        R"({"model":"m","component":"longcodebench","slice":8192,"instance_id":"a","kind":"binary","prediction":1,"gold":1})"
                        "\n");
        std::vector<std::string> diagnostics;
        read_instance_records(path, config, diagnostics);
        REQUIRE(diagnostics.size() == 1);
        CHECK(diagnostics.front().find("does not support slice") != std::string::npos);
    }
    SUBCASE("payload kind mismatch becomes a record diagnostic") {
        write_text_file(path,
                        R"({"model":"m","component":"graphwalks_extend","slice":8192,"instance_id":"a","prediction":"text","gold":["n1"]})"
                        "\n");
        std::vector<std::string> diagnostics;
        read_instance_records(path, config, diagnostics);
        REQUIRE(diagnostics.size() == 1);
        CHECK(diagnostics.front().find("payload") != std::string::npos);
    }
}

TEST_CASE("slice score CSV ingestion") {
    const TaxonomyConfig config = test::default_config();
    const char* header = "model,dimension,component,slice,mean,variance,n\n";

    SUBCASE("duplicate key row") {
        const std::string csv = std::string(header) +
                                "m,retrieval,mrcr_8needle,8192,50,0,10\n"
                                "m,retrieval,mrcr_8needle,8192,60,0,10\n";
        CHECK_THROWS_WITH_AS(parse_slice_scores(csv, config),
                             doctest::Contains("duplicate"), InputError);
    }
    SUBCASE("out-of-range mean") {
        const std::string csv = std::string(header) + "m,retrieval,mrcr_8needle,8192,101,0,10\n";
        CHECK_THROWS_WITH_AS(parse_slice_scores(csv, config),
                             doctest::Contains("outside [0,100]"), InputError);
    }
    SUBCASE("missing variance column defaults to zero with a warning") {
        const std::string csv =
            "model,dimension,component,slice,mean,n\nm,retrieval,mrcr_8needle,8192,50,10\n";
        std::vector<std::string> warnings;
        const ScoreSurface surface = parse_slice_scores(csv, config, &warnings);
        REQUIRE(warnings.size() == 1);
        CHECK(surface.find({"m", "retrieval", "mrcr_8needle", 8192})->variance == 0.0);
    }
    SUBCASE("holistic rows carry an empty slice") {
        const std::string csv = std::string(header) + "m,holistic,longbench_v2,,61.5,0.25,503\n";
        const ScoreSurface surface = parse_slice_scores(csv, config);
        const SliceScore* cell = surface.find({"m", "holistic", "longbench_v2", std::nullopt});
        REQUIRE(cell);
        CHECK(cell->mean == 61.5);
    }
    SUBCASE("empty file") {
        CHECK_THROWS_AS(parse_slice_scores("", config), InputError);
    }
}

TEST_CASE("leaderboard emission") {
    const auto rows = test::load_fixture_leaderboard("leaderboard_128k.csv");
    REQUIRE(rows.size() == 26);

    SUBCASE("markdown mirrors the published layout") {
        const std::string md = emit_leaderboard(rows, ReportFormat::markdown);
        CHECK(md.find("| 1 | Gemini-3.1-Pro-Preview (high) | 86.36±1.96 | 74.98±2.03 | "
                      "73.37±3.09 | 77.83±1.47 |") != std::string::npos);
        CHECK(md.find("ATLAScore") != std::string::npos);
    }
    SUBCASE("emit -> ingest -> emit is a fixed point in all three formats") {
        for (ReportFormat format :
             {ReportFormat::csv, ReportFormat::json, ReportFormat::markdown}) {
            const std::string once = emit_leaderboard(rows, format);
            const auto reparsed = parse_leaderboard(once, format);
            CHECK(emit_leaderboard(reparsed, format) == once);
        }
    }
    SUBCASE("empty model set emits a header-only document") {
        CHECK(emit_leaderboard({}, ReportFormat::csv).find("rank,model") == 0);
        const std::string md = emit_leaderboard({}, ReportFormat::markdown);
        CHECK(std::count(md.begin(), md.end(), '\n') == 2);
        const auto round = parse_leaderboard(emit_leaderboard({}, ReportFormat::json),
                                             ReportFormat::json);
        CHECK(round.empty());
    }
    SUBCASE("numbers carry exactly two decimals in csv and markdown") {
        const std::string csv = emit_leaderboard(rows, ReportFormat::csv);
        std::istringstream in(csv);
        std::string line;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            const auto fields = split_csv_line(line);
            for (std::size_t i = 2; i < fields.size(); ++i) {
                const auto dot = fields[i].find('.');
                REQUIRE(dot != std::string::npos);
                CHECK(fields[i].size() - dot - 1 == 2);
            }
        }
    }
    SUBCASE("line endings are bare LF") {
        const std::string csv = emit_leaderboard(rows, ReportFormat::csv);
        CHECK(csv.find('\r') == std::string::npos);
    }
}

TEST_CASE("round-half-even display rounding") {
    CHECK(format_fixed2(0.125) == "0.12");   // exact binary half rounds to even
    CHECK(format_fixed2(0.375) == "0.38");
    CHECK(format_fixed2(2.5) == "2.50");
    CHECK(format_fixed2(77.829) == "77.83");
    CHECK(format_fixed2(-0.125) == "-0.12");
}

TEST_CASE("bundle json carries leaderboard and radar data") {
    const TaxonomyConfig config = test::default_config();
    ScoreSurface surface;
    test::add_constant_model(surface, config, "m-1", 80, 70, 60);
    test::add_constant_model(surface, config, "m-2", 70, 60, 50);
    const ReportBundle bundle = make_bundle(surface, config, ReportingScope{131072});
    REQUIRE(bundle.cards.size() == 2);
    REQUIRE(bundle.radar.size() == 2);
    CHECK(bundle.radar[0].components.size() == 9);  // every component has an axis
    const std::string json = bundle_to_json(bundle);
    for (const char* field : {"scope", "weights", "aggregator", "leaderboard", "radar"})
        CHECK(json.find(field) != std::string::npos);
    // deterministic serialization
    CHECK(bundle_to_json(bundle) == json);
}

TEST_CASE("config digest is stable") {
    CHECK(fnv1a64_hex("") == "cbf29ce484222325");
    CHECK(fnv1a64_hex("atlas") == fnv1a64_hex("atlas"));
    CHECK(fnv1a64_hex("atlas") != fnv1a64_hex("atlas "));
}
