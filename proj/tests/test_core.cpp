#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "atlas/core.hpp"
#include "atlas/ingest.hpp"
#include "test_support.hpp"

using namespace atlas;

TEST_CASE("length grid enforces ordering and size") {
    CHECK_THROWS_AS(LengthGrid({8192}), InputError);
    CHECK_THROWS_AS(LengthGrid({8192, 8192}), InputError);
    CHECK_THROWS_AS(LengthGrid({16384, 8192}), InputError);
    const LengthGrid grid = LengthGrid::standard();
    CHECK(grid.slices.size() == 8);
    CHECK(grid.slices.front() == 8192);
    CHECK(grid.slices.back() == 1048576);
    // any increasing grid is legal, geometric spacing is not assumed
    CHECK_NOTHROW(LengthGrid({1000, 1001, 5000}));
}

TEST_CASE("scope restriction") {
    const LengthGrid grid = LengthGrid::standard();
    CHECK(grid.up_to(131072) == std::vector<Tokens>{8192, 16384, 32768, 65536, 131072});
    CHECK(grid.up_to(1048576).size() == 8);
    CHECK_THROWS_AS(grid.up_to(100000), InputError);
}

TEST_CASE("length parsing and formatting") {
    CHECK(parse_length("128K") == 131072);
    CHECK(parse_length("1M") == 1048576);
    CHECK(parse_length("8k") == 8192);
    CHECK(parse_length("131072") == 131072);
    CHECK_THROWS_AS(parse_length("abc"), InputError);
    CHECK_THROWS_AS(parse_length(""), InputError);
    CHECK(format_length(131072) == "128K");
    CHECK(format_length(1048576) == "1M");
    CHECK(format_length(1000) == "1000");
}

TEST_CASE("surface rejects duplicate keys") {
    ScoreSurface surface;
    surface.insert({"m", "retrieval", "mrcr_8needle", 8192}, {50.0, 0.0, 10});
    CHECK_THROWS_AS(surface.insert({"m", "retrieval", "mrcr_8needle", 8192}, {60.0, 0.0, 10}),
                    InputError);
}

TEST_CASE("validate_surface on a complete paper-shaped surface") {
    const TaxonomyConfig config = test::default_config();
    ScoreSurface surface;
    test::add_constant_model(surface, config, "m", 80.0, 70.0, 60.0);
    CHECK(validate_surface(surface, config).empty());
    CHECK(validate_surface(surface, config, ReportingScope{1048576}).empty());

    SUBCASE("validation is idempotent") {
        const auto first = validate_surface(surface, config, ReportingScope{1048576});
        const auto second = validate_surface(surface, config, ReportingScope{1048576});
        CHECK(first == second);
    }
}

TEST_CASE("missing cell is reported for the requested scope") {
    const TaxonomyConfig config = test::default_config();
    ScoreSurface surface;
    test::add_constant_model(surface, config, "m", 80.0, 70.0, 60.0);
    surface.cells.erase({"m", "retrieval", "mrcr_8needle", 262144});

    const auto at_1m = validate_surface(surface, config, ReportingScope{1048576});
    REQUIRE(at_1m.size() == 1);
    CHECK(at_1m.front().find("missing cell") != std::string::npos);
    CHECK(at_1m.front().find("256K") != std::string::npos);

    // the 256K cell is above the 128K scope, so that scope stays clean
    CHECK(validate_surface(surface, config, ReportingScope{131072}).empty());
}

TEST_CASE("a component starting above the grid minimum is legal") {
    const TaxonomyConfig config = test::default_config();
    ScoreSurface surface;
    test::add_constant_model(surface, config, "m", 80.0, 70.0, 60.0);
    // longcodebench has no 8K/16K cells by construction; absence is legal
    CHECK(!surface.find({"m", "code", "longcodebench", 8192}));
    CHECK(validate_surface(surface, config, ReportingScope{1048576}).empty());
}

TEST_CASE("out-of-range cells are violations, not crashes") {
    const TaxonomyConfig config = test::default_config();
    ScoreSurface surface;
    test::add_constant_model(surface, config, "m", 80.0, 70.0, 60.0);
    surface.cells[{"m", "retrieval", "mrcr_8needle", 8192}].mean = 101.0;
    surface.cells[{"m", "qa", "loft_text_retrieval_extend", 8192}].variance = -1.0;
    const auto violations = validate_surface(surface, config);
    CHECK(violations.size() == 2);
}

TEST_CASE("taxonomy structural invariants") {
    TaxonomyConfig config = test::default_config();
    SUBCASE("dimension in two layers") {
        DimensionConfig dup = config.dimensions.front();
        dup.layer = Layer::application;
        dup.components[0].name = "other_component";
        config.dimensions.push_back(dup);
        CHECK_THROWS_AS(config.validate(), InputError);
    }
    SUBCASE("holistic component with a grid") {
        for (auto& dim : config.dimensions)
            if (dim.layer == Layer::holistic)
                dim.components[0].slices = std::vector<Tokens>{8192, 16384};
        CHECK_THROWS_AS(config.validate(), InputError);
    }
    SUBCASE("scope must be a grid slice") {
        config.scopes.push_back(999);
        CHECK_THROWS_AS(config.validate(), InputError);
    }
}

TEST_CASE("surface CSV round-trip is bit-exact") {
    const TaxonomyConfig config = test::default_config();
    ScoreSurface surface;
    // awkward doubles on purpose
    test::add_constant_model(surface, config, "m-1", 0.1 + 0.2 + 60.0, 70.0 / 3.0, 59.9999999,
                             1.0 / 3.0, 97);
    const std::string csv = surface_to_csv(surface);
    const ScoreSurface reloaded = parse_slice_scores(csv, config);
    REQUIRE(reloaded.cells.size() == surface.cells.size());
    for (const auto& [key, score] : surface.cells) {
        const SliceScore* other = reloaded.find(key);
        REQUIRE(other != nullptr);
        CHECK(other->mean == score.mean);          // bit-equal
        CHECK(other->variance == score.variance);  // bit-equal
        CHECK(other->n == score.n);
    }
    CHECK(surface_to_csv(reloaded) == csv);
}
