#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "atlas/length_auc.hpp"

using namespace atlas;

namespace {

// Independent oracle: plain trapezoid sum, normalized by the width.
double trapezoid_oracle(const ScoreCurve& curve) {
    double area = 0.0;
    for (std::size_t i = 0; i + 1 < curve.lengths.size(); ++i) {
        const double delta =
            static_cast<double>(curve.lengths[i + 1]) - static_cast<double>(curve.lengths[i]);
        area += delta * (curve.points[i].mean + curve.points[i + 1].mean) / 2.0;
    }
    return area / (static_cast<double>(curve.lengths.back()) -
                   static_cast<double>(curve.lengths.front()));
}

ScoreCurve make_curve(std::vector<Tokens> lengths, std::vector<double> means,
                      std::vector<double> variances = {}) {
    ScoreCurve curve;
    curve.lengths = std::move(lengths);
    for (std::size_t i = 0; i < means.size(); ++i)
        curve.points.push_back({means[i], variances.empty() ? 0.0 : variances[i], 100});
    return curve;
}

std::vector<Tokens> random_grid(std::mt19937& rng) {
    std::uniform_int_distribution<int> count(2, 9);
    std::uniform_int_distribution<Tokens> step(1, 200000);
    std::vector<Tokens> grid;
    Tokens at = 1024;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
        at += step(rng);
        grid.push_back(at);
    }
    return grid;
}

}  // namespace

TEST_CASE("alpha weights") {
    SUBCASE("single segment splits evenly") {
        const TrapezoidWeights tw = alpha_weights(std::vector<Tokens>{8192, 16384});
        REQUIRE(tw.alphas.size() == 2);
        CHECK(tw.alphas[0] == 0.5);
        CHECK(tw.alphas[1] == 0.5);
    }
    SUBCASE("standard eight-slice grid") {
        const TrapezoidWeights tw = alpha_weights(LengthGrid::standard());
        const double expected[] = {8.0 / 2032,  24.0 / 2032,  48.0 / 2032,  96.0 / 2032,
                                   192.0 / 2032, 384.0 / 2032, 768.0 / 2032, 512.0 / 2032};
        REQUIRE(tw.alphas.size() == 8);
        for (int i = 0; i < 8; ++i)
            CHECK(tw.alphas[i] == doctest::Approx(expected[i]).epsilon(1e-15));
        double sum = 0.0;
        for (double a : tw.alphas) sum += a;
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
    SUBCASE("alphas sum to 1 on random grids") {
        std::mt19937 rng(5);
        for (int trial = 0; trial < 1000; ++trial) {
            const auto grid = random_grid(rng);
            const TrapezoidWeights tw = alpha_weights(grid);
            double sum = 0.0;
            for (double a : tw.alphas) sum += a;
            CHECK(std::abs(sum - 1.0) <= 1e-12);
        }
    }
    CHECK_THROWS_AS(alpha_weights(std::vector<Tokens>{8192}), InputError);
}

TEST_CASE("auc") {
    SUBCASE("single trapezoid midpoint") {
        CHECK(auc(make_curve({8192, 16384}, {100, 50})).mean == doctest::Approx(75.0));
    }
    SUBCASE("two-segment hand value with oracle") {
        const ScoreCurve curve = make_curve({8192, 16384, 32768}, {100, 80, 40});
        const CiEstimate est = auc(curve);
        CHECK(est.mean == doctest::Approx(70.0).epsilon(1e-12));  // (8*90 + 16*60) / 24
        CHECK(est.mean == doctest::Approx(trapezoid_oracle(curve)).epsilon(1e-14));
    }
    SUBCASE("constant curve equals the constant on any grid") {
        std::mt19937 rng(9);
        for (int trial = 0; trial < 200; ++trial) {
            const auto grid = random_grid(rng);
            const std::vector<double> means(grid.size(), 80.0);
            CHECK(auc(make_curve(grid, means)).mean == doctest::Approx(80.0).epsilon(1e-13));
        }
    }
    SUBCASE("monotone and bounded") {
        std::mt19937 rng(13);
        std::uniform_real_distribution<double> score(0.0, 100.0);
        for (int trial = 0; trial < 200; ++trial) {
            const auto grid = random_grid(rng);
            std::vector<double> means;
            for (std::size_t i = 0; i < grid.size(); ++i) means.push_back(score(rng));
            const double base = auc(make_curve(grid, means)).mean;
            const double lo = *std::min_element(means.begin(), means.end());
            const double hi = *std::max_element(means.begin(), means.end());
            CHECK(base >= lo - 1e-12);
            CHECK(base <= hi + 1e-12);
            // raising one slice never lowers the integral
            std::uniform_int_distribution<std::size_t> pick(0, means.size() - 1);
            const std::size_t at = pick(rng);
            means[at] = std::min(100.0, means[at] + 5.0);
            CHECK(auc(make_curve(grid, means)).mean >= base - 1e-12);
        }
    }
    SUBCASE("variance matches the explicit linear form") {
        std::mt19937 rng(19);
        std::uniform_real_distribution<double> score(0.0, 100.0);
        std::uniform_real_distribution<double> var(0.0, 4.0);
        for (int trial = 0; trial < 200; ++trial) {
            const auto grid = random_grid(rng);
            std::vector<double> means, variances;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                means.push_back(score(rng));
                variances.push_back(var(rng));
            }
            const CiEstimate est = auc(make_curve(grid, means, variances));
            const TrapezoidWeights tw = alpha_weights(grid);
            double expected = 0.0;
            for (std::size_t i = 0; i < grid.size(); ++i)
                expected += tw.alphas[i] * tw.alphas[i] * variances[i];
            CHECK(est.variance == doctest::Approx(expected).epsilon(1e-13));
        }
    }
}

TEST_CASE("weighted auc") {
    SUBCASE("uniform weights reduce to auc bit-for-bit") {
        std::mt19937 rng(29);
        std::uniform_real_distribution<double> score(0.0, 100.0);
        for (int trial = 0; trial < 200; ++trial) {
            const auto grid = random_grid(rng);
            std::vector<double> means, variances;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                means.push_back(score(rng));
                variances.push_back(score(rng) / 50.0);
            }
            const ScoreCurve curve = make_curve(grid, means, variances);
            const CiEstimate plain = auc(curve);
            const CiEstimate weighted = weighted_auc(curve, SliceWeights::uniform());
            CHECK(plain.mean == weighted.mean);          // identical arithmetic path
            CHECK(plain.variance == weighted.variance);
        }
    }
    SUBCASE("constant curve is invariant to the scheme") {
        const ScoreCurve curve = make_curve({8192, 65536, 1048576}, {64.25, 64.25, 64.25});
        for (const auto& scheme : {SliceWeights::logarithmic(), SliceWeights::inverse_logarithmic()})
            CHECK(weighted_auc(curve, scheme).mean == doctest::Approx(64.25).epsilon(1e-13));
    }
    SUBCASE("endpoint-weighted hand value") {
        const ScoreCurve curve = make_curve({8192, 16384}, {100, 50});
        const SliceWeights w = SliceWeights::custom({{8192, 1.0}, {16384, 3.0}});
        CHECK(weighted_auc(curve, w).mean == doctest::Approx(62.5).epsilon(1e-12));
    }
    SUBCASE("scheme anchor values") {
        CHECK(SliceWeights::logarithmic().at(8192) == doctest::Approx(1.0));
        CHECK(SliceWeights::logarithmic().at(1048576) == doctest::Approx(8.0));
        CHECK(SliceWeights::inverse_logarithmic().at(8192) == doctest::Approx(8.0));
        CHECK(SliceWeights::inverse_logarithmic().at(1048576) == doctest::Approx(1.0));
    }
    SUBCASE("all-zero weights are rejected") {
        CHECK_THROWS_AS(SliceWeights::custom({{8192, 0.0}, {16384, 0.0}}), InputError);
        const ScoreCurve curve = make_curve({8192, 16384, 32768}, {10, 10, 10});
        // zero weight on every curve slice leaves a zero denominator
        const SliceWeights w =
            SliceWeights::custom({{8192, 0.0}, {16384, 0.0}, {32768, 0.0}, {65536, 1.0}});
        CHECK_THROWS_AS(weighted_auc(curve, w), InputError);
    }
}

TEST_CASE("decay rate") {
    CHECK(decay_rate(88.21, 47.31) == doctest::Approx(0.4637).epsilon(5e-4));
    CHECK(decay_rate(64.0, 64.0) == 0.0);
    CHECK(decay_rate(50.0, 60.0) == doctest::Approx(-0.2));
    CHECK_THROWS_AS(decay_rate(0.0, 10.0), InputError);
}
