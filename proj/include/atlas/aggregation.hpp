#pragma once

// Category aggregates over the taxonomy layers, the harmonic overall score
// with delta-method variance propagation, and the alternative aggregators
// used by the sensitivity analyses.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "atlas/core.hpp"
#include "atlas/length_auc.hpp"
#include "atlas/uncertainty.hpp"

namespace atlas {

struct CategoryStat {
    double mean = 0.0;
    double variance = 0.0;
};

// Foundational (b), length-sliced application (c) and holistic (s) aggregates
// on the 0-100 scale. Harmonic aggregation requires positive means.
struct CategoryAggregate {
    CategoryStat b, c, s;
};

enum class Aggregator { harmonic, arithmetic, geometric, minimum };

Aggregator parse_aggregator(const std::string& name);
std::string aggregator_name(Aggregator kind);

struct AtlasScore {
    double mean = 0.0;
    double variance = 0.0;
    double half_width = 0.0;
    std::string aggregator = "harmonic";
    Tokens scope = 0;  // 0 when not tied to a reporting scope
};

// Average of a dimension's component cells at one slice; components that do
// not cover the slice are skipped. Returns nullopt when no component covers
// any requested slice.
std::optional<CiEstimate> dimension_score(const ScoreSurface& surface, const std::string& model,
                                          const DimensionConfig& dim,
                                          const std::vector<Tokens>& slices,
                                          const SliceWeights& weights, double z = kDefaultZ);

// Dimension AUC over the grid slices up to the scope.
std::optional<CiEstimate> dimension_auc(const ScoreSurface& surface, const TaxonomyConfig& config,
                                        const std::string& model, const DimensionConfig& dim,
                                        ReportingScope scope, const SliceWeights& weights,
                                        double z = kDefaultZ);

// Original-length score of a holistic dimension (mean over its components).
std::optional<CiEstimate> holistic_score(const ScoreSurface& surface, const std::string& model,
                                         const DimensionConfig& dim,
                                         const std::vector<std::string>* component_filter = nullptr,
                                         double z = kDefaultZ);

// B and C are arithmetic means of per-dimension AUCs with variance
// sum(v_d)/|D|^2; S averages holistic component scores and is identical for
// every reporting scope.
CategoryAggregate category_means(const ScoreSurface& surface, const TaxonomyConfig& config,
                                 ReportingScope scope,
                                 const SliceWeights& weights = SliceWeights::uniform());

// H = 3 / (1/B + 1/C + 1/S) with first-order (delta method) variance
//   v(H) = H^4/9 * [v(B)/B^4 + v(C)/C^4 + v(S)/S^4].
// Nonpositive categories are rejected: a zero category indicates broken
// upstream data, not a zero overall score.
AtlasScore harmonic_atlascore(const CategoryAggregate& agg, double z = kDefaultZ);

// Arithmetic, geometric or minimum of the same three categories, each with
// its delta-method variance. Aggregator::harmonic delegates to
// harmonic_atlascore.
AtlasScore alt_aggregate(const CategoryAggregate& agg, Aggregator kind, double z = kDefaultZ);

// H_w = 1 / (w_b/B + w_c/C + w_s/S) for nonnegative weights summing to 1.
// Zero-weight categories may be arbitrary; w = (1/3,1/3,1/3) reproduces
// harmonic_atlascore.
AtlasScore weighted_harmonic(const CategoryAggregate& agg, const std::array<double, 3>& w,
                             double z = kDefaultZ);

// Whole-pipeline knobs shared by the leaderboard and the sensitivity suites.
struct PipelineOptions {
    SliceWeights weights = SliceWeights::uniform();
    Aggregator aggregator = Aggregator::harmonic;
    std::optional<std::string> drop_dimension;
    // Restrict the holistic category to these components (nullopt = all).
    std::optional<std::vector<std::string>> holistic_components;
    // Weighted harmonic instead of the plain aggregator when set.
    std::optional<std::array<double, 3>> category_weights;
    // Evaluate at exactly these slices instead of the full scope prefix.
    std::optional<std::vector<Tokens>> slice_subset;
    double z = kDefaultZ;
};

CategoryAggregate category_means(const ScoreSurface& surface, const TaxonomyConfig& config,
                                 ReportingScope scope, const std::string& model,
                                 const PipelineOptions& options);

struct ModelScorecard {
    std::string model;
    CategoryAggregate categories;
    AtlasScore score;
};

ModelScorecard score_model(const ScoreSurface& surface, const TaxonomyConfig& config,
                           ReportingScope scope, const std::string& model,
                           const PipelineOptions& options = {});

// Scores every model on the surface; output sorted by descending score mean.
std::vector<ModelScorecard> score_all_models(const ScoreSurface& surface,
                                             const TaxonomyConfig& config, ReportingScope scope,
                                             const PipelineOptions& options = {});

}  // namespace atlas
