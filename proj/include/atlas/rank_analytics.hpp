#pragma once

// Cross-model analyses: rank correlations with significance, layer
// discrepancy, discriminability, leave-one-dimension-out, weighting and
// aggregation sensitivity, rank migration between reporting scopes, and the
// cost-fidelity Pareto frontier for reduced slice schemes.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "atlas/aggregation.hpp"
#include "atlas/core.hpp"

namespace atlas {

// Rank 1 = highest value; ties receive average ranks.
std::vector<double> rank_vector(std::span<const double> values);

struct Correlation {
    double rho = 0.0;
    double p = 1.0;
};

// Pearson correlation of rank vectors. Two-sided p via the t approximation
// for n >= 10 and exact permutation below. Constant input is an error.
Correlation spearman(std::span<const double> x, std::span<const double> y);

// Kendall tau-b with tie correction.
double kendall(std::span<const double> x, std::span<const double> y);

double pearson(std::span<const double> x, std::span<const double> y);

// Two-sided p-value of a Student-t statistic with nu degrees of freedom.
double student_t_two_sided_p(double t, int nu);

struct RankStats {
    double rho = 0.0;
    double tau = 0.0;
    std::optional<double> r2;
    double p_rho = 1.0;
    double max_abs_rank_shift = 0.0;
    // Signed shift per model: baseline rank - variant rank.
    std::vector<std::pair<std::string, double>> shifts;
};

// Ranking agreement between a baseline score vector and a variant.
RankStats compare_rankings(std::span<const std::string> models,
                           std::span<const double> baseline, std::span<const double> variant,
                           bool with_r2 = false);

struct LayerDiscrepancy {
    double r2 = 0.0;
    double rho = 0.0;
    double p_rho = 1.0;
    // |rank_B - rank_C| per model.
    std::vector<std::pair<std::string, double>> abs_shifts;
    double max_abs_shift = 0.0;
    int count_at_threshold = 0;
    double threshold = 4.0;
};

// Foundational-vs-application ranking discrepancy across models.
LayerDiscrepancy layer_discrepancy(std::span<const std::string> models,
                                   std::span<const double> b_scores,
                                   std::span<const double> c_scores, double threshold = 4.0);

// Bessel-corrected cross-model standard deviation per dimension.
std::vector<std::pair<std::string, double>> discriminability(
    const std::map<std::string, std::vector<double>>& scores_by_dimension);

// Recomputes the overall score without one length-sliced dimension
// (three-category harmonic aggregation preserved) and compares rankings.
RankStats leave_one_dimension_out(const ScoreSurface& surface, const TaxonomyConfig& config,
                                  ReportingScope scope, const std::string& dropped);

struct SchemeSensitivity {
    std::string scheme;
    std::vector<std::pair<std::string, double>> scores;
    RankStats vs_baseline;
};

// Recomputes the full pipeline under each slice-weight scheme and reports
// ranking agreement against the uniform baseline.
std::vector<SchemeSensitivity> weight_scheme_sensitivity(const ScoreSurface& surface,
                                                         const TaxonomyConfig& config,
                                                         ReportingScope scope,
                                                         const std::vector<SliceWeights>& schemes);

struct MigrationEntry {
    std::string model;
    double rank_short = 0.0;
    double rank_long = 0.0;
    double shift = 0.0;  // rank_short - rank_long; positive = improvement
};

struct MigrationReport {
    std::vector<MigrationEntry> entries;
    int count_shift_at_least_2 = 0;
};

MigrationReport rank_migration(std::span<const std::string> models,
                               std::span<const double> scores_short,
                               std::span<const double> scores_long);

struct LiteSchemeSpec {
    std::string name;
    std::vector<Tokens> slices;
    double relative_cost = 1.0;   // fraction of the full token budget, in (0, 1]
    std::optional<double> rho;    // given directly, or computed from a surface
};

struct LiteSchemeResult {
    std::string name;
    std::vector<Tokens> slices;
    double relative_cost = 1.0;
    double rho = 0.0;
    std::optional<double> max_abs_shift;
    std::optional<int> count_shift_at_least_2;
    double efficiency = 0.0;  // rho / relative_cost
    bool pareto = false;
};

struct LiteReport {
    std::vector<LiteSchemeResult> schemes;
    std::vector<std::string> frontier;  // names, by ascending cost
};

// Evaluates each scheme (per-scheme score uses the scheme's slices only;
// single-slice schemes rank by the slice score directly) against the
// full-grid ranking, then marks the non-dominated set under (cost down,
// rho up). Schemes with a given rho skip the surface evaluation.
LiteReport lite_pareto(const std::vector<LiteSchemeSpec>& specs,
                       const ScoreSurface* surface = nullptr,
                       const TaxonomyConfig* config = nullptr);

struct CorrelationMatrix {
    std::vector<std::string> dimensions;
    std::vector<std::vector<double>> rho;  // symmetric, unit diagonal
    std::vector<std::vector<double>> p;
    double mean_off_diagonal = 0.0;
    double median_off_diagonal = 0.0;
    int count_below_threshold = 0;
    double threshold = 0.50;
};

// Pairwise Spearman correlation of per-model dimension AUCs at the scope.
CorrelationMatrix pairwise_dimension_correlation(const ScoreSurface& surface,
                                                 const TaxonomyConfig& config,
                                                 ReportingScope scope, double threshold = 0.50);

struct DecayReport {
    std::vector<std::string> models;
    std::vector<std::string> columns;           // dimensions then aggregates
    std::vector<std::vector<double>> rates;     // [model][column]
    std::vector<double> overall;                // per-model overall-score decay
};

// Relative decay between two reporting scopes for every length-sliced
// dimension plus the foundational, application and overall aggregates.
DecayReport decay_report(const ScoreSurface& surface, const TaxonomyConfig& config,
                         ReportingScope scope_short, ReportingScope scope_long,
                         const PipelineOptions& options = {});

struct HolisticVariant {
    std::string name;
    std::vector<std::pair<std::string, double>> scores;
    RankStats vs_default;
};

// Sensitivity of the overall ranking to the holistic category's composition
// and weight: each surviving component alone, reduced weight (0.4/0.4/0.2)
// and the two-category harmonic with the holistic term dropped.
std::vector<HolisticVariant> holistic_sensitivity(const ScoreSurface& surface,
                                                  const TaxonomyConfig& config,
                                                  ReportingScope scope);

struct AggregatorSensitivity {
    std::string aggregator;
    std::vector<std::pair<std::string, double>> scores;
    RankStats vs_harmonic;
};

// Ranking stability of the arithmetic / geometric / minimum alternatives
// against the harmonic default on the same category triples.
std::vector<AggregatorSensitivity> aggregation_sensitivity(
    std::span<const std::string> models, std::span<const CategoryAggregate> categories);

}  // namespace atlas
