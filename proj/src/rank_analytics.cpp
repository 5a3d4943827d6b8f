#include "atlas/rank_analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace atlas {

namespace {

void check_same_size(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw InputError("vectors differ in length");
}

bool is_constant(std::span<const double> v) {
    for (double x : v)
        if (x != v.front()) return false;
    return true;
}

// Continued fraction for the regularized incomplete beta function (Lentz).
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIterations = 300;
    constexpr double kEps = 3e-14;
    constexpr double kTiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

double regularized_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log(1.0 - x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double spearman_p_exact(std::span<const double> rx, std::span<const double> ry, double observed) {
    std::vector<std::size_t> idx(ry.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end());
    long long hits = 0;
    long long total = 0;
    std::vector<double> permuted(ry.size());
    do {
        for (std::size_t i = 0; i < idx.size(); ++i) permuted[i] = ry[idx[i]];
        const double rho = pearson(rx, permuted);
        if (std::abs(rho) >= std::abs(observed) - 1e-12) ++hits;
        ++total;
    } while (std::next_permutation(idx.begin(), idx.end()));
    return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace

double student_t_two_sided_p(double t, int nu) {
    if (nu < 1) throw InputError("degrees of freedom must be positive");
    if (std::isinf(t)) return 0.0;
    const double x = static_cast<double>(nu) / (static_cast<double>(nu) + t * t);
    return regularized_incomplete_beta(static_cast<double>(nu) / 2.0, 0.5, x);
}

std::vector<double> rank_vector(std::span<const double> values) {
    if (values.size() < 2) throw InputError("ranking needs at least 2 values");
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    check_same_size(x, y);
    const std::size_t n = x.size();
    if (n < 3) throw InputError("correlation needs at least 3 points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw InputError("correlation undefined for constant input");
    return sxy / std::sqrt(sxx * syy);
}

Correlation spearman(std::span<const double> x, std::span<const double> y) {
    check_same_size(x, y);
    if (x.size() < 3) throw InputError("spearman needs at least 3 models");
    if (is_constant(x) || is_constant(y))
        throw InputError("correlation undefined for constant input");
    const std::vector<double> rx = rank_vector(x);
    const std::vector<double> ry = rank_vector(y);
    const double rho = pearson(rx, ry);

    const std::size_t n = x.size();
    double p;
    if (n >= 10) {
        const double denom = 1.0 - rho * rho;
        if (denom <= 0.0) {
            p = 0.0;
        } else {
            const double t = rho * std::sqrt((static_cast<double>(n) - 2.0) / denom);
            p = student_t_two_sided_p(t, static_cast<int>(n) - 2);
        }
    } else {
        p = spearman_p_exact(rx, ry, rho);
    }
    return {rho, p};
}

double kendall(std::span<const double> x, std::span<const double> y) {
    check_same_size(x, y);
    const std::size_t n = x.size();
    if (n < 3) throw InputError("kendall needs at least 3 models");
    long long concordant = 0, discordant = 0;
    long long ties_x = 0, ties_y = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = x[i] - x[j];
            const double dy = y[i] - y[j];
            if (dx == 0.0 && dy == 0.0) {
                ++ties_x;
                ++ties_y;
            } else if (dx == 0.0) {
                ++ties_x;
            } else if (dy == 0.0) {
                ++ties_y;
            } else if ((dx > 0.0) == (dy > 0.0)) {
                ++concordant;
            } else {
                ++discordant;
            }
        }
    }
    const double n0 = static_cast<double>(n) * (static_cast<double>(n) - 1.0) / 2.0;
    const double denom = std::sqrt((n0 - static_cast<double>(ties_x)) *
                                   (n0 - static_cast<double>(ties_y)));
    if (denom == 0.0) throw InputError("kendall undefined for constant input");
    return static_cast<double>(concordant - discordant) / denom;
}

RankStats compare_rankings(std::span<const std::string> models,
                           std::span<const double> baseline, std::span<const double> variant,
                           bool with_r2) {
    if (models.size() != baseline.size() || models.size() != variant.size())
        throw InputError("model list and score vectors differ in length");
    RankStats stats;
    const Correlation sp = spearman(baseline, variant);
    stats.rho = sp.rho;
    stats.p_rho = sp.p;
    stats.tau = kendall(baseline, variant);
    if (with_r2) {
        const double r = pearson(baseline, variant);
        stats.r2 = r * r;
    }
    const std::vector<double> rb = rank_vector(baseline);
    const std::vector<double> rv = rank_vector(variant);
    for (std::size_t i = 0; i < models.size(); ++i) {
        const double shift = rb[i] - rv[i];
        stats.shifts.emplace_back(models[i], shift);
        stats.max_abs_rank_shift = std::max(stats.max_abs_rank_shift, std::abs(shift));
    }
    return stats;
}

LayerDiscrepancy layer_discrepancy(std::span<const std::string> models,
                                   std::span<const double> b_scores,
                                   std::span<const double> c_scores, double threshold) {
    if (models.size() != b_scores.size() || models.size() != c_scores.size())
        throw InputError("model list and score vectors differ in length");
    LayerDiscrepancy out;
    out.threshold = threshold;
    const double r = pearson(b_scores, c_scores);
    out.r2 = r * r;
    const Correlation sp = spearman(b_scores, c_scores);
    out.rho = sp.rho;
    out.p_rho = sp.p;
    const std::vector<double> rb = rank_vector(b_scores);
    const std::vector<double> rc = rank_vector(c_scores);
    for (std::size_t i = 0; i < models.size(); ++i) {
        const double gap = std::abs(rb[i] - rc[i]);
        out.abs_shifts.emplace_back(models[i], gap);
        out.max_abs_shift = std::max(out.max_abs_shift, gap);
        if (gap >= threshold) ++out.count_at_threshold;
    }
    return out;
}

std::vector<std::pair<std::string, double>> discriminability(
    const std::map<std::string, std::vector<double>>& scores_by_dimension) {
    std::vector<std::pair<std::string, double>> out;
    for (const auto& [dim, scores] : scores_by_dimension) {
        if (scores.size() < 2)
            throw InputError("discriminability needs at least 2 models for " + dim);
        double mean = 0.0;
        for (double s : scores) mean += s;
        mean /= static_cast<double>(scores.size());
        double ss = 0.0;
        for (double s : scores) ss += (s - mean) * (s - mean);
        out.emplace_back(dim, std::sqrt(ss / (static_cast<double>(scores.size()) - 1.0)));
    }
    return out;
}

namespace {

// Overall scores for all models under the given options, aligned with the
// sorted model list.
std::vector<double> pipeline_scores(const ScoreSurface& surface, const TaxonomyConfig& config,
                                    ReportingScope scope, const std::vector<std::string>& models,
                                    const PipelineOptions& options) {
    std::vector<double> out;
    out.reserve(models.size());
    for (const auto& model : models)
        out.push_back(score_model(surface, config, scope, model, options).score.mean);
    return out;
}

}  // namespace

RankStats leave_one_dimension_out(const ScoreSurface& surface, const TaxonomyConfig& config,
                                  ReportingScope scope, const std::string& dropped) {
    const DimensionConfig* dim = config.find_dimension(dropped);
    if (!dim) throw InputError("unknown dimension: " + dropped);
    if (dim->layer == Layer::holistic)
        throw InputError("leave-one-out applies to length-sliced dimensions only");

    const std::vector<std::string> models = surface.models();
    const std::vector<double> full = pipeline_scores(surface, config, scope, models, {});
    PipelineOptions reduced;
    reduced.drop_dimension = dropped;
    const std::vector<double> variant = pipeline_scores(surface, config, scope, models, reduced);
    return compare_rankings(models, full, variant);
}

std::vector<SchemeSensitivity> weight_scheme_sensitivity(const ScoreSurface& surface,
                                                         const TaxonomyConfig& config,
                                                         ReportingScope scope,
                                                         const std::vector<SliceWeights>& schemes) {
    const std::vector<std::string> models = surface.models();
    const std::vector<double> baseline = pipeline_scores(surface, config, scope, models, {});

    std::vector<SchemeSensitivity> out;
    for (const auto& scheme : schemes) {
        PipelineOptions options;
        options.weights = scheme;
        const std::vector<double> scores = pipeline_scores(surface, config, scope, models, options);
        SchemeSensitivity entry;
        entry.scheme = scheme.name();
        for (std::size_t i = 0; i < models.size(); ++i)
            entry.scores.emplace_back(models[i], scores[i]);
        entry.vs_baseline = compare_rankings(models, baseline, scores);
        out.push_back(std::move(entry));
    }
    return out;
}

MigrationReport rank_migration(std::span<const std::string> models,
                               std::span<const double> scores_short,
                               std::span<const double> scores_long) {
    if (models.size() != scores_short.size() || models.size() != scores_long.size())
        throw InputError("model list and score vectors differ in length");
    const std::vector<double> rs = rank_vector(scores_short);
    const std::vector<double> rl = rank_vector(scores_long);
    MigrationReport report;
    for (std::size_t i = 0; i < models.size(); ++i) {
        MigrationEntry e;
        e.model = models[i];
        e.rank_short = rs[i];
        e.rank_long = rl[i];
        e.shift = rs[i] - rl[i];
        if (std::abs(e.shift) >= 2.0) ++report.count_shift_at_least_2;
        report.entries.push_back(std::move(e));
    }
    return report;
}

LiteReport lite_pareto(const std::vector<LiteSchemeSpec>& specs, const ScoreSurface* surface,
                       const TaxonomyConfig* config) {
    if (specs.empty()) throw InputError("no lite schemes given");

    std::vector<std::string> models;
    std::vector<double> full_scores;
    const bool need_surface =
        std::any_of(specs.begin(), specs.end(),
                    [](const LiteSchemeSpec& s) { return !s.rho.has_value(); });
    if (need_surface) {
        if (!surface || !config)
            throw InputError("lite schemes without a given rho need a score surface");
        models = surface->models();
        const ReportingScope full_scope{config->grid.slices.back()};
        full_scores = pipeline_scores(*surface, *config, full_scope, models, {});
    }

    LiteReport report;
    for (const auto& spec : specs) {
        if (spec.relative_cost <= 0.0 || spec.relative_cost > 1.0)
            throw InputError("scheme '" + spec.name + "' relative cost must be in (0,1]");
        LiteSchemeResult result;
        result.name = spec.name;
        result.slices = spec.slices;
        result.relative_cost = spec.relative_cost;
        if (spec.rho) {
            result.rho = *spec.rho;
        } else {
            if (spec.slices.empty())
                throw InputError("scheme '" + spec.name + "' has no slices");
            for (Tokens s : spec.slices)
                if (!config->grid.contains(s))
                    throw InputError("scheme '" + spec.name + "' slice " + std::to_string(s) +
                                     " is not in the grid");
            PipelineOptions options;
            options.slice_subset = spec.slices;
            const ReportingScope full_scope{config->grid.slices.back()};
            const std::vector<double> scheme_scores =
                pipeline_scores(*surface, *config, full_scope, models, options);
            const RankStats stats = compare_rankings(models, full_scores, scheme_scores);
            result.rho = stats.rho;
            result.max_abs_shift = stats.max_abs_rank_shift;
            int ge2 = 0;
            for (const auto& [_, shift] : stats.shifts)
                if (std::abs(shift) >= 2.0) ++ge2;
            result.count_shift_at_least_2 = ge2;
        }
        result.efficiency = result.rho / result.relative_cost;
        report.schemes.push_back(std::move(result));
    }

    // Non-dominated: no other scheme reaches higher rho at equal or lower cost.
    for (auto& s : report.schemes) {
        s.pareto = std::none_of(report.schemes.begin(), report.schemes.end(),
                                [&](const LiteSchemeResult& other) {
                                    return other.rho > s.rho &&
                                           other.relative_cost <= s.relative_cost;
                                });
    }
    std::vector<const LiteSchemeResult*> frontier;
    for (const auto& s : report.schemes)
        if (s.pareto) frontier.push_back(&s);
    std::sort(frontier.begin(), frontier.end(),
              [](const LiteSchemeResult* a, const LiteSchemeResult* b) {
                  return a->relative_cost < b->relative_cost;
              });
    for (const auto* s : frontier) report.frontier.push_back(s->name);
    return report;
}

CorrelationMatrix pairwise_dimension_correlation(const ScoreSurface& surface,
                                                 const TaxonomyConfig& config,
                                                 ReportingScope scope, double threshold) {
    const std::vector<std::string> models = surface.models();
    if (models.size() < 3) throw InputError("correlation needs at least 3 models");

    CorrelationMatrix out;
    out.threshold = threshold;
    std::vector<std::vector<double>> scores;
    for (const auto* dim : config.sliced_dimensions()) {
        std::vector<double> column;
        for (const auto& model : models) {
            const auto est =
                dimension_auc(surface, config, model, *dim, scope, SliceWeights::uniform());
            if (!est) throw InputError("dimension " + dim->name + " has no data for " + model);
            column.push_back(est->mean);
        }
        out.dimensions.push_back(dim->name);
        scores.push_back(std::move(column));
    }

    const std::size_t d = out.dimensions.size();
    out.rho.assign(d, std::vector<double>(d, 1.0));
    out.p.assign(d, std::vector<double>(d, 0.0));
    std::vector<double> offdiag;
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i + 1; j < d; ++j) {
            const Correlation c = spearman(scores[i], scores[j]);
            out.rho[i][j] = out.rho[j][i] = c.rho;
            out.p[i][j] = out.p[j][i] = c.p;
            offdiag.push_back(c.rho);
            if (c.rho < threshold) ++out.count_below_threshold;
        }
    }
    if (!offdiag.empty()) {
        double sum = 0.0;
        for (double r : offdiag) sum += r;
        out.mean_off_diagonal = sum / static_cast<double>(offdiag.size());
        std::sort(offdiag.begin(), offdiag.end());
        const std::size_t mid = offdiag.size() / 2;
        out.median_off_diagonal = offdiag.size() % 2 == 1
                                      ? offdiag[mid]
                                      : (offdiag[mid - 1] + offdiag[mid]) / 2.0;
    }
    return out;
}

DecayReport decay_report(const ScoreSurface& surface, const TaxonomyConfig& config,
                         ReportingScope scope_short, ReportingScope scope_long,
                         const PipelineOptions& options) {
    DecayReport report;
    report.models = surface.models();
    for (const auto* dim : config.sliced_dimensions()) report.columns.push_back(dim->name);
    report.columns.push_back("foundational");
    report.columns.push_back("application");
    report.columns.push_back("overall");

    for (const auto& model : report.models) {
        std::vector<double> row;
        for (const auto* dim : config.sliced_dimensions()) {
            const auto short_est =
                dimension_auc(surface, config, model, *dim, scope_short, options.weights);
            const auto long_est =
                dimension_auc(surface, config, model, *dim, scope_long, options.weights);
            if (!short_est || !long_est)
                throw InputError("dimension " + dim->name + " has no data for " + model);
            row.push_back(decay_rate(*short_est, *long_est));
        }
        const ModelScorecard card_short = score_model(surface, config, scope_short, model, options);
        const ModelScorecard card_long = score_model(surface, config, scope_long, model, options);
        row.push_back(decay_rate(card_short.categories.b.mean, card_long.categories.b.mean));
        row.push_back(decay_rate(card_short.categories.c.mean, card_long.categories.c.mean));
        const double overall = decay_rate(card_short.score.mean, card_long.score.mean);
        row.push_back(overall);
        report.overall.push_back(overall);
        report.rates.push_back(std::move(row));
    }
    return report;
}

std::vector<HolisticVariant> holistic_sensitivity(const ScoreSurface& surface,
                                                  const TaxonomyConfig& config,
                                                  ReportingScope scope) {
    const std::vector<std::string> models = surface.models();
    const std::vector<double> baseline = pipeline_scores(surface, config, scope, models, {});

    std::vector<std::pair<std::string, PipelineOptions>> variants;
    variants.emplace_back("default", PipelineOptions{});
    for (const auto* dim : config.layer_dimensions(Layer::holistic)) {
        for (const auto& comp : dim->components) {
            PipelineOptions options;
            options.holistic_components = std::vector<std::string>{comp.name};
            variants.emplace_back("only_" + comp.name, std::move(options));
        }
    }
    {
        PipelineOptions options;
        options.category_weights = {0.4, 0.4, 0.2};
        variants.emplace_back("reduced_weight", std::move(options));
    }
    {
        PipelineOptions options;
        options.category_weights = {0.5, 0.5, 0.0};
        variants.emplace_back("drop_holistic", std::move(options));
    }

    std::vector<HolisticVariant> out;
    for (auto& [name, options] : variants) {
        const std::vector<double> scores = pipeline_scores(surface, config, scope, models, options);
        HolisticVariant v;
        v.name = name;
        for (std::size_t i = 0; i < models.size(); ++i) v.scores.emplace_back(models[i], scores[i]);
        v.vs_default = compare_rankings(models, baseline, scores);
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<AggregatorSensitivity> aggregation_sensitivity(
    std::span<const std::string> models, std::span<const CategoryAggregate> categories) {
    if (models.size() != categories.size())
        throw InputError("model list and category vectors differ in length");
    std::vector<double> harmonic_scores;
    for (const auto& agg : categories) harmonic_scores.push_back(harmonic_atlascore(agg).mean);

    std::vector<AggregatorSensitivity> out;
    for (Aggregator kind : {Aggregator::harmonic, Aggregator::arithmetic, Aggregator::geometric,
                            Aggregator::minimum}) {
        std::vector<double> scores;
        for (const auto& agg : categories) scores.push_back(alt_aggregate(agg, kind).mean);
        AggregatorSensitivity entry;
        entry.aggregator = aggregator_name(kind);
        for (std::size_t i = 0; i < models.size(); ++i)
            entry.scores.emplace_back(models[i], scores[i]);
        entry.vs_harmonic = compare_rankings(models, harmonic_scores, scores);
        out.push_back(std::move(entry));
    }
    return out;
}

}  // namespace atlas
