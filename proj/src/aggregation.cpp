#include "atlas/aggregation.hpp"

#include <algorithm>
#include <cmath>

namespace atlas {

Aggregator parse_aggregator(const std::string& name) {
    if (name == "harmonic") return Aggregator::harmonic;
    if (name == "arithmetic") return Aggregator::arithmetic;
    if (name == "geometric") return Aggregator::geometric;
    if (name == "minimum" || name == "min") return Aggregator::minimum;
    throw InputError("unknown aggregator: " + name);
}

std::string aggregator_name(Aggregator kind) {
    switch (kind) {
        case Aggregator::harmonic: return "harmonic";
        case Aggregator::arithmetic: return "arithmetic";
        case Aggregator::geometric: return "geometric";
        case Aggregator::minimum: return "minimum";
    }
    throw InputError("bad aggregator value");
}

std::optional<CiEstimate> dimension_score(const ScoreSurface& surface, const std::string& model,
                                          const DimensionConfig& dim,
                                          const std::vector<Tokens>& slices,
                                          const SliceWeights& weights, double z) {
    ScoreCurve curve;
    for (Tokens slice : slices) {
        double mean_sum = 0.0;
        double var_sum = 0.0;
        long n = 0;
        int m = 0;
        for (const auto& comp : dim.components) {
            if (!comp.supports(slice)) continue;
            const SliceScore* cell = surface.find({model, dim.name, comp.name, slice});
            if (!cell)
                throw InputError(model + ": missing cell " + dim.name + "/" + comp.name + " at " +
                                 format_length(slice));
            mean_sum += cell->mean;
            var_sum += cell->variance;
            n += cell->n;
            ++m;
        }
        if (m == 0) continue;  // slice unsupported by every component
        const double dm = static_cast<double>(m);
        curve.lengths.push_back(slice);
        curve.points.push_back({mean_sum / dm, var_sum / (dm * dm), n});
    }
    if (curve.lengths.empty()) return std::nullopt;
    if (curve.lengths.size() == 1) {
        // Degenerate sub-grid: the slice score stands in for the integral.
        const SliceScore& p = curve.points.front();
        return make_ci_estimate(p.mean, p.variance, z, p.n);
    }
    return weighted_auc(curve, weights, z);
}

std::optional<CiEstimate> dimension_auc(const ScoreSurface& surface, const TaxonomyConfig& config,
                                        const std::string& model, const DimensionConfig& dim,
                                        ReportingScope scope, const SliceWeights& weights,
                                        double z) {
    return dimension_score(surface, model, dim, config.grid.up_to(scope.max_length),
                           weights, z);
}

std::optional<CiEstimate> holistic_score(const ScoreSurface& surface, const std::string& model,
                                         const DimensionConfig& dim,
                                         const std::vector<std::string>* component_filter,
                                         double z) {
    double mean_sum = 0.0;
    double var_sum = 0.0;
    long n = 0;
    int m = 0;
    for (const auto& comp : dim.components) {
        if (component_filter &&
            std::find(component_filter->begin(), component_filter->end(), comp.name) ==
                component_filter->end())
            continue;
        const SliceScore* cell = surface.find({model, dim.name, comp.name, std::nullopt});
        if (!cell)
            throw InputError(model + ": missing holistic cell " + dim.name + "/" + comp.name);
        mean_sum += cell->mean;
        var_sum += cell->variance;
        n += cell->n;
        ++m;
    }
    if (m == 0) return std::nullopt;
    const double dm = static_cast<double>(m);
    return make_ci_estimate(mean_sum / dm, var_sum / (dm * dm), z, n);
}

namespace {

CategoryStat mean_of(const std::vector<CiEstimate>& parts, const std::string& what) {
    if (parts.empty()) throw InputError("empty category: " + what);
    double mean = 0.0;
    double var = 0.0;
    for (const auto& p : parts) {
        mean += p.mean;
        var += p.variance;
    }
    const double k = static_cast<double>(parts.size());
    return {mean / k, var / (k * k)};
}

}  // namespace

CategoryAggregate category_means(const ScoreSurface& surface, const TaxonomyConfig& config,
                                 ReportingScope scope, const std::string& model,
                                 const PipelineOptions& options) {
    const std::vector<Tokens> slices =
        options.slice_subset ? *options.slice_subset : config.grid.up_to(scope.max_length);

    std::vector<CiEstimate> b_parts, c_parts, s_parts;
    for (const auto& dim : config.dimensions) {
        if (options.drop_dimension && dim.name == *options.drop_dimension) {
            if (dim.layer == Layer::holistic)
                throw InputError("cannot drop a holistic dimension");
            continue;
        }
        if (dim.layer == Layer::holistic) {
            const auto s = holistic_score(
                surface, model, dim,
                options.holistic_components ? &*options.holistic_components : nullptr, options.z);
            if (s) s_parts.push_back(*s);
            continue;
        }
        const auto est =
            dimension_score(surface, model, dim, slices, options.weights, options.z);
        if (!est) continue;  // no component covers the requested slices
        if (dim.layer == Layer::foundational)
            b_parts.push_back(*est);
        else
            c_parts.push_back(*est);
    }

    CategoryAggregate agg;
    agg.b = mean_of(b_parts, "foundational");
    agg.c = mean_of(c_parts, "application");
    agg.s = mean_of(s_parts, "holistic");
    return agg;
}

CategoryAggregate category_means(const ScoreSurface& surface, const TaxonomyConfig& config,
                                 ReportingScope scope, const SliceWeights& weights) {
    const auto models = surface.models();
    if (models.size() != 1)
        throw InputError("category_means without a model id needs a single-model surface");
    PipelineOptions options;
    options.weights = weights;
    return category_means(surface, config, scope, models.front(), options);
}

AtlasScore harmonic_atlascore(const CategoryAggregate& agg, double z) {
    const double b = agg.b.mean, c = agg.c.mean, s = agg.s.mean;
    if (b <= 0.0 || c <= 0.0 || s <= 0.0)
        throw InputError("harmonic mean undefined for nonpositive category means");
    const double h = 3.0 / (1.0 / b + 1.0 / c + 1.0 / s);
    const double h4 = h * h * h * h;
    const double variance =
        h4 / 9.0 *
        (agg.b.variance / (b * b * b * b) + agg.c.variance / (c * c * c * c) +
         agg.s.variance / (s * s * s * s));
    AtlasScore out;
    out.mean = h;
    out.variance = variance;
    out.half_width = z * std::sqrt(variance);
    out.aggregator = "harmonic";
    return out;
}

AtlasScore alt_aggregate(const CategoryAggregate& agg, Aggregator kind, double z) {
    if (kind == Aggregator::harmonic) return harmonic_atlascore(agg, z);

    const double b = agg.b.mean, c = agg.c.mean, s = agg.s.mean;
    AtlasScore out;
    out.aggregator = aggregator_name(kind);
    switch (kind) {
        case Aggregator::arithmetic:
            out.mean = (b + c + s) / 3.0;
            out.variance = (agg.b.variance + agg.c.variance + agg.s.variance) / 9.0;
            break;
        case Aggregator::geometric: {
            if (b <= 0.0 || c <= 0.0 || s <= 0.0)
                throw InputError("geometric mean undefined for nonpositive category means");
            const double g = std::cbrt(b * c * s);
            out.mean = g;
            out.variance = g * g / 9.0 *
                           (agg.b.variance / (b * b) + agg.c.variance / (c * c) +
                            agg.s.variance / (s * s));
            break;
        }
        case Aggregator::minimum: {
            const CategoryStat* lowest = &agg.b;
            if (agg.c.mean < lowest->mean) lowest = &agg.c;
            if (agg.s.mean < lowest->mean) lowest = &agg.s;
            out.mean = lowest->mean;
            out.variance = lowest->variance;
            break;
        }
        case Aggregator::harmonic: break;  // handled above
    }
    out.half_width = z * std::sqrt(out.variance);
    return out;
}

AtlasScore weighted_harmonic(const CategoryAggregate& agg, const std::array<double, 3>& w,
                             double z) {
    double wsum = 0.0;
    for (double wi : w) {
        if (wi < 0.0) throw InputError("weighted harmonic weights must be nonnegative");
        wsum += wi;
    }
    if (std::abs(wsum - 1.0) > 1e-9)
        throw InputError("weighted harmonic weights must sum to 1");

    const std::array<const CategoryStat*, 3> cats = {&agg.b, &agg.c, &agg.s};
    double inv = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        if (w[i] == 0.0) continue;
        if (cats[i]->mean <= 0.0)
            throw InputError("weighted harmonic undefined for nonpositive weighted category");
        inv += w[i] / cats[i]->mean;
    }
    const double h = 1.0 / inv;
    double variance = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        if (w[i] == 0.0) continue;
        const double x = cats[i]->mean;
        const double coeff = h * h * w[i] / (x * x);
        variance += coeff * coeff * cats[i]->variance;
    }
    AtlasScore out;
    out.mean = h;
    out.variance = variance;
    out.half_width = z * std::sqrt(variance);
    out.aggregator = "weighted_harmonic";
    return out;
}

ModelScorecard score_model(const ScoreSurface& surface, const TaxonomyConfig& config,
                           ReportingScope scope, const std::string& model,
                           const PipelineOptions& options) {
    ModelScorecard card;
    card.model = model;
    card.categories = category_means(surface, config, scope, model, options);
    if (options.category_weights)
        card.score = weighted_harmonic(card.categories, *options.category_weights, options.z);
    else
        card.score = alt_aggregate(card.categories, options.aggregator, options.z);
    card.score.scope = scope.max_length;
    return card;
}

std::vector<ModelScorecard> score_all_models(const ScoreSurface& surface,
                                             const TaxonomyConfig& config, ReportingScope scope,
                                             const PipelineOptions& options) {
    std::vector<ModelScorecard> out;
    for (const std::string& model : surface.models())
        out.push_back(score_model(surface, config, scope, model, options));
    std::stable_sort(out.begin(), out.end(), [](const ModelScorecard& a, const ModelScorecard& b) {
        return a.score.mean > b.score.mean;
    });
    return out;
}

}  // namespace atlas
