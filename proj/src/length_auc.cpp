#include "atlas/length_auc.hpp"

#include <cmath>

namespace atlas {

namespace {
constexpr double kLogAnchorLow = 4096.0;     // 4K
constexpr double kLogAnchorHigh = 2097152.0;  // 2M
}  // namespace

SliceWeights SliceWeights::uniform() { return {WeightSchemeKind::uniform, {}}; }
SliceWeights SliceWeights::logarithmic() { return {WeightSchemeKind::logarithmic, {}}; }
SliceWeights SliceWeights::inverse_logarithmic() {
    return {WeightSchemeKind::inverse_logarithmic, {}};
}

SliceWeights SliceWeights::custom(std::map<Tokens, double> values) {
    bool any_positive = false;
    for (const auto& [slice, w] : values) {
        if (w < 0.0)
            throw InputError("negative slice weight at " + std::to_string(slice));
        if (w > 0.0) any_positive = true;
    }
    if (!any_positive) throw InputError("slice weights must not all be zero");
    return {WeightSchemeKind::custom, std::move(values)};
}

double SliceWeights::at(Tokens slice) const {
    switch (scheme) {
        case WeightSchemeKind::uniform: return 1.0;
        case WeightSchemeKind::logarithmic:
            return std::log2(static_cast<double>(slice) / kLogAnchorLow);
        case WeightSchemeKind::inverse_logarithmic:
            return std::log2(kLogAnchorHigh / static_cast<double>(slice));
        case WeightSchemeKind::custom: {
            auto it = values.find(slice);
            if (it == values.end())
                throw InputError("no custom weight for slice " + std::to_string(slice));
            return it->second;
        }
    }
    throw InputError("bad weight scheme");
}

std::string SliceWeights::name() const {
    switch (scheme) {
        case WeightSchemeKind::uniform: return "uniform";
        case WeightSchemeKind::logarithmic: return "logarithmic";
        case WeightSchemeKind::inverse_logarithmic: return "inverse_logarithmic";
        case WeightSchemeKind::custom: return "custom";
    }
    throw InputError("bad weight scheme");
}

SliceWeights parse_weight_scheme(const std::string& name) {
    if (name == "uniform") return SliceWeights::uniform();
    if (name == "log" || name == "logarithmic") return SliceWeights::logarithmic();
    if (name == "invlog" || name == "inverse_logarithmic" || name == "inverse-logarithmic")
        return SliceWeights::inverse_logarithmic();
    throw InputError("unknown weight scheme: " + name);
}

TrapezoidWeights effective_alpha_weights(const std::vector<Tokens>& lengths,
                                         const SliceWeights& weights) {
    const std::size_t n = lengths.size();
    if (n < 2) throw InputError("alpha weights need at least 2 slices");
    for (std::size_t i = 1; i < n; ++i)
        if (lengths[i] <= lengths[i - 1])
            throw InputError("curve lengths must be strictly increasing");

    // Coefficient of slice j in sum_i delta_i (w_i s_i + w_{i+1} s_{i+1}) / 2.
    std::vector<double> coeff(n);
    const auto len = [&](std::size_t i) { return static_cast<double>(lengths[i]); };
    coeff[0] = (len(1) - len(0)) * weights.at(lengths[0]) / 2.0;
    for (std::size_t j = 1; j + 1 < n; ++j)
        coeff[j] = (len(j + 1) - len(j - 1)) * weights.at(lengths[j]) / 2.0;
    coeff[n - 1] = (len(n - 1) - len(n - 2)) * weights.at(lengths[n - 1]) / 2.0;

    double denom = 0.0;
    for (double c : coeff) denom += c;
    if (denom <= 0.0) throw InputError("weighted integration width is zero");

    TrapezoidWeights out;
    out.alphas.resize(n);
    for (std::size_t j = 0; j < n; ++j) out.alphas[j] = coeff[j] / denom;
    return out;
}

TrapezoidWeights alpha_weights(const std::vector<Tokens>& lengths) {
    return effective_alpha_weights(lengths, SliceWeights::uniform());
}

TrapezoidWeights alpha_weights(const LengthGrid& grid) { return alpha_weights(grid.slices); }

CiEstimate weighted_auc(const ScoreCurve& curve, const SliceWeights& weights, double z) {
    if (curve.lengths.size() != curve.points.size())
        throw InputError("curve lengths and points differ in size");
    const TrapezoidWeights tw = effective_alpha_weights(curve.lengths, weights);
    double mean = 0.0;
    double variance = 0.0;
    long n = 0;
    for (std::size_t i = 0; i < tw.alphas.size(); ++i) {
        mean += tw.alphas[i] * curve.points[i].mean;
        variance += tw.alphas[i] * tw.alphas[i] * curve.points[i].variance;
        n += curve.points[i].n;
    }
    return make_ci_estimate(mean, variance, z, n);
}

CiEstimate auc(const ScoreCurve& curve, double z) {
    return weighted_auc(curve, SliceWeights::uniform(), z);
}

double decay_rate(double auc_short, double auc_long) {
    if (auc_short <= 0.0)
        throw InputError("decay rate undefined for nonpositive short-scope score");
    return (auc_short - auc_long) / auc_short;
}

double decay_rate(const CiEstimate& auc_short, const CiEstimate& auc_long) {
    return decay_rate(auc_short.mean, auc_long.mean);
}

}  // namespace atlas
