#pragma once

// Normalized trapezoidal integration of score-length curves with exact
// variance propagation, plus the weighted variants. The trapezoidal rule is
// linear in the slice scores, so every integral reduces to effective per-slice
// alpha coefficients; variances propagate through the squared coefficients.

#include <map>
#include <string>
#include <vector>

#include "atlas/core.hpp"
#include "atlas/uncertainty.hpp"

namespace atlas {

// A dimension's score-length curve restricted to a reporting scope: one point
// per slice, no gaps within the supported range.
struct ScoreCurve {
    std::vector<Tokens> lengths;
    std::vector<SliceScore> points;
};

// Per-slice linear coefficients implied by the trapezoidal rule; endpoints use
// the half-interval rule and the alphas sum to 1.
struct TrapezoidWeights {
    std::vector<double> alphas;
};

enum class WeightSchemeKind { uniform, logarithmic, inverse_logarithmic, custom };

// Per-slice weight factors modulating segment contributions. The logarithmic
// scheme uses log2(len/4K), the inverse logarithmic scheme log2(2M/len).
struct SliceWeights {
    WeightSchemeKind scheme = WeightSchemeKind::uniform;
    std::map<Tokens, double> values;  // custom scheme only

    static SliceWeights uniform();
    static SliceWeights logarithmic();
    static SliceWeights inverse_logarithmic();
    static SliceWeights custom(std::map<Tokens, double> values);

    double at(Tokens slice) const;
    std::string name() const;
};

SliceWeights parse_weight_scheme(const std::string& name);

// alpha_0 = (l1-l0)/(2(ln-l0)); interior alpha_i = (l_{i+1}-l_{i-1})/(2(ln-l0));
// alpha_n = (ln-l_{n-1})/(2(ln-l0)). Needs >= 2 slices.
TrapezoidWeights alpha_weights(const std::vector<Tokens>& lengths);
TrapezoidWeights alpha_weights(const LengthGrid& grid);

// Effective alphas of the endpoint-weighted rule, normalized by the weighted
// width. Uniform weights reproduce alpha_weights exactly.
TrapezoidWeights effective_alpha_weights(const std::vector<Tokens>& lengths,
                                         const SliceWeights& weights);

// mean = sum(alpha_i * s_i) on the 0-100 scale; variance = sum(alpha_i^2 * v_i)
// under per-slice independence.
CiEstimate auc(const ScoreCurve& curve, double z = kDefaultZ);

// Each trapezoid endpoint is weighted by its own slice weight and the result
// is normalized by the weighted width; uniform weights reduce to auc
// bit-for-bit.
CiEstimate weighted_auc(const ScoreCurve& curve, const SliceWeights& weights,
                        double z = kDefaultZ);

// Relative drop (short - long) / short; negative means improvement at the
// longer scope. Requires a positive short-scope mean.
double decay_rate(double auc_short, double auc_long);
double decay_rate(const CiEstimate& auc_short, const CiEstimate& auc_long);

}  // namespace atlas
