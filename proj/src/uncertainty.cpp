#include "atlas/uncertainty.hpp"

#include <cmath>
#include <map>

namespace atlas {

CiEstimate make_ci_estimate(double mean, double variance, double z, long n,
                            std::optional<long> k_clusters) {
    if (variance < 0.0) throw InputError("negative variance");
    CiEstimate est;
    est.mean = mean;
    est.variance = variance;
    est.z = z;
    est.half_width = z * std::sqrt(variance);
    est.n = n;
    est.k_clusters = k_clusters;
    return est;
}

CiEstimate clt_variance(std::span<const double> scores, double z) {
    const long n = static_cast<long>(scores.size());
    if (n < 2) throw InputError("clt_variance needs at least 2 scores");
    double mean = 0.0;
    for (double x : scores) mean += x;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : scores) {
        const double d = x - mean;
        ss += d * d;
    }
    const double sample_var = ss / static_cast<double>(n - 1);
    return make_ci_estimate(mean, sample_var / static_cast<double>(n), z, n);
}

CiEstimate cluster_variance(std::span<const ClusteredScore> scores, double z) {
    const long n = static_cast<long>(scores.size());
    if (n < 1) throw InputError("cluster_variance needs scores");
    double mean = 0.0;
    for (const auto& s : scores) mean += s.value;
    mean /= static_cast<double>(n);

    std::map<std::string, double> cluster_sums;
    for (const auto& s : scores) cluster_sums[s.cluster] += s.value - mean;
    const long k = static_cast<long>(cluster_sums.size());
    if (k < 2) throw InputError("cluster_variance needs at least 2 clusters");

    double ss = 0.0;
    for (const auto& [_, dev] : cluster_sums) ss += dev * dev;
    const double factor = static_cast<double>(k) / static_cast<double>(k - 1);
    const double variance = factor * ss / (static_cast<double>(n) * static_cast<double>(n));
    return make_ci_estimate(mean, variance, z, n, k);
}

CiEstimate scale_to_reporting(const CiEstimate& est) {
    CiEstimate out = est;
    out.mean *= 100.0;
    out.variance *= 1e4;
    out.half_width *= 100.0;
    return out;
}

}  // namespace atlas
