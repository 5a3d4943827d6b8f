#pragma once

// Subset-level variance estimators turning instance scores into interval
// estimates. Three estimators cover the benchmark components: plain CLT for
// independent instances, cluster-robust for instances sharing a base context,
// and (in metrics.hpp) an instance-count-weighted combination for composite
// components.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "atlas/core.hpp"

namespace atlas {

// Mean with variance and 95% half-width. half_width == z * sqrt(variance)
// always holds; construct through make_ci_estimate to keep it that way.
struct CiEstimate {
    double mean = 0.0;
    double variance = 0.0;
    double half_width = 0.0;
    double z = kDefaultZ;
    long n = 0;
    std::optional<long> k_clusters;
};

CiEstimate make_ci_estimate(double mean, double variance, double z = kDefaultZ, long n = 0,
                            std::optional<long> k_clusters = std::nullopt);

// Sample mean with Bessel-corrected variance of the mean. Requires n >= 2.
CiEstimate clt_variance(std::span<const double> scores, double z = kDefaultZ);

struct ClusteredScore {
    double value = 0.0;
    std::string cluster;
};

// Cluster-robust variance of the sample mean:
//   v = K/(K-1) * 1/n^2 * sum_k (sum_{i in C_k} (x_i - xbar))^2
// Requires at least 2 clusters. With singleton clusters this reduces exactly
// to clt_variance.
CiEstimate cluster_variance(std::span<const ClusteredScore> scores, double z = kDefaultZ);

// 0-1 proportion scale -> 0-100 reporting scale: mean and half-width x100,
// variance x10^4.
CiEstimate scale_to_reporting(const CiEstimate& est);

}  // namespace atlas
