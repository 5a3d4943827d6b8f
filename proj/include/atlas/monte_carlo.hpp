#pragma once

// Monte Carlo validation of the delta-method confidence interval. Trials are
// partitioned into fixed-size blocks, each with its own seeded substream, so
// results are bit-identical for any thread count. The OpenMP kernel and the
// serial reference implementation share the per-block generator and must
// agree exactly; tests and the benchmark target compare them.

#include <cstdint>
#include <string>
#include <vector>

#include "atlas/aggregation.hpp"

namespace atlas {

struct McOptions {
    long block_size = 4096;
    bool parallel = true;  // OpenMP over blocks when available
};

struct McReport {
    long trials = 0;
    std::uint64_t seed = 0;
    double empirical_lower = 0.0;
    double empirical_upper = 0.0;
    double delta_lower = 0.0;
    double delta_upper = 0.0;
    // delta half-width / empirical half-width; 1 when both are degenerate.
    double ratio = 1.0;
    long rejected_draws = 0;
};

// Draws independent normal triples around (B, C, S), recomputes the harmonic
// aggregate per trial, and compares the 2.5/97.5 percentile interval with the
// closed-form delta interval. Nonpositive triples are rejected and redrawn;
// a rejection rate above 10% throws (the normal approximation does not hold
// in that regime). Requires positive category means and trials >= 1000.
McReport mc_validate(const CategoryAggregate& agg, long trials, std::uint64_t seed,
                     const McOptions& options = {});

// Plain serial loop over the same blocks; reference implementation kept for
// testing the OpenMP kernel.
McReport mc_validate_serial(const CategoryAggregate& agg, long trials, std::uint64_t seed,
                            long block_size = 4096);

// Linear interpolation between order statistics (the "type 7" convention).
// Input must be sorted; p in [0, 1].
double percentile_type7(const std::vector<double>& sorted, double p);

std::string mc_report_to_json(const McReport& report);

}  // namespace atlas
