#include "atlas/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <json.hpp>

namespace atlas {

namespace {

// Mixes (seed, block index) into an independent substream seed.
std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Uniform in (0, 1]; the +1 keeps log() finite.
double uniform_open(std::mt19937_64& rng) {
    return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

// Box-Muller. Four uniforms per triple keep the stream alignment fixed.
void normal_triple(std::mt19937_64& rng, double (&z)[3]) {
    const double u1 = uniform_open(rng);
    const double u2 = uniform_open(rng);
    const double u3 = uniform_open(rng);
    const double u4 = uniform_open(rng);
    const double r1 = std::sqrt(-2.0 * std::log(u1));
    const double r2 = std::sqrt(-2.0 * std::log(u3));
    z[0] = r1 * std::cos(2.0 * std::numbers::pi * u2);
    z[1] = r1 * std::sin(2.0 * std::numbers::pi * u2);
    z[2] = r2 * std::cos(2.0 * std::numbers::pi * u4);
}

struct TripleDist {
    double mean[3];
    double sd[3];
};

// Fills draws[first, last) from the block's own substream. Returns the number
// of rejected (nonpositive) triples.
long run_block(const TripleDist& dist, std::uint64_t seed, long block_index, long first, long last,
               std::vector<double>& draws) {
    std::mt19937_64 rng(splitmix64(seed ^ (0x6C62272E07BB0142ULL + static_cast<std::uint64_t>(
                                                                       block_index))));
    long rejected = 0;
    double z[3];
    double v[3];
    for (long t = first; t < last; ++t) {
        for (;;) {
            normal_triple(rng, z);
            bool ok = true;
            for (int i = 0; i < 3; ++i) {
                v[i] = dist.mean[i] + dist.sd[i] * z[i];
                if (v[i] <= 0.0) ok = false;
            }
            if (ok) break;
            ++rejected;
        }
        draws[static_cast<std::size_t>(t)] = 3.0 / (1.0 / v[0] + 1.0 / v[1] + 1.0 / v[2]);
    }
    return rejected;
}

McReport finish_report(const CategoryAggregate& agg, long trials, std::uint64_t seed,
                       std::vector<double>& draws, long rejected) {
    const double rate =
        static_cast<double>(rejected) / static_cast<double>(trials + rejected);
    if (rate > 0.10)
        throw InputError("monte carlo rejection rate " + std::to_string(rate) +
                         " exceeds 10%; delta method inapplicable in this regime");

    std::sort(draws.begin(), draws.end());
    const AtlasScore delta = harmonic_atlascore(agg);

    McReport report;
    report.trials = trials;
    report.seed = seed;
    report.rejected_draws = rejected;
    report.empirical_lower = percentile_type7(draws, 0.025);
    report.empirical_upper = percentile_type7(draws, 0.975);
    report.delta_lower = delta.mean - delta.half_width;
    report.delta_upper = delta.mean + delta.half_width;

    const double empirical_hw = (report.empirical_upper - report.empirical_lower) / 2.0;
    if (empirical_hw == 0.0)
        report.ratio = delta.half_width == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    else
        report.ratio = delta.half_width / empirical_hw;
    return report;
}

TripleDist make_dist(const CategoryAggregate& agg) {
    if (agg.b.mean <= 0.0 || agg.c.mean <= 0.0 || agg.s.mean <= 0.0)
        throw InputError("monte carlo validation needs positive category means");
    return {{agg.b.mean, agg.c.mean, agg.s.mean},
            {std::sqrt(agg.b.variance), std::sqrt(agg.c.variance), std::sqrt(agg.s.variance)}};
}

}  // namespace

double percentile_type7(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw InputError("percentile of an empty sample");
    if (p < 0.0 || p > 1.0) throw InputError("percentile p outside [0,1]");
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const std::size_t lo = static_cast<std::size_t>(h);
    const double frac = h - static_cast<double>(lo);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

McReport mc_validate(const CategoryAggregate& agg, long trials, std::uint64_t seed,
                     const McOptions& options) {
    if (trials < 1000) throw InputError("monte carlo validation needs at least 1000 trials");
    if (options.block_size < 1) throw InputError("block size must be positive");
    const TripleDist dist = make_dist(agg);

    const long block_size = options.block_size;
    const long n_blocks = (trials + block_size - 1) / block_size;
    std::vector<double> draws(static_cast<std::size_t>(trials));
    std::vector<long> rejected(static_cast<std::size_t>(n_blocks), 0);

    if (options.parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long b = 0; b < n_blocks; ++b) {
            const long first = b * block_size;
            const long last = std::min(trials, first + block_size);
            rejected[static_cast<std::size_t>(b)] = run_block(dist, seed, b, first, last, draws);
        }
    } else {
        for (long b = 0; b < n_blocks; ++b) {
            const long first = b * block_size;
            const long last = std::min(trials, first + block_size);
            rejected[static_cast<std::size_t>(b)] = run_block(dist, seed, b, first, last, draws);
        }
    }

    long total_rejected = 0;
    for (long r : rejected) total_rejected += r;
    return finish_report(agg, trials, seed, draws, total_rejected);
}

McReport mc_validate_serial(const CategoryAggregate& agg, long trials, std::uint64_t seed,
                            long block_size) {
    if (trials < 1000) throw InputError("monte carlo validation needs at least 1000 trials");
    if (block_size < 1) throw InputError("block size must be positive");
    const TripleDist dist = make_dist(agg);

    std::vector<double> draws(static_cast<std::size_t>(trials));
    long rejected = 0;
    long block_index = 0;
    for (long first = 0; first < trials; first += block_size, ++block_index) {
        const long last = std::min(trials, first + block_size);
        rejected += run_block(dist, seed, block_index, first, last, draws);
    }
    return finish_report(agg, trials, seed, draws, rejected);
}

std::string mc_report_to_json(const McReport& report) {
    nlohmann::ordered_json j;
    j["trials"] = report.trials;
    j["seed"] = report.seed;
    j["empirical_ci"] = {report.empirical_lower, report.empirical_upper};
    j["delta_ci"] = {report.delta_lower, report.delta_upper};
    j["ratio"] = report.ratio;
    j["rejected_draws"] = report.rejected_draws;
    return j.dump(2);
}

}  // namespace atlas
