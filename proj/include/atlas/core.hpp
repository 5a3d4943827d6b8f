#pragma once

// Shared domain vocabulary: length grid, reporting scopes, taxonomy and the
// score surface that every downstream stage consumes. All types are immutable
// value types once constructed; concurrent readers need no synchronization.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace atlas {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr double kDefaultZ = 1.96;  // 95% confidence multiplier

// Invalid input or violated precondition; the CLI maps this to exit code 2.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File-system or I/O failure; the CLI maps this to exit code 1.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Tokens = std::int64_t;

// Ordered evaluation context lengths, strictly increasing, at least two.
// Any increasing grid is legal; nothing assumes geometric spacing.
struct LengthGrid {
    std::vector<Tokens> slices;

    LengthGrid() = default;
    explicit LengthGrid(std::vector<Tokens> s);

    // The default eight-slice grid: 8K doubling to 1M.
    static LengthGrid standard();

    bool contains(Tokens length) const;
    // Slices <= max_length (throws InputError if max_length is not a slice).
    std::vector<Tokens> up_to(Tokens max_length) const;
};

// Maximum slice included when integrating a score-length curve.
struct ReportingScope {
    Tokens max_length = 0;
};

inline constexpr Tokens kScope128K = 131072;
inline constexpr Tokens kScope1M = 1048576;

// Parses "128K", "1M", "8k", or a raw token count.
Tokens parse_length(const std::string& text);
// "131072" -> "128K" where the value is a whole multiple of 1024, else digits.
std::string format_length(Tokens length);

enum class Layer { foundational, application, holistic };

Layer parse_layer(const std::string& name);
std::string layer_name(Layer layer);

enum class MetricKind { em, acc, qpem, set_f1, mrecall, answer_level, weighted_binary };
enum class EstimatorKind { clt, cluster, weighted };

MetricKind parse_metric(const std::string& name);
std::string metric_name(MetricKind kind);
EstimatorKind parse_estimator(const std::string& name);
std::string estimator_name(EstimatorKind kind);

struct ComponentConfig {
    std::string name;
    MetricKind metric = MetricKind::em;
    EstimatorKind estimator = EstimatorKind::clt;
    // Supported slices; empty optional means scored at original lengths
    // (holistic). A component may start above the grid minimum; unsupported
    // slices are simply absent.
    std::optional<std::vector<Tokens>> slices;
    double tau = 1.0;  // decay constant for answer-level numeric credit
    std::string weights_mode = "instance_count";
    std::map<Tokens, int> counts;  // expected instances per slice (informational)
    int total_count = 0;           // holistic components: total instances

    bool is_sliced() const { return slices.has_value(); }
    bool supports(Tokens slice) const;
};

struct DimensionConfig {
    std::string name;
    Layer layer = Layer::foundational;
    std::vector<ComponentConfig> components;
};

struct TaxonomyConfig {
    LengthGrid grid;
    std::vector<Tokens> scopes;
    std::vector<DimensionConfig> dimensions;

    const DimensionConfig* find_dimension(const std::string& name) const;
    const ComponentConfig* find_component(const std::string& name) const;
    const DimensionConfig* dimension_of_component(const std::string& component) const;
    std::vector<const DimensionConfig*> layer_dimensions(Layer layer) const;
    std::vector<const DimensionConfig*> sliced_dimensions() const;

    // Structural validation; throws InputError on the first breach.
    void validate() const;
};

// Subset mean with its variance, on the 0-100 reporting scale.
struct SliceScore {
    double mean = 0.0;      // in [0, 100]
    double variance = 0.0;  // score^2 units, >= 0
    long n = 0;             // instance count behind the estimate
};

// Key of one surface cell. Holistic cells carry no slice.
struct SurfaceKey {
    std::string model;
    std::string dimension;
    std::string component;
    std::optional<Tokens> slice;

    friend auto operator<=>(const SurfaceKey&, const SurfaceKey&) = default;
};

// The central tensor: per-(model, dimension, component, slice) subset scores
// plus per-(model, holistic component) original-length scores. Missing slices
// are represented by absence, never by zero.
struct ScoreSurface {
    std::map<SurfaceKey, SliceScore> cells;

    // Throws InputError on duplicate key.
    void insert(SurfaceKey key, SliceScore score);
    const SliceScore* find(const SurfaceKey& key) const;
    std::vector<std::string> models() const;
    bool empty() const { return cells.empty(); }
};

// Returns structural violations as data; empty means valid. When a scope is
// given, also checks that every configured cell required for that scope is
// present. Absence of slices a component does not support is legal.
std::vector<std::string> validate_surface(const ScoreSurface& surface,
                                          const TaxonomyConfig& config,
                                          std::optional<ReportingScope> scope = std::nullopt);

}  // namespace atlas
