#pragma once

// Per-instance scorers for every component metric: exact match, quasi-prefix
// exact match, node-set F1, MRecall@K, answer-level partial credit and the
// instance-count-weighted binary composite. All scorers are pure, deterministic
// and emit values in [0, 1].

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "atlas/core.hpp"
#include "atlas/uncertainty.hpp"

namespace atlas {

// Lowercase (ASCII), strip every Unicode punctuation codepoint, collapse
// whitespace runs (ASCII whitespace and Unicode space separators) to single
// spaces, trim the ends. Invalid UTF-8 bytes pass through untouched.
std::string normalize_text(std::string_view raw);

// 1 iff pred equals gold after trimming leading/trailing whitespace.
double score_exact_match(std::string_view pred, std::string_view gold);

// Quasi-prefix exact match: 1 iff the normalized prediction starts with any
// normalized gold unit. exact_mode (fixed output mappings) demands normalized
// equality instead, avoiding prefix collisions between similar options.
double score_qpem(std::string_view pred, std::span<const std::string> golds,
                  bool exact_mode = false);

// F1 between predicted and gold node sets (inputs are de-duplicated).
// Both empty -> 1; exactly one empty -> 0.
double score_set_f1(std::span<const std::string> pred, std::span<const std::string> gold);

// 1 iff the first k distinct predicted ids contain at least min(k, |gold|)
// distinct gold ids. Duplicate predictions keep their first occurrence.
double score_mrecall_at_k(std::span<const std::string> pred,
                          std::span<const std::string> gold, int k);

enum class AnswerKind { categorical, date, numeric, frequency_label };

AnswerKind parse_answer_kind(const std::string& name);
std::string answer_kind_name(AnswerKind kind);

struct AnswerPayload {
    AnswerKind kind = AnswerKind::categorical;
    std::string value;
};

struct ScoredValue {
    double value = 0.0;
    // Set when a numeric/date payload failed to parse (score 0, not a crash).
    std::optional<std::string> diagnostic;
};

// Categorical / frequency labels compare after normalize_text; dates are
// canonicalized to ISO-8601 first; numeric answers earn exp(-|pred-gold|/tau).
ScoredValue score_answer_level(const AnswerPayload& pred, const AnswerPayload& gold, double tau);

// "1,234.5", "$12", "85%" -> number. Returns nullopt when unparseable.
std::optional<double> parse_lenient_number(std::string_view text);
// Accepts YYYY-MM-DD, "Month D, YYYY" and "D Month YYYY"; returns ISO-8601.
std::optional<std::string> canonicalize_date(std::string_view text);

struct SubcomponentScores {
    std::string name;
    std::vector<double> scores;  // binary or [0,1] instance scores
    double weight = 0.0;         // nonnegative; instance-count weighting uses n
};

// Composite mean sum(lambda_m * xbar_m) with lambda_m = w_m / sum_j w_j and
// variance sum(lambda_m^2 * sigma_m^2 / n_m), Bessel-corrected. Every
// subcomponent needs n >= 2 for the variance to exist.
CiEstimate weighted_binary_composite(std::span<const SubcomponentScores> subs,
                                     double z = kDefaultZ);

// One scored prediction for one benchmark instance.
using TextPayload = std::string;
using IdListPayload = std::vector<std::string>;
using BinaryPayload = double;
using Payload = std::variant<TextPayload, IdListPayload, AnswerPayload, BinaryPayload>;

struct InstanceRecord {
    std::string model;
    std::string component;
    std::optional<Tokens> slice;  // absent for holistic components
    std::string instance_id;
    std::optional<std::string> cluster_id;
    std::optional<std::string> subcomponent;
    MetricKind kind = MetricKind::em;  // payload kind; may refine a composite
    Payload prediction;
    Payload gold;
    std::optional<int> k;  // MRecall cutoff; defaults to |gold|
    bool exact = false;    // QPEM fixed-mapping mode
};

struct InstanceScore {
    double value = 0.0;  // in [0, 1]
    std::string instance_id;
    std::optional<std::string> cluster_id;
    std::optional<std::string> subcomponent;
    std::optional<std::string> diagnostic;
};

// Applies the record's metric. Throws InputError when the payload shape does
// not match the metric kind.
InstanceScore score_instance(const InstanceRecord& record, double tau = 1.0);

}  // namespace atlas
