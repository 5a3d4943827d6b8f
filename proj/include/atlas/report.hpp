#pragma once

// Leaderboard documents and analysis-report serialization. Emission is
// deterministic and locale-independent: decimal points, stable column order,
// LF line endings, two decimal places (round-half-even) in CSV/markdown and
// full precision in JSON.

#include <string>
#include <vector>

#include "atlas/aggregation.hpp"
#include "atlas/monte_carlo.hpp"
#include "atlas/rank_analytics.hpp"

namespace atlas {

struct Cell {
    double mean = 0.0;
    double half_width = 0.0;
};

struct LeaderboardRow {
    int rank = 0;
    std::string model;
    Cell foundational, application, holistic, atlascore;
};

enum class ReportFormat { csv, json, markdown };

ReportFormat parse_report_format(const std::string& name);

std::vector<LeaderboardRow> leaderboard_rows(const std::vector<ModelScorecard>& cards);

std::string emit_leaderboard(const std::vector<LeaderboardRow>& rows, ReportFormat format);
std::vector<LeaderboardRow> parse_leaderboard(std::string_view text, ReportFormat format);

// Round-half-even at two decimals, fixed "%.2f" rendering.
std::string format_fixed2(double value);

// Everything cmd_aggregate emits: the leaderboard plus plot-ready per-model
// component score vectors (radar data).
struct RadarEntry {
    std::string model;
    std::vector<std::pair<std::string, double>> components;
};

struct ReportBundle {
    Tokens scope = 0;
    std::string weights = "uniform";
    std::string aggregator = "harmonic";
    std::vector<ModelScorecard> cards;
    std::vector<RadarEntry> radar;
};

ReportBundle make_bundle(const ScoreSurface& surface, const TaxonomyConfig& config,
                         ReportingScope scope, const PipelineOptions& options = {});

std::string bundle_to_json(const ReportBundle& bundle);

// Analysis reports; each has a JSON and a CSV form. Matrices use the long
// form row,col,value,p.
std::string migration_to_json(const MigrationReport& report);
std::string migration_to_csv(const MigrationReport& report);
std::string decay_to_json(const DecayReport& report);
std::string decay_to_csv(const DecayReport& report);
std::string layer_to_json(const LayerDiscrepancy& report);
std::string layer_to_csv(const LayerDiscrepancy& report);
std::string rank_stats_to_json(const RankStats& stats, const std::string& label);
std::string rank_stats_to_csv(const RankStats& stats, const std::string& label);
std::string weight_sensitivity_to_json(const std::vector<SchemeSensitivity>& schemes);
std::string weight_sensitivity_to_csv(const std::vector<SchemeSensitivity>& schemes);
std::string aggregation_sensitivity_to_json(const std::vector<AggregatorSensitivity>& rows);
std::string aggregation_sensitivity_to_csv(const std::vector<AggregatorSensitivity>& rows);
std::string holistic_sensitivity_to_json(const std::vector<HolisticVariant>& rows);
std::string holistic_sensitivity_to_csv(const std::vector<HolisticVariant>& rows);
std::string lite_to_json(const LiteReport& report);
std::string lite_to_csv(const LiteReport& report);
std::string correlation_to_json(const CorrelationMatrix& matrix);
std::string correlation_to_csv(const CorrelationMatrix& matrix);
std::string mc_reports_to_json(const std::vector<std::pair<std::string, McReport>>& reports);
std::string mc_reports_to_csv(const std::vector<std::pair<std::string, McReport>>& reports);

}  // namespace atlas
