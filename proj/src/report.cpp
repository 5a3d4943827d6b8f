#include "atlas/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include <json.hpp>

#include "atlas/ingest.hpp"

namespace atlas {

using ordered_json = nlohmann::ordered_json;

ReportFormat parse_report_format(const std::string& name) {
    if (name == "csv") return ReportFormat::csv;
    if (name == "json") return ReportFormat::json;
    if (name == "markdown" || name == "md") return ReportFormat::markdown;
    throw InputError("unknown report format: " + name);
}

std::string format_fixed2(double value) {
    // nearbyint under the default FE_TONEAREST mode rounds halves to even.
    const double rounded = std::nearbyint(value * 100.0) / 100.0;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", rounded);
    return buf;
}

namespace {

std::string format_fixed(double value, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, value);
    return buf;
}

double parse_double(std::string_view text) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw InputError("bad number '" + std::string(text) + "'");
    return value;
}

std::string_view trim_view(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

constexpr const char* kPlusMinus = "±";

std::string cell_text(const Cell& cell) {
    return format_fixed2(cell.mean) + kPlusMinus + format_fixed2(cell.half_width);
}

Cell parse_cell_text(std::string_view text) {
    const std::string pm = kPlusMinus;
    const auto at = text.find(pm);
    if (at == std::string_view::npos)
        throw InputError("cell '" + std::string(text) + "' lacks the +- separator");
    Cell cell;
    cell.mean = parse_double(trim_view(text.substr(0, at)));
    cell.half_width = parse_double(trim_view(text.substr(at + pm.size())));
    return cell;
}

}  // namespace

std::vector<LeaderboardRow> leaderboard_rows(const std::vector<ModelScorecard>& cards) {
    std::vector<LeaderboardRow> rows;
    int rank = 0;
    for (const auto& card : cards) {
        LeaderboardRow row;
        row.rank = ++rank;
        row.model = card.model;
        const double z = kDefaultZ;
        row.foundational = {card.categories.b.mean, z * std::sqrt(card.categories.b.variance)};
        row.application = {card.categories.c.mean, z * std::sqrt(card.categories.c.variance)};
        row.holistic = {card.categories.s.mean, z * std::sqrt(card.categories.s.variance)};
        row.atlascore = {card.score.mean, card.score.half_width};
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

std::string emit_leaderboard_csv(const std::vector<LeaderboardRow>& rows) {
    std::string out =
        "rank,model,foundational_mean,foundational_hw,application_mean,application_hw,"
        "holistic_mean,holistic_hw,atlascore_mean,atlascore_hw\n";
    for (const auto& r : rows) {
        out += std::to_string(r.rank) + "," + csv_escape(r.model);
        for (const Cell* c : {&r.foundational, &r.application, &r.holistic, &r.atlascore})
            out += "," + format_fixed2(c->mean) + "," + format_fixed2(c->half_width);
        out += '\n';
    }
    return out;
}

std::string emit_leaderboard_markdown(const std::vector<LeaderboardRow>& rows) {
    std::string out = "| # | Model | Foundational | Application | Holistic | ATLAScore |\n";
    out += "|--:|:------|:------------:|:-----------:|:--------:|:---------:|\n";
    for (const auto& r : rows) {
        out += "| " + std::to_string(r.rank) + " | " + r.model + " | " +
               cell_text(r.foundational) + " | " + cell_text(r.application) + " | " +
               cell_text(r.holistic) + " | " + cell_text(r.atlascore) + " |\n";
    }
    return out;
}

ordered_json cell_json(const Cell& cell) {
    return ordered_json{{"mean", cell.mean}, {"half_width", cell.half_width}};
}

Cell cell_from_json(const ordered_json& j) {
    return {j.at("mean").get<double>(), j.at("half_width").get<double>()};
}

std::string emit_leaderboard_json(const std::vector<LeaderboardRow>& rows) {
    ordered_json j;
    j["rows"] = ordered_json::array();
    for (const auto& r : rows) {
        ordered_json row;
        row["rank"] = r.rank;
        row["model"] = r.model;
        row["foundational"] = cell_json(r.foundational);
        row["application"] = cell_json(r.application);
        row["holistic"] = cell_json(r.holistic);
        row["atlascore"] = cell_json(r.atlascore);
        j["rows"].push_back(std::move(row));
    }
    return j.dump(2) + "\n";
}

}  // namespace

std::string emit_leaderboard(const std::vector<LeaderboardRow>& rows, ReportFormat format) {
    switch (format) {
        case ReportFormat::csv: return emit_leaderboard_csv(rows);
        case ReportFormat::markdown: return emit_leaderboard_markdown(rows);
        case ReportFormat::json: return emit_leaderboard_json(rows);
    }
    throw InputError("bad report format");
}

namespace {

std::vector<LeaderboardRow> parse_leaderboard_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line)) throw InputError("empty leaderboard");
    const auto header = split_csv_line(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    for (const char* field :
         {"rank", "model", "foundational_mean", "foundational_hw", "application_mean",
          "application_hw", "holistic_mean", "holistic_hw", "atlascore_mean", "atlascore_hw"})
        if (!col.count(field))
            throw InputError(std::string("leaderboard header lacks column '") + field + "'");

    std::vector<LeaderboardRow> rows;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        if (fields.size() < header.size())
            throw InputError("leaderboard line " + std::to_string(line_no) + ": too few fields");
        LeaderboardRow row;
        row.rank = static_cast<int>(parse_double(fields[col["rank"]]));
        row.model = fields[col["model"]];
        row.foundational = {parse_double(fields[col["foundational_mean"]]),
                            parse_double(fields[col["foundational_hw"]])};
        row.application = {parse_double(fields[col["application_mean"]]),
                           parse_double(fields[col["application_hw"]])};
        row.holistic = {parse_double(fields[col["holistic_mean"]]),
                        parse_double(fields[col["holistic_hw"]])};
        row.atlascore = {parse_double(fields[col["atlascore_mean"]]),
                         parse_double(fields[col["atlascore_hw"]])};
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<LeaderboardRow> parse_leaderboard_markdown(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::vector<LeaderboardRow> rows;
    long seen = 0;
    while (std::getline(in, line)) {
        const std::string_view lv = trim_view(line);
        if (lv.empty() || lv.front() != '|') continue;
        ++seen;
        if (seen <= 2) continue;  // header and separator
        std::vector<std::string> cells;
        std::size_t start = 1;
        while (start < lv.size()) {
            const auto next = lv.find('|', start);
            if (next == std::string_view::npos) break;
            cells.emplace_back(trim_view(lv.substr(start, next - start)));
            start = next + 1;
        }
        if (cells.size() < 6)
            throw InputError("markdown leaderboard row with " + std::to_string(cells.size()) +
                             " cells");
        LeaderboardRow row;
        row.rank = static_cast<int>(parse_double(cells[0]));
        row.model = cells[1];
        row.foundational = parse_cell_text(cells[2]);
        row.application = parse_cell_text(cells[3]);
        row.holistic = parse_cell_text(cells[4]);
        row.atlascore = parse_cell_text(cells[5]);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<LeaderboardRow> parse_leaderboard_json(std::string_view text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(std::string("leaderboard JSON parse error: ") + e.what());
    }
    const ordered_json& rows_json = j.contains("rows") ? j.at("rows") : j;
    if (!rows_json.is_array()) throw InputError("leaderboard JSON has no rows array");
    std::vector<LeaderboardRow> rows;
    for (const auto& row_json : rows_json) {
        LeaderboardRow row;
        row.rank = row_json.at("rank").get<int>();
        row.model = row_json.at("model").get<std::string>();
        row.foundational = cell_from_json(row_json.at("foundational"));
        row.application = cell_from_json(row_json.at("application"));
        row.holistic = cell_from_json(row_json.at("holistic"));
        row.atlascore = cell_from_json(row_json.at("atlascore"));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

std::vector<LeaderboardRow> parse_leaderboard(std::string_view text, ReportFormat format) {
    switch (format) {
        case ReportFormat::csv: return parse_leaderboard_csv(text);
        case ReportFormat::markdown: return parse_leaderboard_markdown(text);
        case ReportFormat::json: return parse_leaderboard_json(text);
    }
    throw InputError("bad report format");
}

ReportBundle make_bundle(const ScoreSurface& surface, const TaxonomyConfig& config,
                         ReportingScope scope, const PipelineOptions& options) {
    ReportBundle bundle;
    bundle.scope = scope.max_length;
    bundle.weights = options.weights.name();
    bundle.aggregator = options.category_weights ? "weighted_harmonic"
                                                 : aggregator_name(options.aggregator);
    bundle.cards = score_all_models(surface, config, scope, options);

    for (const auto& card : bundle.cards) {
        RadarEntry entry;
        entry.model = card.model;
        for (const auto& dim : config.dimensions) {
            for (const auto& comp : dim.components) {
                if (dim.layer == Layer::holistic) {
                    const SliceScore* cell =
                        surface.find({card.model, dim.name, comp.name, std::nullopt});
                    if (cell) entry.components.emplace_back(comp.name, cell->mean);
                    continue;
                }
                // Component-level curve (ignoring siblings) for the radar axes.
                ScoreCurve curve;
                for (Tokens s : config.grid.up_to(scope.max_length)) {
                    if (!comp.supports(s)) continue;
                    const SliceScore* cell = surface.find({card.model, dim.name, comp.name, s});
                    if (!cell) continue;
                    curve.lengths.push_back(s);
                    curve.points.push_back(*cell);
                }
                if (curve.lengths.size() >= 2)
                    entry.components.emplace_back(comp.name,
                                                  weighted_auc(curve, options.weights).mean);
                else if (curve.lengths.size() == 1)
                    entry.components.emplace_back(comp.name, curve.points.front().mean);
            }
        }
        bundle.radar.push_back(std::move(entry));
    }
    return bundle;
}

std::string bundle_to_json(const ReportBundle& bundle) {
    ordered_json j;
    j["scope"] = bundle.scope;
    j["weights"] = bundle.weights;
    j["aggregator"] = bundle.aggregator;
    j["leaderboard"] = ordered_json::array();
    int rank = 0;
    for (const auto& card : bundle.cards) {
        ordered_json row;
        row["rank"] = ++rank;
        row["model"] = card.model;
        row["foundational"] = {{"mean", card.categories.b.mean},
                               {"variance", card.categories.b.variance}};
        row["application"] = {{"mean", card.categories.c.mean},
                              {"variance", card.categories.c.variance}};
        row["holistic"] = {{"mean", card.categories.s.mean},
                           {"variance", card.categories.s.variance}};
        row["atlascore"] = {{"mean", card.score.mean},
                            {"variance", card.score.variance},
                            {"half_width", card.score.half_width}};
        j["leaderboard"].push_back(std::move(row));
    }
    j["radar"] = ordered_json::array();
    for (const auto& entry : bundle.radar) {
        ordered_json e;
        e["model"] = entry.model;
        ordered_json comps;
        for (const auto& [name, score] : entry.components) comps[name] = score;
        e["components"] = std::move(comps);
        j["radar"].push_back(std::move(e));
    }
    return j.dump(2) + "\n";
}

namespace {

ordered_json rank_stats_json(const RankStats& stats) {
    ordered_json j;
    j["rho"] = stats.rho;
    j["tau"] = stats.tau;
    j["p_rho"] = stats.p_rho;
    if (stats.r2) j["r2"] = *stats.r2;
    j["max_abs_rank_shift"] = stats.max_abs_rank_shift;
    ordered_json shifts;
    for (const auto& [model, shift] : stats.shifts) shifts[model] = shift;
    j["shifts"] = std::move(shifts);
    return j;
}

}  // namespace

std::string migration_to_json(const MigrationReport& report) {
    ordered_json j;
    j["entries"] = ordered_json::array();
    for (const auto& e : report.entries) {
        j["entries"].push_back(ordered_json{{"model", e.model},
                                            {"rank_short", e.rank_short},
                                            {"rank_long", e.rank_long},
                                            {"shift", e.shift}});
    }
    j["count_shift_at_least_2"] = report.count_shift_at_least_2;
    return j.dump(2) + "\n";
}

std::string migration_to_csv(const MigrationReport& report) {
    std::string out = "model,rank_short,rank_long,shift\n";
    for (const auto& e : report.entries)
        out += csv_escape(e.model) + "," + format_fixed(e.rank_short, 1) + "," +
               format_fixed(e.rank_long, 1) + "," + format_fixed(e.shift, 1) + "\n";
    return out;
}

std::string decay_to_json(const DecayReport& report) {
    ordered_json j;
    j["columns"] = report.columns;
    j["rows"] = ordered_json::array();
    for (std::size_t i = 0; i < report.models.size(); ++i) {
        ordered_json row;
        row["model"] = report.models[i];
        ordered_json rates;
        for (std::size_t c = 0; c < report.columns.size(); ++c)
            rates[report.columns[c]] = report.rates[i][c];
        row["decay"] = std::move(rates);
        j["rows"].push_back(std::move(row));
    }
    return j.dump(2) + "\n";
}

std::string decay_to_csv(const DecayReport& report) {
    std::string out = "model";
    for (const auto& c : report.columns) out += "," + c;
    out += '\n';
    for (std::size_t i = 0; i < report.models.size(); ++i) {
        out += csv_escape(report.models[i]);
        for (std::size_t c = 0; c < report.columns.size(); ++c)
            out += "," + format_fixed(report.rates[i][c], 4);
        out += '\n';
    }
    return out;
}

std::string layer_to_json(const LayerDiscrepancy& report) {
    ordered_json j;
    j["r2"] = report.r2;
    j["rho"] = report.rho;
    j["p_rho"] = report.p_rho;
    j["max_abs_shift"] = report.max_abs_shift;
    j["threshold"] = report.threshold;
    j["count_at_threshold"] = report.count_at_threshold;
    ordered_json shifts;
    for (const auto& [model, gap] : report.abs_shifts) shifts[model] = gap;
    j["abs_shifts"] = std::move(shifts);
    return j.dump(2) + "\n";
}

std::string layer_to_csv(const LayerDiscrepancy& report) {
    std::string out = "model,abs_rank_gap\n";
    for (const auto& [model, gap] : report.abs_shifts)
        out += csv_escape(model) + "," + format_fixed(gap, 1) + "\n";
    return out;
}

std::string rank_stats_to_json(const RankStats& stats, const std::string& label) {
    ordered_json j;
    j["label"] = label;
    j["stats"] = rank_stats_json(stats);
    return j.dump(2) + "\n";
}

std::string rank_stats_to_csv(const RankStats& stats, const std::string& label) {
    std::string out = "label,rho,tau,p_rho,max_abs_rank_shift\n";
    out += csv_escape(label) + "," + format_fixed(stats.rho, 4) + "," + format_fixed(stats.tau, 4) +
           "," + format_fixed(stats.p_rho, 6) + "," + format_fixed(stats.max_abs_rank_shift, 1) +
           "\n";
    return out;
}

std::string weight_sensitivity_to_json(const std::vector<SchemeSensitivity>& schemes) {
    ordered_json j = ordered_json::array();
    for (const auto& s : schemes) {
        ordered_json entry;
        entry["scheme"] = s.scheme;
        ordered_json scores;
        for (const auto& [model, score] : s.scores) scores[model] = score;
        entry["scores"] = std::move(scores);
        entry["vs_uniform"] = rank_stats_json(s.vs_baseline);
        j.push_back(std::move(entry));
    }
    return j.dump(2) + "\n";
}

std::string weight_sensitivity_to_csv(const std::vector<SchemeSensitivity>& schemes) {
    std::string out = "scheme,rho,tau,max_abs_rank_shift\n";
    for (const auto& s : schemes)
        out += csv_escape(s.scheme) + "," + format_fixed(s.vs_baseline.rho, 4) + "," +
               format_fixed(s.vs_baseline.tau, 4) + "," +
               format_fixed(s.vs_baseline.max_abs_rank_shift, 1) + "\n";
    return out;
}

std::string aggregation_sensitivity_to_json(const std::vector<AggregatorSensitivity>& rows) {
    ordered_json j = ordered_json::array();
    for (const auto& r : rows) {
        ordered_json entry;
        entry["aggregator"] = r.aggregator;
        ordered_json scores;
        for (const auto& [model, score] : r.scores) scores[model] = score;
        entry["scores"] = std::move(scores);
        entry["vs_harmonic"] = rank_stats_json(r.vs_harmonic);
        j.push_back(std::move(entry));
    }
    return j.dump(2) + "\n";
}

std::string aggregation_sensitivity_to_csv(const std::vector<AggregatorSensitivity>& rows) {
    std::string out = "aggregator,rho,tau,max_abs_rank_shift\n";
    for (const auto& r : rows)
        out += csv_escape(r.aggregator) + "," + format_fixed(r.vs_harmonic.rho, 4) + "," +
               format_fixed(r.vs_harmonic.tau, 4) + "," +
               format_fixed(r.vs_harmonic.max_abs_rank_shift, 1) + "\n";
    return out;
}

std::string holistic_sensitivity_to_json(const std::vector<HolisticVariant>& rows) {
    ordered_json j = ordered_json::array();
    for (const auto& r : rows) {
        ordered_json entry;
        entry["variant"] = r.name;
        ordered_json scores;
        for (const auto& [model, score] : r.scores) scores[model] = score;
        entry["scores"] = std::move(scores);
        entry["vs_default"] = rank_stats_json(r.vs_default);
        j.push_back(std::move(entry));
    }
    return j.dump(2) + "\n";
}

std::string holistic_sensitivity_to_csv(const std::vector<HolisticVariant>& rows) {
    std::string out = "variant,rho,tau,max_abs_rank_shift\n";
    for (const auto& r : rows)
        out += csv_escape(r.name) + "," + format_fixed(r.vs_default.rho, 4) + "," +
               format_fixed(r.vs_default.tau, 4) + "," +
               format_fixed(r.vs_default.max_abs_rank_shift, 1) + "\n";
    return out;
}

std::string lite_to_json(const LiteReport& report) {
    ordered_json j;
    j["schemes"] = ordered_json::array();
    for (const auto& s : report.schemes) {
        ordered_json entry;
        entry["scheme"] = s.name;
        ordered_json slices = ordered_json::array();
        for (Tokens t : s.slices) slices.push_back(t);
        entry["slices"] = std::move(slices);
        entry["relative_cost"] = s.relative_cost;
        entry["rho"] = s.rho;
        if (s.max_abs_shift) entry["max_abs_rank_shift"] = *s.max_abs_shift;
        if (s.count_shift_at_least_2) entry["count_shift_at_least_2"] = *s.count_shift_at_least_2;
        entry["efficiency"] = s.efficiency;
        entry["pareto"] = s.pareto;
        j["schemes"].push_back(std::move(entry));
    }
    j["frontier"] = report.frontier;
    return j.dump(2) + "\n";
}

std::string lite_to_csv(const LiteReport& report) {
    std::string out = "scheme,relative_cost,rho,efficiency,pareto\n";
    for (const auto& s : report.schemes)
        out += csv_escape(s.name) + "," + format_fixed(s.relative_cost, 3) + "," +
               format_fixed(s.rho, 3) + "," + format_fixed(s.efficiency, 4) + "," +
               (s.pareto ? "1" : "0") + "\n";
    return out;
}

std::string correlation_to_json(const CorrelationMatrix& matrix) {
    ordered_json j;
    j["dimensions"] = matrix.dimensions;
    j["pairs"] = ordered_json::array();
    for (std::size_t i = 0; i < matrix.dimensions.size(); ++i)
        for (std::size_t k = 0; k < matrix.dimensions.size(); ++k)
            j["pairs"].push_back(ordered_json{{"row", matrix.dimensions[i]},
                                              {"col", matrix.dimensions[k]},
                                              {"value", matrix.rho[i][k]},
                                              {"p", matrix.p[i][k]}});
    j["mean_off_diagonal"] = matrix.mean_off_diagonal;
    j["median_off_diagonal"] = matrix.median_off_diagonal;
    j["threshold"] = matrix.threshold;
    j["count_below_threshold"] = matrix.count_below_threshold;
    return j.dump(2) + "\n";
}

std::string correlation_to_csv(const CorrelationMatrix& matrix) {
    std::string out = "row,col,value,p\n";
    for (std::size_t i = 0; i < matrix.dimensions.size(); ++i)
        for (std::size_t k = 0; k < matrix.dimensions.size(); ++k)
            out += csv_escape(matrix.dimensions[i]) + "," + csv_escape(matrix.dimensions[k]) +
                   "," + format_fixed(matrix.rho[i][k], 4) + "," + format_fixed(matrix.p[i][k], 6) +
                   "\n";
    return out;
}

std::string mc_reports_to_json(const std::vector<std::pair<std::string, McReport>>& reports) {
    ordered_json j = ordered_json::array();
    for (const auto& [model, r] : reports) {
        ordered_json entry;
        entry["model"] = model;
        entry["trials"] = r.trials;
        entry["seed"] = r.seed;
        entry["empirical_ci"] = {r.empirical_lower, r.empirical_upper};
        entry["delta_ci"] = {r.delta_lower, r.delta_upper};
        entry["ratio"] = r.ratio;
        entry["rejected_draws"] = r.rejected_draws;
        j.push_back(std::move(entry));
    }
    return j.dump(2) + "\n";
}

std::string mc_reports_to_csv(const std::vector<std::pair<std::string, McReport>>& reports) {
    std::string out =
        "model,trials,seed,empirical_lower,empirical_upper,delta_lower,delta_upper,ratio,"
        "rejected_draws\n";
    for (const auto& [model, r] : reports)
        out += csv_escape(model) + "," + std::to_string(r.trials) + "," + std::to_string(r.seed) +
               "," + format_fixed(r.empirical_lower, 6) + "," + format_fixed(r.empirical_upper, 6) +
               "," + format_fixed(r.delta_lower, 6) + "," + format_fixed(r.delta_upper, 6) + "," +
               format_fixed(r.ratio, 6) + "," + std::to_string(r.rejected_draws) + "\n";
    return out;
}

}  // namespace atlas
