// atlas: length-aware benchmark scoring CLI.
//
// Subcommands:
//   score      instance JSONL -> slice-score CSV (+ run manifest)
//   aggregate  slice-score CSV -> leaderboard document + JSON bundle
//   analyze    sensitivity / decay / migration / lite / correlation / mc reports
//
// Exit codes: 0 success, 1 I/O failure, 2 validation or usage error.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "atlas/aggregation.hpp"
#include "atlas/core.hpp"
#include "atlas/ingest.hpp"
#include "atlas/monte_carlo.hpp"
#include "atlas/rank_analytics.hpp"
#include "atlas/report.hpp"

namespace fs = std::filesystem;
using atlas::InputError;
using atlas::IoError;

namespace {

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_manifest(const fs::path& out, const std::string& command,
                    const std::vector<std::string>& inputs, const std::string& config_hash,
                    std::uint64_t seed) {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["inputs"] = inputs;
    j["config_hash"] = config_hash;
    j["seed"] = seed;
    j["version"] = atlas::kVersion;
    j["timestamp"] = iso_timestamp();
    atlas::write_text_file(out, j.dump(2) + "\n");
}

atlas::SliceWeights resolve_weights(const std::string& spec) {
    try {
        return atlas::parse_weight_scheme(spec);
    } catch (const InputError&) {
        // Not a named scheme: a CSV file slice,weight.
        const std::string text = atlas::read_text_file(spec);
        std::map<atlas::Tokens, double> values;
        std::istringstream in(text);
        std::string line;
        bool first = true;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto fields = atlas::split_csv_line(line);
            if (first && fields.size() >= 2 && fields[0] == "slice") {
                first = false;
                continue;
            }
            first = false;
            if (fields.size() < 2) throw InputError("weight file line needs slice,weight");
            values[atlas::parse_length(fields[0])] = std::stod(fields[1]);
        }
        return atlas::SliceWeights::custom(std::move(values));
    }
}

struct NamedScores {
    std::vector<std::string> models;
    std::vector<double> scores;
};

// Aligns two leaderboards on their shared model set (sorted by name).
void align_leaderboards(const std::vector<atlas::LeaderboardRow>& short_rows,
                        const std::vector<atlas::LeaderboardRow>& long_rows,
                        NamedScores& short_out, NamedScores& long_out) {
    std::map<std::string, double> short_scores, long_scores;
    for (const auto& r : short_rows) short_scores[r.model] = r.atlascore.mean;
    for (const auto& r : long_rows) long_scores[r.model] = r.atlascore.mean;
    for (const auto& [model, score] : short_scores) {
        const auto it = long_scores.find(model);
        if (it == long_scores.end())
            throw InputError("model '" + model + "' missing from the long-scope leaderboard");
        short_out.models.push_back(model);
        short_out.scores.push_back(score);
        long_out.models.push_back(model);
        long_out.scores.push_back(it->second);
    }
    if (short_out.models.size() != long_scores.size())
        throw InputError("leaderboards cover different model sets");
}

std::vector<atlas::LeaderboardRow> load_leaderboard(const fs::path& path) {
    const std::string text = atlas::read_text_file(path);
    const std::string ext = path.extension().string();
    atlas::ReportFormat format = atlas::ReportFormat::csv;
    if (ext == ".json") format = atlas::ReportFormat::json;
    else if (ext == ".md") format = atlas::ReportFormat::markdown;
    return atlas::parse_leaderboard(text, format);
}

atlas::CategoryAggregate categories_of(const atlas::LeaderboardRow& row, double z) {
    const auto var = [z](const atlas::Cell& c) {
        const double sd = c.half_width / z;
        return sd * sd;
    };
    atlas::CategoryAggregate agg;
    agg.b = {row.foundational.mean, var(row.foundational)};
    agg.c = {row.application.mean, var(row.application)};
    agg.s = {row.holistic.mean, var(row.holistic)};
    return agg;
}

std::vector<atlas::LiteSchemeSpec> load_lite_specs(const fs::path& path) {
    const std::string text = atlas::read_text_file(path);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw InputError("empty lite scheme file");
    const auto header = atlas::split_csv_line(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    for (const char* required : {"scheme", "slices", "relative_cost"})
        if (!col.count(required))
            throw InputError(std::string("lite scheme header lacks column '") + required + "'");

    std::vector<atlas::LiteSchemeSpec> specs;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto fields = atlas::split_csv_line(line);
        atlas::LiteSchemeSpec spec;
        spec.name = fields[col["scheme"]];
        std::string slices = fields[col["slices"]];
        std::size_t start = 0;
        while (start < slices.size()) {
            auto plus = slices.find('+', start);
            if (plus == std::string::npos) plus = slices.size();
            if (plus > start)
                spec.slices.push_back(atlas::parse_length(slices.substr(start, plus - start)));
            start = plus + 1;
        }
        spec.relative_cost = std::stod(fields[col["relative_cost"]]);
        if (col.count("rho") && fields.size() > col["rho"] && !fields[col["rho"]].empty())
            spec.rho = std::stod(fields[col["rho"]]);
        specs.push_back(std::move(spec));
    }
    return specs;
}

void write_report_pair(const fs::path& dir, const std::string& stem, const std::string& json_text,
                       const std::string& csv_text) {
    fs::create_directories(dir);
    atlas::write_text_file(dir / (stem + ".json"), json_text);
    atlas::write_text_file(dir / (stem + ".csv"), csv_text);
    std::cout << "wrote " << (dir / (stem + ".json")).string() << " and "
              << (dir / (stem + ".csv")).string() << "\n";
}

// ---------------------------------------------------------------------------

int cmd_score(const std::string& config_path, const std::string& instances_path,
              const std::string& out_path) {
    const std::string config_text = atlas::read_text_file(config_path);
    const atlas::TaxonomyConfig config = atlas::parse_taxonomy(config_text);

    std::vector<std::string> diagnostics;
    const auto records = atlas::read_instance_records(instances_path, config, diagnostics);
    if (!diagnostics.empty()) {
        for (const auto& d : diagnostics) std::cerr << instances_path << ": " << d << "\n";
        return 2;
    }
    if (records.empty()) {
        std::cerr << instances_path << ": no records\n";
        return 2;
    }
    const atlas::ScoreSurface surface = atlas::ingest_instances(records, config, diagnostics);
    if (!diagnostics.empty()) {
        for (const auto& d : diagnostics) std::cerr << instances_path << ": " << d << "\n";
        return 2;
    }
    atlas::write_slice_scores(surface, out_path);
    write_manifest(out_path + ".manifest.json", "score", {config_path, instances_path},
                   atlas::fnv1a64_hex(config_text), 0);
    std::cout << "wrote " << out_path << " (" << surface.cells.size() << " cells, "
              << records.size() << " records)\n";
    return 0;
}

int cmd_aggregate(const std::string& slices_path, const std::string& config_path,
                  const std::string& scope_text, const std::string& weights_spec,
                  const std::string& aggregator_name, const std::string& out_path,
                  const std::string& format_name) {
    const atlas::TaxonomyConfig config = atlas::load_taxonomy(config_path);
    const atlas::ReportingScope scope{atlas::parse_length(scope_text)};
    if (!config.grid.contains(scope.max_length))
        throw InputError("unknown scope '" + scope_text + "': not a grid slice");

    atlas::PipelineOptions options;
    options.weights = resolve_weights(weights_spec);
    options.aggregator = atlas::parse_aggregator(aggregator_name);

    std::vector<std::string> warnings;
    const atlas::ScoreSurface surface =
        atlas::ingest_slice_scores(slices_path, config, &warnings);
    for (const auto& w : warnings) std::cerr << slices_path << ": warning: " << w << "\n";
    const auto violations = atlas::validate_surface(surface, config, scope);
    if (!violations.empty()) {
        for (const auto& v : violations) std::cerr << slices_path << ": " << v << "\n";
        return 2;
    }

    const atlas::ReportBundle bundle = atlas::make_bundle(surface, config, scope, options);
    const auto rows = atlas::leaderboard_rows(bundle.cards);
    const atlas::ReportFormat format = atlas::parse_report_format(format_name);
    atlas::write_text_file(out_path, atlas::emit_leaderboard(rows, format));
    const fs::path bundle_path = fs::path(out_path).replace_extension(".bundle.json");
    atlas::write_text_file(bundle_path, atlas::bundle_to_json(bundle));

    std::cout << "scope " << atlas::format_length(scope.max_length) << ", " << rows.size()
              << " models; top:";
    for (std::size_t i = 0; i < rows.size() && i < 3; ++i)
        std::cout << (i ? ", " : " ") << rows[i].model << " "
                  << atlas::format_fixed2(rows[i].atlascore.mean);
    std::cout << "\nwrote " << out_path << " and " << bundle_path.string() << "\n";
    return 0;
}

struct AnalyzeArgs {
    std::string mode;
    std::string slices_path, config_path, scope_text = "1M";
    std::string short_path, long_path, categories_path, costs_path;
    std::string drop, schemes = "uniform,log,invlog";
    std::string out_dir = ".";
    double threshold = -1.0;
    long trials = 100000;
    std::uint64_t seed = 0;
};

int cmd_analyze(const AnalyzeArgs& args) {
    const auto need = [&](const std::string& value, const char* flag) -> const std::string& {
        if (value.empty())
            throw InputError("--mode " + args.mode + " requires " + flag);
        return value;
    };
    const auto load_surface = [&](atlas::TaxonomyConfig& config) {
        config = atlas::load_taxonomy(need(args.config_path, "--config"));
        return atlas::ingest_slice_scores(need(args.slices_path, "--slices"), config);
    };
    const fs::path dir(args.out_dir);

    if (args.mode == "migration") {
        const auto short_rows = load_leaderboard(need(args.short_path, "--short"));
        const auto long_rows = load_leaderboard(need(args.long_path, "--long"));
        NamedScores s, l;
        align_leaderboards(short_rows, long_rows, s, l);
        const auto report = atlas::rank_migration(s.models, s.scores, l.scores);
        write_report_pair(dir, "migration", atlas::migration_to_json(report),
                          atlas::migration_to_csv(report));
        return 0;
    }
    if (args.mode == "decay") {
        if (!args.short_path.empty() || !args.long_path.empty()) {
            const auto short_rows = load_leaderboard(need(args.short_path, "--short"));
            const auto long_rows = load_leaderboard(need(args.long_path, "--long"));
            std::map<std::string, const atlas::LeaderboardRow*> long_by_model;
            for (const auto& r : long_rows) long_by_model[r.model] = &r;
            atlas::DecayReport report;
            report.columns = {"foundational", "application", "overall"};
            for (const auto& r : short_rows) {
                const auto it = long_by_model.find(r.model);
                if (it == long_by_model.end())
                    throw InputError("model '" + r.model + "' missing from --long");
                report.models.push_back(r.model);
                const double overall =
                    atlas::decay_rate(r.atlascore.mean, it->second->atlascore.mean);
                report.rates.push_back(
                    {atlas::decay_rate(r.foundational.mean, it->second->foundational.mean),
                     atlas::decay_rate(r.application.mean, it->second->application.mean),
                     overall});
                report.overall.push_back(overall);
            }
            write_report_pair(dir, "decay", atlas::decay_to_json(report),
                              atlas::decay_to_csv(report));
            return 0;
        }
        atlas::TaxonomyConfig config;
        const atlas::ScoreSurface surface = load_surface(config);
        if (config.scopes.size() < 2)
            throw InputError("decay needs two reporting scopes in the config");
        const auto report = atlas::decay_report(surface, config, {config.scopes[0]},
                                                {config.scopes[1]});
        write_report_pair(dir, "decay", atlas::decay_to_json(report),
                          atlas::decay_to_csv(report));
        return 0;
    }
    if (args.mode == "layers") {
        const auto rows = load_leaderboard(need(args.categories_path, "--categories"));
        std::vector<std::string> models;
        std::vector<double> b, c;
        for (const auto& r : rows) {
            models.push_back(r.model);
            b.push_back(r.foundational.mean);
            c.push_back(r.application.mean);
        }
        const double threshold = args.threshold < 0 ? 4.0 : args.threshold;
        const auto report = atlas::layer_discrepancy(models, b, c, threshold);
        write_report_pair(dir, "layers", atlas::layer_to_json(report),
                          atlas::layer_to_csv(report));
        return 0;
    }
    if (args.mode == "loo") {
        atlas::TaxonomyConfig config;
        const atlas::ScoreSurface surface = load_surface(config);
        const atlas::ReportingScope scope{atlas::parse_length(args.scope_text)};
        const auto stats = atlas::leave_one_dimension_out(surface, config, scope,
                                                          need(args.drop, "--drop"));
        write_report_pair(dir, "loo", atlas::rank_stats_to_json(stats, "drop_" + args.drop),
                          atlas::rank_stats_to_csv(stats, "drop_" + args.drop));
        return 0;
    }
    if (args.mode == "weights") {
        atlas::TaxonomyConfig config;
        const atlas::ScoreSurface surface = load_surface(config);
        const atlas::ReportingScope scope{atlas::parse_length(args.scope_text)};
        std::vector<atlas::SliceWeights> schemes;
        std::istringstream in(args.schemes);
        std::string name;
        while (std::getline(in, name, ','))
            if (!name.empty()) schemes.push_back(atlas::parse_weight_scheme(name));
        const auto report = atlas::weight_scheme_sensitivity(surface, config, scope, schemes);
        write_report_pair(dir, "weights", atlas::weight_sensitivity_to_json(report),
                          atlas::weight_sensitivity_to_csv(report));
        return 0;
    }
    if (args.mode == "aggregation") {
        const auto rows = load_leaderboard(need(args.categories_path, "--categories"));
        std::vector<std::string> models;
        std::vector<atlas::CategoryAggregate> categories;
        for (const auto& r : rows) {
            models.push_back(r.model);
            categories.push_back(categories_of(r, atlas::kDefaultZ));
        }
        const auto report = atlas::aggregation_sensitivity(models, categories);
        write_report_pair(dir, "aggregation", atlas::aggregation_sensitivity_to_json(report),
                          atlas::aggregation_sensitivity_to_csv(report));
        return 0;
    }
    if (args.mode == "holistic") {
        atlas::TaxonomyConfig config;
        const atlas::ScoreSurface surface = load_surface(config);
        const atlas::ReportingScope scope{atlas::parse_length(args.scope_text)};
        const auto report = atlas::holistic_sensitivity(surface, config, scope);
        write_report_pair(dir, "holistic", atlas::holistic_sensitivity_to_json(report),
                          atlas::holistic_sensitivity_to_csv(report));
        return 0;
    }
    if (args.mode == "lite") {
        const auto specs = load_lite_specs(need(args.costs_path, "--costs"));
        atlas::LiteReport report;
        if (!args.slices_path.empty()) {
            atlas::TaxonomyConfig config;
            const atlas::ScoreSurface surface = load_surface(config);
            report = atlas::lite_pareto(specs, &surface, &config);
        } else {
            report = atlas::lite_pareto(specs);
        }
        write_report_pair(dir, "lite", atlas::lite_to_json(report), atlas::lite_to_csv(report));
        return 0;
    }
    if (args.mode == "correlation") {
        atlas::TaxonomyConfig config;
        const atlas::ScoreSurface surface = load_surface(config);
        const atlas::ReportingScope scope{atlas::parse_length(args.scope_text)};
        const double threshold = args.threshold < 0 ? 0.50 : args.threshold;
        const auto report = atlas::pairwise_dimension_correlation(surface, config, scope,
                                                                  threshold);
        write_report_pair(dir, "correlation", atlas::correlation_to_json(report),
                          atlas::correlation_to_csv(report));
        return 0;
    }
    if (args.mode == "mc") {
        const auto rows = load_leaderboard(need(args.categories_path, "--categories"));
        std::vector<std::pair<std::string, atlas::McReport>> reports;
        for (const auto& r : rows)
            reports.emplace_back(r.model,
                                 atlas::mc_validate(categories_of(r, atlas::kDefaultZ),
                                                    args.trials, args.seed));
        write_report_pair(dir, "mc", atlas::mc_reports_to_json(reports),
                          atlas::mc_reports_to_csv(reports));
        return 0;
    }
    throw InputError("unknown analyze mode: " + args.mode);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Length-aware benchmark scoring and analysis"};
    app.set_version_flag("--version", atlas::kVersion);
    app.require_subcommand(1);

    auto* score = app.add_subcommand("score", "Score instance records into a slice-score CSV");
    std::string score_config, score_instances, score_out;
    score->add_option("--config", score_config, "Taxonomy JSON")->required();
    score->add_option("--instances", score_instances, "Instance JSONL")->required();
    score->add_option("--out", score_out, "Output slice-score CSV")->required();

    auto* aggregate = app.add_subcommand("aggregate", "Compute a leaderboard from slice scores");
    std::string agg_slices, agg_config, agg_scope, agg_weights = "uniform",
                agg_aggregator = "harmonic", agg_out, agg_format = "markdown";
    aggregate->add_option("--slices", agg_slices, "Slice-score CSV")->required();
    aggregate->add_option("--config", agg_config, "Taxonomy JSON")->required();
    aggregate->add_option("--scope", agg_scope, "Reporting scope: 128K, 1M or a token count")
        ->required();
    aggregate->add_option("--weights", agg_weights,
                          "uniform | log | invlog | weight CSV path");
    aggregate->add_option("--aggregator", agg_aggregator,
                          "harmonic | arithmetic | geometric | minimum");
    aggregate->add_option("--out", agg_out, "Leaderboard output path")->required();
    aggregate->add_option("--format", agg_format, "csv | json | markdown");

    auto* analyze = app.add_subcommand("analyze", "Sensitivity, decay and rank analyses");
    AnalyzeArgs aa;
    analyze
        ->add_option("--mode", aa.mode,
                     "decay|migration|layers|loo|weights|aggregation|holistic|lite|correlation|mc")
        ->required();
    analyze->add_option("--slices", aa.slices_path, "Slice-score CSV");
    analyze->add_option("--config", aa.config_path, "Taxonomy JSON");
    analyze->add_option("--scope", aa.scope_text, "Reporting scope (default 1M)");
    analyze->add_option("--short", aa.short_path, "Short-scope leaderboard (csv/json/md)");
    analyze->add_option("--long", aa.long_path, "Long-scope leaderboard (csv/json/md)");
    analyze->add_option("--categories", aa.categories_path, "Leaderboard with category columns");
    analyze->add_option("--costs", aa.costs_path, "Lite scheme CSV: scheme,slices,relative_cost[,rho]");
    analyze->add_option("--drop", aa.drop, "Dimension to leave out (loo mode)");
    analyze->add_option("--schemes", aa.schemes, "Weight schemes, comma separated");
    analyze->add_option("--threshold", aa.threshold, "Rank-gap / correlation threshold");
    analyze->add_option("--trials", aa.trials, "Monte Carlo trials");
    analyze->add_option("--seed", aa.seed, "Random seed (all randomness enters here)");
    analyze->add_option("--out-dir", aa.out_dir, "Report output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (score->parsed()) return cmd_score(score_config, score_instances, score_out);
        if (aggregate->parsed())
            return cmd_aggregate(agg_slices, agg_config, agg_scope, agg_weights, agg_aggregator,
                                 agg_out, agg_format);
        if (analyze->parsed()) return cmd_analyze(aa);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
