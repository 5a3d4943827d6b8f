#include "atlas/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "atlas/uncertainty.hpp"

namespace atlas {

using nlohmann::json;

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    if (in.bad()) throw IoError("read failure on " + path.string());
    return os.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failure on " + path.string());
}

std::string fnv1a64_hex(std::string_view bytes) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

template <typename T>
T field_or_throw(const json& j, const char* field) {
    if (!j.contains(field)) throw InputError(std::string("missing field: ") + field);
    try {
        return j.at(field).get<T>();
    } catch (const json::exception&) {
        throw InputError(std::string("bad value for field: ") + field);
    }
}

}  // namespace

TaxonomyConfig parse_taxonomy(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("taxonomy parse error: ") + e.what());
    }
    if (!j.is_object()) throw InputError("taxonomy must be a JSON object");

    TaxonomyConfig config;
    config.grid = LengthGrid(field_or_throw<std::vector<Tokens>>(j, "grid"));
    config.scopes = field_or_throw<std::vector<Tokens>>(j, "scopes");
    if (!j.contains("dimensions") || !j["dimensions"].is_array())
        throw InputError("missing field: dimensions");

    for (const auto& jd : j["dimensions"]) {
        DimensionConfig dim;
        dim.name = field_or_throw<std::string>(jd, "name");
        dim.layer = parse_layer(field_or_throw<std::string>(jd, "layer"));
        if (!jd.contains("components") || !jd["components"].is_array())
            throw InputError("dimension '" + dim.name + "': missing field: components");
        for (const auto& jc : jd["components"]) {
            ComponentConfig comp;
            comp.name = field_or_throw<std::string>(jc, "name");
            comp.metric = parse_metric(field_or_throw<std::string>(jc, "metric"));
            comp.estimator = parse_estimator(field_or_throw<std::string>(jc, "estimator"));
            if (!jc.contains("slices"))
                throw InputError("component '" + comp.name + "': missing field: slices");
            if (!jc["slices"].is_null())
                comp.slices = jc["slices"].get<std::vector<Tokens>>();
            if (jc.contains("tau")) comp.tau = jc["tau"].get<double>();
            if (jc.contains("weights_mode"))
                comp.weights_mode = jc["weights_mode"].get<std::string>();
            if (comp.weights_mode != "instance_count")
                throw InputError("component '" + comp.name + "': unsupported weights_mode '" +
                                 comp.weights_mode + "'");
            if (jc.contains("counts")) {
                for (const auto& [key, value] : jc["counts"].items()) {
                    if (key == "total")
                        comp.total_count = value.get<int>();
                    else
                        comp.counts[parse_length(key)] = value.get<int>();
                }
            }
            dim.components.push_back(std::move(comp));
        }
        config.dimensions.push_back(std::move(dim));
    }
    config.validate();
    return config;
}

TaxonomyConfig load_taxonomy(const std::filesystem::path& path) {
    return parse_taxonomy(read_text_file(path));
}

namespace {

Payload parse_payload(const json& j, MetricKind kind, bool is_gold) {
    switch (kind) {
        case MetricKind::em:
        case MetricKind::acc:
            return j.get<std::string>();
        case MetricKind::qpem:
            if (is_gold && j.is_array()) return j.get<std::vector<std::string>>();
            return j.get<std::string>();
        case MetricKind::set_f1:
        case MetricKind::mrecall:
            return j.get<std::vector<std::string>>();
        case MetricKind::answer_level: {
            AnswerPayload a;
            a.kind = parse_answer_kind(field_or_throw<std::string>(j, "kind"));
            if (j.at("value").is_string())
                a.value = j.at("value").get<std::string>();
            else
                a.value = j.at("value").dump();
            return a;
        }
        case MetricKind::weighted_binary:
            if (j.is_number() || j.is_boolean()) return j.get<double>();
            return j.get<std::string>();
    }
    throw InputError("bad metric value");
}

InstanceRecord parse_record(const json& j, const TaxonomyConfig& config) {
    InstanceRecord rec;
    rec.model = field_or_throw<std::string>(j, "model");
    rec.component = field_or_throw<std::string>(j, "component");
    const ComponentConfig* comp = config.find_component(rec.component);
    if (!comp) throw InputError("unknown component: " + rec.component);

    if (j.contains("slice") && !j["slice"].is_null()) rec.slice = j["slice"].get<Tokens>();
    if (comp->is_sliced()) {
        if (!rec.slice) throw InputError("record for sliced component lacks a slice");
        if (!comp->supports(*rec.slice))
            throw InputError("component " + rec.component + " does not support slice " +
                             std::to_string(*rec.slice));
    } else if (rec.slice) {
        throw InputError("holistic component record must not carry a slice");
    }

    rec.instance_id = field_or_throw<std::string>(j, "instance_id");
    if (j.contains("cluster_id") && !j["cluster_id"].is_null())
        rec.cluster_id = j["cluster_id"].get<std::string>();
    if (j.contains("subcomponent") && !j["subcomponent"].is_null())
        rec.subcomponent = j["subcomponent"].get<std::string>();

    rec.kind = comp->metric;
    if (j.contains("kind") && !j["kind"].is_null()) {
        rec.kind = parse_metric(j["kind"].get<std::string>());
        // A composite component accepts binary/acc sub-records; anything else
        // must match the component's declared metric.
        if (rec.kind != comp->metric && comp->metric != MetricKind::weighted_binary)
            throw InputError("record kind " + metric_name(rec.kind) +
                             " does not match component metric " + metric_name(comp->metric));
    }
    if (comp->metric == MetricKind::weighted_binary &&
        (rec.kind == MetricKind::em || rec.kind == MetricKind::acc))
        rec.kind = MetricKind::weighted_binary;

    if (!j.contains("prediction")) throw InputError("missing field: prediction");
    if (!j.contains("gold")) throw InputError("missing field: gold");
    try {
        rec.prediction = parse_payload(j.at("prediction"), rec.kind, false);
        rec.gold = parse_payload(j.at("gold"), rec.kind, true);
    } catch (const json::exception&) {
        throw InputError("payload shape does not match metric " + metric_name(rec.kind));
    }
    if (j.contains("k") && !j["k"].is_null()) rec.k = j["k"].get<int>();
    if (j.contains("exact") && !j["exact"].is_null()) rec.exact = j["exact"].get<bool>();
    return rec;
}

}  // namespace

std::vector<InstanceRecord> read_instance_records(const std::filesystem::path& path,
                                                  const TaxonomyConfig& config,
                                                  std::vector<std::string>& diagnostics) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<InstanceRecord> records;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const json j = json::parse(line);
            records.push_back(parse_record(j, config));
        } catch (const json::parse_error& e) {
            diagnostics.push_back("line " + std::to_string(line_no) + ": " + e.what());
        } catch (const InputError& e) {
            diagnostics.push_back("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

namespace {

struct GroupKey {
    std::string model;
    std::string component;
    std::optional<Tokens> slice;

    friend auto operator<=>(const GroupKey&, const GroupKey&) = default;
};

}  // namespace

ScoreSurface ingest_instances(const std::vector<InstanceRecord>& records,
                              const TaxonomyConfig& config,
                              std::vector<std::string>& diagnostics,
                              const IngestOptions& options) {
    // Score first (embarrassingly parallel), group afterwards so the result
    // never depends on thread count.
    std::vector<InstanceScore> scored(records.size());
    std::vector<std::string> errors(records.size());

    const auto score_one = [&](std::size_t i) {
        const InstanceRecord& rec = records[i];
        const ComponentConfig* comp = config.find_component(rec.component);
        if (!comp) {
            errors[i] = "unknown component: " + rec.component;
            return;
        }
        try {
            scored[i] = score_instance(rec, comp->tau);
        } catch (const InputError& e) {
            errors[i] = e.what();
        }
    };

    const long n = static_cast<long>(records.size());
    if (options.parallel) {
#pragma omp parallel for schedule(static)
        for (long i = 0; i < n; ++i) score_one(static_cast<std::size_t>(i));
    } else {
        for (long i = 0; i < n; ++i) score_one(static_cast<std::size_t>(i));
    }

    std::map<GroupKey, std::vector<const InstanceScore*>> groups;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (!errors[i].empty()) {
            diagnostics.push_back("record " + records[i].instance_id + ": " + errors[i]);
            continue;
        }
        if (scored[i].diagnostic)
            diagnostics.push_back("record " + records[i].instance_id + ": " +
                                  *scored[i].diagnostic);
        groups[{records[i].model, records[i].component, records[i].slice}].push_back(&scored[i]);
    }

    ScoreSurface surface;
    for (const auto& [key, members] : groups) {
        const ComponentConfig* comp = config.find_component(key.component);
        const DimensionConfig* dim = config.dimension_of_component(key.component);
        const std::string where = key.model + "/" + key.component +
                                  (key.slice ? "@" + format_length(*key.slice) : "");

        CiEstimate est;
        switch (comp->estimator) {
            case EstimatorKind::clt: {
                std::vector<double> values;
                values.reserve(members.size());
                for (const auto* m : members) values.push_back(m->value);
                est = clt_variance(values);
                break;
            }
            case EstimatorKind::cluster: {
                std::vector<ClusteredScore> values;
                values.reserve(members.size());
                for (const auto* m : members) {
                    if (!m->cluster_id)
                        throw InputError(where + ": cluster estimator needs cluster ids");
                    values.push_back({m->value, *m->cluster_id});
                }
                est = cluster_variance(values);
                break;
            }
            case EstimatorKind::weighted: {
                std::map<std::string, std::vector<double>> by_sub;
                for (const auto* m : members)
                    by_sub[m->subcomponent.value_or(key.component)].push_back(m->value);
                std::vector<SubcomponentScores> subs;
                for (auto& [name, values] : by_sub) {
                    SubcomponentScores s;
                    s.name = name;
                    s.weight = static_cast<double>(values.size());  // instance-count weights
                    s.scores = std::move(values);
                    subs.push_back(std::move(s));
                }
                try {
                    est = weighted_binary_composite(subs);
                } catch (const InputError& e) {
                    throw InputError(where + ": " + e.what());
                }
                break;
            }
        }
        est = scale_to_reporting(est);
        surface.insert({key.model, dim->name, key.component, key.slice},
                       {est.mean, est.variance, static_cast<long>(members.size())});
    }
    return surface;
}

ScoreSurface ingest_instances(const std::filesystem::path& path, const TaxonomyConfig& config,
                              std::vector<std::string>& diagnostics,
                              const IngestOptions& options) {
    const auto records = read_instance_records(path, config, diagnostics);
    return ingest_instances(records, config, diagnostics, options);
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else if (c == '\r') {
            // tolerate CRLF input
        } else {
            current.push_back(c);
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

namespace {

double parse_double_field(const std::string& text, const char* what, long line_no) {
    const char* begin = text.data();
    const char* end = begin + text.size();
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        throw InputError("line " + std::to_string(line_no) + ": bad " + what + " '" + text + "'");
    return value;
}

std::string double_to_string(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace

ScoreSurface parse_slice_scores(std::string_view csv_text, const TaxonomyConfig& config,
                                std::vector<std::string>* warnings) {
    std::istringstream in{std::string(csv_text)};
    std::string line;
    if (!std::getline(in, line)) throw InputError("empty slice-score file");
    const std::vector<std::string> header = split_csv_line(line);

    std::map<std::string, std::size_t> columns;
    for (std::size_t i = 0; i < header.size(); ++i) columns[header[i]] = i;
    for (const char* required : {"model", "dimension", "component", "slice", "mean", "n"})
        if (!columns.count(required))
            throw InputError(std::string("slice-score header lacks column '") + required + "'");
    const bool has_variance = columns.count("variance") > 0;
    if (!has_variance && warnings)
        warnings->push_back("variance column omitted; variances default to 0");

    ScoreSurface surface;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() < header.size())
            throw InputError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(header.size()) + " fields");
        SurfaceKey key;
        key.model = fields[columns["model"]];
        key.dimension = fields[columns["dimension"]];
        key.component = fields[columns["component"]];
        const std::string& slice_text = fields[columns["slice"]];
        if (!slice_text.empty()) key.slice = parse_length(slice_text);

        SliceScore score;
        score.mean = parse_double_field(fields[columns["mean"]], "mean", line_no);
        if (score.mean < 0.0 || score.mean > 100.0)
            throw InputError("line " + std::to_string(line_no) + ": mean " + fields[columns["mean"]] +
                             " outside [0,100]");
        if (has_variance) {
            const std::string& var_text = fields[columns["variance"]];
            score.variance =
                var_text.empty() ? 0.0 : parse_double_field(var_text, "variance", line_no);
            if (score.variance < 0.0)
                throw InputError("line " + std::to_string(line_no) + ": negative variance");
        }
        const std::string& n_text = fields[columns["n"]];
        score.n = n_text.empty() ? 0 : static_cast<long>(
                                            parse_double_field(n_text, "count", line_no));
        try {
            surface.insert(std::move(key), score);
        } catch (const InputError& e) {
            throw InputError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }

    const auto violations = validate_surface(surface, config);
    if (!violations.empty())
        throw InputError("slice-score file invalid: " + violations.front() +
                         (violations.size() > 1
                              ? " (+" + std::to_string(violations.size() - 1) + " more)"
                              : ""));
    return surface;
}

ScoreSurface ingest_slice_scores(const std::filesystem::path& path, const TaxonomyConfig& config,
                                 std::vector<std::string>* warnings) {
    return parse_slice_scores(read_text_file(path), config, warnings);
}

std::string surface_to_csv(const ScoreSurface& surface) {
    std::string out = "model,dimension,component,slice,mean,variance,n\n";
    for (const auto& [key, score] : surface.cells) {
        out += csv_escape(key.model);
        out += ',';
        out += csv_escape(key.dimension);
        out += ',';
        out += csv_escape(key.component);
        out += ',';
        if (key.slice) out += std::to_string(*key.slice);
        out += ',';
        out += double_to_string(score.mean);
        out += ',';
        out += double_to_string(score.variance);
        out += ',';
        out += std::to_string(score.n);
        out += '\n';
    }
    return out;
}

void write_slice_scores(const ScoreSurface& surface, const std::filesystem::path& path) {
    write_text_file(path, surface_to_csv(surface));
}

}  // namespace atlas
