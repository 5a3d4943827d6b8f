#include "atlas/core.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace atlas {

LengthGrid::LengthGrid(std::vector<Tokens> s) : slices(std::move(s)) {
    if (slices.size() < 2) throw InputError("length grid needs at least 2 slices");
    for (std::size_t i = 1; i < slices.size(); ++i) {
        if (slices[i] <= slices[i - 1])
            throw InputError("length grid must be strictly increasing");
    }
    if (slices.front() <= 0) throw InputError("slice lengths must be positive");
}

LengthGrid LengthGrid::standard() {
    return LengthGrid({8192, 16384, 32768, 65536, 131072, 262144, 524288, 1048576});
}

bool LengthGrid::contains(Tokens length) const {
    return std::find(slices.begin(), slices.end(), length) != slices.end();
}

std::vector<Tokens> LengthGrid::up_to(Tokens max_length) const {
    if (!contains(max_length))
        throw InputError("reporting scope " + std::to_string(max_length) +
                         " is not a slice of the grid");
    std::vector<Tokens> out;
    for (Tokens s : slices)
        if (s <= max_length) out.push_back(s);
    return out;
}

Tokens parse_length(const std::string& text) {
    if (text.empty()) throw InputError("empty length");
    std::string t = text;
    Tokens mult = 1;
    char last = static_cast<char>(std::toupper(static_cast<unsigned char>(t.back())));
    if (last == 'K') {
        mult = 1024;
        t.pop_back();
    } else if (last == 'M') {
        mult = 1024 * 1024;
        t.pop_back();
    }
    try {
        std::size_t pos = 0;
        long long v = std::stoll(t, &pos);
        if (pos != t.size() || v <= 0) throw InputError("bad length: " + text);
        return static_cast<Tokens>(v) * mult;
    } catch (const std::logic_error&) {
        throw InputError("bad length: " + text);
    }
}

std::string format_length(Tokens length) {
    if (length % (1024 * 1024) == 0) return std::to_string(length / (1024 * 1024)) + "M";
    if (length % 1024 == 0) return std::to_string(length / 1024) + "K";
    return std::to_string(length);
}

Layer parse_layer(const std::string& name) {
    if (name == "foundational") return Layer::foundational;
    if (name == "application") return Layer::application;
    if (name == "holistic") return Layer::holistic;
    throw InputError("unknown layer: " + name);
}

std::string layer_name(Layer layer) {
    switch (layer) {
        case Layer::foundational: return "foundational";
        case Layer::application: return "application";
        case Layer::holistic: return "holistic";
    }
    throw InputError("bad layer value");
}

MetricKind parse_metric(const std::string& name) {
    if (name == "em") return MetricKind::em;
    if (name == "acc") return MetricKind::acc;
    if (name == "qpem") return MetricKind::qpem;
    if (name == "set_f1" || name == "f1") return MetricKind::set_f1;
    if (name == "mrecall") return MetricKind::mrecall;
    if (name == "answer_level") return MetricKind::answer_level;
    if (name == "weighted_binary" || name == "binary") return MetricKind::weighted_binary;
    throw InputError("unknown metric: " + name);
}

std::string metric_name(MetricKind kind) {
    switch (kind) {
        case MetricKind::em: return "em";
        case MetricKind::acc: return "acc";
        case MetricKind::qpem: return "qpem";
        case MetricKind::set_f1: return "set_f1";
        case MetricKind::mrecall: return "mrecall";
        case MetricKind::answer_level: return "answer_level";
        case MetricKind::weighted_binary: return "weighted_binary";
    }
    throw InputError("bad metric value");
}

EstimatorKind parse_estimator(const std::string& name) {
    if (name == "clt") return EstimatorKind::clt;
    if (name == "cluster") return EstimatorKind::cluster;
    if (name == "weighted") return EstimatorKind::weighted;
    throw InputError("unknown estimator: " + name);
}

std::string estimator_name(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::clt: return "clt";
        case EstimatorKind::cluster: return "cluster";
        case EstimatorKind::weighted: return "weighted";
    }
    throw InputError("bad estimator value");
}

bool ComponentConfig::supports(Tokens slice) const {
    if (!slices) return false;
    return std::find(slices->begin(), slices->end(), slice) != slices->end();
}

const DimensionConfig* TaxonomyConfig::find_dimension(const std::string& name) const {
    for (const auto& d : dimensions)
        if (d.name == name) return &d;
    return nullptr;
}

const ComponentConfig* TaxonomyConfig::find_component(const std::string& name) const {
    for (const auto& d : dimensions)
        for (const auto& c : d.components)
            if (c.name == name) return &c;
    return nullptr;
}

const DimensionConfig* TaxonomyConfig::dimension_of_component(const std::string& component) const {
    for (const auto& d : dimensions)
        for (const auto& c : d.components)
            if (c.name == component) return &d;
    return nullptr;
}

std::vector<const DimensionConfig*> TaxonomyConfig::layer_dimensions(Layer layer) const {
    std::vector<const DimensionConfig*> out;
    for (const auto& d : dimensions)
        if (d.layer == layer) out.push_back(&d);
    return out;
}

std::vector<const DimensionConfig*> TaxonomyConfig::sliced_dimensions() const {
    std::vector<const DimensionConfig*> out;
    for (const auto& d : dimensions)
        if (d.layer != Layer::holistic) out.push_back(&d);
    return out;
}

void TaxonomyConfig::validate() const {
    if (grid.slices.size() < 2) throw InputError("taxonomy grid needs at least 2 slices");
    for (Tokens s : scopes)
        if (!grid.contains(s))
            throw InputError("scope " + std::to_string(s) + " is not a grid slice");
    std::set<std::string> dim_names;
    std::set<std::string> comp_names;
    for (const auto& d : dimensions) {
        if (!dim_names.insert(d.name).second)
            throw InputError("dimension '" + d.name + "' appears in more than one layer");
        if (d.components.empty())
            throw InputError("dimension '" + d.name + "' has no components");
        for (const auto& c : d.components) {
            if (!comp_names.insert(c.name).second)
                throw InputError("component '" + c.name + "' declared twice");
            if (d.layer == Layer::holistic) {
                if (c.slices)
                    throw InputError("holistic component '" + c.name +
                                     "' must not declare a length grid");
            } else {
                if (!c.slices || c.slices->size() < 2)
                    throw InputError("length-sliced component '" + c.name +
                                     "' needs at least 2 supported slices");
                for (Tokens s : *c.slices)
                    if (!grid.contains(s))
                        throw InputError("component '" + c.name + "' slice " +
                                         std::to_string(s) + " is not in the grid");
            }
            if (c.tau <= 0.0)
                throw InputError("component '" + c.name + "' tau must be positive");
        }
    }
}

void ScoreSurface::insert(SurfaceKey key, SliceScore score) {
    auto [it, inserted] = cells.emplace(std::move(key), score);
    if (!inserted) {
        std::ostringstream os;
        os << "duplicate surface cell: " << it->first.model << "/" << it->first.dimension << "/"
           << it->first.component;
        if (it->first.slice) os << "/" << *it->first.slice;
        throw InputError(os.str());
    }
}

const SliceScore* ScoreSurface::find(const SurfaceKey& key) const {
    auto it = cells.find(key);
    return it == cells.end() ? nullptr : &it->second;
}

std::vector<std::string> ScoreSurface::models() const {
    std::vector<std::string> out;
    for (const auto& [key, _] : cells)
        if (out.empty() || out.back() != key.model) out.push_back(key.model);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<std::string> validate_surface(const ScoreSurface& surface,
                                          const TaxonomyConfig& config,
                                          std::optional<ReportingScope> scope) {
    std::vector<std::string> violations;
    auto complain = [&](const std::string& msg) { violations.push_back(msg); };

    for (const auto& [key, score] : surface.cells) {
        std::string where = key.model + "/" + key.dimension + "/" + key.component;
        const DimensionConfig* dim = config.find_dimension(key.dimension);
        if (!dim) {
            complain(where + ": unknown dimension");
            continue;
        }
        const ComponentConfig* comp = nullptr;
        for (const auto& c : dim->components)
            if (c.name == key.component) comp = &c;
        if (!comp) {
            complain(where + ": component not declared under dimension");
            continue;
        }
        if (dim->layer == Layer::holistic) {
            if (key.slice) complain(where + ": holistic cell must not carry a slice");
        } else {
            if (!key.slice)
                complain(where + ": length-sliced cell is missing its slice");
            else if (!comp->supports(*key.slice))
                complain(where + ": slice " + std::to_string(*key.slice) +
                         " not supported by component");
        }
        if (score.mean < 0.0 || score.mean > 100.0)
            complain(where + ": mean " + std::to_string(score.mean) + " outside [0,100]");
        if (score.variance < 0.0) complain(where + ": negative variance");
    }

    if (scope) {
        if (!config.grid.contains(scope->max_length)) {
            complain("requested scope " + std::to_string(scope->max_length) +
                     " is not a grid slice");
            return violations;
        }
        for (const std::string& model : surface.models()) {
            for (const auto& dim : config.dimensions) {
                for (const auto& comp : dim.components) {
                    if (dim.layer == Layer::holistic) {
                        SurfaceKey key{model, dim.name, comp.name, std::nullopt};
                        if (!surface.find(key))
                            complain(model + ": missing holistic cell " + comp.name);
                        continue;
                    }
                    for (Tokens s : *comp.slices) {
                        if (s > scope->max_length) continue;
                        SurfaceKey key{model, dim.name, comp.name, s};
                        if (!surface.find(key))
                            complain(model + ": missing cell " + dim.name + "/" + comp.name +
                                     " at " + format_length(s));
                    }
                }
            }
        }
    }
    return violations;
}

}  // namespace atlas
