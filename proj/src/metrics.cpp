#include "atlas/metrics.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>

#include "atlas/unicode_tables.hpp"

namespace atlas {

namespace {

bool in_ranges(char32_t cp, std::span<const detail::CodepointRange> ranges) {
    auto it = std::upper_bound(ranges.begin(), ranges.end(), cp,
                               [](char32_t c, const detail::CodepointRange& r) { return c < r.lo; });
    if (it == ranges.begin()) return false;
    --it;
    return cp >= it->lo && cp <= it->hi;
}

bool is_punctuation(char32_t cp) { return in_ranges(cp, detail::kPunctuationRanges); }

bool is_space(char32_t cp) {
    if (cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\v' || cp == U'\f' || cp == U'\r')
        return true;
    return in_ranges(cp, detail::kSpaceSeparatorRanges);
}

// Decodes one UTF-8 codepoint at s[i]; on malformed input consumes one byte
// and reports it as-is so unknown bytes survive normalization.
char32_t decode_utf8(std::string_view s, std::size_t& i) {
    const auto byte = [&](std::size_t j) { return static_cast<unsigned char>(s[j]); };
    const unsigned char b0 = byte(i);
    std::size_t len = 1;
    char32_t cp = b0;
    if (b0 >= 0xF0)
        len = 4, cp = b0 & 0x07;
    else if (b0 >= 0xE0)
        len = 3, cp = b0 & 0x0F;
    else if (b0 >= 0xC0)
        len = 2, cp = b0 & 0x1F;
    if (len == 1 || i + len > s.size()) {
        ++i;
        return b0;
    }
    for (std::size_t j = 1; j < len; ++j) {
        const unsigned char b = byte(i + j);
        if ((b & 0xC0) != 0x80) {
            ++i;
            return b0;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    i += len;
    return cp;
}

void encode_utf8(char32_t cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::string_view trim(std::string_view s) {
    const char* ws = " \t\n\v\f\r";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

bool starts_with(std::string_view text, std::string_view prefix) {
    return text.size() >= prefix.size() && text.substr(0, prefix.size()) == prefix;
}

}  // namespace

std::string normalize_text(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    std::size_t i = 0;
    while (i < raw.size()) {
        char32_t cp = decode_utf8(raw, i);
        if (is_punctuation(cp)) continue;
        if (is_space(cp)) {
            if (!out.empty()) pending_space = true;
            continue;
        }
        if (cp < 0x80) cp = static_cast<char32_t>(std::tolower(static_cast<int>(cp)));
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        encode_utf8(cp, out);
    }
    return out;
}

double score_exact_match(std::string_view pred, std::string_view gold) {
    return trim(pred) == trim(gold) ? 1.0 : 0.0;
}

double score_qpem(std::string_view pred, std::span<const std::string> golds, bool exact_mode) {
    if (golds.empty()) throw InputError("qpem needs at least one gold answer");
    const std::string p = normalize_text(pred);
    for (const auto& g : golds) {
        const std::string ng = normalize_text(g);
        if (exact_mode ? (p == ng) : starts_with(p, ng)) return 1.0;
    }
    return 0.0;
}

double score_set_f1(std::span<const std::string> pred, std::span<const std::string> gold) {
    const std::set<std::string> ps(pred.begin(), pred.end());
    const std::set<std::string> gs(gold.begin(), gold.end());
    if (ps.empty() && gs.empty()) return 1.0;
    if (ps.empty() || gs.empty()) return 0.0;
    std::size_t hit = 0;
    for (const auto& id : ps)
        if (gs.count(id)) ++hit;
    if (hit == 0) return 0.0;
    const double p = static_cast<double>(hit) / static_cast<double>(ps.size());
    const double r = static_cast<double>(hit) / static_cast<double>(gs.size());
    return 2.0 * p * r / (p + r);
}

double score_mrecall_at_k(std::span<const std::string> pred, std::span<const std::string> gold,
                          int k) {
    if (k < 1) throw InputError("mrecall k must be >= 1");
    const std::set<std::string> gs(gold.begin(), gold.end());
    if (gs.empty()) throw InputError("mrecall needs a nonempty gold set");
    std::vector<std::string> distinct;
    std::set<std::string> seen;
    for (const auto& id : pred) {
        if (seen.insert(id).second) distinct.push_back(id);
        if (distinct.size() == static_cast<std::size_t>(k)) break;
    }
    std::size_t hit = 0;
    for (const auto& id : distinct)
        if (gs.count(id)) ++hit;
    const std::size_t need = std::min<std::size_t>(static_cast<std::size_t>(k), gs.size());
    return hit >= need ? 1.0 : 0.0;
}

AnswerKind parse_answer_kind(const std::string& name) {
    if (name == "categorical") return AnswerKind::categorical;
    if (name == "date") return AnswerKind::date;
    if (name == "numeric") return AnswerKind::numeric;
    if (name == "frequency_label" || name == "frequency-label") return AnswerKind::frequency_label;
    throw InputError("unknown answer kind: " + name);
}

std::string answer_kind_name(AnswerKind kind) {
    switch (kind) {
        case AnswerKind::categorical: return "categorical";
        case AnswerKind::date: return "date";
        case AnswerKind::numeric: return "numeric";
        case AnswerKind::frequency_label: return "frequency_label";
    }
    throw InputError("bad answer kind value");
}

std::optional<double> parse_lenient_number(std::string_view text) {
    static constexpr std::array<std::string_view, 3> kCurrency = {"£", "€", "¥"};
    std::string cleaned;
    cleaned.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        // currency symbols, percent signs and thousands separators drop out
        bool skipped = false;
        for (std::string_view sym : kCurrency) {
            if (starts_with(text.substr(i), sym)) {
                i += sym.size();
                skipped = true;
                break;
            }
        }
        if (skipped) continue;
        const char c = text[i];
        if (c == '$' || c == '%' || c == ',' || std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        cleaned.push_back(c);
        ++i;
    }
    if (cleaned.empty()) return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(cleaned.c_str(), &end);
    if (end != cleaned.c_str() + cleaned.size()) return std::nullopt;
    return v;
}

namespace {

const std::array<std::string, 12> kMonths = {"january", "february", "march",     "april",
                                             "may",     "june",     "july",      "august",
                                             "september", "october", "november", "december"};

std::optional<int> month_number(std::string name) {
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (std::size_t m = 0; m < kMonths.size(); ++m)
        if (name == kMonths[m]) return static_cast<int>(m) + 1;
    return std::nullopt;
}

std::optional<int> parse_int_field(std::string_view s) {
    if (s.empty() || s.size() > 4) return std::nullopt;
    int v = 0;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
        v = v * 10 + (c - '0');
    }
    return v;
}

std::optional<std::string> make_iso(int y, int m, int d) {
    if (m < 1 || m > 12 || d < 1 || d > 31 || y < 1) return std::nullopt;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
    return std::string(buf);
}

}  // namespace

std::optional<std::string> canonicalize_date(std::string_view text) {
    std::string t(trim(text));
    // YYYY-MM-DD
    if (t.size() == 10 && t[4] == '-' && t[7] == '-') {
        auto y = parse_int_field(std::string_view(t).substr(0, 4));
        auto m = parse_int_field(std::string_view(t).substr(5, 2));
        auto d = parse_int_field(std::string_view(t).substr(8, 2));
        if (y && m && d) return make_iso(*y, *m, *d);
        return std::nullopt;
    }
    // "Month D, YYYY" or "D Month YYYY"
    std::string no_comma = t;
    std::replace(no_comma.begin(), no_comma.end(), ',', ' ');
    std::istringstream is(no_comma);
    std::string a, b, c, extra;
    if (!(is >> a >> b >> c) || (is >> extra)) return std::nullopt;
    if (auto m = month_number(a)) {
        auto d = parse_int_field(b);
        auto y = parse_int_field(c);
        if (d && y) return make_iso(*y, *m, *d);
        return std::nullopt;
    }
    if (auto m = month_number(b)) {
        auto d = parse_int_field(a);
        auto y = parse_int_field(c);
        if (d && y) return make_iso(*y, *m, *d);
    }
    return std::nullopt;
}

ScoredValue score_answer_level(const AnswerPayload& pred, const AnswerPayload& gold, double tau) {
    if (pred.kind != gold.kind)
        throw InputError("answer-level prediction and gold must share a kind");
    if (tau <= 0.0) throw InputError("answer-level tau must be positive");
    switch (gold.kind) {
        case AnswerKind::categorical:
        case AnswerKind::frequency_label:
            return {normalize_text(pred.value) == normalize_text(gold.value) ? 1.0 : 0.0, {}};
        case AnswerKind::date: {
            const auto p = canonicalize_date(pred.value);
            const auto g = canonicalize_date(gold.value);
            if (!p || !g) {
                std::string which = !p ? "prediction" : "gold";
                return {0.0, "unparseable date " + which + ": '" + (!p ? pred.value : gold.value) + "'"};
            }
            return {*p == *g ? 1.0 : 0.0, {}};
        }
        case AnswerKind::numeric: {
            const auto p = parse_lenient_number(pred.value);
            const auto g = parse_lenient_number(gold.value);
            if (!p || !g) {
                std::string which = !p ? "prediction" : "gold";
                return {0.0, "unparseable number " + which + ": '" + (!p ? pred.value : gold.value) + "'"};
            }
            return {std::exp(-std::abs(*p - *g) / tau), {}};
        }
    }
    throw InputError("bad answer kind value");
}

CiEstimate weighted_binary_composite(std::span<const SubcomponentScores> subs, double z) {
    if (subs.empty()) throw InputError("composite needs at least one subcomponent");
    double weight_sum = 0.0;
    for (const auto& s : subs) {
        if (s.scores.empty()) throw InputError("composite subcomponent '" + s.name + "' is empty");
        if (s.scores.size() < 2)
            throw InputError("composite subcomponent '" + s.name +
                             "' has a single instance; variance undefined");
        if (s.weight < 0.0)
            throw InputError("composite subcomponent '" + s.name + "' has a negative weight");
        weight_sum += s.weight;
    }
    if (weight_sum <= 0.0) throw InputError("composite weights must not all be zero");

    double mean = 0.0;
    double variance = 0.0;
    long n_total = 0;
    for (const auto& s : subs) {
        const double lambda = s.weight / weight_sum;
        const CiEstimate sub = clt_variance(s.scores, z);
        mean += lambda * sub.mean;
        variance += lambda * lambda * sub.variance;
        n_total += sub.n;
    }
    return make_ci_estimate(mean, variance, z, n_total);
}

InstanceScore score_instance(const InstanceRecord& record, double tau) {
    InstanceScore out;
    out.instance_id = record.instance_id;
    out.cluster_id = record.cluster_id;
    out.subcomponent = record.subcomponent;

    const auto text_of = [&](const Payload& p, const char* side) -> const std::string& {
        if (const auto* t = std::get_if<TextPayload>(&p)) return *t;
        throw InputError("instance " + record.instance_id + ": " + side + " must be text for " +
                         metric_name(record.kind));
    };
    const auto list_of = [&](const Payload& p, const char* side) -> const IdListPayload& {
        if (const auto* l = std::get_if<IdListPayload>(&p)) return *l;
        throw InputError("instance " + record.instance_id + ": " + side +
                         " must be an id list for " + metric_name(record.kind));
    };

    switch (record.kind) {
        case MetricKind::em:
        case MetricKind::acc:
            out.value = score_exact_match(text_of(record.prediction, "prediction"),
                                          text_of(record.gold, "gold"));
            break;
        case MetricKind::qpem: {
            const auto& pred = text_of(record.prediction, "prediction");
            if (const auto* golds = std::get_if<IdListPayload>(&record.gold)) {
                out.value = score_qpem(pred, *golds, record.exact);
            } else {
                const std::vector<std::string> one{text_of(record.gold, "gold")};
                out.value = score_qpem(pred, one, record.exact);
            }
            break;
        }
        case MetricKind::set_f1:
            out.value = score_set_f1(list_of(record.prediction, "prediction"),
                                     list_of(record.gold, "gold"));
            break;
        case MetricKind::mrecall: {
            const auto& gold = list_of(record.gold, "gold");
            const int k = record.k.value_or(static_cast<int>(gold.size()));
            out.value = score_mrecall_at_k(list_of(record.prediction, "prediction"), gold, k);
            break;
        }
        case MetricKind::answer_level: {
            const auto* p = std::get_if<AnswerPayload>(&record.prediction);
            const auto* g = std::get_if<AnswerPayload>(&record.gold);
            if (!p || !g)
                throw InputError("instance " + record.instance_id +
                                 ": answer-level payloads must carry {kind, value}");
            const ScoredValue sv = score_answer_level(*p, *g, tau);
            out.value = sv.value;
            out.diagnostic = sv.diagnostic;
            break;
        }
        case MetricKind::weighted_binary: {
            if (const auto* b = std::get_if<BinaryPayload>(&record.prediction)) {
                if (*b != 0.0 && *b != 1.0)
                    throw InputError("instance " + record.instance_id +
                                     ": binary payload must be 0 or 1");
                out.value = *b;
            } else {
                out.value = score_exact_match(text_of(record.prediction, "prediction"),
                                              text_of(record.gold, "gold"));
            }
            break;
        }
    }
    return out;
}

}  // namespace atlas
