#pragma once

// Benchmark report model plus its JSON, CSV and SVG emitters. Every
// aggregate in a section is a fold over the section's per-sample records, so
// the report can be re-derived from its own sample rows.

#include <aerobench/core.hpp>
#include <aerobench/extract.hpp>
#include <aerobench/metrics.hpp>
#include <aerobench/split.hpp>
#include <aerobench/svg.hpp>

#include "json.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace aerobench {

inline constexpr int kSchemaVersion = 1;

struct SampleError
{
    std::string id;
    std::string code;
    std::string message;

    bool operator==(const SampleError&) const = default;
};

struct SampleRecord
{
    std::string id;
    /// Flat metric names such as "l2.pressure" or "area_l2.wall_shear.x".
    MetricRecord metrics;
    std::optional<ForceBreakdown> force_true;
    std::optional<ForceBreakdown> force_pred;
};

struct SampleLine
{
    std::string sample_id;
    Polyline line;
    /// Stations already lie in [0, 1]; otherwise they are arc lengths.
    bool normalized = true;
};

struct SampleSlice
{
    std::string sample_id;
    std::string name;
    PlaneGrid grid;
};

/// Cross-sample force statistics. Trends use drag/lift coefficients when the
/// flow conditions define them, otherwise raw forces (see `basis`).
struct ForceComparison
{
    std::string basis = "force";
    std::optional<double> r2_drag;
    std::optional<double> r2_lift;
    std::optional<double> spearman_drag;
    std::optional<double> spearman_lift;
    double mean_abs_err_drag = 0.0;
    double max_abs_err_drag = 0.0;
    double mean_abs_err_lift = 0.0;
    double max_abs_err_lift = 0.0;
    std::vector<TrendSample> drag_ordering;
    std::vector<TrendSample> lift_ordering;
};

struct ReportSection
{
    std::string kind;
    std::vector<SampleRecord> records;
    std::vector<SampleError> errors;
    std::map<std::string, SummaryStats> aggregates;
    std::optional<ForceComparison> forces;
    std::vector<SampleLine> lines;
    std::vector<EnsembleLine> ensembles;
    std::vector<SampleSlice> slices;

    std::vector<std::string> sample_ids() const
    {
        std::vector<std::string> ids;
        for (const auto& r : records) {
            ids.push_back(r.id);
        }
        return ids;
    }
};

struct BenchmarkReport
{
    int schema_version = kSchemaVersion;
    std::string tool_version{kToolVersion};
    std::string config_digest;
    std::optional<ReportSection> surface;
    std::optional<ReportSection> volume;
    std::optional<ReportSection> pointcloud;

    bool has_errors() const
    {
        for (const auto* s : {&surface, &volume, &pointcloud}) {
            if (*s && !(*s)->errors.empty()) {
                return true;
            }
        }
        return false;
    }
};

// ---------------------------------------------------------------- aggregation

inline double trend_value(const ForceBreakdown& f, bool drag, bool coefficient)
{
    if (coefficient) {
        return drag ? *f.cd : *f.cl;
    }
    return drag ? f.drag : f.lift;
}

/// Builds trend, R^2 and error statistics from the records' true/pred
/// forces. Statistics that are undefined for the data (fewer than two
/// samples, constant truth) are left empty rather than failing the run.
inline std::optional<ForceComparison> compare_forces(const std::vector<SampleRecord>& records)
{
    std::vector<const SampleRecord*> with;
    for (const auto& r : records) {
        if (r.force_true && r.force_pred) {
            with.push_back(&r);
        }
    }
    if (with.empty()) {
        return std::nullopt;
    }
    bool coefficient = true;
    for (const auto* r : with) {
        coefficient = coefficient && r->force_true->cd && r->force_pred->cd;
    }
    ForceComparison fc;
    fc.basis = coefficient ? "coefficient" : "force";
    for (int pass = 0; pass < 2; ++pass) {
        const bool drag = pass == 0;
        std::vector<TrendSample> samples;
        std::vector<double> t;
        std::vector<double> p;
        for (const auto* r : with) {
            samples.push_back({r->id, trend_value(*r->force_true, drag, coefficient),
                               trend_value(*r->force_pred, drag, coefficient)});
            t.push_back(samples.back().truth);
            p.push_back(samples.back().pred);
        }
        std::optional<double> r2;
        std::optional<double> rho;
        double mean_err = 0.0;
        double max_err = 0.0;
        std::vector<TrendSample> ordering = samples;
        if (samples.size() >= 2) {
            try {
                r2 = r_squared(t, p);
            } catch (const Error&) {
            }
            try {
                auto tr = trend_analysis(samples);
                rho = tr.spearman;
                ordering = std::move(tr.ordering);
            } catch (const Error&) {
                std::sort(ordering.begin(), ordering.end(), [](const TrendSample& a, const TrendSample& b) {
                    return a.truth < b.truth || (a.truth == b.truth && a.id < b.id);
                });
            }
        }
        for (const auto& s : samples) {
            const double e = std::abs(s.pred - s.truth);
            mean_err += e;
            max_err = std::max(max_err, e);
        }
        mean_err /= static_cast<double>(samples.size());
        if (drag) {
            fc.r2_drag = r2;
            fc.spearman_drag = rho;
            fc.mean_abs_err_drag = mean_err;
            fc.max_abs_err_drag = max_err;
            fc.drag_ordering = std::move(ordering);
        } else {
            fc.r2_lift = r2;
            fc.spearman_lift = rho;
            fc.mean_abs_err_lift = mean_err;
            fc.max_abs_err_lift = max_err;
            fc.lift_ordering = std::move(ordering);
        }
    }
    return fc;
}

/// Sorts records and errors by natural id order, then recomputes aggregates,
/// force statistics and ensemble lines from them.
inline void finalize_section(ReportSection& s, std::size_t ensemble_bins)
{
    auto by_id = [](const auto& a, const auto& b) { return natural_less(a.id, b.id); };
    std::stable_sort(s.records.begin(), s.records.end(), by_id);
    std::stable_sort(s.errors.begin(), s.errors.end(), by_id);
    std::stable_sort(s.lines.begin(), s.lines.end(), [](const SampleLine& a, const SampleLine& b) {
        if (a.line.label != b.line.label) {
            return a.line.label < b.line.label;
        }
        return natural_less(a.sample_id, b.sample_id);
    });
    std::stable_sort(s.slices.begin(), s.slices.end(), [](const SampleSlice& a, const SampleSlice& b) {
        if (a.name != b.name) {
            return a.name < b.name;
        }
        return natural_less(a.sample_id, b.sample_id);
    });
    s.aggregates.clear();
    std::vector<MetricRecord> metrics;
    for (const auto& r : s.records) {
        metrics.push_back(r.metrics);
    }
    if (!metrics.empty()) {
        s.aggregates = aggregate_over_samples(metrics);
    }
    s.forces = compare_forces(s.records);

    s.ensembles.clear();
    std::map<std::string, std::vector<Polyline>> by_label;
    for (const auto& l : s.lines) {
        Polyline normalized = l.line;
        if (!l.normalized && normalized.stations.size() > 1) {
            const double lo = normalized.stations.front();
            const double hi = normalized.stations.back();
            for (auto& st : normalized.stations) {
                st = (st - lo) / (hi - lo);
            }
        }
        by_label[l.line.label].push_back(std::move(normalized));
    }
    for (const auto& [label, lines] : by_label) {
        if (ensemble_bins > 0) {
            s.ensembles.push_back(ensemble_average_lines(lines, ensemble_bins));
        }
    }
}

// ---------------------------------------------------------------- JSON

namespace report_json {

using nlohmann::json;

inline json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline std::optional<double> opt_get(const json& j)
{
    if (j.is_null()) {
        return std::nullopt;
    }
    return j.get<double>();
}

inline json vec(const Vec3& v) { return json::array({v.x, v.y, v.z}); }
inline Vec3 vec(const json& j) { return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()}; }

inline json force(const ForceBreakdown& f)
{
    return {{"pressure_force", vec(f.pressure_force)},
            {"viscous_force", vec(f.viscous_force)},
            {"total_force", vec(f.total_force)},
            {"drag", f.drag},
            {"lift", f.lift},
            {"cd", opt(f.cd)},
            {"cl", opt(f.cl)}};
}

inline ForceBreakdown force(const json& j)
{
    ForceBreakdown f;
    f.pressure_force = vec(j.at("pressure_force"));
    f.viscous_force = vec(j.at("viscous_force"));
    f.total_force = vec(j.at("total_force"));
    f.drag = j.at("drag").get<double>();
    f.lift = j.at("lift").get<double>();
    f.cd = opt_get(j.at("cd"));
    f.cl = opt_get(j.at("cl"));
    return f;
}

inline json stats(const SummaryStats& s)
{
    return {{"mean", s.mean}, {"min", s.min}, {"max", s.max}, {"std", s.std}, {"count", s.count}};
}

inline SummaryStats stats(const json& j)
{
    SummaryStats s;
    s.mean = j.at("mean").get<double>();
    s.min = j.at("min").get<double>();
    s.max = j.at("max").get<double>();
    s.std = j.at("std").get<double>();
    s.count = j.at("count").get<std::size_t>();
    return s;
}

inline json trend(const std::vector<TrendSample>& v)
{
    json a = json::array();
    for (const auto& s : v) {
        a.push_back({{"id", s.id}, {"true", s.truth}, {"pred", s.pred}});
    }
    return a;
}

inline std::vector<TrendSample> trend(const json& j)
{
    std::vector<TrendSample> v;
    for (const auto& e : j) {
        v.push_back({e.at("id").get<std::string>(), e.at("true").get<double>(), e.at("pred").get<double>()});
    }
    return v;
}

inline json section(const ReportSection& s)
{
    json j;
    j["kind"] = s.kind;
    j["sample_ids"] = s.sample_ids();
    json records = json::array();
    for (const auto& r : s.records) {
        json rec{{"id", r.id}, {"metrics", r.metrics}};
        rec["force_true"] = r.force_true ? force(*r.force_true) : json(nullptr);
        rec["force_pred"] = r.force_pred ? force(*r.force_pred) : json(nullptr);
        records.push_back(std::move(rec));
    }
    j["records"] = std::move(records);
    json errors = json::array();
    for (const auto& e : s.errors) {
        errors.push_back({{"id", e.id}, {"code", e.code}, {"message", e.message}});
    }
    j["errors"] = std::move(errors);
    json aggregates = json::object();
    for (const auto& [k, v] : s.aggregates) {
        aggregates[k] = stats(v);
    }
    j["aggregates"] = std::move(aggregates);
    if (s.forces) {
        const auto& f = *s.forces;
        j["forces"] = {{"basis", f.basis},
                       {"r2_drag", opt(f.r2_drag)},
                       {"r2_lift", opt(f.r2_lift)},
                       {"spearman_drag", opt(f.spearman_drag)},
                       {"spearman_lift", opt(f.spearman_lift)},
                       {"mean_abs_err_drag", f.mean_abs_err_drag},
                       {"max_abs_err_drag", f.max_abs_err_drag},
                       {"mean_abs_err_lift", f.mean_abs_err_lift},
                       {"max_abs_err_lift", f.max_abs_err_lift},
                       {"drag_ordering", trend(f.drag_ordering)},
                       {"lift_ordering", trend(f.lift_ordering)}};
    } else {
        j["forces"] = nullptr;
    }
    json lines = json::array();
    for (const auto& l : s.lines) {
        lines.push_back({{"sample_id", l.sample_id},
                         {"label", l.line.label},
                         {"normalized", l.normalized},
                         {"stations", l.line.stations},
                         {"true", l.line.true_values},
                         {"pred", l.line.pred_values}});
    }
    j["lines"] = std::move(lines);
    json ens = json::array();
    for (const auto& e : s.ensembles) {
        ens.push_back({{"label", e.label},
                       {"line_count", e.line_count},
                       {"stations", e.stations},
                       {"mean_true", e.mean_true},
                       {"std_true", e.std_true},
                       {"mean_pred", e.mean_pred},
                       {"std_pred", e.std_pred},
                       {"mask", e.mask}});
    }
    j["ensembles"] = std::move(ens);
    json slices = json::array();
    for (const auto& sl : s.slices) {
        const auto& g = sl.grid;
        json pos = json::array();
        for (const auto& p : g.positions) {
            pos.push_back(vec(p));
        }
        slices.push_back({{"sample_id", sl.sample_id},
                          {"name", sl.name},
                          {"origin", vec(g.origin)},
                          {"u_axis", vec(g.u_axis)},
                          {"v_axis", vec(g.v_axis)},
                          {"normal", vec(g.normal)},
                          {"nu", g.nu},
                          {"nv", g.nv},
                          {"components", g.components},
                          {"positions", std::move(pos)},
                          {"true", g.true_values},
                          {"pred", g.pred_values},
                          {"mask", g.mask}});
    }
    j["slices"] = std::move(slices);
    return j;
}

inline ReportSection section(const json& j)
{
    ReportSection s;
    s.kind = j.at("kind").get<std::string>();
    for (const auto& r : j.at("records")) {
        SampleRecord rec;
        rec.id = r.at("id").get<std::string>();
        rec.metrics = r.at("metrics").get<MetricRecord>();
        if (!r.at("force_true").is_null()) rec.force_true = force(r.at("force_true"));
        if (!r.at("force_pred").is_null()) rec.force_pred = force(r.at("force_pred"));
        s.records.push_back(std::move(rec));
    }
    for (const auto& e : j.at("errors")) {
        s.errors.push_back(
            {e.at("id").get<std::string>(), e.at("code").get<std::string>(), e.at("message").get<std::string>()});
    }
    for (auto it = j.at("aggregates").begin(); it != j.at("aggregates").end(); ++it) {
        s.aggregates[it.key()] = stats(it.value());
    }
    if (!j.at("forces").is_null()) {
        const auto& f = j.at("forces");
        ForceComparison fc;
        fc.basis = f.at("basis").get<std::string>();
        fc.r2_drag = opt_get(f.at("r2_drag"));
        fc.r2_lift = opt_get(f.at("r2_lift"));
        fc.spearman_drag = opt_get(f.at("spearman_drag"));
        fc.spearman_lift = opt_get(f.at("spearman_lift"));
        fc.mean_abs_err_drag = f.at("mean_abs_err_drag").get<double>();
        fc.max_abs_err_drag = f.at("max_abs_err_drag").get<double>();
        fc.mean_abs_err_lift = f.at("mean_abs_err_lift").get<double>();
        fc.max_abs_err_lift = f.at("max_abs_err_lift").get<double>();
        fc.drag_ordering = trend(f.at("drag_ordering"));
        fc.lift_ordering = trend(f.at("lift_ordering"));
        s.forces = std::move(fc);
    }
    for (const auto& l : j.at("lines")) {
        SampleLine sl;
        sl.sample_id = l.at("sample_id").get<std::string>();
        sl.line.label = l.at("label").get<std::string>();
        sl.normalized = l.at("normalized").get<bool>();
        sl.line.stations = l.at("stations").get<std::vector<double>>();
        sl.line.true_values = l.at("true").get<std::vector<double>>();
        sl.line.pred_values = l.at("pred").get<std::vector<double>>();
        s.lines.push_back(std::move(sl));
    }
    for (const auto& e : j.at("ensembles")) {
        EnsembleLine el;
        el.label = e.at("label").get<std::string>();
        el.line_count = e.at("line_count").get<std::size_t>();
        el.stations = e.at("stations").get<std::vector<double>>();
        el.mean_true = e.at("mean_true").get<std::vector<double>>();
        el.std_true = e.at("std_true").get<std::vector<double>>();
        el.mean_pred = e.at("mean_pred").get<std::vector<double>>();
        el.std_pred = e.at("std_pred").get<std::vector<double>>();
        el.mask = e.at("mask").get<std::vector<std::uint8_t>>();
        s.ensembles.push_back(std::move(el));
    }
    for (const auto& e : j.at("slices")) {
        SampleSlice sl;
        sl.sample_id = e.at("sample_id").get<std::string>();
        sl.name = e.at("name").get<std::string>();
        auto& g = sl.grid;
        g.origin = vec(e.at("origin"));
        g.u_axis = vec(e.at("u_axis"));
        g.v_axis = vec(e.at("v_axis"));
        g.normal = vec(e.at("normal"));
        g.nu = e.at("nu").get<std::size_t>();
        g.nv = e.at("nv").get<std::size_t>();
        g.components = e.at("components").get<int>();
        for (const auto& p : e.at("positions")) {
            g.positions.push_back(vec(p));
        }
        g.true_values = e.at("true").get<std::vector<double>>();
        g.pred_values = e.at("pred").get<std::vector<double>>();
        g.mask = e.at("mask").get<std::vector<std::uint8_t>>();
        s.slices.push_back(std::move(sl));
    }
    return s;
}

} // namespace report_json

/// Stable-schema JSON. Keys are sorted; the document carries no timestamps so
/// identical inputs give identical bytes.
inline nlohmann::json report_to_json(const BenchmarkReport& r)
{
    using nlohmann::json;
    json j;
    j["schema_version"] = r.schema_version;
    j["tool_version"] = r.tool_version;
    j["provenance"] = {{"config_digest", r.config_digest}};
    j["surface"] = r.surface ? report_json::section(*r.surface) : json(nullptr);
    j["volume"] = r.volume ? report_json::section(*r.volume) : json(nullptr);
    j["pointcloud"] = r.pointcloud ? report_json::section(*r.pointcloud) : json(nullptr);
    return j;
}

inline BenchmarkReport report_from_json(const nlohmann::json& j)
{
    BenchmarkReport r;
    try {
        r.schema_version = j.at("schema_version").get<int>();
        if (r.schema_version != kSchemaVersion) {
            fail(ErrorCode::ParseError, "unsupported report schema_version " + std::to_string(r.schema_version));
        }
        r.tool_version = j.at("tool_version").get<std::string>();
        r.config_digest = j.at("provenance").at("config_digest").get<std::string>();
        if (!j.at("surface").is_null()) r.surface = report_json::section(j.at("surface"));
        if (!j.at("volume").is_null()) r.volume = report_json::section(j.at("volume"));
        if (!j.at("pointcloud").is_null()) r.pointcloud = report_json::section(j.at("pointcloud"));
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ParseError, e.what());
    }
    return r;
}

inline std::string report_json_text(const BenchmarkReport& r) { return report_to_json(r).dump(2) + "\n"; }

inline BenchmarkReport load_report(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        fail(ErrorCode::IoError, "cannot open '" + path + "'");
    }
    try {
        return report_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ParseError, path + ": " + e.what());
    }
}

// ---------------------------------------------------------------- CSV / SVG

namespace emit_detail {

inline std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

inline std::string quote(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + "\"";
}

inline void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        fail(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
    }
    out << text;
    if (!out) {
        fail(ErrorCode::IoError, "failed writing '" + path.string() + "'");
    }
}

/// File-name-safe version of an id or label.
inline std::string slug(const std::string& s)
{
    std::string out;
    for (char c : s) {
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.') ? c : '_';
    }
    return out;
}

/// Mean of aggregate `key`, or empty when no sample produced it.
inline std::string mean_of(const ReportSection& s, const std::string& key)
{
    auto it = s.aggregates.find(key);
    return it == s.aggregates.end() ? std::string() : num(it->second.mean);
}

inline std::string samples_csv(const ReportSection& s)
{
    std::set<std::string> columns;
    for (const auto& r : s.records) {
        for (const auto& [k, v] : r.metrics) {
            columns.insert(k);
        }
    }
    const bool forces = std::any_of(s.records.begin(), s.records.end(),
                                    [](const SampleRecord& r) { return r.force_true && r.force_pred; });
    std::string out = "id";
    for (const auto& c : columns) {
        out += "," + quote(c);
    }
    if (forces) {
        out += ",drag_true,drag_pred,lift_true,lift_pred,cd_true,cd_pred,cl_true,cl_pred";
    }
    out += "\n";
    for (const auto& r : s.records) {
        out += quote(r.id);
        for (const auto& c : columns) {
            auto it = r.metrics.find(c);
            out += "," + (it == r.metrics.end() ? std::string() : num(it->second));
        }
        if (forces) {
            if (r.force_true && r.force_pred) {
                const auto& t = *r.force_true;
                const auto& p = *r.force_pred;
                out += "," + num(t.drag) + "," + num(p.drag) + "," + num(t.lift) + "," + num(p.lift) + "," +
                       num(t.cd) + "," + num(p.cd) + "," + num(t.cl) + "," + num(p.cl);
            } else {
                out += ",,,,,,,,";
            }
        }
        out += "\n";
    }
    return out;
}

inline std::string aggregates_csv(const ReportSection& s)
{
    std::string out = "metric,mean,min,max,std,count\n";
    for (const auto& [k, v] : s.aggregates) {
        out += quote(k) + "," + num(v.mean) + "," + num(v.min) + "," + num(v.max) + "," + num(v.std) + "," +
               std::to_string(v.count) + "\n";
    }
    return out;
}

inline std::string errors_csv(const ReportSection& s)
{
    std::string out = "id,code,message\n";
    for (const auto& e : s.errors) {
        out += quote(e.id) + "," + quote(e.code) + "," + quote(e.message) + "\n";
    }
    return out;
}

/// Mean of every aggregate whose name starts with `prefix`, one row each.
inline std::string prefixed_table(const ReportSection& s, const std::string& prefix)
{
    std::string out = "field,mean\n";
    for (const auto& [k, v] : s.aggregates) {
        if (k.rfind(prefix, 0) == 0) {
            out += quote(k.substr(prefix.size())) + "," + num(v.mean) + "\n";
        }
    }
    return out;
}

inline std::string trend_spearman_csv(const ForceComparison& f)
{
    return "quantity,spearman\ndrag," + num(f.spearman_drag) + "\nlift," + num(f.spearman_lift) + "\n";
}

inline std::string trend_errors_csv(const ForceComparison& f)
{
    return "quantity,mean_abs_err,max_abs_err\ndrag," + num(f.mean_abs_err_drag) + "," + num(f.max_abs_err_drag) +
           "\nlift," + num(f.mean_abs_err_lift) + "," + num(f.max_abs_err_lift) + "\n";
}

inline std::string r2_csv(const ForceComparison& f)
{
    return "quantity,r2\ndrag," + num(f.r2_drag) + "\nlift," + num(f.r2_lift) + "\n";
}

inline std::string ordering_csv(const std::vector<TrendSample>& v)
{
    std::string out = "rank,id,true,pred\n";
    for (std::size_t i = 0; i < v.size(); ++i) {
        out += std::to_string(i + 1) + "," + quote(v[i].id) + "," + num(v[i].truth) + "," + num(v[i].pred) + "\n";
    }
    return out;
}

inline std::string line_csv(const Polyline& l)
{
    std::string out = "station,true,pred\n";
    for (std::size_t i = 0; i < l.size(); ++i) {
        out += num(l.stations[i]) + "," + num(l.true_values[i]) + "," + num(l.pred_values[i]) + "\n";
    }
    return out;
}

inline std::string ensemble_csv(const EnsembleLine& e)
{
    std::string out = "station,mean_true,std_true,mean_pred,std_pred,masked\n";
    for (std::size_t i = 0; i < e.stations.size(); ++i) {
        out += num(e.stations[i]) + "," + num(e.mean_true[i]) + "," + num(e.std_true[i]) + "," +
               num(e.mean_pred[i]) + "," + num(e.std_pred[i]) + "," + std::to_string(e.mask[i]) + "\n";
    }
    return out;
}

inline std::string slice_csv(const PlaneGrid& g)
{
    std::string out = "iu,iv,x,y,z,masked";
    for (int c = 0; c < g.components; ++c) {
        out += ",true_" + std::to_string(c);
    }
    for (int c = 0; c < g.components; ++c) {
        out += ",pred_" + std::to_string(c);
    }
    out += "\n";
    for (std::size_t iv = 0; iv < g.nv; ++iv) {
        for (std::size_t iu = 0; iu < g.nu; ++iu) {
            const std::size_t i = iv * g.nu + iu;
            const auto& p = g.positions[i];
            out += std::to_string(iu) + "," + std::to_string(iv) + "," + num(p.x) + "," + num(p.y) + "," +
                   num(p.z) + "," + std::to_string(g.mask[i]);
            for (int c = 0; c < g.components; ++c) {
                out += "," + num(g.true_values[i * g.components + c]);
            }
            for (int c = 0; c < g.components; ++c) {
                out += "," + num(g.pred_values[i * g.components + c]);
            }
            out += "\n";
        }
    }
    return out;
}

inline constexpr const char* kTrueColor = "#1f77b4";
inline constexpr const char* kPredColor = "#d62728";

/// Samples ranked by ascending truth; truth and prediction as two series.
inline SvgPlot trend_plot(const std::string& title, const std::vector<TrendSample>& v, const std::string& ylabel)
{
    SvgPlot plot(title, "sample rank (ascending truth)", ylabel);
    PlotSeries t{"true", {}, {}, kTrueColor, true, true};
    PlotSeries p{"pred", {}, {}, kPredColor, true, true};
    for (std::size_t i = 0; i < v.size(); ++i) {
        t.x.push_back(static_cast<double>(i + 1));
        t.y.push_back(v[i].truth);
        p.x.push_back(static_cast<double>(i + 1));
        p.y.push_back(v[i].pred);
    }
    plot.add(std::move(t));
    plot.add(std::move(p));
    return plot;
}

inline SvgPlot regression_plot(const std::string& title, const std::vector<TrendSample>& v)
{
    SvgPlot plot(title, "true", "predicted");
    PlotSeries pts{"samples", {}, {}, kPredColor, false, true};
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& s : v) {
        pts.x.push_back(s.truth);
        pts.y.push_back(s.pred);
        lo = std::min({lo, s.truth, s.pred});
        hi = std::max({hi, s.truth, s.pred});
    }
    if (!v.empty()) {
        plot.add(PlotSeries{"y = x", {lo, hi}, {lo, hi}, "#7f7f7f", true, false, 1.0});
    }
    plot.add(std::move(pts));
    return plot;
}

inline SvgPlot line_plot(const std::string& title, const Polyline& l, const std::string& xlabel)
{
    SvgPlot plot(title, xlabel, "value");
    plot.add(PlotSeries{"true", l.stations, l.true_values, kTrueColor});
    plot.add(PlotSeries{"pred", l.stations, l.pred_values, kPredColor});
    return plot;
}

/// Mean lines with +-1 std bands over the unmasked bins.
inline SvgPlot ensemble_plot(const std::string& title, const EnsembleLine& e)
{
    SvgPlot plot(title, "normalized station", "value");
    PlotBand bt{{}, {}, {}, kTrueColor};
    PlotBand bp{{}, {}, {}, kPredColor};
    PlotSeries mt{"mean true", {}, {}, kTrueColor};
    PlotSeries mp{"mean pred", {}, {}, kPredColor};
    for (std::size_t i = 0; i < e.stations.size(); ++i) {
        if (e.mask[i]) {
            continue;
        }
        const double s = e.stations[i];
        bt.x.push_back(s);
        bt.lo.push_back(e.mean_true[i] - e.std_true[i]);
        bt.hi.push_back(e.mean_true[i] + e.std_true[i]);
        bp.x.push_back(s);
        bp.lo.push_back(e.mean_pred[i] - e.std_pred[i]);
        bp.hi.push_back(e.mean_pred[i] + e.std_pred[i]);
        mt.x.push_back(s);
        mt.y.push_back(e.mean_true[i]);
        mp.x.push_back(s);
        mp.y.push_back(e.mean_pred[i]);
    }
    plot.add(std::move(bt));
    plot.add(std::move(bp));
    plot.add(std::move(mt));
    plot.add(std::move(mp));
    return plot;
}

inline void emit_section_csv(const ReportSection& s, const std::filesystem::path& dir)
{
    const std::string& k = s.kind;
    write_text(dir / (k + "_samples.csv"), samples_csv(s));
    write_text(dir / (k + "_aggregates.csv"), aggregates_csv(s));
    write_text(dir / (k + "_errors.csv"), errors_csv(s));
    if (k == "surface") {
        write_text(dir / "table_l2.csv", prefixed_table(s, "l2."));
        write_text(dir / "table_area_weighted_l2.csv", prefixed_table(s, "area_l2."));
    } else if (k == "volume") {
        write_text(dir / "table_volume_errors.csv", prefixed_table(s, "l2."));
        write_text(dir / "table_volume_residuals.csv", prefixed_table(s, "residual."));
    }
    if (s.forces) {
        const std::string prefix = k == "pointcloud" ? "table_pc_" : "table_";
        write_text(dir / (prefix + "trend_spearman.csv"), trend_spearman_csv(*s.forces));
        write_text(dir / (prefix + "trend_errors.csv"), trend_errors_csv(*s.forces));
        write_text(dir / (prefix + "r2.csv"), r2_csv(*s.forces));
        write_text(dir / (k + "_trend_drag.csv"), ordering_csv(s.forces->drag_ordering));
        write_text(dir / (k + "_trend_lift.csv"), ordering_csv(s.forces->lift_ordering));
    }
    if (!s.lines.empty() || !s.slices.empty()) {
        std::filesystem::create_directories(dir / "lines");
    }
    for (const auto& l : s.lines) {
        write_text(dir / "lines" / (k + "_" + slug(l.sample_id) + "_" + slug(l.line.label) + ".csv"),
                   line_csv(l.line));
    }
    for (const auto& e : s.ensembles) {
        write_text(dir / (k + "_ensemble_" + slug(e.label) + ".csv"), ensemble_csv(e));
    }
    for (const auto& sl : s.slices) {
        write_text(dir / "lines" / (k + "_" + slug(sl.sample_id) + "_slice_" + slug(sl.name) + ".csv"),
                   slice_csv(sl.grid));
    }
}

inline void emit_section_svg(const ReportSection& s, const std::filesystem::path& dir)
{
    const std::string& k = s.kind;
    if (s.forces) {
        const std::string unit = s.forces->basis == "coefficient" ? "coefficient" : "force";
        trend_plot(k + " drag trend", s.forces->drag_ordering, "drag " + unit).save((dir / (k + "_trend_drag.svg")).string());
        trend_plot(k + " lift trend", s.forces->lift_ordering, "lift " + unit).save((dir / (k + "_trend_lift.svg")).string());
        regression_plot(k + " drag regression", s.forces->drag_ordering).save((dir / (k + "_regression_drag.svg")).string());
        regression_plot(k + " lift regression", s.forces->lift_ordering).save((dir / (k + "_regression_lift.svg")).string());
    }
    if (!s.lines.empty()) {
        std::filesystem::create_directories(dir / "lines");
    }
    for (const auto& l : s.lines) {
        line_plot(l.sample_id + " " + l.line.label, l.line, l.normalized ? "normalized x" : "arc length")
            .save((dir / "lines" / (k + "_" + slug(l.sample_id) + "_" + slug(l.line.label) + ".svg")).string());
    }
    for (const auto& e : s.ensembles) {
        ensemble_plot(k + " ensemble " + e.label, e).save((dir / (k + "_ensemble_" + slug(e.label) + ".svg")).string());
    }
}

} // namespace emit_detail

/// Writes the requested formats ("json", "csv", "svg") into `dir`.
inline void emit_report(const BenchmarkReport& r, const std::vector<std::string>& formats,
                        const std::filesystem::path& dir, const std::string& json_name = "report.json")
{
    for (const auto& f : formats) {
        if (f != "json" && f != "csv" && f != "svg") {
            fail(ErrorCode::InvalidArgument, "unknown output format '" + f + "'");
        }
    }
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        fail(ErrorCode::IoError, "cannot create '" + dir.string() + "': " + ec.message());
    }
    auto wants = [&](const char* f) { return std::find(formats.begin(), formats.end(), f) != formats.end(); };
    if (wants("json")) {
        emit_detail::write_text(dir / json_name, report_json_text(r));
    }
    for (const auto* s : {&r.surface, &r.volume, &r.pointcloud}) {
        if (!*s) {
            continue;
        }
        if (wants("csv")) {
            emit_detail::emit_section_csv(**s, dir);
        }
        if (wants("svg")) {
            emit_detail::emit_section_svg(**s, dir);
        }
    }
}

/// Train/validation split figure: sorted drag values with the validation
/// members highlighted by role.
inline SvgPlot split_plot(const std::vector<DragRecord>& records, const SplitSpec& split)
{
    std::vector<DragRecord> sorted = records;
    std::sort(sorted.begin(), sorted.end(), [](const DragRecord& a, const DragRecord& b) {
        return a.drag < b.drag || (a.drag == b.drag && natural_less(a.id, b.id));
    });
    SvgPlot plot("train/validation split", "sample rank (ascending drag)", "drag");
    PlotSeries train{"train", {}, {}, "#7f7f7f", false, true};
    PlotSeries tails{"validation (tails)", {}, {}, "#d62728", false, true};
    PlotSeries random{"validation (random)", {}, {}, "#1f77b4", false, true};
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const auto& id = sorted[i].id;
        PlotSeries& s = split.random_ids.count(id)                                 ? random
                        : (split.top_tail.count(id) || split.bottom_tail.count(id)) ? tails
                                                                                    : train;
        s.x.push_back(static_cast<double>(i + 1));
        s.y.push_back(sorted[i].drag);
    }
    plot.add(std::move(train));
    plot.add(std::move(tails));
    plot.add(std::move(random));
    return plot;
}

} // namespace aerobench
