#pragma once

// Benchmark configuration: a JSON document with nested sections. Relative
// paths are resolved against the directory of the config file.

#include <aerobench/core.hpp>
#include <aerobench/extract.hpp>
#include <aerobench/fields.hpp>
#include <aerobench/interpolate.hpp>
#include <aerobench/metrics.hpp>
#include <aerobench/split.hpp>

#include "json.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace aerobench {

struct ProbeSpec
{
    std::string name;
    Vec3 start;
    Vec3 end;
    std::size_t samples = 100;
    std::string quantity = "velocity";
    int component = 0;
};

struct SliceSpec
{
    std::string name;
    Plane plane;
    std::size_t nu = 100;
    std::size_t nv = 50;
    double max_radius = 0.1;
    std::string quantity = "velocity";
};

struct SurfaceConfig
{
    std::string file_pattern = "{id}/boundary.vtp";
    FieldMapping fields;
    std::string pressure_quantity = "pressure";
    std::string shear_quantity = "wall_shear";
    bool centerlines = true;
    CenterlineOptions centerline;
    std::size_t ensemble_bins = 100;
};

struct VolumeConfig
{
    std::string file_pattern = "{id}/volume.vtu";
    FieldMapping fields;
    std::string velocity_quantity = "velocity";
    std::string pressure_quantity = "pressure";
    bool residuals = false;
    std::size_t residual_k = 16;
    double nu = 1.5e-5;
    bool write_residual_vtu = false;
    std::vector<ProbeSpec> probes;
    std::vector<SliceSpec> slices;
    std::size_t ensemble_bins = 100;
};

struct PointCloudConfig
{
    std::string stl_pattern = "{id}/body.stl";
    std::string cloud_pattern = "{id}/cloud_pred.vtp";
    /// Ground-truth surface mesh; empty falls back to surface.file_pattern.
    std::string mesh_pattern;
    std::size_t n_points = 100000;
    std::uint64_t seed = 0;
    std::string pressure_name = "pressurePred";
    std::string shear_name = "wallShearStressPred";
};

struct SplitConfig
{
    std::string drag_csv;
    double val_frac = 0.1;
    double tail_frac = 0.1;
    std::uint64_t seed = 0;
};

struct BenchConfig
{
    std::filesystem::path base_dir = ".";
    std::string data_root = ".";
    std::vector<std::string> samples;
    std::string split_file;
    FlowConditions flow;
    IdwOptions idw;
    SurfaceConfig surface;
    VolumeConfig volume;
    PointCloudConfig pointcloud;
    SplitConfig split;

    // Run options; excluded from the provenance digest.
    std::string out_dir = "bench_out";
    std::vector<std::string> formats{"json", "csv", "svg"};
    unsigned jobs = 1;

    std::filesystem::path resolve(const std::string& p) const
    {
        const std::filesystem::path path(p);
        return path.is_absolute() ? path : base_dir / path;
    }

    std::filesystem::path sample_path(const std::string& pattern, const std::string& id) const
    {
        std::string rel = pattern;
        for (std::size_t at = rel.find("{id}"); at != std::string::npos; at = rel.find("{id}", at + id.size())) {
            rel.replace(at, 4, id);
        }
        return resolve(data_root) / rel;
    }

    bool wants(const std::string& format) const
    {
        return std::find(formats.begin(), formats.end(), format) != formats.end();
    }
};

namespace config_detail {

using nlohmann::json;

inline Vec3 vec3(const json& j, const std::string& key)
{
    if (!j.is_array() || j.size() != 3) {
        fail(ErrorCode::InvalidConfig, "'" + key + "' must be a 3-element array");
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline json vec3_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

inline FieldMapping mapping(const json& j, const std::string& where)
{
    FieldMapping m;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto& v = it.value();
        if (v.is_array() && v.size() == 2) {
            m[it.key()] = {v[0].get<std::string>(), v[1].get<std::string>()};
        } else if (v.is_object()) {
            m[it.key()] = {v.at("true").get<std::string>(), v.at("pred").get<std::string>()};
        } else {
            fail(ErrorCode::InvalidConfig, where + "." + it.key() + " must be [true_name, pred_name]");
        }
    }
    return m;
}

inline json mapping_json(const FieldMapping& m)
{
    json j = json::object();
    for (const auto& [k, v] : m) {
        j[k] = json::array({v.true_name, v.pred_name});
    }
    return j;
}

template <typename T>
void get_if(const json& j, const char* key, T& out)
{
    if (j.contains(key) && !j.at(key).is_null()) {
        out = j.at(key).get<T>();
    }
}

} // namespace config_detail

inline FieldMapping default_surface_mapping()
{
    return {{"pressure", {"pMeanTrim", "pMeanTrimPred"}},
            {"wall_shear", {"wallShearStressMeanTrim", "wallShearStressMeanTrimPred"}}};
}

inline FieldMapping default_volume_mapping()
{
    return {{"pressure", {"pMeanTrim", "pMeanTrimPred"}}, {"velocity", {"UMeanTrim", "UMeanTrimPred"}}};
}

/// Wake probes at x = 4 m and x = 5 m on the symmetry plane, sampling x-velocity along z.
inline std::vector<ProbeSpec> default_probes()
{
    return {{"wake_x4", {4.0, 0.0, -0.3}, {4.0, 0.0, 1.5}, 100, "velocity", 0},
            {"wake_x5", {5.0, 0.0, -0.3}, {5.0, 0.0, 1.5}, 100, "velocity", 0}};
}

inline BenchConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = ".")
{
    using namespace config_detail;
    BenchConfig c;
    c.base_dir = base_dir;
    c.surface.fields = default_surface_mapping();
    c.volume.fields = default_volume_mapping();
    c.volume.probes = default_probes();
    try {
        get_if(j, "data_root", c.data_root);
        get_if(j, "samples", c.samples);
        get_if(j, "split_file", c.split_file);
        if (j.contains("flow")) {
            const auto& f = j.at("flow");
            get_if(f, "rho", c.flow.rho);
            if (f.contains("u_ref") && !f.at("u_ref").is_null()) c.flow.u_ref = f.at("u_ref").get<double>();
            if (f.contains("a_ref") && !f.at("a_ref").is_null()) c.flow.a_ref = f.at("a_ref").get<double>();
            get_if(f, "p_ref", c.flow.p_ref);
            if (f.contains("flow_dir")) c.flow.flow_dir = vec3(f.at("flow_dir"), "flow.flow_dir");
            if (f.contains("lift_dir")) c.flow.lift_dir = vec3(f.at("lift_dir"), "flow.lift_dir");
            get_if(f, "shear_sign", c.flow.shear_sign);
            get_if(f, "pressure_is_kinematic", c.flow.pressure_is_kinematic);
        }
        if (j.contains("interpolation")) {
            get_if(j.at("interpolation"), "k", c.idw.k);
            get_if(j.at("interpolation"), "power", c.idw.power);
        }
        if (j.contains("surface")) {
            const auto& s = j.at("surface");
            get_if(s, "file_pattern", c.surface.file_pattern);
            if (s.contains("fields")) c.surface.fields = mapping(s.at("fields"), "surface.fields");
            get_if(s, "pressure_quantity", c.surface.pressure_quantity);
            get_if(s, "shear_quantity", c.surface.shear_quantity);
            get_if(s, "centerlines", c.surface.centerlines);
            get_if(s, "centerline_band", c.surface.centerline.band_halfwidth);
            get_if(s, "centerline_bins", c.surface.centerline.bins);
            get_if(s, "ensemble_bins", c.surface.ensemble_bins);
        }
        if (j.contains("volume")) {
            const auto& v = j.at("volume");
            get_if(v, "file_pattern", c.volume.file_pattern);
            if (v.contains("fields")) c.volume.fields = mapping(v.at("fields"), "volume.fields");
            get_if(v, "velocity_quantity", c.volume.velocity_quantity);
            get_if(v, "pressure_quantity", c.volume.pressure_quantity);
            get_if(v, "residuals", c.volume.residuals);
            get_if(v, "residual_k", c.volume.residual_k);
            get_if(v, "nu", c.volume.nu);
            get_if(v, "write_residual_vtu", c.volume.write_residual_vtu);
            get_if(v, "ensemble_bins", c.volume.ensemble_bins);
            if (v.contains("probes")) {
                c.volume.probes.clear();
                for (const auto& p : v.at("probes")) {
                    ProbeSpec ps;
                    ps.name = p.at("name").get<std::string>();
                    ps.start = vec3(p.at("start"), "probe.start");
                    ps.end = vec3(p.at("end"), "probe.end");
                    get_if(p, "samples", ps.samples);
                    get_if(p, "quantity", ps.quantity);
                    get_if(p, "component", ps.component);
                    c.volume.probes.push_back(ps);
                }
            }
            if (v.contains("slices")) {
                for (const auto& p : v.at("slices")) {
                    SliceSpec ss;
                    ss.name = p.at("name").get<std::string>();
                    ss.plane.origin = vec3(p.at("origin"), "slice.origin");
                    ss.plane.u_axis = vec3(p.at("u_axis"), "slice.u_axis");
                    ss.plane.v_axis = vec3(p.at("v_axis"), "slice.v_axis");
                    ss.plane.u_length = p.at("u_length").get<double>();
                    ss.plane.v_length = p.at("v_length").get<double>();
                    get_if(p, "nu", ss.nu);
                    get_if(p, "nv", ss.nv);
                    get_if(p, "max_radius", ss.max_radius);
                    get_if(p, "quantity", ss.quantity);
                    c.volume.slices.push_back(ss);
                }
            }
        }
        if (j.contains("pointcloud")) {
            const auto& p = j.at("pointcloud");
            get_if(p, "stl_pattern", c.pointcloud.stl_pattern);
            get_if(p, "cloud_pattern", c.pointcloud.cloud_pattern);
            get_if(p, "mesh_pattern", c.pointcloud.mesh_pattern);
            get_if(p, "n_points", c.pointcloud.n_points);
            get_if(p, "seed", c.pointcloud.seed);
            get_if(p, "pressure_name", c.pointcloud.pressure_name);
            get_if(p, "shear_name", c.pointcloud.shear_name);
        }
        if (j.contains("split")) {
            const auto& s = j.at("split");
            get_if(s, "drag_csv", c.split.drag_csv);
            get_if(s, "val_frac", c.split.val_frac);
            get_if(s, "tail_frac", c.split.tail_frac);
            get_if(s, "seed", c.split.seed);
        }
        if (j.contains("output")) {
            get_if(j.at("output"), "dir", c.out_dir);
            get_if(j.at("output"), "formats", c.formats);
        }
        get_if(j, "jobs", c.jobs);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::InvalidConfig, e.what());
    }
    c.flow.validate();
    if (c.surface.fields.find(c.surface.pressure_quantity) == c.surface.fields.end()) {
        fail(ErrorCode::InvalidConfig, "surface.fields must map the pressure quantity '" +
                                           c.surface.pressure_quantity + "'");
    }
    return c;
}

inline BenchConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        fail(ErrorCode::IoError, "cannot open config '" + path + "'");
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::InvalidConfig, path + ": " + e.what());
    }
    auto dir = std::filesystem::path(path).parent_path();
    return config_from_json(j, dir.empty() ? std::filesystem::path(".") : dir);
}

/// Every field that influences results (run options such as the output
/// directory, formats and worker count are left out).
inline nlohmann::json config_to_json(const BenchConfig& c)
{
    using namespace config_detail;
    json j;
    j["data_root"] = c.data_root;
    j["samples"] = c.samples;
    j["split_file"] = c.split_file;
    j["flow"] = {{"rho", c.flow.rho},
                 {"u_ref", c.flow.u_ref ? json(*c.flow.u_ref) : json(nullptr)},
                 {"a_ref", c.flow.a_ref ? json(*c.flow.a_ref) : json(nullptr)},
                 {"p_ref", c.flow.p_ref},
                 {"flow_dir", vec3_json(c.flow.flow_dir)},
                 {"lift_dir", vec3_json(c.flow.lift_dir)},
                 {"shear_sign", c.flow.shear_sign},
                 {"pressure_is_kinematic", c.flow.pressure_is_kinematic}};
    j["interpolation"] = {{"k", c.idw.k}, {"power", c.idw.power}};
    j["surface"] = {{"file_pattern", c.surface.file_pattern},
                    {"fields", mapping_json(c.surface.fields)},
                    {"pressure_quantity", c.surface.pressure_quantity},
                    {"shear_quantity", c.surface.shear_quantity},
                    {"centerlines", c.surface.centerlines},
                    {"centerline_band", c.surface.centerline.band_halfwidth},
                    {"centerline_bins", c.surface.centerline.bins},
                    {"ensemble_bins", c.surface.ensemble_bins}};
    json probes = json::array();
    for (const auto& p : c.volume.probes) {
        probes.push_back({{"name", p.name},
                          {"start", vec3_json(p.start)},
                          {"end", vec3_json(p.end)},
                          {"samples", p.samples},
                          {"quantity", p.quantity},
                          {"component", p.component}});
    }
    json slices = json::array();
    for (const auto& s : c.volume.slices) {
        slices.push_back({{"name", s.name},
                          {"origin", vec3_json(s.plane.origin)},
                          {"u_axis", vec3_json(s.plane.u_axis)},
                          {"v_axis", vec3_json(s.plane.v_axis)},
                          {"u_length", s.plane.u_length},
                          {"v_length", s.plane.v_length},
                          {"nu", s.nu},
                          {"nv", s.nv},
                          {"max_radius", s.max_radius},
                          {"quantity", s.quantity}});
    }
    j["volume"] = {{"file_pattern", c.volume.file_pattern},
                   {"fields", mapping_json(c.volume.fields)},
                   {"velocity_quantity", c.volume.velocity_quantity},
                   {"pressure_quantity", c.volume.pressure_quantity},
                   {"residuals", c.volume.residuals},
                   {"residual_k", c.volume.residual_k},
                   {"nu", c.volume.nu},
                   {"write_residual_vtu", c.volume.write_residual_vtu},
                   {"ensemble_bins", c.volume.ensemble_bins},
                   {"probes", probes},
                   {"slices", slices}};
    j["pointcloud"] = {{"stl_pattern", c.pointcloud.stl_pattern},
                       {"cloud_pattern", c.pointcloud.cloud_pattern},
                       {"mesh_pattern", c.pointcloud.mesh_pattern},
                       {"n_points", c.pointcloud.n_points},
                       {"seed", c.pointcloud.seed},
                       {"pressure_name", c.pointcloud.pressure_name},
                       {"shear_name", c.pointcloud.shear_name}};
    j["split"] = {{"drag_csv", c.split.drag_csv},
                  {"val_frac", c.split.val_frac},
                  {"tail_frac", c.split.tail_frac},
                  {"seed", c.split.seed}};
    return j;
}

/// FNV-1a 64 of the canonical (sorted-key) JSON form, as 16 hex digits.
inline std::string config_digest(const BenchConfig& c)
{
    const std::string text = config_to_json(c).dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Sample ids from, in order of precedence: an explicit list or file given
/// on the command line, the config's split file, the config's sample list.
inline std::vector<std::string> resolve_samples(const BenchConfig& c, const std::string& cli_samples = {})
{
    if (!cli_samples.empty()) {
        if (std::filesystem::is_regular_file(cli_samples)) {
            return read_id_list(cli_samples);
        }
        std::vector<std::string> ids;
        std::size_t start = 0;
        while (start <= cli_samples.size()) {
            auto comma = cli_samples.find(',', start);
            auto tok = cli_samples.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
            if (!tok.empty()) {
                ids.push_back(tok);
            }
            if (comma == std::string::npos) {
                break;
            }
            start = comma + 1;
        }
        return ids;
    }
    if (!c.split_file.empty()) {
        return read_id_list(c.resolve(c.split_file).string());
    }
    return c.samples;
}

} // namespace aerobench
