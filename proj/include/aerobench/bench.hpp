#pragma once

// Per-sample evaluation loops for the surface, volume and point-cloud
// workflows. Samples run on a small thread pool; each worker writes only
// its own result slot and the section is folded afterwards in id order, so
// the worker count never changes the report.

#include <aerobench/config.hpp>
#include <aerobench/core.hpp>
#include <aerobench/extract.hpp>
#include <aerobench/fields.hpp>
#include <aerobench/geometry.hpp>
#include <aerobench/metrics.hpp>
#include <aerobench/report.hpp>
#include <aerobench/residuals.hpp>
#include <aerobench/sampling.hpp>
#include <aerobench/spatial_index.hpp>
#include <aerobench/stl.hpp>
#include <aerobench/vtk_xml.hpp>

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace aerobench {

/// Calls body(i) for i in [0, n) on up to `jobs` threads.
inline void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& body)
{
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, jobs), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                body(i);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
}

/// What one sample contributes to a section.
struct SampleOutcome
{
    std::optional<SampleRecord> record;
    std::optional<SampleError> error;
    std::vector<SampleLine> lines;
    std::vector<SampleSlice> slices;
};

namespace bench_detail {

/// Runs `work` for every id, isolating failures per sample.
inline ReportSection run_samples(const std::string& kind, const std::vector<std::string>& ids, unsigned jobs,
                                 const std::function<void(const std::string&, SampleOutcome&)>& work)
{
    if (ids.empty()) {
        fail(ErrorCode::NoSamples, kind + " run has no samples");
    }
    std::vector<std::string> unique;
    std::set<std::string> seen;
    for (const auto& id : ids) {
        if (seen.insert(id).second) {
            unique.push_back(id);
        }
    }
    std::vector<SampleOutcome> outcomes(unique.size());
    parallel_for(unique.size(), jobs, [&](std::size_t i) {
        SampleOutcome& out = outcomes[i];
        try {
            work(unique[i], out);
        } catch (const Error& e) {
            out = SampleOutcome{};
            out.error = SampleError{unique[i], std::string(to_string(e.code())), e.what()};
        } catch (const std::exception& e) {
            out = SampleOutcome{};
            out.error = SampleError{unique[i], "InternalError", e.what()};
        }
    });
    ReportSection s;
    s.kind = kind;
    for (auto& o : outcomes) {
        if (o.record) {
            s.records.push_back(std::move(*o.record));
        }
        if (o.error) {
            s.errors.push_back(std::move(*o.error));
        }
        for (auto& l : o.lines) {
            s.lines.push_back(std::move(l));
        }
        for (auto& sl : o.slices) {
            s.slices.push_back(std::move(sl));
        }
    }
    if (s.records.empty()) {
        std::string msg = "all " + std::to_string(unique.size()) + " " + kind + " samples failed";
        for (const auto& e : s.errors) {
            msg += "\n  " + e.id + ": " + e.message;
        }
        fail(ErrorCode::NoSamples, msg);
    }
    return s;
}

inline const char* axis_name(int c) { return c == 0 ? "x" : c == 1 ? "y" : "z"; }

/// Adds `prefix.quantity` (scalars) or `prefix.quantity.{x,y,z}` metrics.
inline void put_components(MetricRecord& m, const std::string& prefix, const std::string& quantity,
                           const std::vector<double>& values)
{
    if (values.size() == 1) {
        m[prefix + "." + quantity] = values[0];
        return;
    }
    for (std::size_t c = 0; c < values.size(); ++c) {
        m[prefix + "." + quantity + "." + axis_name(static_cast<int>(c))] = values[c];
    }
}

/// Cell-associated view of a surface pair restricted to the polygon block
/// (cell data lists verts before polys); point data is averaged onto polygons.
inline FieldPair polygon_pair(const PolySurface& s, const FieldPair& p)
{
    FieldPair out;
    out.name = p.name;
    out.components = p.components;
    out.association = Association::Cell;
    const auto comps = static_cast<std::size_t>(p.components);
    if (p.association == Association::Cell) {
        const std::size_t skip = s.verts.size() * comps;
        out.true_values.assign(p.true_values.begin() + static_cast<std::ptrdiff_t>(skip), p.true_values.end());
        out.pred_values.assign(p.pred_values.begin() + static_cast<std::ptrdiff_t>(skip), p.pred_values.end());
    } else {
        out.true_values = point_to_cell(s.polys, p.true_values, p.components);
        out.pred_values = point_to_cell(s.polys, p.pred_values, p.components);
    }
    return out;
}

/// Polygon-block values of a single (true-only) surface array.
inline std::vector<double> polygon_values(const PolySurface& s, const std::string& name, int components)
{
    if (const auto* a = s.cell_fields.find(name)) {
        if (a->components != components) {
            fail(ErrorCode::LengthMismatch, "array '" + name + "' has the wrong component count");
        }
        const std::size_t skip = s.verts.size() * static_cast<std::size_t>(components);
        return {a->values.begin() + static_cast<std::ptrdiff_t>(skip), a->values.end()};
    }
    if (const auto* a = s.point_fields.find(name)) {
        if (a->components != components) {
            fail(ErrorCode::LengthMismatch, "array '" + name + "' has the wrong component count");
        }
        return point_to_cell(s.polys, a->values, components);
    }
    fail(ErrorCode::MissingField, name);
}

inline const DataArray& point_array(const PolySurface& s, const std::string& name, int components,
                                    std::size_t count)
{
    const auto* a = s.point_fields.find(name);
    if (!a) {
        fail(ErrorCode::MissingField, name);
    }
    if (a->components != components || a->tuples() != count) {
        fail(ErrorCode::LengthMismatch, "point array '" + name + "' has the wrong shape");
    }
    return *a;
}

inline void put_force_metrics(MetricRecord& m, const ForceBreakdown& t, const ForceBreakdown& p)
{
    m["drag_abs_err"] = std::abs(p.drag - t.drag);
    m["lift_abs_err"] = std::abs(p.lift - t.lift);
}

} // namespace bench_detail

/// Evaluates one surface sample: L2 and area-weighted L2 of every mapped
/// field, true and predicted forces, and (when u_ref is set) centerlines.
inline void evaluate_surface_sample(const BenchConfig& cfg, const std::string& id, SampleOutcome& out)
{
    using namespace bench_detail;
    const PolySurface surface = read_vtp(cfg.sample_path(cfg.surface.file_pattern, id).string());
    const auto pairs = pair_fields(surface, cfg.surface.fields);
    const CellGeometry geom = cell_geometry(surface, DegeneratePolicy::Exclude);

    SampleRecord rec;
    rec.id = id;
    rec.metrics["cells"] = static_cast<double>(geom.size());
    rec.metrics["degenerate_cells"] = static_cast<double>(geom.degenerate.size());
    for (const auto& pair : pairs) {
        put_components(rec.metrics, "l2", pair.name, relative_l2(pair));
        const FieldPair cells = polygon_pair(surface, pair);
        put_components(rec.metrics, "area_l2", pair.name, area_weighted_relative_l2(cells, geom.areas));
    }

    const FieldPair pressure = polygon_pair(surface, find_pair(pairs, cfg.surface.pressure_quantity));
    if (pressure.components != 1) {
        fail(ErrorCode::LengthMismatch, "pressure must be a scalar field");
    }
    std::vector<double> shear_t;
    std::vector<double> shear_p;
    if (cfg.surface.fields.count(cfg.surface.shear_quantity)) {
        const FieldPair shear = polygon_pair(surface, find_pair(pairs, cfg.surface.shear_quantity));
        if (shear.components != 3) {
            fail(ErrorCode::LengthMismatch, "wall shear must be a 3-component field");
        }
        shear_t = shear.true_values;
        shear_p = shear.pred_values;
    }
    rec.force_true = integrate_surface_forces(pressure.true_values, shear_t, geom.areas, geom.normals, cfg.flow);
    rec.force_pred = integrate_surface_forces(pressure.pred_values, shear_p, geom.areas, geom.normals, cfg.flow);
    put_force_metrics(rec.metrics, *rec.force_true, *rec.force_pred);

    if (cfg.surface.centerlines && cfg.flow.u_ref) {
        auto cl = extract_centerline(surface, geom, pressure, cfg.flow, cfg.surface.centerline);
        cl.top.label = "centerline_top";
        cl.bottom.label = "centerline_bottom";
        out.lines.push_back({id, std::move(cl.top), true});
        out.lines.push_back({id, std::move(cl.bottom), true});
    }
    out.record = std::move(rec);
}

inline ReportSection run_surface_benchmark(const BenchConfig& cfg, const std::vector<std::string>& ids)
{
    auto s = bench_detail::run_samples("surface", ids, cfg.jobs, [&](const std::string& id, SampleOutcome& out) {
        evaluate_surface_sample(cfg, id, out);
    });
    finalize_section(s, cfg.surface.ensemble_bins);
    return s;
}

/// Donor positions for a field association on a volume grid.
inline std::vector<Vec3> donor_points(const UnstructuredGrid& grid, Association a)
{
    return a == Association::Cell ? cell_centers(grid) : grid.points;
}

/// Evaluates one volume sample: per-component L2, probe lines, plane slices
/// and (optionally) continuity and momentum residuals of truth and prediction.
inline void evaluate_volume_sample(const BenchConfig& cfg, const std::string& id, SampleOutcome& out)
{
    using namespace bench_detail;
    const UnstructuredGrid grid = read_vtu(cfg.sample_path(cfg.volume.file_pattern, id).string());
    const auto pairs = pair_fields(grid, cfg.volume.fields);

    SampleRecord rec;
    rec.id = id;
    rec.metrics["cells"] = static_cast<double>(grid.cell_count());
    for (const auto& pair : pairs) {
        put_components(rec.metrics, "l2", pair.name, relative_l2(pair));
    }

    std::unique_ptr<SpatialIndex> cell_index;
    std::unique_ptr<SpatialIndex> point_index;
    auto index_for = [&](Association a) -> const SpatialIndex& {
        auto& slot = a == Association::Cell ? cell_index : point_index;
        if (!slot) {
            slot = std::make_unique<SpatialIndex>(donor_points(grid, a));
        }
        return *slot;
    };

    for (const auto& probe : cfg.volume.probes) {
        const auto& pair = find_pair(pairs, probe.quantity);
        if (probe.component < 0 || probe.component >= pair.components) {
            fail(ErrorCode::InvalidConfig, "probe '" + probe.name + "' selects a missing component");
        }
        Polyline line = probe_line(index_for(pair.association), pair, probe.component, probe.start, probe.end,
                                   probe.samples, cfg.idw);
        line.label = probe.name;
        out.lines.push_back({id, std::move(line), false});
    }
    for (const auto& slice : cfg.volume.slices) {
        const auto& pair = find_pair(pairs, slice.quantity);
        PlaneGrid g = slice_plane_resample(index_for(pair.association), pair, slice.plane, slice.nu, slice.nv,
                                           cfg.idw, slice.max_radius);
        rec.metrics["slice." + slice.name + ".masked_fraction"] = g.masked_fraction();
        out.slices.push_back({id, slice.name, std::move(g)});
    }

    if (cfg.volume.residuals) {
        const auto& vel = find_pair(pairs, cfg.volume.velocity_quantity);
        const auto& prs = find_pair(pairs, cfg.volume.pressure_quantity);
        if (vel.components != 3 || prs.components != 1) {
            fail(ErrorCode::LengthMismatch, "residuals need 3-component velocity and scalar pressure");
        }
        // Residuals live at cell centers; point data is averaged onto cells first.
        auto at_cells = [&](const std::vector<double>& v, const FieldPair& f) {
            return f.association == Association::Cell ? v : point_to_cell(grid.cells, v, f.components);
        };
        const SpatialIndex& index = index_for(Association::Cell);
        const std::size_t k = cfg.volume.residual_k;
        ResidualField cont_pred;
        ResidualField mom_pred;
        for (int which = 0; which < 2; ++which) {
            const bool pred = which == 1;
            const auto u = at_cells(pred ? vel.pred_values : vel.true_values, vel);
            const auto p = at_cells(pred ? prs.pred_values : prs.true_values, prs);
            auto cont = continuity_residual(index, u, k);
            auto mom = momentum_residual(index, u, p, cfg.flow, cfg.volume.nu, k);
            const std::string tag = pred ? "pred" : "true";
            for (const auto& [name, field] : {std::pair{"continuity", &cont}, std::pair{"momentum", &mom}}) {
                const auto sum = residual_summary(*field);
                const std::string base = std::string("residual.") + name + "." + tag;
                rec.metrics[base + ".mean_abs"] = sum.mean_abs;
                rec.metrics[base + ".rms"] = sum.rms;
                rec.metrics[base + ".max_abs"] = sum.max_abs;
                rec.metrics[base + ".masked"] = static_cast<double>(sum.masked_count);
            }
            if (pred) {
                cont_pred = std::move(cont);
                mom_pred = std::move(mom);
            }
        }
        if (cfg.volume.write_residual_vtu) {
            UnstructuredGrid outg = grid;
            FieldSet& target = outg.cell_fields;
            target.set("continuityResidualPred", 1, cont_pred.values);
            target.set("momentumResidualPred", 3, mom_pred.values);
            std::vector<double> mask(cont_pred.masked.begin(), cont_pred.masked.end());
            for (std::size_t i = 0; i < mask.size(); ++i) {
                mask[i] = std::max(mask[i], static_cast<double>(mom_pred.masked[i]));
            }
            target.set("residualMask", 1, std::move(mask));
            const auto dir = cfg.resolve(cfg.out_dir) / "residuals";
            std::filesystem::create_directories(dir);
            write_vtu(outg, (dir / (emit_detail::slug(id) + ".vtu")).string());
        }
    }
    out.record = std::move(rec);
}

inline ReportSection run_volume_benchmark(const BenchConfig& cfg, const std::vector<std::string>& ids)
{
    auto s = bench_detail::run_samples("volume", ids, cfg.jobs, [&](const std::string& id, SampleOutcome& out) {
        evaluate_volume_sample(cfg, id, out);
    });
    finalize_section(s, cfg.volume.ensemble_bins);
    return s;
}

/// Point-cloud validation of one sample. The cloud handed to the external
/// model is regenerated from the STL with the configured size and seed; the
/// returned cloud must hold exactly that many points, and its predicted
/// fields are integrated with the regenerated normals and A_total / n weights.
/// Ground truth comes from integrating the true fields on the surface mesh.
inline void evaluate_pointcloud_sample(const BenchConfig& cfg, const std::string& id, SampleOutcome& out)
{
    using namespace bench_detail;
    const auto& pc = cfg.pointcloud;
    const TriangleSoup soup = read_stl(cfg.sample_path(pc.stl_pattern, id).string());
    const SurfacePointCloud cloud = sample_surface_uniform(soup, pc.n_points, pc.seed);
    const PolySurface returned = read_vtp(cfg.sample_path(pc.cloud_pattern, id).string());
    if (returned.points.size() != cloud.size()) {
        fail(ErrorCode::PointCountMismatch, "emitted " + std::to_string(cloud.size()) + " points, returned cloud has " +
                                                std::to_string(returned.points.size()));
    }
    const auto& p_pred = point_array(returned, pc.pressure_name, 1, cloud.size());
    std::vector<double> shear_pred;
    if (!pc.shear_name.empty()) {
        shear_pred = point_array(returned, pc.shear_name, 3, cloud.size()).values;
    }

    const std::string mesh_pattern = pc.mesh_pattern.empty() ? cfg.surface.file_pattern : pc.mesh_pattern;
    const PolySurface mesh = read_vtp(cfg.sample_path(mesh_pattern, id).string());
    const CellGeometry geom = cell_geometry(mesh, DegeneratePolicy::Exclude);
    const auto& pnames = cfg.surface.fields.at(cfg.surface.pressure_quantity);
    const auto p_true = polygon_values(mesh, pnames.true_name, 1);
    std::vector<double> shear_true;
    if (!pc.shear_name.empty()) {
        auto it = cfg.surface.fields.find(cfg.surface.shear_quantity);
        if (it == cfg.surface.fields.end()) {
            fail(ErrorCode::InvalidConfig, "point-cloud shear needs a surface mapping for '" +
                                               cfg.surface.shear_quantity + "'");
        }
        shear_true = polygon_values(mesh, it->second.true_name, 3);
    }

    SampleRecord rec;
    rec.id = id;
    rec.force_true = integrate_surface_forces(p_true, shear_true, geom.areas, geom.normals, cfg.flow);
    rec.force_pred = integrate_cloud_forces(p_pred.values, shear_pred, cloud.normals, cloud.area_per_point, cfg.flow);
    rec.metrics["points"] = static_cast<double>(cloud.size());
    rec.metrics["area_per_point"] = cloud.area_per_point;
    rec.metrics["stl_area"] = cloud.total_area;
    put_force_metrics(rec.metrics, *rec.force_true, *rec.force_pred);
    out.record = std::move(rec);
}

inline ReportSection run_pointcloud_validation(const BenchConfig& cfg, const std::vector<std::string>& ids)
{
    auto s = bench_detail::run_samples("pointcloud", ids, cfg.jobs, [&](const std::string& id, SampleOutcome& out) {
        evaluate_pointcloud_sample(cfg, id, out);
    });
    finalize_section(s, 0);
    return s;
}

/// Writes the cloud that the external model should predict on, for each
/// sample, as <out>/<id>.vtp (points, "Normals", "Area").
inline void emit_sample_clouds(const BenchConfig& cfg, const std::vector<std::string>& ids,
                               const std::filesystem::path& out_dir)
{
    std::filesystem::create_directories(out_dir);
    std::vector<std::exception_ptr> failures(ids.size());
    parallel_for(ids.size(), cfg.jobs, [&](std::size_t i) {
        try {
            const auto soup = read_stl(cfg.sample_path(cfg.pointcloud.stl_pattern, ids[i]).string());
            const auto cloud = sample_surface_uniform(soup, cfg.pointcloud.n_points, cfg.pointcloud.seed);
            write_vtp(cloud_to_polydata(cloud), (out_dir / (emit_detail::slug(ids[i]) + ".vtp")).string());
        } catch (...) {
            failures[i] = std::current_exception();
        }
    });
    for (auto& f : failures) {
        if (f) {
            std::rethrow_exception(f);
        }
    }
}

} // namespace aerobench
