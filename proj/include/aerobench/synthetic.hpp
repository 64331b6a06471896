#pragma once

// Generated geometry and analytic flow fields for tests, demos and desk-scale
// end-to-end runs: icospheres, a box-shaped "car" body with ground-truth and
// perturbed predicted fields, structured hex volume grids and matching STL
// and point-cloud files.

#include <aerobench/core.hpp>
#include <aerobench/mesh.hpp>
#include <aerobench/random.hpp>
#include <aerobench/sampling.hpp>
#include <aerobench/stl.hpp>
#include <aerobench/vtk_xml.hpp>

#include "json.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace aerobench::synthetic {

/// Unit-radius icosahedron refined `level` times (20 * 4^level outward-facing
/// triangles), scaled to `radius`.
inline PolySurface icosphere(int level, double radius = 1.0)
{
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> pts{{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0}, {0, -1, t},  {0, 1, t},
                          {0, -1, -t}, {0, 1, -t}, {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
    for (auto& p : pts) {
        p = normalized(p);
    }
    std::vector<std::array<std::int64_t, 3>> tris{
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
        {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
        {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
    for (int l = 0; l < level; ++l) {
        std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> mid;
        auto midpoint = [&](std::int64_t a, std::int64_t b) {
            const auto key = std::minmax(a, b);
            auto it = mid.find(key);
            if (it != mid.end()) {
                return it->second;
            }
            pts.push_back(normalized(pts[static_cast<std::size_t>(a)] + pts[static_cast<std::size_t>(b)]));
            const auto id = static_cast<std::int64_t>(pts.size() - 1);
            mid.emplace(key, id);
            return id;
        };
        std::vector<std::array<std::int64_t, 3>> next;
        next.reserve(tris.size() * 4);
        for (const auto& tr : tris) {
            const auto a = midpoint(tr[0], tr[1]);
            const auto b = midpoint(tr[1], tr[2]);
            const auto c = midpoint(tr[2], tr[0]);
            next.push_back({tr[0], a, c});
            next.push_back({tr[1], b, a});
            next.push_back({tr[2], c, b});
            next.push_back({a, b, c});
        }
        tris = std::move(next);
    }
    PolySurface s;
    for (const auto& p : pts) {
        s.points.push_back(radius * p);
    }
    for (const auto& tr : tris) {
        s.polys.push_back({tr[0], tr[1], tr[2]});
    }
    return s;
}

/// Triangulates every polygon of a surface as a fan.
inline TriangleSoup surface_to_soup(const PolySurface& s)
{
    std::vector<std::array<Vec3, 3>> tris;
    for (std::size_t i = 0; i < s.polys.size(); ++i) {
        auto ids = s.polys.cell(i);
        for (std::size_t k = 1; k + 1 < ids.size(); ++k) {
            tris.push_back({s.points[static_cast<std::size_t>(ids[0])], s.points[static_cast<std::size_t>(ids[k])],
                            s.points[static_cast<std::size_t>(ids[k + 1])]});
        }
    }
    return make_triangle_soup(tris);
}

struct CarBox
{
    double x0 = -1.0;
    double length = 4.5;
    double width = 1.8;
    double z0 = -0.2;
    double height = 1.3;
    /// Target quad edge length.
    double spacing = 0.0255;

    Vec3 lo() const { return {x0, -0.5 * width, z0}; }
    Vec3 hi() const { return {x0 + length, 0.5 * width, z0 + height}; }
};

/// Closed, outward-oriented quad mesh of the box. Each face has its own
/// point grid, so edges are geometrically (not topologically) shared.
inline PolySurface car_box_surface(const CarBox& box)
{
    PolySurface s;
    const Vec3 lo = box.lo();
    const Vec3 hi = box.hi();
    // Each face: origin corner, two edge vectors whose cross product points outward.
    struct Face
    {
        Vec3 origin, a, b;
    };
    const Vec3 ex{hi.x - lo.x, 0, 0};
    const Vec3 ey{0, hi.y - lo.y, 0};
    const Vec3 ez{0, 0, hi.z - lo.z};
    const std::array<Face, 6> faces{{
        {lo, ez, ey},                     // x = lo (front), normal -x
        {{hi.x, lo.y, lo.z}, ey, ez},     // x = hi (back), normal +x
        {lo, ex, ez},                     // y = lo, normal -y
        {{lo.x, hi.y, lo.z}, ez, ex},     // y = hi, normal +y
        {lo, ey, ex},                     // z = lo (underbody), normal -z
        {{lo.x, lo.y, hi.z}, ex, ey},     // z = hi (roof), normal +z
    }};
    for (const auto& f : faces) {
        const auto na = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(norm(f.a) / box.spacing)));
        const auto nb = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(norm(f.b) / box.spacing)));
        const auto base = static_cast<std::int64_t>(s.points.size());
        for (std::size_t j = 0; j <= nb; ++j) {
            for (std::size_t i = 0; i <= na; ++i) {
                s.points.push_back(f.origin + (static_cast<double>(i) / static_cast<double>(na)) * f.a +
                                   (static_cast<double>(j) / static_cast<double>(nb)) * f.b);
            }
        }
        const auto row = static_cast<std::int64_t>(na + 1);
        for (std::size_t j = 0; j < nb; ++j) {
            for (std::size_t i = 0; i < na; ++i) {
                const auto p = base + static_cast<std::int64_t>(j) * row + static_cast<std::int64_t>(i);
                s.polys.push_back({p, p + 1, p + 1 + row, p + row});
            }
        }
    }
    return s;
}

/// Smooth analytic surface fields for a box sample, plus the perturbation
/// that turns them into a "prediction".
struct SurfaceFieldModel
{
    CarBox box;
    double q = 0.5 * 1.0 * 38.0 * 38.0;
    double tau = 2.0;
    double eps = 0.05;
    double phase = 0.0;
    double bias = 0.0;

    double xi(const Vec3& p) const { return (p.x - box.x0) / box.length; }
    double zeta(const Vec3& p) const { return (p.z - box.z0) / box.height; }

    double pressure_true(const Vec3& p) const
    {
        return q * (std::cos(std::numbers::pi * xi(p)) + 0.3 * zeta(p) - 0.1 * p.y * p.y);
    }
    double pressure_pred(const Vec3& p) const
    {
        return pressure_true(p) * (1.0 + eps * std::sin(2.0 * std::numbers::pi * xi(p) + phase)) + bias * q;
    }
    Vec3 shear_true(const Vec3& p) const
    {
        return tau * Vec3{1.0 + 0.5 * xi(p), 0.1 * zeta(p), 0.05 * p.y};
    }
    Vec3 shear_pred(const Vec3& p) const
    {
        return (1.0 + eps * std::cos(2.0 * std::numbers::pi * zeta(p) + phase)) * shear_true(p);
    }
};

/// Attaches pMeanTrim / wallShearStressMeanTrim (true and *Pred) as cell
/// fields evaluated at polygon vertex-mean centers.
inline void attach_surface_fields(PolySurface& s, const SurfaceFieldModel& m)
{
    std::vector<double> pt, pp, st, sp;
    for (std::size_t i = 0; i < s.polys.size(); ++i) {
        Vec3 c;
        auto ids = s.polys.cell(i);
        for (auto id : ids) {
            c += s.points[static_cast<std::size_t>(id)];
        }
        c = c / static_cast<double>(ids.size());
        pt.push_back(m.pressure_true(c));
        pp.push_back(m.pressure_pred(c));
        const Vec3 a = m.shear_true(c);
        const Vec3 b = m.shear_pred(c);
        st.insert(st.end(), {a.x, a.y, a.z});
        sp.insert(sp.end(), {b.x, b.y, b.z});
    }
    s.cell_fields.set("pMeanTrim", 1, std::move(pt));
    s.cell_fields.set("pMeanTrimPred", 1, std::move(pp));
    s.cell_fields.set("wallShearStressMeanTrim", 3, std::move(st));
    s.cell_fields.set("wallShearStressMeanTrimPred", 3, std::move(sp));
}

/// Structured hex grid (VTK_HEXAHEDRON ordering) over [lo, hi].
inline UnstructuredGrid hex_grid(const Vec3& lo, const Vec3& hi, std::size_t nx, std::size_t ny, std::size_t nz)
{
    UnstructuredGrid g;
    for (std::size_t k = 0; k <= nz; ++k) {
        for (std::size_t j = 0; j <= ny; ++j) {
            for (std::size_t i = 0; i <= nx; ++i) {
                g.points.push_back({lo.x + (hi.x - lo.x) * static_cast<double>(i) / static_cast<double>(nx),
                                    lo.y + (hi.y - lo.y) * static_cast<double>(j) / static_cast<double>(ny),
                                    lo.z + (hi.z - lo.z) * static_cast<double>(k) / static_cast<double>(nz)});
            }
        }
    }
    auto id = [&](std::size_t i, std::size_t j, std::size_t k) {
        return static_cast<std::int64_t>((k * (ny + 1) + j) * (nx + 1) + i);
    };
    for (std::size_t k = 0; k < nz; ++k) {
        for (std::size_t j = 0; j < ny; ++j) {
            for (std::size_t i = 0; i < nx; ++i) {
                g.cells.push_back({id(i, j, k), id(i + 1, j, k), id(i + 1, j + 1, k), id(i, j + 1, k),
                                   id(i, j, k + 1), id(i + 1, j, k + 1), id(i + 1, j + 1, k + 1), id(i, j + 1, k + 1)});
                g.types.push_back(static_cast<std::uint8_t>(CellType::Hexahedron));
            }
        }
    }
    return g;
}

/// Smooth wake-like volume fields: a Gaussian velocity deficit behind the
/// body and a matching pressure dip. The prediction scales the deficit and
/// the pressure by (1 + eps).
struct VolumeFieldModel
{
    CarBox box;
    double u_inf = 38.0;
    double eps = 0.05;

    Vec3 velocity(const Vec3& p, double scale) const
    {
        const double xr = (p.x - box.x0) / box.length;
        const double zc = box.z0 + 0.5 * box.height;
        const double r2 = (p.y * p.y) / (box.width * box.width) + (p.z - zc) * (p.z - zc) / (box.height * box.height);
        const double deficit = scale * 0.6 * std::exp(-2.0 * r2) / (1.0 + std::exp(-4.0 * (xr - 0.8)));
        return {u_inf * (1.0 - deficit), 0.02 * u_inf * p.y * deficit, -0.03 * u_inf * (p.z - zc) * deficit};
    }
    double pressure(const Vec3& p, double scale) const
    {
        const Vec3 u = velocity(p, 1.0);
        return scale * 0.5 * (u_inf * u_inf - dot(u, u));
    }
};

inline void attach_volume_fields(UnstructuredGrid& g, const VolumeFieldModel& m)
{
    std::vector<double> ut, up, pt, pp;
    for (const auto& p : g.points) {
        const Vec3 a = m.velocity(p, 1.0);
        const Vec3 b = m.velocity(p, 1.0 + m.eps);
        ut.insert(ut.end(), {a.x, a.y, a.z});
        up.insert(up.end(), {b.x, b.y, b.z});
        pt.push_back(m.pressure(p, 1.0));
        pp.push_back(m.pressure(p, 1.0 + m.eps));
    }
    g.point_fields.set("UMeanTrim", 3, std::move(ut));
    g.point_fields.set("UMeanTrimPred", 3, std::move(up));
    g.point_fields.set("pMeanTrim", 1, std::move(pt));
    g.point_fields.set("pMeanTrimPred", 1, std::move(pp));
}

/// Point cloud predicted "by an external model": the sampler's cloud with
/// pressurePred / wallShearStressPred evaluated from the analytic model.
inline PolySurface predicted_cloud(const SurfacePointCloud& cloud, const SurfaceFieldModel& m)
{
    SurfacePointCloud c = cloud;
    std::vector<double> p, s;
    for (const auto& x : c.positions) {
        p.push_back(m.pressure_pred(x));
        const Vec3 t = m.shear_pred(x);
        s.insert(s.end(), {t.x, t.y, t.z});
    }
    c.fields.set("pressurePred", 1, std::move(p));
    c.fields.set("wallShearStressPred", 3, std::move(s));
    return cloud_to_polydata(c);
}

struct DatasetOptions
{
    std::size_t samples = 20;
    double spacing = 0.0255;
    std::array<std::size_t, 3> volume_cells{40, 16, 16};
    std::size_t cloud_points = 100000;
    std::uint64_t cloud_seed = 0;
    std::uint64_t seed = 7;
    bool volume = true;
    bool pointcloud = true;
};

/// Per-sample geometry and field models; deterministic in (options.seed, index).
struct SampleModel
{
    std::string id;
    SurfaceFieldModel surface;
    VolumeFieldModel volume;
};

inline SampleModel sample_model(const DatasetOptions& opt, std::size_t index)
{
    Rng rng(opt.seed * 1000003ull + index);
    SampleModel m;
    m.id = "run_" + std::to_string(index + 1);
    CarBox box;
    box.length = 4.2 + 0.6 * uniform01(rng);
    box.width = 1.7 + 0.2 * uniform01(rng);
    box.height = 1.2 + 0.3 * uniform01(rng);
    box.spacing = opt.spacing;
    m.surface.box = box;
    m.surface.eps = 0.02 + 0.08 * uniform01(rng);
    m.surface.phase = 2.0 * std::numbers::pi * uniform01(rng);
    m.surface.bias = 0.02 * (uniform01(rng) - 0.5);
    m.volume.box = box;
    m.volume.eps = 0.02 + 0.06 * uniform01(rng);
    return m;
}

inline Vec3 volume_lo() { return {-2.0, -1.5, -0.3}; }
inline Vec3 volume_hi() { return {6.0, 1.5, 2.0}; }

/// Writes <root>/<id>/{boundary.vtp, volume.vtu, body.stl, cloud_pred.vtp}
/// for every sample and returns the sample ids.
inline std::vector<std::string> write_dataset(const std::filesystem::path& root, const DatasetOptions& opt)
{
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < opt.samples; ++i) {
        const SampleModel m = sample_model(opt, i);
        const auto dir = root / m.id;
        std::filesystem::create_directories(dir);
        PolySurface surface = car_box_surface(m.surface.box);
        attach_surface_fields(surface, m.surface);
        write_vtp(surface, (dir / "boundary.vtp").string());
        if (opt.volume) {
            UnstructuredGrid g = hex_grid(volume_lo(), volume_hi(), opt.volume_cells[0], opt.volume_cells[1],
                                          opt.volume_cells[2]);
            attach_volume_fields(g, m.volume);
            write_vtu(g, (dir / "volume.vtu").string());
        }
        if (opt.pointcloud) {
            const TriangleSoup soup = surface_to_soup(surface);
            write_stl(soup, (dir / "body.stl").string());
            // Re-read so the cloud is drawn from the float32 STL exactly as the benchmark will.
            const TriangleSoup stored = read_stl((dir / "body.stl").string());
            const auto cloud = sample_surface_uniform(stored, opt.cloud_points, opt.cloud_seed);
            write_vtp(predicted_cloud(cloud, m.surface), (dir / "cloud_pred.vtp").string());
        }
        ids.push_back(m.id);
    }
    return ids;
}

/// Config matching write_dataset's layout and field names.
inline nlohmann::json dataset_config(const std::vector<std::string>& ids, const DatasetOptions& opt)
{
    return {{"data_root", "."},
            {"samples", ids},
            {"flow", {{"rho", 1.0}, {"u_ref", 38.0}, {"a_ref", 2.0}, {"p_ref", 0.0}}},
            {"pointcloud",
             {{"n_points", opt.cloud_points},
              {"seed", opt.cloud_seed},
              {"pressure_name", "pressurePred"},
              {"shear_name", "wallShearStressPred"}}},
            {"output", {{"dir", "bench_out"}, {"formats", {"json", "csv", "svg"}}}}};
}

} // namespace aerobench::synthetic
