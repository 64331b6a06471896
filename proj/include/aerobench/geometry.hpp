#pragma once

#include <aerobench/core.hpp>
#include <aerobench/mesh.hpp>

#include <span>
#include <vector>

namespace aerobench {

enum class DegeneratePolicy
{
    Throw,   ///< first zero-area polygon raises DegenerateCell
    Exclude, ///< zero-area polygons get area 0 and a zero normal, and are listed
};

struct CellGeometry
{
    std::vector<Vec3> centers;
    std::vector<double> areas;
    std::vector<Vec3> normals;
    std::vector<std::size_t> degenerate;

    std::size_t size() const { return areas.size(); }
};

/// Newell area vector of a (possibly non-planar) polygon: half the sum of
/// edge cross products, taken about the vertex mean. |result| is the area.
inline Vec3 newell_area_vector(std::span<const Vec3> vertices, const Vec3& center)
{
    Vec3 sum;
    const std::size_t n = vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        sum += cross(vertices[i] - center, vertices[(i + 1) % n] - center);
    }
    return sum * 0.5;
}

/// Per-polygon centers (vertex mean), areas and unit normals. Normals follow
/// the right-hand rule of the stored vertex order.
inline CellGeometry cell_geometry(const PolySurface& surface, DegeneratePolicy policy = DegeneratePolicy::Throw)
{
    CellGeometry g;
    const std::size_t n = surface.polys.size();
    g.centers.resize(n);
    g.areas.resize(n);
    g.normals.resize(n);
    std::vector<Vec3> verts;
    for (std::size_t i = 0; i < n; ++i) {
        auto ids = surface.polys.cell(i);
        verts.clear();
        Vec3 center;
        for (auto id : ids) {
            verts.push_back(surface.points[static_cast<std::size_t>(id)]);
            center += verts.back();
        }
        center = center / static_cast<double>(verts.size());
        double scale = 0.0;
        for (const auto& v : verts) {
            scale = std::max(scale, norm2(v - center));
        }
        const Vec3 area_vec = ids.size() >= 3 ? newell_area_vector(verts, center) : Vec3{};
        const double area = norm(area_vec);
        g.centers[i] = center;
        if (!(area > 1e-12 * scale) || scale == 0.0) {
            if (policy == DegeneratePolicy::Throw) {
                fail(ErrorCode::DegenerateCell, "polygon " + std::to_string(i) + " has zero area");
            }
            g.degenerate.push_back(i);
            g.areas[i] = 0.0;
            g.normals[i] = Vec3{};
            continue;
        }
        g.areas[i] = area;
        g.normals[i] = area_vec / area;
    }
    return g;
}

inline double total_area(const PolySurface& surface)
{
    const auto g = cell_geometry(surface, DegeneratePolicy::Exclude);
    double sum = 0.0;
    for (double a : g.areas) {
        sum += a;
    }
    return sum;
}

inline double triangle_area(const std::array<Vec3, 3>& t)
{
    return 0.5 * norm(cross(t[1] - t[0], t[2] - t[0]));
}

} // namespace aerobench
