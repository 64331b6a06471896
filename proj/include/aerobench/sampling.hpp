#pragma once

#include <aerobench/core.hpp>
#include <aerobench/geometry.hpp>
#include <aerobench/mesh.hpp>
#include <aerobench/random.hpp>

#include <algorithm>
#include <cstdint>
#include <vector>

namespace aerobench {

/// Surface represented by points only. Every point carries the same
/// quadrature weight: total surface area divided by the point count.
struct SurfacePointCloud
{
    std::vector<Vec3> positions;
    std::vector<Vec3> normals;
    std::vector<std::size_t> source_facet;
    double area_per_point = 0.0;
    double total_area = 0.0;
    std::size_t degenerate_facets = 0;
    FieldSet fields;

    std::size_t size() const { return positions.size(); }
};

/// Draws `n` points uniformly over the soup's surface. Each point picks a
/// facet with probability proportional to its area (one uniform01 draw
/// scaled by the total area, located in the cumulative area table), then a
/// position inside it by square-root barycentric mapping of two more draws.
/// Zero-area facets are never selected and are only counted.
inline SurfacePointCloud sample_surface_uniform(const TriangleSoup& soup, std::size_t n, std::uint64_t seed)
{
    if (soup.triangles.empty()) {
        fail(ErrorCode::ZeroTriangles, "cannot sample an empty triangle soup");
    }
    if (n == 0) {
        fail(ErrorCode::InvalidArgument, "sample count must be at least 1");
    }

    std::vector<double> cumulative(soup.size());
    std::vector<bool> degenerate(soup.size(), false);
    for (auto d : soup.degenerate) {
        degenerate[d] = true;
    }
    double total = 0.0;
    std::size_t last_valid = 0;
    SurfacePointCloud cloud;
    for (std::size_t t = 0; t < soup.size(); ++t) {
        if (!degenerate[t]) {
            total += triangle_area(soup.triangles[t]);
            last_valid = t;
        } else {
            ++cloud.degenerate_facets;
        }
        cumulative[t] = total;
    }
    if (!(total > 0.0)) {
        fail(ErrorCode::ZeroTriangles, "every facet of the soup is degenerate");
    }

    cloud.total_area = total;
    cloud.area_per_point = total / static_cast<double>(n);
    cloud.positions.resize(n);
    cloud.normals.resize(n);
    cloud.source_facet.resize(n);

    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const double target = uniform01(rng) * total;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
        std::size_t t = static_cast<std::size_t>(it - cumulative.begin());
        if (t >= soup.size()) {
            t = last_valid;
        }
        const double r1 = uniform01(rng);
        const double r2 = uniform01(rng);
        const double s = std::sqrt(r1);
        const auto& tri = soup.triangles[t];
        cloud.positions[i] = (1.0 - s) * tri[0] + (s * (1.0 - r2)) * tri[1] + (s * r2) * tri[2];
        cloud.normals[i] = soup.facet_normals[t];
        cloud.source_facet[i] = t;
    }
    return cloud;
}

/// Vertices-only PolyData carrying "Normals" and "Area" point arrays plus
/// every cloud field, for exchange with external inference pipelines.
inline PolySurface cloud_to_polydata(const SurfacePointCloud& cloud)
{
    PolySurface s;
    s.points = cloud.positions;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        s.verts.push_back({static_cast<std::int64_t>(i)});
    }
    std::vector<double> normals;
    normals.reserve(cloud.size() * 3);
    for (const auto& nrm : cloud.normals) {
        normals.insert(normals.end(), {nrm.x, nrm.y, nrm.z});
    }
    s.point_fields.set("Normals", 3, std::move(normals));
    s.point_fields.set("Area", 1, std::vector<double>(cloud.size(), cloud.area_per_point));
    for (const auto& a : cloud.fields.arrays()) {
        s.point_fields.set(a);
    }
    return s;
}

} // namespace aerobench
