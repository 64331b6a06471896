#pragma once

#include <aerobench/core.hpp>
#include <aerobench/spatial_index.hpp>

#include <cmath>
#include <span>
#include <vector>

namespace aerobench {

struct IdwOptions
{
    std::size_t k = 4;
    double power = 2.0;
};

/// Distance below which a target is treated as coincident with a source.
inline constexpr double kCoincidentDistance = 1e-12;

/// k-NN inverse-distance weighting: value = sum(w_i v_i) / sum(w_i) with
/// w_i = d_i^-power. A source closer than kCoincidentDistance is passed
/// through exactly. `values` holds `components` entries per source point.
inline std::vector<double> interpolate_idw(const SpatialIndex& index, std::span<const double> values, int components,
                                           std::span<const Vec3> targets, const IdwOptions& opt = {})
{
    if (opt.k == 0 || !(opt.power > 0.0)) {
        fail(ErrorCode::InvalidArgument, "IDW needs k >= 1 and power > 0");
    }
    if (values.size() != index.size() * static_cast<std::size_t>(components)) {
        fail(ErrorCode::LengthMismatch, "IDW source values do not match the indexed point count");
    }
    std::vector<double> out(targets.size() * static_cast<std::size_t>(components), 0.0);
    SpatialIndex::Neighbors nb;
    for (std::size_t t = 0; t < targets.size(); ++t) {
        index.knn(targets[t], opt.k, nb);
        double* dst = out.data() + t * components;
        if (nb.distances.front() < kCoincidentDistance) {
            for (int c = 0; c < components; ++c) {
                dst[c] = values[nb.indices.front() * components + c];
            }
            continue;
        }
        double wsum = 0.0;
        for (std::size_t j = 0; j < nb.indices.size(); ++j) {
            const double w = opt.power == 2.0 ? 1.0 / (nb.distances[j] * nb.distances[j])
                                              : std::pow(nb.distances[j], -opt.power);
            wsum += w;
            for (int c = 0; c < components; ++c) {
                dst[c] += w * values[nb.indices[j] * components + c];
            }
        }
        for (int c = 0; c < components; ++c) {
            dst[c] /= wsum;
        }
    }
    return out;
}

inline std::vector<double> interpolate_idw(std::vector<Vec3> source_points, std::span<const double> values,
                                           int components, std::span<const Vec3> targets, const IdwOptions& opt = {})
{
    const SpatialIndex index(std::move(source_points));
    return interpolate_idw(index, values, components, targets, opt);
}

} // namespace aerobench
