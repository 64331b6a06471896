#pragma once

// 1D and 2D comparison artifacts: surface centerlines, volume line probes,
// plane resampling and cross-sample ensemble statistics.

#include <aerobench/core.hpp>
#include <aerobench/fields.hpp>
#include <aerobench/geometry.hpp>
#include <aerobench/interpolate.hpp>
#include <aerobench/metrics.hpp>
#include <aerobench/spatial_index.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace aerobench {

struct Polyline
{
    std::string label;
    std::vector<double> stations;
    std::vector<double> true_values;
    std::vector<double> pred_values;

    std::size_t size() const { return stations.size(); }
};

struct CenterlineOptions
{
    /// Half-width of the |y| band around the symmetry plane; 0 selects 0.5%
    /// of the body length.
    double band_halfwidth = 0.0;
    std::size_t bins = 200;
};

struct Centerlines
{
    Polyline top;
    Polyline bottom;
    double band_halfwidth = 0.0;
};

/// Pressure coefficient along the y = 0 symmetry plane. Cells whose centers
/// lie within the band are binned by x; in each bin the highest cell feeds
/// the top line and the lowest the bottom line. Stations are x normalized by
/// the body length.
inline Centerlines extract_centerline(const PolySurface& surface, const CellGeometry& geom, const FieldPair& pressure,
                                      const FlowConditions& fc, const CenterlineOptions& opt = {})
{
    if (pressure.components != 1 || pressure.association != Association::Cell ||
        pressure.tuples() != geom.size()) {
        fail(ErrorCode::LengthMismatch, "centerline pressure must be a cell scalar matching the polygons");
    }
    if (opt.bins == 0) {
        fail(ErrorCode::InvalidArgument, "centerline needs at least one bin");
    }
    double x_min = std::numeric_limits<double>::infinity();
    double x_max = -x_min;
    for (const auto& p : surface.points) {
        x_min = std::min(x_min, p.x);
        x_max = std::max(x_max, p.x);
    }
    const double length = x_max - x_min;
    if (!(length > 0.0)) {
        fail(ErrorCode::InvalidArgument, "surface has zero streamwise extent");
    }
    Centerlines out;
    out.band_halfwidth = opt.band_halfwidth > 0.0 ? opt.band_halfwidth : 0.005 * length;
    const double q = fc.dynamic_pressure();
    const double pscale = fc.pressure_scale();

    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> top(opt.bins, none);
    std::vector<std::size_t> bottom(opt.bins, none);
    const double width = length / static_cast<double>(opt.bins);
    bool any = false;
    for (std::size_t i = 0; i < geom.size(); ++i) {
        const Vec3& c = geom.centers[i];
        if (geom.areas[i] == 0.0 || std::abs(c.y) > out.band_halfwidth) {
            continue;
        }
        any = true;
        auto bin = static_cast<std::size_t>(std::max(0.0, std::floor((c.x - x_min) / width)));
        bin = std::min(bin, opt.bins - 1);
        if (top[bin] == none || c.z > geom.centers[top[bin]].z) {
            top[bin] = i;
        }
        if (bottom[bin] == none || c.z < geom.centers[bottom[bin]].z) {
            bottom[bin] = i;
        }
    }
    if (!any) {
        fail(ErrorCode::EmptyBand, "no cell centers within |y| <= " + std::to_string(out.band_halfwidth));
    }
    auto fill = [&](Polyline& line, const std::vector<std::size_t>& picks, const char* label) {
        line.label = label;
        for (auto i : picks) {
            if (i == none) {
                continue;
            }
            line.stations.push_back((geom.centers[i].x - x_min) / length);
            line.true_values.push_back((pscale * pressure.truth(i) - fc.p_ref) / q);
            line.pred_values.push_back((pscale * pressure.pred(i) - fc.p_ref) / q);
        }
    };
    fill(out.top, top, "top");
    fill(out.bottom, bottom, "bottom");
    return out;
}

/// Samples a field at `n_samples` evenly spaced points from start to end by
/// IDW from the donor points; stations are arc length from start.
inline Polyline probe_line(const SpatialIndex& donors, const FieldPair& pair, int component, const Vec3& start,
                           const Vec3& end, std::size_t n_samples, const IdwOptions& idw = {})
{
    if (n_samples < 2) {
        fail(ErrorCode::InvalidArgument, "a probe line needs at least 2 samples");
    }
    if (pair.tuples() != donors.size()) {
        fail(ErrorCode::LengthMismatch, "probe donors do not match field '" + pair.name + "'");
    }
    std::vector<Vec3> positions(n_samples);
    Polyline line;
    line.label = pair.name;
    const double length = distance(start, end);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(n_samples - 1);
        positions[i] = i + 1 == n_samples ? end : start + t * (end - start);
        line.stations.push_back(t * length);
    }
    std::vector<double> t_comp(pair.tuples());
    std::vector<double> p_comp(pair.tuples());
    for (std::size_t i = 0; i < pair.tuples(); ++i) {
        t_comp[i] = pair.truth(i, component);
        p_comp[i] = pair.pred(i, component);
    }
    line.true_values = interpolate_idw(donors, t_comp, 1, positions, idw);
    line.pred_values = interpolate_idw(donors, p_comp, 1, positions, idw);
    return line;
}

struct Plane
{
    Vec3 origin;
    Vec3 u_axis{1.0, 0.0, 0.0};
    Vec3 v_axis{0.0, 0.0, 1.0};
    double u_length = 1.0;
    double v_length = 1.0;
};

/// Structured nu x nv samples on a plane rectangle. Layout is row-major in
/// v: sample (iu, iv) is at index iv * nu + iu.
struct PlaneGrid
{
    Vec3 origin;
    Vec3 u_axis;
    Vec3 v_axis;
    Vec3 normal;
    std::size_t nu = 0;
    std::size_t nv = 0;
    int components = 1;
    std::vector<Vec3> positions;
    std::vector<double> true_values;
    std::vector<double> pred_values;
    std::vector<std::uint8_t> mask;

    double masked_fraction() const
    {
        std::size_t m = 0;
        for (auto v : mask) {
            m += v;
        }
        return mask.empty() ? 0.0 : static_cast<double>(m) / static_cast<double>(mask.size());
    }
};

/// Resamples a field onto a plane by IDW from the donor points. Samples whose
/// nearest donor is farther than `max_radius` are masked (values left at 0).
inline PlaneGrid slice_plane_resample(const SpatialIndex& donors, const FieldPair& pair, const Plane& plane,
                                      std::size_t nu, std::size_t nv, const IdwOptions& idw, double max_radius)
{
    if (nu < 2 || nv < 2) {
        fail(ErrorCode::InvalidArgument, "plane grids need nu, nv >= 2");
    }
    if (std::abs(norm(plane.u_axis) - 1.0) > 1e-9 || std::abs(norm(plane.v_axis) - 1.0) > 1e-9 ||
        std::abs(dot(plane.u_axis, plane.v_axis)) > 1e-9) {
        fail(ErrorCode::InvalidArgument, "plane axes must be orthonormal");
    }
    if (pair.tuples() != donors.size()) {
        fail(ErrorCode::LengthMismatch, "slice donors do not match field '" + pair.name + "'");
    }
    PlaneGrid g;
    g.origin = plane.origin;
    g.u_axis = plane.u_axis;
    g.v_axis = plane.v_axis;
    g.normal = cross(plane.u_axis, plane.v_axis);
    g.nu = nu;
    g.nv = nv;
    g.components = pair.components;
    g.positions.resize(nu * nv);
    g.mask.assign(nu * nv, 0);
    std::vector<Vec3> live;
    std::vector<std::size_t> live_index;
    SpatialIndex::Neighbors nb;
    for (std::size_t iv = 0; iv < nv; ++iv) {
        for (std::size_t iu = 0; iu < nu; ++iu) {
            const double su = plane.u_length * static_cast<double>(iu) / static_cast<double>(nu - 1);
            const double sv = plane.v_length * static_cast<double>(iv) / static_cast<double>(nv - 1);
            const std::size_t idx = iv * nu + iu;
            g.positions[idx] = plane.origin + su * plane.u_axis + sv * plane.v_axis;
            donors.knn(g.positions[idx], 1, nb);
            if (nb.distances.front() > max_radius) {
                g.mask[idx] = 1;
            } else {
                live.push_back(g.positions[idx]);
                live_index.push_back(idx);
            }
        }
    }
    const std::size_t c = static_cast<std::size_t>(pair.components);
    g.true_values.assign(nu * nv * c, 0.0);
    g.pred_values.assign(nu * nv * c, 0.0);
    if (!live.empty()) {
        const auto t = interpolate_idw(donors, pair.true_values, pair.components, live, idw);
        const auto p = interpolate_idw(donors, pair.pred_values, pair.components, live, idw);
        for (std::size_t j = 0; j < live.size(); ++j) {
            for (std::size_t k = 0; k < c; ++k) {
                g.true_values[live_index[j] * c + k] = t[j * c + k];
                g.pred_values[live_index[j] * c + k] = p[j * c + k];
            }
        }
    }
    return g;
}

struct EnsembleLine
{
    std::string label;
    std::vector<double> stations;
    std::vector<double> mean_true;
    std::vector<double> std_true;
    std::vector<double> mean_pred;
    std::vector<double> std_pred;
    std::vector<std::uint8_t> mask;
    std::size_t line_count = 0;

    double masked_fraction() const
    {
        std::size_t m = 0;
        for (auto v : mask) {
            m += v;
        }
        return mask.empty() ? 0.0 : static_cast<double>(m) / static_cast<double>(mask.size());
    }
};

namespace extract_detail {

/// Linear interpolation of (xs, ys) at x; false when x is outside [xs.front, xs.back].
inline bool resample(const std::vector<double>& xs, const std::vector<double>& ys, double x, double& y)
{
    if (xs.empty() || x < xs.front() || x > xs.back()) {
        return false;
    }
    auto it = std::lower_bound(xs.begin(), xs.end(), x);
    const auto j = static_cast<std::size_t>(it - xs.begin());
    if (xs[j] == x) {
        y = ys[j];
        return true;
    }
    const double t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
    y = ys[j - 1] + t * (ys[j] - ys[j - 1]);
    return true;
}

} // namespace extract_detail

/// Resamples every line (stations normalized to [0, 1]) onto the bin centers
/// (j + 1/2) / n_bins and reports per-bin mean and population std of truth
/// and prediction. Bins not covered by every line are masked.
inline EnsembleLine ensemble_average_lines(const std::vector<Polyline>& lines, std::size_t n_bins)
{
    if (lines.empty() || n_bins == 0) {
        fail(ErrorCode::InvalidArgument, "ensemble averaging needs at least one line and one bin");
    }
    EnsembleLine e;
    e.label = lines.front().label;
    e.line_count = lines.size();
    e.stations.resize(n_bins);
    e.mean_true.assign(n_bins, 0.0);
    e.std_true.assign(n_bins, 0.0);
    e.mean_pred.assign(n_bins, 0.0);
    e.std_pred.assign(n_bins, 0.0);
    e.mask.assign(n_bins, 0);
    std::vector<double> tv(lines.size());
    std::vector<double> pv(lines.size());
    for (std::size_t b = 0; b < n_bins; ++b) {
        const double s = (static_cast<double>(b) + 0.5) / static_cast<double>(n_bins);
        e.stations[b] = s;
        bool covered = true;
        for (std::size_t l = 0; l < lines.size() && covered; ++l) {
            covered = extract_detail::resample(lines[l].stations, lines[l].true_values, s, tv[l]) &&
                      extract_detail::resample(lines[l].stations, lines[l].pred_values, s, pv[l]);
        }
        if (!covered) {
            e.mask[b] = 1;
            continue;
        }
        const auto st = summarize(tv);
        const auto sp = summarize(pv);
        e.mean_true[b] = st.mean;
        e.std_true[b] = st.std;
        e.mean_pred[b] = sp.mean;
        e.std_pred[b] = sp.std;
    }
    return e;
}

} // namespace aerobench
