#pragma once

#include <aerobench/core.hpp>
#include <aerobench/fields.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace aerobench {

struct FlowConditions
{
    double rho = 1.0;
    std::optional<double> u_ref;
    std::optional<double> a_ref;
    double p_ref = 0.0;
    Vec3 flow_dir{1.0, 0.0, 0.0};
    Vec3 lift_dir{0.0, 0.0, 1.0};
    /// Sign applied to the stored wall-shear field; -1 reads it as the
    /// traction on the fluid.
    double shear_sign = -1.0;
    /// Stored pressure is p/rho (m^2/s^2) and is multiplied by rho first.
    bool pressure_is_kinematic = false;

    void validate() const
    {
        if (!(rho > 0.0)) {
            fail(ErrorCode::InvalidConfig, "rho must be positive");
        }
        if (u_ref && !(*u_ref > 0.0)) {
            fail(ErrorCode::InvalidConfig, "u_ref must be positive");
        }
        if (a_ref && !(*a_ref > 0.0)) {
            fail(ErrorCode::InvalidConfig, "a_ref must be positive");
        }
        if (std::abs(norm(flow_dir) - 1.0) > 1e-9 || std::abs(norm(lift_dir) - 1.0) > 1e-9) {
            fail(ErrorCode::InvalidConfig, "flow_dir and lift_dir must be unit vectors");
        }
        if (std::abs(dot(flow_dir, lift_dir)) > 1e-6) {
            fail(ErrorCode::InvalidConfig, "flow_dir and lift_dir must be orthogonal");
        }
        if (shear_sign != 1.0 && shear_sign != -1.0) {
            fail(ErrorCode::InvalidConfig, "shear_sign must be +1 or -1");
        }
    }

    double pressure_scale() const { return pressure_is_kinematic ? rho : 1.0; }

    /// 1/2 rho U^2; requires u_ref.
    double dynamic_pressure() const
    {
        if (!u_ref) {
            fail(ErrorCode::InvalidConfig, "u_ref is required for normalized quantities");
        }
        return 0.5 * rho * *u_ref * *u_ref;
    }
};

struct ForceBreakdown
{
    Vec3 pressure_force;
    Vec3 viscous_force;
    Vec3 total_force;
    double drag = 0.0;
    double lift = 0.0;
    std::optional<double> cd;
    std::optional<double> cl;
};

// ---------------------------------------------------------------- error norms

namespace metrics_detail {

inline void check_pair(const FieldPair& pair)
{
    if (pair.true_values.empty()) {
        fail(ErrorCode::InvalidArgument, "field '" + pair.name + "' is empty");
    }
    if (pair.true_values.size() != pair.pred_values.size()) {
        fail(ErrorCode::LengthMismatch, "field '" + pair.name + "' true/pred lengths differ");
    }
}

} // namespace metrics_detail

/// ||pred - true||_2 / ||true||_2, one value per component.
inline std::vector<double> relative_l2(const FieldPair& pair)
{
    metrics_detail::check_pair(pair);
    std::vector<double> out(static_cast<std::size_t>(pair.components));
    const std::size_t n = pair.tuples();
    for (int c = 0; c < pair.components; ++c) {
        double num = 0.0;
        double den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = pair.truth(i, c);
            const double e = pair.pred(i, c) - t;
            num += e * e;
            den += t * t;
        }
        if (!(den > 0.0)) {
            fail(ErrorCode::ZeroNorm, "ground truth of '" + pair.name + "' component " + std::to_string(c) +
                                          " is identically zero");
        }
        out[static_cast<std::size_t>(c)] = std::sqrt(num) / std::sqrt(den);
    }
    return out;
}

/// sqrt(sum A_i (pred_i - true_i)^2) / sqrt(sum A_i true_i^2), per component.
inline std::vector<double> area_weighted_relative_l2(const FieldPair& pair, std::span<const double> areas)
{
    metrics_detail::check_pair(pair);
    const std::size_t n = pair.tuples();
    if (areas.size() != n) {
        fail(ErrorCode::LengthMismatch, "field '" + pair.name + "' has " + std::to_string(n) + " tuples but " +
                                            std::to_string(areas.size()) + " areas");
    }
    std::vector<double> out(static_cast<std::size_t>(pair.components));
    for (int c = 0; c < pair.components; ++c) {
        double num = 0.0;
        double den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!(areas[i] >= 0.0)) {
                fail(ErrorCode::InvalidArgument, "negative or non-finite area at cell " + std::to_string(i));
            }
            const double t = pair.truth(i, c);
            const double e = pair.pred(i, c) - t;
            num += areas[i] * e * e;
            den += areas[i] * t * t;
        }
        if (!(den > 0.0)) {
            fail(ErrorCode::ZeroNorm, "area-weighted ground truth of '" + pair.name + "' component " +
                                          std::to_string(c) + " is identically zero");
        }
        out[static_cast<std::size_t>(c)] = std::sqrt(num) / std::sqrt(den);
    }
    return out;
}

// ---------------------------------------------------------------- forces

inline constexpr double kNormalTolerance = 1e-6;

/// Integrates pressure and wall shear over a discretized surface.
/// pressure: one value per cell; shear: three per cell, or empty for none.
/// Cells with zero area (excluded degenerate cells) are skipped.
inline ForceBreakdown integrate_surface_forces(std::span<const double> pressure, std::span<const double> shear,
                                               std::span<const double> areas, std::span<const Vec3> normals,
                                               const FlowConditions& fc)
{
    const std::size_t n = areas.size();
    if (pressure.size() != n || normals.size() != n || (!shear.empty() && shear.size() != 3 * n)) {
        fail(ErrorCode::LengthMismatch, "pressure, shear, areas and normals must describe the same cells");
    }
    ForceBreakdown f;
    const double pscale = fc.pressure_scale();
    for (std::size_t i = 0; i < n; ++i) {
        const double a = areas[i];
        if (a == 0.0) {
            continue;
        }
        if (std::abs(norm(normals[i]) - 1.0) > kNormalTolerance) {
            fail(ErrorCode::NonUnitNormal, "normal of cell " + std::to_string(i) + " is not unit length");
        }
        f.pressure_force += (a * (pscale * pressure[i] - fc.p_ref)) * normals[i];
        if (!shear.empty()) {
            f.viscous_force += a * Vec3{shear[3 * i], shear[3 * i + 1], shear[3 * i + 2]};
        }
    }
    f.viscous_force *= fc.shear_sign;
    f.total_force = f.pressure_force + f.viscous_force;
    f.drag = dot(f.total_force, fc.flow_dir);
    f.lift = dot(f.total_force, fc.lift_dir);
    if (fc.u_ref && fc.a_ref) {
        const double denom = fc.dynamic_pressure() * *fc.a_ref;
        f.cd = f.drag / denom;
        f.cl = f.lift / denom;
    }
    return f;
}

/// Uniform-weight quadrature over a point cloud (every point has `area_per_point`).
inline ForceBreakdown integrate_cloud_forces(std::span<const double> pressure, std::span<const double> shear,
                                             std::span<const Vec3> normals, double area_per_point,
                                             const FlowConditions& fc)
{
    std::vector<double> areas(normals.size(), area_per_point);
    return integrate_surface_forces(pressure, shear, areas, normals, fc);
}

// ---------------------------------------------------------------- regression / trend

inline double r_squared(std::span<const double> truth, std::span<const double> pred)
{
    if (truth.size() != pred.size()) {
        fail(ErrorCode::LengthMismatch, "r_squared inputs differ in length");
    }
    if (truth.size() < 2) {
        fail(ErrorCode::TooFewSamples, "r_squared needs at least 2 samples");
    }
    const double mean = std::accumulate(truth.begin(), truth.end(), 0.0) / static_cast<double>(truth.size());
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ss_res += (truth[i] - pred[i]) * (truth[i] - pred[i]);
        ss_tot += (truth[i] - mean) * (truth[i] - mean);
    }
    if (!(ss_tot > 0.0)) {
        fail(ErrorCode::ConstantTruth, "r_squared is undefined for constant ground truth");
    }
    return 1.0 - ss_res / ss_tot;
}

/// 1-based ranks; tied values share the mean of the ranks they span.
inline std::vector<double> average_ranks(std::span<const double> values)
{
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && values[order[j]] == values[order[i]]) {
            ++j;
        }
        const double rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t m = i; m < j; ++m) {
            ranks[order[m]] = rank;
        }
        i = j;
    }
    return ranks;
}

inline double pearson(std::span<const double> a, std::span<const double> b)
{
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (!(saa > 0.0) || !(sbb > 0.0)) {
        fail(ErrorCode::ConstantRanks, "correlation is undefined for a constant sequence");
    }
    return sab / std::sqrt(saa * sbb);
}

/// Spearman rank correlation: Pearson correlation of average ranks.
inline double spearman(std::span<const double> truth, std::span<const double> pred)
{
    if (truth.size() != pred.size()) {
        fail(ErrorCode::LengthMismatch, "spearman inputs differ in length");
    }
    if (truth.size() < 2) {
        fail(ErrorCode::TooFewSamples, "spearman needs at least 2 samples");
    }
    const auto rt = average_ranks(truth);
    const auto rp = average_ranks(pred);
    return std::clamp(pearson(rt, rp), -1.0, 1.0);
}

struct TrendSample
{
    std::string id;
    double truth = 0.0;
    double pred = 0.0;
};

struct TrendResult
{
    double spearman = 0.0;
    double mean_abs_err = 0.0;
    double max_abs_err = 0.0;
    /// Samples sorted by ascending true value (ties by id).
    std::vector<TrendSample> ordering;
};

inline TrendResult trend_analysis(std::vector<TrendSample> samples)
{
    if (samples.size() < 2) {
        fail(ErrorCode::TooFewSamples, "trend analysis needs at least 2 samples");
    }
    std::sort(samples.begin(), samples.end(), [](const TrendSample& a, const TrendSample& b) {
        return a.truth < b.truth || (a.truth == b.truth && a.id < b.id);
    });
    TrendResult r;
    std::vector<double> t;
    std::vector<double> p;
    double sum = 0.0;
    for (const auto& s : samples) {
        t.push_back(s.truth);
        p.push_back(s.pred);
        const double e = std::abs(s.pred - s.truth);
        sum += e;
        r.max_abs_err = std::max(r.max_abs_err, e);
    }
    r.mean_abs_err = sum / static_cast<double>(samples.size());
    r.spearman = spearman(t, p);
    r.ordering = std::move(samples);
    return r;
}

// ---------------------------------------------------------------- aggregation

struct SummaryStats
{
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    /// Population standard deviation.
    double std = 0.0;
    std::size_t count = 0;
};

/// Mean/min/max/std accumulated in input order.
inline SummaryStats summarize(std::span<const double> values)
{
    if (values.empty()) {
        fail(ErrorCode::NoSamples, "cannot summarize an empty sequence");
    }
    SummaryStats s;
    s.count = values.size();
    s.min = std::numeric_limits<double>::infinity();
    s.max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (double v : values) {
        sum += v;
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
    }
    s.mean = sum / static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) {
        var += (v - s.mean) * (v - s.mean);
    }
    s.std = std::sqrt(var / static_cast<double>(values.size()));
    return s;
}

using MetricRecord = std::map<std::string, double>;

/// Arithmetic mean (plus min/max/std) of every metric present in the records.
/// A metric missing from some records is summarized over those that have it.
inline std::map<std::string, SummaryStats> aggregate_over_samples(const std::vector<MetricRecord>& records)
{
    if (records.empty()) {
        fail(ErrorCode::NoSamples, "no per-sample metrics to aggregate");
    }
    std::map<std::string, std::vector<double>> columns;
    for (const auto& r : records) {
        for (const auto& [k, v] : r) {
            columns[k].push_back(v);
        }
    }
    std::map<std::string, SummaryStats> out;
    for (const auto& [k, v] : columns) {
        out[k] = summarize(v);
    }
    return out;
}

} // namespace aerobench
