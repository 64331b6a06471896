#pragma once

// Mass and momentum residuals of predicted fields on scattered points, from
// weighted least-squares gradients over k-nearest-neighbour stencils.

#include <aerobench/core.hpp>
#include <aerobench/metrics.hpp>
#include <aerobench/interpolate.hpp>
#include <aerobench/spatial_index.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace aerobench {

inline constexpr std::size_t kDefaultGradientStencil = 16;

/// Per-point gradients of a `components`-valued field. Layout:
/// gradients[(point * components + component) * 3 + axis]. Masked points
/// (rank-deficient stencils) hold zeros.
struct GradientField
{
    int components = 1;
    std::vector<double> gradients;
    std::vector<std::uint8_t> masked;
    std::size_t masked_count = 0;

    Vec3 at(std::size_t point, int component = 0) const
    {
        const std::size_t b = (point * static_cast<std::size_t>(components) + static_cast<std::size_t>(component)) * 3;
        return {gradients[b], gradients[b + 1], gradients[b + 2]};
    }
};

namespace residual_detail {

using Mat3 = std::array<std::array<double, 3>, 3>;

/// Inverse of a symmetric positive semi-definite 3x3 matrix, or false when
/// its normalized determinant shows a (near) rank-deficient stencil.
inline bool invert_spd(const Mat3& m, Mat3& inv)
{
    const double tr = m[0][0] + m[1][1] + m[2][2];
    if (!(tr > 0.0)) {
        return false;
    }
    const double c00 = m[1][1] * m[2][2] - m[1][2] * m[2][1];
    const double c01 = m[1][2] * m[2][0] - m[1][0] * m[2][2];
    const double c02 = m[1][0] * m[2][1] - m[1][1] * m[2][0];
    const double det = m[0][0] * c00 + m[0][1] * c01 + m[0][2] * c02;
    const double scaled = det / (tr * tr * tr);
    if (!(scaled > 1e-10)) {
        return false;
    }
    const double id = 1.0 / det;
    inv[0][0] = c00 * id;
    inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * id;
    inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * id;
    inv[1][0] = c01 * id;
    inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * id;
    inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * id;
    inv[2][0] = c02 * id;
    inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * id;
    inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * id;
    return true;
}

} // namespace residual_detail

/// For each point x0, fits v(x) ~ v(x0) + g.(x - x0) over its k nearest
/// other points, weighting each by 1/d^2. Reproduces affine fields exactly.
/// `skip` optionally marks points whose values must not enter any stencil;
/// a point whose stencil would contain one is masked as well.
inline GradientField lsq_gradient(const SpatialIndex& index, std::span<const double> values, int components,
                                  std::size_t k = kDefaultGradientStencil,
                                  std::span<const std::uint8_t> skip = {})
{
    using namespace residual_detail;
    const std::size_t n = index.size();
    if (k < 4) {
        fail(ErrorCode::InvalidArgument, "gradient stencils need k >= 4");
    }
    if (values.size() != n * static_cast<std::size_t>(components)) {
        fail(ErrorCode::LengthMismatch, "gradient values do not match the indexed point count");
    }
    GradientField g;
    g.components = components;
    g.gradients.assign(n * components * 3, 0.0);
    g.masked.assign(n, 0);

    SpatialIndex::Neighbors nb;
    std::vector<double> rhs(static_cast<std::size_t>(components) * 3);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3& x0 = index.point(i);
        index.knn(x0, k + 1, nb);
        Mat3 m{};
        std::fill(rhs.begin(), rhs.end(), 0.0);
        bool tainted = !skip.empty() && skip[i];
        std::size_t used = 0;
        for (std::size_t j = 0; j < nb.indices.size() && used < k; ++j) {
            const std::size_t q = nb.indices[j];
            if (q == i || nb.distances[j] < kCoincidentDistance) {
                continue;
            }
            if (!skip.empty() && skip[q]) {
                tainted = true;
                break;
            }
            ++used;
            const Vec3 dx = index.point(q) - x0;
            const double w = 1.0 / (nb.distances[j] * nb.distances[j]);
            for (std::size_t a = 0; a < 3; ++a) {
                for (std::size_t b = 0; b < 3; ++b) {
                    m[a][b] += w * dx[a] * dx[b];
                }
            }
            for (int c = 0; c < components; ++c) {
                const double dv = values[q * components + c] - values[i * components + c];
                for (std::size_t a = 0; a < 3; ++a) {
                    rhs[c * 3 + a] += w * dx[a] * dv;
                }
            }
        }
        Mat3 inv;
        if (tainted || used < 3 || !invert_spd(m, inv)) {
            g.masked[i] = 1;
            ++g.masked_count;
            continue;
        }
        for (int c = 0; c < components; ++c) {
            for (std::size_t a = 0; a < 3; ++a) {
                double s = 0.0;
                for (std::size_t b = 0; b < 3; ++b) {
                    s += inv[a][b] * rhs[c * 3 + b];
                }
                g.gradients[(i * components + c) * 3 + a] = s;
            }
        }
    }
    return g;
}

inline GradientField lsq_gradient(const std::vector<Vec3>& points, std::span<const double> values, int components,
                                  std::size_t k = kDefaultGradientStencil)
{
    const SpatialIndex index(points);
    return lsq_gradient(index, values, components, k);
}

/// Scalar or vector residual per point with a mask for failed stencils.
/// Masked entries hold zero, never NaN.
struct ResidualField
{
    int components = 1;
    std::vector<double> values;
    std::vector<std::uint8_t> masked;

    std::size_t size() const { return masked.size(); }
    std::size_t masked_count() const
    {
        std::size_t c = 0;
        for (auto m : masked) {
            c += m;
        }
        return c;
    }
    double magnitude(std::size_t i) const
    {
        if (components == 1) {
            return std::abs(values[i]);
        }
        double s = 0.0;
        for (int c = 0; c < components; ++c) {
            s += values[i * components + c] * values[i * components + c];
        }
        return std::sqrt(s);
    }
};

struct ResidualSummary
{
    double mean_abs = 0.0;
    double rms = 0.0;
    double max_abs = 0.0;
    std::size_t masked_count = 0;
    std::size_t count = 0;
};

/// Statistics of |r| over unmasked points (Euclidean magnitude for vectors).
inline ResidualSummary residual_summary(const ResidualField& field)
{
    ResidualSummary s;
    double sum = 0.0;
    double sum2 = 0.0;
    for (std::size_t i = 0; i < field.size(); ++i) {
        if (field.masked[i]) {
            ++s.masked_count;
            continue;
        }
        const double m = field.magnitude(i);
        sum += m;
        sum2 += m * m;
        s.max_abs = std::max(s.max_abs, m);
        ++s.count;
    }
    if (s.count == 0 && field.size() > 0) {
        fail(ErrorCode::AllMasked, "every residual point is masked");
    }
    if (s.count > 0) {
        s.mean_abs = sum / static_cast<double>(s.count);
        s.rms = std::sqrt(sum2 / static_cast<double>(s.count));
    }
    return s;
}

/// Incompressible mass residual: div u.
inline ResidualField continuity_residual(const SpatialIndex& index, std::span<const double> velocity,
                                         std::size_t k = kDefaultGradientStencil)
{
    const auto grad = lsq_gradient(index, velocity, 3, k);
    ResidualField r;
    r.components = 1;
    r.values.assign(index.size(), 0.0);
    r.masked = grad.masked;
    for (std::size_t i = 0; i < index.size(); ++i) {
        if (!grad.masked[i]) {
            r.values[i] = grad.at(i, 0).x + grad.at(i, 1).y + grad.at(i, 2).z;
        }
    }
    return r;
}

/// Steady incompressible momentum imbalance rho (u.grad)u + grad p - mu lap u
/// with mu = rho nu; the Laplacian is the trace of a second LSQ pass over the
/// first-pass velocity gradients.
inline ResidualField momentum_residual(const SpatialIndex& index, std::span<const double> velocity,
                                       std::span<const double> pressure, const FlowConditions& fc, double nu,
                                       std::size_t k = kDefaultGradientStencil)
{
    const std::size_t n = index.size();
    if (pressure.size() != n) {
        fail(ErrorCode::LengthMismatch, "pressure does not match the indexed point count");
    }
    const auto gu = lsq_gradient(index, velocity, 3, k);
    std::vector<double> p(pressure.begin(), pressure.end());
    for (auto& v : p) {
        v *= fc.pressure_scale();
    }
    const auto gp = lsq_gradient(index, p, 1, k);

    ResidualField r;
    r.components = 3;
    r.values.assign(n * 3, 0.0);
    r.masked.assign(n, 0);

    // Second pass: gradients of the nine first derivatives du_c/dx_a.
    GradientField ggu;
    const double mu = fc.rho * nu;
    if (mu != 0.0) {
        ggu = lsq_gradient(index, gu.gradients, 9, k, gu.masked);
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (gu.masked[i] || gp.masked[i] || (mu != 0.0 && ggu.masked[i])) {
            r.masked[i] = 1;
            continue;
        }
        const Vec3 u{velocity[3 * i], velocity[3 * i + 1], velocity[3 * i + 2]};
        const Vec3 dp = gp.at(i);
        for (int c = 0; c < 3; ++c) {
            const double convective = dot(u, gu.at(i, c));
            double laplacian = 0.0;
            if (mu != 0.0) {
                for (int a = 0; a < 3; ++a) {
                    laplacian += ggu.at(i, c * 3 + a)[static_cast<std::size_t>(a)];
                }
            }
            r.values[3 * i + c] = fc.rho * convective + dp[static_cast<std::size_t>(c)] - mu * laplacian;
        }
    }
    return r;
}

} // namespace aerobench
