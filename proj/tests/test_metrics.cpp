#include "test_util.hpp"

#include <aerobench/geometry.hpp>
#include <aerobench/metrics.hpp>
#include <aerobench/synthetic.hpp>

#include <cmath>
#include <numeric>

using namespace aerobench;

namespace {

FieldPair scalar_pair(std::vector<double> t, std::vector<double> p, int comps = 1)
{
    FieldPair f;
    f.name = "q";
    f.components = comps;
    f.true_values = std::move(t);
    f.pred_values = std::move(p);
    return f;
}

} // namespace

TEST(RelativeL2, Examples)
{
    EXPECT_EQ(relative_l2(scalar_pair({1, 2, 3}, {1, 2, 3}))[0], 0.0);
    EXPECT_DOUBLE_EQ(relative_l2(scalar_pair({1, -2, 3}, {0, 0, 0}))[0], 1.0);
    EXPECT_DOUBLE_EQ(relative_l2(scalar_pair({3, 4}, {3, 9}))[0], 1.0);
}

TEST(RelativeL2, PerComponent)
{
    // Two tuples of a 2-component field; component 1 is perfect.
    const auto r = relative_l2(scalar_pair({3, 1, 4, 1}, {3, 1, 9, 1}, 2));
    ASSERT_EQ(r.size(), 2u);
    EXPECT_DOUBLE_EQ(r[0], 1.0);
    EXPECT_EQ(r[1], 0.0);
}

TEST(RelativeL2, ScaleInvariant)
{
    const auto base = relative_l2(scalar_pair({1.5, -2, 7}, {1, -2.5, 6}))[0];
    const auto scaled = relative_l2(scalar_pair({15, -20, 70}, {10, -25, 60}))[0];
    EXPECT_NEAR(base, scaled, 1e-15);
}

TEST(AreaWeightedL2, Examples)
{
    const std::vector<double> a13{1, 3};
    EXPECT_DOUBLE_EQ(area_weighted_relative_l2(scalar_pair({2, 2}, {3, 2}), a13)[0], 0.25);
    const auto p = scalar_pair({1.5, -2, 7}, {1, -2.5, 6});
    const std::vector<double> eq{2, 2, 2};
    EXPECT_NEAR(area_weighted_relative_l2(p, eq)[0], relative_l2(p)[0], 1e-15);
    EXPECT_EQ(area_weighted_relative_l2(scalar_pair({2, 2}, {2, 2}), a13)[0], 0.0);
}

TEST(SurfaceForces, SingleFacetDragAndCoefficient)
{
    const std::vector<double> p{3.0};
    const std::vector<double> a{2.0};
    const std::vector<Vec3> n{{1, 0, 0}};
    FlowConditions fc;
    auto f = integrate_surface_forces(p, {}, a, n, fc);
    EXPECT_DOUBLE_EQ(f.drag, 6.0);
    EXPECT_FALSE(f.cd.has_value());

    fc.u_ref = 2.0;
    fc.a_ref = 3.0;
    f = integrate_surface_forces(p, {}, a, n, fc);
    ASSERT_TRUE(f.cd.has_value());
    EXPECT_DOUBLE_EQ(*f.cd, 1.0);
}

TEST(SurfaceForces, ShearSignAndKinematicPressure)
{
    const std::vector<double> p{0.0};
    const std::vector<double> tau{1.0, 0.0, 0.5};
    const std::vector<double> a{2.0};
    const std::vector<Vec3> n{{0, 0, 1}};
    FlowConditions fc;
    auto f = integrate_surface_forces(p, tau, a, n, fc);
    EXPECT_DOUBLE_EQ(f.viscous_force.x, -2.0);
    fc.shear_sign = 1.0;
    f = integrate_surface_forces(p, tau, a, n, fc);
    EXPECT_DOUBLE_EQ(f.drag, 2.0);
    EXPECT_DOUBLE_EQ(f.lift, 1.0);

    fc.rho = 1.2;
    fc.pressure_is_kinematic = true;
    const std::vector<double> pk{10.0};
    f = integrate_surface_forces(pk, {}, a, n, fc);
    EXPECT_DOUBLE_EQ(f.lift, 24.0);
}

TEST(SurfaceForces, ClosedCubeUniformPressure)
{
    synthetic::CarBox box;
    box.spacing = 0.1;
    const auto s = synthetic::car_box_surface(box);
    const auto g = cell_geometry(s);
    const double p0 = 101325.0;
    const std::vector<double> p(g.size(), p0);
    const auto f = integrate_surface_forces(p, {}, g.areas, g.normals, FlowConditions{});
    double area = 0.0;
    for (double a : g.areas) {
        area += a;
    }
    EXPECT_LE(norm(f.total_force), 1e-10 * p0 * area);
}

TEST(SurfaceForces, RejectsBadInput)
{
    const std::vector<double> p{1.0};
    const std::vector<double> a{1.0};
    const std::vector<Vec3> bad{{2, 0, 0}};
    EXPECT_AEROBENCH_ERROR(integrate_surface_forces(p, {}, a, bad, FlowConditions{}), ErrorCode::NonUnitNormal);
    const std::vector<double> two{1.0, 2.0};
    EXPECT_AEROBENCH_ERROR(integrate_surface_forces(two, {}, a, bad, FlowConditions{}), ErrorCode::LengthMismatch);
}

TEST(FlowConditions, Validation)
{
    FlowConditions fc;
    EXPECT_NO_THROW(fc.validate());
    fc.lift_dir = {1, 0, 0};
    EXPECT_AEROBENCH_ERROR(fc.validate(), ErrorCode::InvalidConfig);
    fc = {};
    fc.rho = 0.0;
    EXPECT_AEROBENCH_ERROR(fc.validate(), ErrorCode::InvalidConfig);
    fc = {};
    EXPECT_AEROBENCH_ERROR(fc.dynamic_pressure(), ErrorCode::InvalidConfig);
}

TEST(RSquared, Examples)
{
    const std::vector<double> t{1, 2, 3};
    EXPECT_DOUBLE_EQ(r_squared(t, t), 1.0);
    const std::vector<double> m{2, 2, 2};
    EXPECT_DOUBLE_EQ(r_squared(t, m), 0.0);
    const std::vector<double> p{1, 2, 4};
    EXPECT_DOUBLE_EQ(r_squared(t, p), 0.5);
    EXPECT_AEROBENCH_ERROR(r_squared(m, t), ErrorCode::ConstantTruth);
}

TEST(Spearman, Examples)
{
    const std::vector<double> t{1, 2, 3, 4};
    EXPECT_DOUBLE_EQ(spearman(t, t), 1.0);
    const std::vector<double> rev{4, 3, 2, 1};
    EXPECT_DOUBLE_EQ(spearman(t, rev), -1.0);
    const std::vector<double> swap{1, 3, 2, 4};
    EXPECT_NEAR(spearman(t, swap), 0.8, 1e-15);
    const std::vector<double> flat{2, 2, 2, 2};
    EXPECT_AEROBENCH_ERROR(spearman(t, flat), ErrorCode::ConstantRanks);
}

TEST(Spearman, TiesUseAverageRanks)
{
    const std::vector<double> v{10, 20, 20, 30};
    EXPECT_EQ(average_ranks(v), (std::vector<double>{1, 2.5, 2.5, 4}));
    const std::vector<double> w{5, 5, 5, 1};
    EXPECT_EQ(average_ranks(w), (std::vector<double>{3, 3, 3, 1}));
    // Hand computation: Pearson of ranks (1, 2.5, 2.5, 4) against (1, 2, 3, 4).
    const std::vector<double> a{1, 2.5, 2.5, 4};
    const std::vector<double> b{1, 2, 3, 4};
    const double ma = 2.5;
    double sab = 0, saa = 0, sbb = 0;
    for (int i = 0; i < 4; ++i) {
        sab += (a[i] - ma) * (b[i] - ma);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - ma) * (b[i] - ma);
    }
    EXPECT_NEAR(spearman(v, b), sab / std::sqrt(saa * sbb), 1e-15);
}

TEST(Spearman, MonotoneInvariance)
{
    const auto pts = testutil::random_points(40, 21);
    std::vector<double> t, p, pe;
    for (const auto& q : pts) {
        t.push_back(q.x);
        p.push_back(q.x + 0.3 * q.y);
        pe.push_back(std::exp(5.0 * (q.x + 0.3 * q.y)));
    }
    EXPECT_DOUBLE_EQ(spearman(t, p), spearman(t, pe));
}

TEST(Trend, Examples)
{
    auto r = trend_analysis({{"a", 10, 12}, {"b", 20, 25}});
    EXPECT_DOUBLE_EQ(r.mean_abs_err, 3.5);
    EXPECT_DOUBLE_EQ(r.max_abs_err, 5.0);
    EXPECT_DOUBLE_EQ(r.spearman, 1.0);

    r = trend_analysis({{"a", 3, 3}, {"b", 1, 1}, {"c", 2, 2}});
    EXPECT_DOUBLE_EQ(r.spearman, 1.0);
    EXPECT_EQ(r.max_abs_err, 0.0);
    EXPECT_EQ(r.ordering.front().id, "b");
    EXPECT_EQ(r.ordering.back().id, "a");

    r = trend_analysis({{"a", 1, 1.5}, {"b", 2, 2.5}, {"c", 3, 3.5}});
    EXPECT_DOUBLE_EQ(r.spearman, 1.0);
    EXPECT_DOUBLE_EQ(r.mean_abs_err, 0.5);
    EXPECT_DOUBLE_EQ(r.max_abs_err, 0.5);

    EXPECT_AEROBENCH_ERROR(trend_analysis({{"a", 1, 1}}), ErrorCode::TooFewSamples);
}

TEST(Aggregate, MeansAndMissingKeys)
{
    auto a = aggregate_over_samples({{{"l2", 0.1}}, {{"l2", 0.3}, {"x", 4.0}}});
    EXPECT_DOUBLE_EQ(a["l2"].mean, 0.2);
    EXPECT_DOUBLE_EQ(a["l2"].std, 0.1);
    EXPECT_EQ(a["x"].count, 1u);
    EXPECT_EQ(a["x"].mean, 4.0);

    const MetricRecord one{{"k", 0.7}};
    const auto b = aggregate_over_samples({one});
    EXPECT_EQ(b.at("k").mean, 0.7);
    EXPECT_EQ(b.at("k").std, 0.0);
    EXPECT_AEROBENCH_ERROR(aggregate_over_samples({}), ErrorCode::NoSamples);
}

TEST(Aggregate, FortyEightSamplesMatchBruteForce)
{
    const auto pts = testutil::random_points(48, 77);
    std::vector<MetricRecord> recs;
    double sum = 0.0;
    for (const auto& p : pts) {
        recs.push_back({{"l2.pressure", p.x}});
        sum += p.x;
    }
    EXPECT_NEAR(aggregate_over_samples(recs).at("l2.pressure").mean, sum / 48.0, 1e-15);
}
