#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <bilip/multiplier.hpp>

using namespace bilip;

namespace {

bilipschitz_estimate unit_constants(double N)
{
    bilipschitz_estimate bl;
    bl.N = N;
    bl.C1 = 1.0;
    bl.C2 = 1.0;
    return bl;
}

double sin1_primitive(double t) { return t + 0.5 * (1.0 - std::cos(t)); }

// int t (1 + sin t / 2) dt
double sin1_first_moment(double t) { return 0.5 * t * t + 0.5 * (std::sin(t) - t * std::cos(t)); }

double bisect_cell_end(double from, double mass)
{
    double lo = from, hi = from + 4.0 * mass + 4.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (sin1_primitive(mid) - sin1_primitive(from) < mass ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST(Multiplier, MinimalMultiplicity)
{
    bilipschitz_estimate bl = unit_constants(0.25);
    EXPECT_EQ(minimal_multiplicity(bl), 1);
    bl.N = 0.5;
    EXPECT_EQ(minimal_multiplicity(bl), 2);
    bl.C2 = 1.6;
    EXPECT_EQ(minimal_multiplicity(bl), 2);
}

TEST(Multiplier, ConstantDensityGivesCosine)
{
    const constant_density g(1.0);
    multiplier_config mc;
    mc.k_min = -200;
    mc.k_max = 199;
    const auto m = build_multiplier(g, unit_constants(0.25), mc, {});
    ASSERT_EQ(m.xi.size(), 400u);
    for (std::size_t i = 0; i < m.xi.size(); ++i)
        EXPECT_NEAR(m.xi[i], m.k_min() + static_cast<int>(i) + 0.5, 1e-11);
    EXPECT_NEAR(m.alpha, 0.0, 1e-9);
    for (cplx z : {cplx(0.3, 0.0), cplx(1.7, 0.4), cplx(-12.2, 3.0), cplx(40.0, 1.0)}) {
        const auto v = eval_multiplier(m, z);
        EXPECT_NEAR(v.log_modulus, std::log(std::abs(std::cos(std::numbers::pi * z))), 1e-8) << z;
    }
}

TEST(Multiplier, SinePartitionMatchesBisection)
{
    const sine_density g;
    const auto bl = estimate_bilipschitz(mass_phase(g), 0.25, {-200.0, 200.0}, 4001);
    EXPECT_NEAR(bl.C1, 0.5, 5e-3);
    EXPECT_NEAR(bl.C2, 1.5, 5e-3);
    const int a0 = minimal_multiplicity(bl);
    EXPECT_EQ(a0, 1);
    const auto p = build_partition(g, a0, -30, 30, bl, a0 + 1.0);
    const auto xi = centroids(g, p);
    double x = 0.0;
    for (int k = 0; k <= 30; ++k) {
        const double next = bisect_cell_end(x, 1.0);
        EXPECT_NEAR(p.point(k + 1), next, 1e-10);
        const double c = sin1_first_moment(next) - sin1_first_moment(x);
        EXPECT_NEAR(xi[static_cast<std::size_t>(k + 30)], c, 1e-10);
        x = next;
    }
    const auto chk = check_partition(g, p, xi, bl, a0 + 1.0);
    EXPECT_LT(chk.max_mass_error, 1e-11);
    EXPECT_TRUE(chk.inside_ok);
}

TEST(Multiplier, RejectsDegenerateDensity)
{
    const constant_density g(0.0);
    EXPECT_THROW(build_shifted_multiplier(g, 0.25, -10, 10, {}), precondition_error);
}

TEST(Multiplier, TailModelStableUnderWindowDoubling)
{
    const sine_density g;
    const auto bl = estimate_bilipschitz(mass_phase(g), 0.25, {-200.0, 200.0}, 4001);
    multiplier_config small, large;
    small.k_min = -150;
    small.k_max = 150;
    large.k_min = -300;
    large.k_max = 300;
    const auto ms = build_multiplier(g, bl, small, {});
    const auto ml = build_multiplier(g, bl, large, {});
    for (cplx z : {cplx(3.0, 2.0), cplx(-20.0, 0.5), cplx(45.0, 5.0)}) {
        const double a = eval_multiplier(ms, z).log_modulus;
        const double b = eval_multiplier(ml, z).log_modulus;
        EXPECT_NEAR(a, b, 1e-4) << z;
    }
}

TEST(Multiplier, RealAxisSignAndConjugateSymmetry)
{
    const sine_density g;
    const auto bl = estimate_bilipschitz(mass_phase(g), 0.25, {-200.0, 200.0}, 4001);
    multiplier_config mc;
    mc.k_min = -100;
    mc.k_max = 100;
    const auto m = build_multiplier(g, bl, mc, {});
    const double z0 = m.xi[static_cast<std::size_t>(100 + 3)];
    const auto left = eval_multiplier(m, cplx(z0 - 1e-3, 0.0));
    const auto right = eval_multiplier(m, cplx(z0 + 1e-3, 0.0));
    EXPECT_EQ(std::abs(left.sign.real()), 1.0);
    EXPECT_EQ(left.sign.real(), -right.sign.real());
    EXPECT_TRUE(eval_multiplier(m, cplx(z0, 0.0)).at_zero);
    const auto up = eval_multiplier(m, cplx(7.3, 1.2));
    const auto down = eval_multiplier(m, cplx(7.3, -1.2));
    EXPECT_NEAR(up.log_modulus, down.log_modulus, 1e-10);
    EXPECT_NEAR(std::arg(up.sign), -std::arg(down.sign), 1e-9);
}

TEST(Multiplier, SineComparabilityBandIsBounded)
{
    const sine_density g;
    const auto bl = estimate_bilipschitz(mass_phase(g), 0.25, {-200.0, 200.0}, 4001);
    multiplier_config mc;
    mc.k_min = -200;
    mc.k_max = 200;
    const auto m = build_multiplier(g, bl, mc, {});
    const auto rep = verify_comparability(m, g, {-40.0, 40.0, 0.5, 10.0}, 41, 11, {});
    EXPECT_GT(rep.ratio_inf, 0.0);
    EXPECT_LT(rep.band_width, 100.0);
    EXPECT_EQ(rep.worst_points.size(), 10u);
}

TEST(Multiplier, ScaledConstantPartition)
{
    const constant_density g(2.0);
    bilipschitz_estimate bl = unit_constants(0.25);
    bl.C1 = bl.C2 = 2.0;
    const auto p = build_partition(g, 2, -5, 4, bl, 3.0);
    for (int k = -5; k <= 5; ++k)
        EXPECT_NEAR(p.point(k), k, 1e-12);
    const auto xi = centroids(g, p);
    for (int k = -5; k <= 4; ++k)
        EXPECT_NEAR(xi[static_cast<std::size_t>(k + 5)], k + 0.5, 1e-12);
    EXPECT_THROW(build_partition(g, 1, -5, 4, bl, 3.0), precondition_error);
}

TEST(Multiplier, CosineSpecialValues)
{
    const constant_density g(1.0);
    multiplier_config mc;
    mc.k_min = -500;
    mc.k_max = 499;
    const auto m = build_multiplier(g, unit_constants(0.25), mc, {});
    EXPECT_NEAR(eval_multiplier(m, cplx(0.0, 1.0)).log_modulus, std::log(std::cosh(std::numbers::pi)), 1e-9);
    EXPECT_NEAR(eval_multiplier(m, cplx(0.0, 0.0)).log_modulus, 0.0, 1e-12);
    const auto at = eval_multiplier(m, cplx(0.5, 0.0));
    EXPECT_TRUE(at.at_zero);
    EXPECT_EQ(at.zero_mult, 1);
    EXPECT_TRUE(std::isinf(at.log_modulus));
}

TEST(Multiplier, ShiftedCosineOnRealAxis)
{
    const constant_density g(1.0);
    const auto m = build_shifted_multiplier(g, 0.25, -500, 499, {});
    const double pi = std::numbers::pi;
    for (double x = -20.0; x <= 20.0; x += 0.37) {
        const double lm = eval_shifted_multiplier(m, cplx(x, 0.0)).log_modulus;
        EXPECT_GE(lm, std::log(std::sinh(pi)) - 1e-8);
        EXPECT_LE(lm, std::log(std::cosh(pi)) + 1e-8);
    }
    const double y = 6.0;
    EXPECT_NEAR(std::exp(eval_shifted_multiplier(m, cplx(0.0, y)).log_modulus - pi * (y + 1.0)), 0.5, 1e-6);
}

TEST(Multiplier, SineLinearCoefficientAcrossWindows)
{
    const sine_density g;
    const auto bl = estimate_bilipschitz(mass_phase(g), 0.25, {-200.0, 200.0}, 4001);
    multiplier_config a, b;
    a.alpha0 = b.alpha0 = 2;
    a.k_min = -100;
    a.k_max = 100;
    b.k_min = -200;
    b.k_max = 200;
    const auto ma = build_multiplier(g, bl, a, {});
    const auto mb = build_multiplier(g, bl, b, {});
    EXPECT_TRUE(std::isfinite(ma.alpha));
    EXPECT_LE(ma.coefficient.tail_bound, 2.0 / 100.0);
    EXPECT_LT(std::abs(ma.alpha - mb.alpha), ma.coefficient.tail_bound + mb.coefficient.tail_bound);
    for (std::size_t i = 0; i + 1 < ma.cells.x.size(); ++i)
        EXPECT_NEAR(f_nu(g, ma.cells, ma.xi, ma.cells.x[i]), 0.0, 1e-10);
}
