#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <bilip/spaces.hpp>

using namespace bilip;

namespace {
const double pi = std::numbers::pi;
}

TEST(Spaces, EAtOriginIsOne)
{
    const example_family fam(1.0);
    EXPECT_NEAR(eval_example_E(fam, {0.0, 0.0}).log_modulus, 0.0, 1e-12);
}

TEST(Spaces, LogModulusMatchesPotential)
{
    for (double alpha : {0.5, 1.0, 1.5}) {
        const example_family fam(alpha);
        const auto g = fam.density();
        for (cplx z : {cplx(0.3, 0.0), cplx(2.5, 1.0), cplx(-7.2, 3.5), cplx(15.0, 0.7)}) {
            const double lhs = eval_example_E(fam, z).log_modulus;
            const double rhs = potential(g, z, {}).value;
            EXPECT_NEAR(lhs, rhs, 1e-7) << alpha << " " << z;
        }
    }
}

TEST(Spaces, TruncationDoublingWithinTailError)
{
    const example_family fam(1.0);
    const cplx z(12.3, 2.0);
    const auto a = eval_example_E(fam, z, 1000);
    const auto b = eval_example_E(fam, z, 2000);
    EXPECT_LE(std::abs(a.log_modulus - b.log_modulus), a.tail_error + b.tail_error + 1e-11);
}

TEST(Spaces, ExponentialTypeAlongImaginaryAxis)
{
    const example_family fam(1.0);
    double lo = 1e300, hi = -1e300;
    for (double y = 1.0; y <= 40.0; y += 1.0) {
        const double d = eval_example_E(fam, {0.0, y}).log_modulus - pi * y;
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    EXPECT_LT(hi - lo, 2.0);
}

TEST(Spaces, PhaseDerivativeAndMountainChain)
{
    EXPECT_NEAR(phi_prime_example(example_family(0.0), 0.0), pi / std::tanh(pi), 1e-9);
    const example_family fam(1.0);
    EXPECT_NEAR(mu_example(fam, 0.5, 10.2), 2.0, 1e-12);
    EXPECT_EQ(nearest_integer(0.5), 0.0);
    EXPECT_EQ(fam.zeros()->nearest(0.5).xi, 0.0);
    EXPECT_EQ(mu_example(fam, 0.5, 0.5), 1.0);
}

TEST(Spaces, ThetaTarget)
{
    const example_family one(1.0), flat(0.0);
    EXPECT_NEAR(theta_asymptotic_target(one, 10.0), 10.0, 1e-12);
    EXPECT_NEAR(theta_asymptotic_target(one, 10.5), 10.0 / 6.0, 1e-12);
    for (double x = 0.6; x < 20.0; x += 0.37) {
        const double t = theta_asymptotic_target(flat, x);
        EXPECT_GE(t, 2.0 / 3.0 - 1e-12);
        EXPECT_LE(t, 1.0);
    }
    EXPECT_THROW(theta_asymptotic_target(one, 0.5), precondition_error);
    EXPECT_THROW(theta_asymptotic_target(one, 0.0), precondition_error);
    EXPECT_NO_THROW(theta_asymptotic_target(one, -0.5));
}

TEST(Spaces, LyubarskiiSeipWeight)
{
    const example_family one(1.0), flat(0.0);
    EXPECT_NEAR(ls_weight(one, 100.0) / 100.0, 1.0, 0.05);
    for (double n : {50.0, 100.0, 150.0}) {
        const double w = ls_weight(one, n + 0.5);
        EXPECT_GT(w, 1.0);
        EXPECT_LT(w, 4.0);
    }
    for (double x = -30.0; x <= 30.0; x += 0.7) {
        const double w = ls_weight(flat, x);
        EXPECT_GT(w, 1.0);
        EXPECT_LT(w, 2.0);
    }
}

TEST(Spaces, A2LinearPhase)
{
    const auto phase = phase_model::linear(pi);
    const auto rep = muckenhoupt_a2(phase, 0.0, {-100.0, 100.0});
    ASSERT_EQ(rep.lambda.size(), 201u);
    EXPECT_NEAR(rep.lambda.front(), -100.0, 1e-12);
    EXPECT_NEAR(rep.lambda[57], -43.0, 1e-12);
    EXPECT_TRUE(rep.separated);
    EXPECT_NEAR(rep.min_gap, 1.0, 1e-12);
    EXPECT_GE(rep.sup_ratio, 1.0);
    EXPECT_LE(rep.sup_ratio, pi * pi / 4.0);
    EXPECT_EQ(rep.sup_by_length.size(), 8u);
}

TEST(Spaces, A2ConstantWeight)
{
    const auto rep = muckenhoupt_a2_weight([](double) { return 3.0; }, {-100.0, 100.0});
    EXPECT_NEAR(rep.sup_ratio, 1.0, 1e-10);
}

TEST(Spaces, A2TooSmall)
{
    EXPECT_THROW(muckenhoupt_a2(phase_model::linear(0.1), 0.0, {0.5, 2.0}), precondition_error);
}

TEST(Spaces, A2FamilyTrend)
{
    const example_family fam(1.5);
    const auto near = muckenhoupt_a2(fam.phase(), 0.0, {2.0, 150.0});
    const auto far = muckenhoupt_a2(fam.phase(), 0.0, {2.0, 300.0});
    EXPECT_GT(far.sup_ratio, 2.0 * near.sup_ratio);
    EXPECT_GT(far.worst.lo, 150.0);
}

TEST(Spaces, SummitGrowth)
{
    const auto rep = summit_growth_check(*example_family(1.0).zeros(), 0.1);
    EXPECT_TRUE(std::isfinite(rep.K));
    EXPECT_GT(rep.K, 0.0);
    EXPECT_FALSE(rep.flagged);

    std::vector<zero> flat, steep;
    for (int k = 1; k <= 64; ++k) {
        flat.push_back({static_cast<double>(k), 0.3, 1});
        steep.push_back({static_cast<double>(k), std::exp(-static_cast<double>(k)), 1});
    }
    EXPECT_EQ(summit_growth_check(zero_sequence(flat), 0.1).K, 0.0);
    EXPECT_FALSE(summit_growth_check(zero_sequence(flat), 0.1).flagged);
    EXPECT_TRUE(summit_growth_check(zero_sequence(steep), 0.1).flagged);
}

TEST(Spaces, SineSandwichFinite)
{
    const example_family fam(1.0);
    const auto rep = sine_sandwich(fam, {-50.0, 50.0, 1.0, 1.0}, 201, 1);
    EXPECT_TRUE(std::isfinite(rep.c_lower));
    EXPECT_TRUE(std::isfinite(rep.c_upper));
    EXPECT_LT(rep.growth_max - rep.growth_min, 10.0);
}
