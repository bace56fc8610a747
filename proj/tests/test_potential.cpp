#include <cmath>
#include <complex>
#include <memory>
#include <numbers>

#include <gtest/gtest.h>

#include <bilip/density.hpp>
#include <bilip/potential.hpp>

using namespace bilip;
using std::numbers::pi;

namespace {

// Si(1) by its alternating series.
double si1()
{
    double s = 0.0, fact = 1.0;
    for (int n = 0; n < 12; ++n) {
        if (n > 0)
            fact *= (2.0 * n) * (2.0 * n + 1.0);
        s += ((n % 2) ? -1.0 : 1.0) / ((2.0 * n + 1.0) * fact);
    }
    return s;
}

// Closed form for gamma = 1 + sin(t)/2: the Fourier transform of log|t|
// gives int log|t - z| sin t dt = -pi e^{-|y|} sin x.
double sine_omega(cplx z)
{
    const double x = z.real(), y = std::abs(z.imag());
    return pi * y - 0.5 * pi * std::exp(-y) * std::sin(x) + 0.5 * x * (pi - 2.0 * si1());
}

// Brute-force potential of a finite zero set by adaptive quadrature on the line.
double brute_zero_potential(const std::vector<zero> &zs, cplx z)
{
    auto g = [&](double t) {
        double s = 0.0;
        for (const auto &q : zs)
            s += q.mult * q.eta / (pi * ((t - q.xi) * (t - q.xi) + q.eta * q.eta));
        return s;
    };
    std::vector<double> breaks{-1.0, 0.0, 1.0, z.real()};
    for (const auto &q : zs)
        breaks.push_back(q.xi);
    auto f = [&](double t) { return log_star(z, t) * g(t); };
    return integrate_line(f, breaks, tolerance{1e-13, 1e-13, 20000}).value;
}

} // namespace

TEST(Potential, LogStarValues)
{
    EXPECT_EQ(log_star(cplx(0, 0), 3.0), 0.0);
    EXPECT_NEAR(log_star(cplx(0, 1), 2.0), 0.5 * std::log(1.25), 1e-15);
    EXPECT_NEAR(log_star(cplx(1, 0), 2.0), std::log(0.5) + 0.5, 1e-15);
    EXPECT_NEAR(log_star(cplx(0.3, 0.2), 0.5), 0.5 * std::log((0.04 + 0.04) / 0.25), 1e-15);
    EXPECT_THROW(log_star(cplx(1, 1), 0.0), precondition_error);
}

TEST(Potential, FlatDensity)
{
    constant_density one(1.0);
    EXPECT_NEAR(potential(one, cplx(0, 1), {}).value, pi, 1e-8);
    EXPECT_NEAR(potential(one, cplx(3, 2), {}).value, 2 * pi, 1e-8);
    EXPECT_NEAR(potential(one, cplx(7.3, 0), {}).value, 0.0, 1e-8);
    EXPECT_NEAR(potential(one, cplx(-4, -2.5), {}).value, 2.5 * pi, 1e-8);
}

TEST(Potential, SineDensityMatchesClosedForm)
{
    sine_density g;
    for (cplx z : {cplx(0, 1), cplx(3, 2), cplx(-17.2, 0.5), cplx(40, 5), cplx(2.5, 0), cplx(-9, -3)})
        EXPECT_NEAR(potential(g, z, {}).value, sine_omega(z), 2e-8) << z;
}

TEST(Potential, LargeArgumentUsesWiderField)
{
    sine_density g;
    const cplx z(400, 3);
    EXPECT_NEAR(potential(g, z, {}).value, sine_omega(z), 1e-7);
}

TEST(Potential, ConjugateSymmetry)
{
    auto g = parse_density("example:1");
    for (cplx z : {cplx(0.3, 0.7), cplx(12.5, 2.0), cplx(-33, 4)}) {
        EXPECT_NEAR(potential(g, z, {}).value, potential(g, std::conj(z), {}).value, 1e-12);
    }
    sine_density s;
    EXPECT_NEAR(potential(s, cplx(5, 2), {}).value, potential(s, cplx(5, -2), {}).value, 1e-8);
}

TEST(Potential, BumpClosedFormMatchesQuadrature)
{
    std::vector<zero> zs{{0.0, 1.0, 1}, {2.5, 0.3, 2}, {-7.0, 0.05, 1}, {0.4, 0.8, 1}};
    zero_sum_density g(std::make_shared<const zero_sequence>(zs));
    for (cplx z : {cplx(0, 1), cplx(1.7, 0.4), cplx(-6.9, 0.01), cplx(3, 0), cplx(-2, -1.5)})
        EXPECT_NEAR(potential(g, z, {}).value, brute_zero_potential(zs, z), 1e-9) << z;
}

TEST(Potential, PoissonOfConstants)
{
    constant_density one(1.0), three(3.0);
    EXPECT_NEAR(poisson(one, cplx(1, 0.3), {}).value, 1.0, 1e-9);
    EXPECT_NEAR(poisson(three, cplx(-5, 7), {}).value, 3.0, 1e-9);
    EXPECT_THROW(poisson(one, cplx(0, 0), {}), precondition_error);
}

TEST(Potential, PoissonOfSine)
{
    sine_density g;
    for (cplx z : {cplx(0, 1), cplx(2, 0.5), cplx(-30, 6)})
        EXPECT_NEAR(poisson(g, z, {}).value, 1.0 + 0.5 * std::exp(-z.imag()) * std::sin(z.real()), 1e-9);
}

TEST(Potential, PoissonIsScaledYDerivative)
{
    auto g = parse_density("example:1");
    const cplx z(0, 10);
    const double h = 1e-3;
    const double fd = (potential(g, z + cplx(0, h), {}).value - potential(g, z - cplx(0, h), {}).value) / (2 * h);
    EXPECT_NEAR(fd / pi, poisson(g, z, {}).value, 1e-4);
}

TEST(Potential, Theta0OfConstants)
{
    for (double x : {-3.0, 0.0, 0.5, 41.0}) {
        EXPECT_NEAR(theta0(constant_density(1.0), x, {}).value, pi, 1e-8);
        EXPECT_NEAR(theta0(constant_density(2.5), x, {}).value, 2.5 * pi, 2e-8);
        EXPECT_NEAR(theta0_arctan(constant_density(1.0), x, {}).value, pi, 1e-8);
    }
}

TEST(Potential, Theta0OfSine)
{
    sine_density g;
    for (double x : {-60.0, -1.0, 0.0, 2.0, 77.7}) {
        const double expected = pi - 0.5 * pi * (std::exp(-1.0) - 1.0) * std::sin(x);
        EXPECT_NEAR(theta0(g, x, {}).value, expected, 2e-8) << x;
        EXPECT_NEAR(theta0_arctan(g, x, {}).value, expected, 2e-8) << x;
    }
}

TEST(Potential, Theta0TwoPathsOnFamily)
{
    auto g = parse_density("example:1");
    for (double x : {-50.0, 0.0, 0.3, 7.5, 50.0}) {
        const double a = theta0(g, x, {}).value, b = theta0_arctan(g, x, {}).value;
        EXPECT_NEAR(a, b, 2e-8) << x;
    }
}

TEST(Potential, Theta0PeaksAtZero)
{
    auto g = parse_density("example:1");
    EXPECT_GT(theta0(g, 50.0, {}).value, theta0(g, 50.5, {}).value);
}

TEST(Potential, ThetaWeightLinearPhase)
{
    for (double x : {-5.0, 0.0, 3.3}) {
        EXPECT_NEAR(theta_weight(constant_density(1.0), 1.25, x, {}).value, 2.5, 1e-12);
        EXPECT_NEAR(theta_weight(phase_model::linear(pi), 1.25, x, {}).value, 2.5, 1e-12);
        EXPECT_NEAR(theta_weight(phase_model::linear(2.0), 0.5, x, {}).value, 2.0 / pi, 1e-12);
    }
}

TEST(Potential, ThetaWeightRoutesAgree)
{
    auto zs = std::make_shared<const zero_sequence>(example_zeros(1.0));
    zero_sum_density g(zs);
    auto phase = phase_model::from_zeros(zs);
    for (double x : {-20.0, 3.0, 10.2, 35.5}) {
        EXPECT_NEAR(theta_weight(g, 1.25, x, {}).value, theta_weight(phase, 1.25, x, {}).value, 1e-7) << x;
    }
}

TEST(Potential, LaplacianProbe)
{
    EXPECT_NEAR(laplacian_probe(constant_density(1.0), cplx(2, 3), 1e-2, {}), 0.0, 1e-5);
    EXPECT_NEAR(laplacian_probe(parse_density("example:0.5"), cplx(5, 2), 1e-2, {}), 0.0, 1e-4);
    EXPECT_NEAR(laplacian_probe(sine_density{}, cplx(-3, 1), 1e-2, {}), 0.0, 1e-4);
    EXPECT_THROW(laplacian_probe(constant_density(1.0), cplx(1, 0.015), 1e-2, {}), precondition_error);
}

TEST(Potential, GridOfFlatDensity)
{
    auto grid = fill_grid(constant_density(1.0), rect{-5, 5, 0.5, 5}, 41, 19, {});
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i)
            EXPECT_NEAR(grid.at(i, j), pi * grid.y(j), 1e-6);
}
