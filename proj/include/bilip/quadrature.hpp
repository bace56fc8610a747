#ifndef BILIP_QUADRATURE_HPP
#define BILIP_QUADRATURE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "error.hpp"

namespace bilip {

// A value together with an absolute error budget.
struct estimate
{
    double value = 0.0;
    double error = 0.0;
    bool converged = true;

    estimate &operator+=(const estimate &o)
    {
        value += o.value;
        error += o.error;
        converged = converged && o.converged;
        return *this;
    }
    estimate &operator-=(const estimate &o)
    {
        value -= o.value;
        error += o.error;
        converged = converged && o.converged;
        return *this;
    }
    friend estimate operator+(estimate a, const estimate &b) { return a += b; }
    friend estimate operator-(estimate a, const estimate &b) { return a -= b; }
    friend estimate operator*(double s, estimate a)
    {
        a.value *= s;
        a.error *= std::abs(s);
        return a;
    }
};

// Tolerances and truncation budgets shared by every integral and infinite sum.
//
// tail_radius is the radius beyond which potentials switch to the
// integrated-by-parts far field; truncation_budget is the minimum number of
// explicit terms summed from an infinite zero family before the analytic tail
// takes over. split_points are forced panel boundaries added to every
// integral over the real line (the kernel's own breaks t = -1, 0, 1, Re z are
// always added by the potential code).
struct quadrature_config
{
    double abs_tol = 1e-8;
    double rel_tol = 1e-8;
    double tail_radius = 256.0;
    int max_subdivisions = 4000;
    std::vector<double> split_points{};
    int truncation_budget = 512;

    void validate() const
    {
        require(abs_tol > 0.0 && rel_tol > 0.0, "tolerances must be positive");
        require(tail_radius > 1.0, "tail radius must exceed 1");
        require(max_subdivisions >= 8, "max_subdivisions must be at least 8");
        require(truncation_budget >= 1, "truncation budget must be at least 1");
    }

    quadrature_config tightened(double factor) const
    {
        quadrature_config c = *this;
        c.abs_tol *= factor;
        c.rel_tol *= factor;
        return c;
    }
};

struct tolerance
{
    double abs = 1e-10;
    double rel = 1e-10;
    int max_subdivisions = 4000;
};

inline tolerance make_tolerance(const quadrature_config &cfg)
{
    return {cfg.abs_tol, cfg.rel_tol, cfg.max_subdivisions};
}

namespace detail {

// 21-point Gauss-Kronrod rule (QUADPACK qk21). Odd indices of the Kronrod
// abscissae carry the embedded 10-point Gauss rule.
inline constexpr std::array<double, 11> gk21_x = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr std::array<double, 11> gk21_wk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525478136, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> gk21_wg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct panel
{
    double a, b, value, error;
    bool splittable;
};

template <class F>
panel gk21(F &f, double a, double b)
{
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(centre);
    double resk = gk21_wk[10] * fc;
    double resg = 0.0;
    double resabs = std::abs(resk);
    std::array<double, 10> f1{}, f2{};
    for (std::size_t j = 0; j < 10; ++j) {
        const double dx = half * gk21_x[j];
        f1[j] = f(centre - dx);
        f2[j] = f(centre + dx);
        const double sum = f1[j] + f2[j];
        resk += gk21_wk[j] * sum;
        resabs += gk21_wk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1)
            resg += gk21_wg[j / 2] * sum;
    }
    const double mean = 0.5 * resk;
    double resasc = gk21_wk[10] * std::abs(fc - mean);
    for (std::size_t j = 0; j < 10; ++j)
        resasc += gk21_wk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

    const double h = std::abs(half);
    double err = std::abs((resk - resg) * half);
    resasc *= h;
    resabs *= h;
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double floor = 50.0 * eps * resabs;
    bool splittable = true;
    if (err <= floor) {
        err = std::max(err, floor);
        splittable = false;
    }
    // Geometric-mesh cap: panels narrower than a few ulps of their position
    // cannot be refined further.
    if (h <= 64.0 * eps * std::max({1.0, std::abs(a), std::abs(b)}))
        splittable = false;
    if (!std::isfinite(resk))
        throw numeric_error("quadrature hit a non-finite integrand value",
                            std::numeric_limits<double>::infinity());
    return {a, b, resk * half, err, splittable};
}

inline bool heap_less(const panel &x, const panel &y)
{
    // Unsplittable panels sink to the bottom of the heap.
    if (x.splittable != y.splittable)
        return !x.splittable;
    return x.error < y.error;
}

} // namespace detail

// Globally adaptive Gauss-Kronrod integration of f over [a, b]. Interior
// break points become forced panel boundaries. The sum is accumulated in
// left-to-right panel order so the result is independent of refinement order.
template <class F>
estimate integrate(F &&f, double a, double b, std::span<const double> breaks,
                   const tolerance &tol)
{
    if (a == b)
        return {};
    double sign = 1.0;
    if (b < a) {
        std::swap(a, b);
        sign = -1.0;
    }
    std::vector<double> cuts;
    cuts.reserve(breaks.size() + 2);
    cuts.push_back(a);
    for (double c : breaks)
        if (c > a && c < b)
            cuts.push_back(c);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<detail::panel> heap;
    heap.reserve(64);
    double total = 0.0, total_err = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        heap.push_back(detail::gk21(f, cuts[i], cuts[i + 1]));
        total += heap.back().value;
        total_err += heap.back().error;
    }
    std::make_heap(heap.begin(), heap.end(), detail::heap_less);

    int subdivisions = static_cast<int>(heap.size());
    bool converged = true;
    while (total_err > std::max(tol.abs, tol.rel * std::abs(total))) {
        if (!heap.front().splittable)
            break;
        if (subdivisions >= tol.max_subdivisions) {
            converged = false;
            break;
        }
        std::pop_heap(heap.begin(), heap.end(), detail::heap_less);
        const detail::panel worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        const detail::panel left = detail::gk21(f, worst.a, mid);
        const detail::panel right = detail::gk21(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end(), detail::heap_less);
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end(), detail::heap_less);
        ++subdivisions;
    }

    std::sort(heap.begin(), heap.end(),
              [](const detail::panel &x, const detail::panel &y) { return x.a < y.a; });
    estimate out;
    for (const auto &p : heap) {
        out.value += p.value;
        out.error += p.error;
    }
    out.value *= sign;
    out.converged = converged;
    return out;
}

template <class F>
estimate integrate(F &&f, double a, double b, const tolerance &tol)
{
    return integrate(std::forward<F>(f), a, b, std::span<const double>{}, tol);
}

// Integral over [a, +inf) through t = a + (1 - u) / u.
template <class F>
estimate integrate_right_tail(F &&f, double a, const tolerance &tol)
{
    auto g = [&](double u) {
        const double t = a + (1.0 - u) / u;
        return f(t) / (u * u);
    };
    return integrate(g, 0.0, 1.0, tol);
}

// Integral over (-inf, b] through t = b - (1 - u) / u.
template <class F>
estimate integrate_left_tail(F &&f, double b, const tolerance &tol)
{
    auto g = [&](double u) {
        const double t = b - (1.0 - u) / u;
        return f(t) / (u * u);
    };
    return integrate(g, 0.0, 1.0, tol);
}

// Integral over the whole line with forced breaks.
template <class F>
estimate integrate_line(F &&f, std::vector<double> breaks, const tolerance &tol)
{
    std::sort(breaks.begin(), breaks.end());
    const double lo = breaks.empty() ? -1.0 : breaks.front() - 1.0;
    const double hi = breaks.empty() ? 1.0 : breaks.back() + 1.0;
    estimate out = integrate(f, lo, hi, breaks, tol);
    out += integrate_left_tail(f, lo, tol);
    out += integrate_right_tail(f, hi, tol);
    return out;
}

// Fixed n-point Gauss-Legendre rule on [-1, 1], nodes by Newton iteration.
template <std::size_t N>
struct gauss_legendre
{
    std::array<double, N> x{};
    std::array<double, N> w{};

    gauss_legendre()
    {
        for (std::size_t i = 0; i < N; ++i) {
            double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                                (static_cast<double>(N) + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = z;
                for (std::size_t k = 2; k <= N; ++k) {
                    const double kk = static_cast<double>(k);
                    const double p2 = ((2.0 * kk - 1.0) * z * p1 - (kk - 1.0) * p0) / kk;
                    p0 = p1;
                    p1 = p2;
                }
                dp = static_cast<double>(N) * (z * p1 - p0) / (z * z - 1.0);
                const double dz = p1 / dp;
                z -= dz;
                if (std::abs(dz) < 1e-16)
                    break;
            }
            x[i] = z;
            w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        }
    }

    template <class F>
    double operator()(F &&f, double a, double b) const
    {
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        double s = 0.0;
        for (std::size_t i = 0; i < N; ++i)
            s += w[i] * f(c + h * x[i]);
        return s * h;
    }
};

inline const gauss_legendre<16> &gl16()
{
    static const gauss_legendre<16> rule;
    return rule;
}

// Sum of g(n) over integers n >= first, for g smooth and decaying at least
// like n^-2 beyond first. Midpoint Euler-Maclaurin: the integral from
// first - 1/2 plus g'/24 there; the next term of the expansion is reported
// as the error.
template <class G>
estimate lattice_tail(G &&g, double first, const tolerance &tol)
{
    const double a = first - 0.5;
    auto h = [&](double u) { return g(a / u) * a / (u * u); };
    estimate out = integrate(h, 0.0, 1.0, tol);
    const double d = 0.25;
    const double gm2 = g(a - 2 * d), gm1 = g(a - d), gp1 = g(a + d), gp2 = g(a + 2 * d);
    const double g1 = (gm2 - 8.0 * gm1 + 8.0 * gp1 - gp2) / (12.0 * d);
    const double g3 = (gp2 - 2.0 * gp1 + 2.0 * gm1 - gm2) / (2.0 * d * d * d);
    out.value += g1 / 24.0;
    out.error += 7.0 / 5760.0 * std::abs(g3) + 1e-3 * std::abs(g3) * d * d;
    return out;
}

} // namespace bilip

#endif
