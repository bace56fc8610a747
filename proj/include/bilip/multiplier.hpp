#ifndef BILIP_MULTIPLIER_HPP
#define BILIP_MULTIPLIER_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "density.hpp"
#include "error.hpp"
#include "phase.hpp"
#include "potential.hpp"
#include "quadrature.hpp"

namespace bilip {

// Cells [x_k, x_{k+1}] for k in [k_min, k_max], each of mass alpha_k, with x_0 = 0.
struct partition
{
    int k_min = 0;
    std::vector<double> x;   // x[k - k_min], one more entry than alpha
    std::vector<int> alpha;  // alpha[k - k_min]

    int k_max() const { return k_min + static_cast<int>(alpha.size()) - 1; }
    double point(int k) const { return x[static_cast<std::size_t>(k - k_min)]; }
    int mult(int k) const { return alpha[static_cast<std::size_t>(k - k_min)]; }
    std::size_t cells() const { return alpha.size(); }
};

// Smallest integer strictly above 2 * C2 * N.
inline int minimal_multiplicity(const bilipschitz_estimate &bl)
{
    return static_cast<int>(std::floor(2.0 * bl.C2 * bl.N)) + 1;
}

namespace detail {

// Finds x on the side `dir` of `from` with Phi(x) = level, to 1e-12 in mass.
template <class Prim>
double solve_cell_end(Prim &&prim, double from, int dir, double level, double min_len,
                      double max_len)
{
    constexpr double mass_tol = 1e-12;
    auto F = [&](double len) { return dir * (prim(from + dir * len) - level); };
    double lo = 0.0, flo = F(0.0);
    double hi = std::max(min_len, 1e-3), fhi = F(hi);
    while (fhi < 0.0) {
        lo = hi;
        flo = fhi;
        hi *= 2.0;
        if (hi > max_len)
            throw numeric_error("partition step failed", -fhi);
        fhi = F(hi);
    }
    // Illinois regula falsi, falling back to bisection when it stalls.
    int side = 0;
    for (int it = 0; it < 300; ++it) {
        double m = (lo * fhi - hi * flo) / (fhi - flo);
        if (!(m > lo && m < hi) || it % 8 == 7)
            m = 0.5 * (lo + hi);
        const double fm = F(m);
        if (fm == 0.0 || (std::abs(fm) <= mass_tol && hi - lo < 1e-6))
            return from + dir * m;
        if (fm < 0.0) {
            lo = m;
            flo = fm;
            if (side == -1)
                fhi *= 0.5;
            side = -1;
        } else {
            hi = m;
            fhi = fm;
            if (side == 1)
                flo *= 0.5;
            side = 1;
        }
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(from) + hi))
            return from + dir * (std::abs(flo) < std::abs(fhi) ? lo : hi);
    }
    throw numeric_error("partition step failed", std::min(std::abs(flo), std::abs(fhi)));
}

} // namespace detail

// Cell mass int_a^b gamma via the primitive.
template <class D>
double cell_mass(const D &g, double a, double b)
{
    return g.primitive(b) - g.primitive(a);
}

// Builds x_k with x_0 = 0 and int_{x_k}^{x_{k+1}} gamma = alpha_k.
template <class D>
partition build_partition(const D &g, const std::function<int(int)> &alpha_of, int k_min,
                          int k_max, const bilipschitz_estimate &bl, double B)
{
    require(k_min <= 0 && k_max >= -1 && k_min <= k_max, "window must contain the cell at x_0");
    if (!(bl.C1 > 0.0))
        throw precondition_error("gamma must be positive (bi-Lipschitz lower constant is not)");
    partition p;
    p.k_min = k_min;
    p.alpha.resize(static_cast<std::size_t>(k_max - k_min + 1));
    for (int k = k_min; k <= k_max; ++k) {
        const int a = alpha_of(k);
        if (!(a > 2.0 * bl.C2 * bl.N && a < B))
            throw precondition_error("multiplicity bound violated");
        p.alpha[static_cast<std::size_t>(k - k_min)] = a;
    }
    p.x.assign(p.alpha.size() + 1, 0.0);
    auto prim = [&](double t) { return g.primitive(t); };
    const double max_len = 4.0 * (B / bl.C1 + bl.N) + 8.0;
    double level = 0.0;
    for (int k = 0; k <= k_max; ++k) {
        const std::size_t i = static_cast<std::size_t>(k - k_min);
        level += p.alpha[i];
        p.x[i + 1] = detail::solve_cell_end(prim, p.x[i], 1, level, bl.N, max_len);
    }
    level = 0.0;
    for (int k = -1; k >= k_min; --k) {
        const std::size_t i = static_cast<std::size_t>(k - k_min);
        level -= p.alpha[i];
        p.x[i] = detail::solve_cell_end(prim, p.x[i + 1], -1, level, bl.N, max_len);
    }
    return p;
}

template <class D>
partition build_partition(const D &g, int alpha0, int k_min, int k_max,
                          const bilipschitz_estimate &bl, double B)
{
    return build_partition(g, [alpha0](int) { return alpha0; }, k_min, k_max, bl, B);
}

// xi_k = (1/alpha_k) int_{x_k}^{x_{k+1}} t gamma(t) dt.
template <class D>
std::vector<double> centroids(const D &g, const partition &p, const tolerance &tol = {1e-13, 1e-13, 4000})
{
    std::vector<double> xi(p.cells());
    for (std::size_t i = 0; i < p.cells(); ++i) {
        const double a = p.x[i], b = p.x[i + 1];
        const double m = cell_moment(g, a, b, tol).value;
        xi[i] = a + m / p.alpha[i];
    }
    return xi;
}

// Checks of the partition and centroid bounds against the declared constants.
struct partition_check
{
    double min_gap = 0.0, max_gap = 0.0;
    double min_offset = 0.0;   // min over k of xi_k - x_k
    double max_mass_error = 0.0;
    bool gaps_ok = false, multiplicities_ok = false, centroids_ok = false, inside_ok = false;

    bool ok() const { return gaps_ok && multiplicities_ok && centroids_ok && inside_ok; }
};

template <class D>
partition_check check_partition(const D &g, const partition &p, const std::vector<double> &xi,
                                const bilipschitz_estimate &bl, double B)
{
    partition_check c;
    c.min_gap = std::numeric_limits<double>::infinity();
    c.min_offset = std::numeric_limits<double>::infinity();
    c.gaps_ok = c.multiplicities_ok = c.centroids_ok = c.inside_ok = true;
    const double N = bl.N;
    for (std::size_t i = 0; i < p.cells(); ++i) {
        const double gap = p.x[i + 1] - p.x[i];
        c.min_gap = std::min(c.min_gap, gap);
        c.max_gap = std::max(c.max_gap, gap);
        c.gaps_ok = c.gaps_ok && gap > 2.0 * N && gap < B / bl.C1;
        const int a = p.alpha[i];
        c.multiplicities_ok = c.multiplicities_ok && a > 2.0 * bl.C2 * N && a < B;
        const double off = xi[i] - p.x[i];
        c.min_offset = std::min(c.min_offset, off);
        c.centroids_ok = c.centroids_ok && off >= bl.C1 * N * N / B;
        c.inside_ok = c.inside_ok && xi[i] > p.x[i] && xi[i] < p.x[i + 1];
        c.max_mass_error = std::max(c.max_mass_error, std::abs(cell_mass(g, p.x[i], p.x[i + 1]) - a));
    }
    return c;
}

// f_nu(x) = int_0^x d nu for nu = gamma dt - sum alpha_k delta_{xi_k}, endpoints included.
template <class D>
double f_nu(const D &g, const partition &p, const std::vector<double> &xi, double x)
{
    double jumps = 0.0;
    for (std::size_t i = 0; i < xi.size(); ++i) {
        if (x >= 0.0 && xi[i] >= 0.0 && xi[i] <= x)
            jumps -= p.alpha[i];
        if (x < 0.0 && xi[i] <= 0.0 && xi[i] >= x)
            jumps += p.alpha[i];
    }
    return g.primitive(x) + jumps;
}

struct linear_coefficient_result
{
    double alpha = 0.0;
    double C = 0.0;
    double quadrature_error = 0.0;
    double tail_bound = 0.0;   // sup|f_nu| * 2 / T
};

// C = -f(-1) - f(1) + int_{|t|>1} f(t)/t^2 dt, then alpha = C - sum_{|xi_k|<=1} alpha_k/xi_k.
// The integral runs over [x_{k_min}, -1] and [1, x_{k_max+1}]; f vanishes at both ends.
template <class D>
linear_coefficient_result linear_coefficient(const D &g, const partition &p,
                                             const std::vector<double> &xi,
                                             const quadrature_config &cfg)
{
    cfg.validate();
    const double left = p.x.front(), right = p.x.back();
    if (!(left < -1.0 && right > 1.0))
        throw precondition_error("enlarge window");
    const tolerance tol{cfg.abs_tol * 1e-3, cfg.rel_tol, cfg.max_subdivisions};
    linear_coefficient_result r;

    // Pieces on which the jump count is constant.
    auto piecewise = [&](double a, double b, int side) {
        std::vector<double> cuts{a};
        for (double v : xi)
            if (v > a && v < b)
                cuts.push_back(v);
        cuts.push_back(b);
        std::sort(cuts.begin(), cuts.end());
        estimate total;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
            const double jumps = f_nu(g, p, xi, mid) - g.primitive(mid);
            auto f = [&](double t) { return (g.primitive(t) + jumps) / (t * t); };
            total += integrate(f, cuts[i], cuts[i + 1], g.breakpoints(cuts[i], cuts[i + 1]), tol);
        }
        (void)side;
        return total;
    };
    estimate body = piecewise(1.0, right, 1);
    body += piecewise(left, -1.0, -1);
    r.C = -f_nu(g, p, xi, -1.0) - f_nu(g, p, xi, 1.0) + body.value;
    r.quadrature_error = body.error;
    double near = 0.0;
    for (std::size_t i = 0; i < xi.size(); ++i)
        if (std::abs(xi[i]) <= 1.0)
            near += p.alpha[i] / xi[i];
    r.alpha = r.C - near;
    const double sup_f = *std::max_element(p.alpha.begin(), p.alpha.end());
    r.tail_bound = sup_f * 2.0 / std::min(-left, right);
    return r;
}

// Power sums of the zeros beyond the window, scaled: right[j] = b^j sum_{k > k_max} alpha_k xi_k^-j
// with b = x_{k_max+1}, left[j] likewise with R = |x_{k_min}|.
struct tail_model
{
    static constexpr int max_order = 64;
    double b = 0.0, R = 0.0;
    std::vector<double> right, left;
    double spread_right = 0.0, spread_left = 0.0; // sigma^2 * density, averaged over edge cells
};

struct multiplier_product
{
    double alpha = 0.0;
    std::vector<double> xi;
    std::vector<int> mult;
    partition cells;
    tail_model tail;
    linear_coefficient_result coefficient;
    std::string gamma_name;

    int k_min() const { return cells.k_min; }
    int k_max() const { return cells.k_max(); }
    // Largest |Re z| at which evaluation is trusted.
    double trusted_radius() const { return 0.5 * std::min(tail.b, tail.R); }
};

namespace detail {

template <class D>
double edge_spread(const D &g, const partition &p, const std::vector<double> &xi, bool right_edge)
{
    const std::size_t n = p.cells();
    const std::size_t take = std::min<std::size_t>(4, n);
    double acc = 0.0;
    const tolerance tol{1e-12, 1e-12, 4000};
    for (std::size_t q = 0; q < take; ++q) {
        const std::size_t i = right_edge ? n - 1 - q : q;
        const double a = p.x[i], b = p.x[i + 1], c = xi[i];
        auto f = [&](double t) { return (t - c) * (t - c) * g(t); };
        const double second = integrate(f, a, b, g.breakpoints(a, b), tol).value;
        acc += second / (b - a);
    }
    return acc / take;
}

template <class D>
tail_model make_tail_model(const D &g, const partition &p, const std::vector<double> &xi,
                           const tolerance &tol)
{
    tail_model t;
    t.b = p.x.back();
    t.R = -p.x.front();
    t.spread_right = edge_spread(g, p, xi, true);
    t.spread_left = edge_spread(g, p, xi, false);
    const double phib = g.primitive(t.b), phia = g.primitive(-t.R);
    const asymptote ar = g.far(1), al = g.far(-1);
    t.right.assign(tail_model::max_order + 1, 0.0);
    t.left.assign(tail_model::max_order + 1, 0.0);
    for (int j = 2; j <= tail_model::max_order; ++j) {
        const double mr = linear_moment(ar, j, t.b, 1) + g.remainder_moment(j, t.b, 1, tol);
        t.right[j] = -phib + j * mr - 0.5 * t.spread_right * j / t.b;
        const double ml = linear_moment(al, j, t.R, -1) + g.remainder_moment(j, t.R, -1, tol);
        const double sj = (j % 2 == 0) ? 1.0 : -1.0;
        t.left[j] = sj * phia + j * ml - sj * 0.5 * t.spread_left * j / t.R;
    }
    return t;
}

} // namespace detail

struct multiplier_config
{
    int alpha0 = 0;        // 0 selects the minimal admissible multiplicity
    double B = 0.0;        // 0 selects alpha0 + 1
    int k_min = -200;
    int k_max = 200;
};

// Partition, centroids, linear coefficient and tail model in one go.
template <class D>
multiplier_product build_multiplier(const D &g, const bilipschitz_estimate &bl,
                                    multiplier_config mc, const quadrature_config &cfg)
{
    if (mc.alpha0 == 0)
        mc.alpha0 = minimal_multiplicity(bl);
    if (mc.B == 0.0)
        mc.B = mc.alpha0 + 1.0;
    multiplier_product m;
    m.cells = build_partition(g, mc.alpha0, mc.k_min, mc.k_max, bl, mc.B);
    m.xi = centroids(g, m.cells);
    m.mult = m.cells.alpha;
    m.coefficient = linear_coefficient(g, m.cells, m.xi, cfg);
    m.alpha = m.coefficient.alpha;
    m.tail = detail::make_tail_model(g, m.cells, m.xi, make_tolerance(cfg));
    m.gamma_name = g.name();
    return m;
}

inline multiplier_product build_multiplier(const any_density &g, const bilipschitz_estimate &bl,
                                           multiplier_config mc, const quadrature_config &cfg)
{
    return std::visit([&](const auto &d) { return build_multiplier(d, bl, mc, cfg); }, g);
}

struct multiplier_value
{
    double log_modulus = 0.0;
    double tail_error = 0.0;
    cplx sign{1.0, 0.0};   // F / |F|
    bool at_zero = false;
    int zero_mult = 0;
};

// log|F(z)| for F(z) = e^{alpha z} prod (1 - z/xi_k)^{alpha_k} e^{z alpha_k / xi_k}.
inline multiplier_value eval_multiplier(const multiplier_product &m, cplx z)
{
    require(std::abs(z) <= m.trusted_radius(), "enlarge window");
    multiplier_value out;
    const double x = z.real(), y = z.imag();
    double lm = m.alpha * x;
    double arg = m.alpha * y;
    int negatives = 0;
    for (std::size_t i = 0; i < m.xi.size(); ++i) {
        const double xi = m.xi[i];
        const int a = m.mult[i];
        if (std::abs(z - xi) <= 1e-12 * std::max(1.0, std::abs(xi))) {
            out.at_zero = true;
            out.zero_mult = a;
            continue;
        }
        const cplx w = 1.0 - z / xi;
        lm += a * (std::log(std::abs(w)) + x / xi);
        arg += a * (std::arg(w) + y / xi);
        if (y == 0.0 && x / xi > 1.0)
            negatives += a;
    }
    const tail_model &t = m.tail;
    const cplx qr = z / t.b, ql = z / t.R;
    cplx pr = qr, pl = ql;
    double last = 0.0;
    for (int j = 2; j <= tail_model::max_order; ++j) {
        pr *= qr;
        pl *= ql;
        const double term_re = (pr.real() * t.right[j] + pl.real() * t.left[j]) / j;
        lm -= term_re;
        arg -= (pr.imag() * t.right[j] + pl.imag() * t.left[j]) / j;
        last = term_re;
    }
    // Next order of the cell-sum expansion: the fourth moment term, bounded by
    // the variance correction scaled by (cell / distance)^2, plus truncation.
    double corr = 0.0;
    pr = qr;
    pl = ql;
    for (int j = 2; j <= 8; ++j) {
        pr *= qr;
        pl *= ql;
        corr += std::abs(pr) * 0.5 * t.spread_right / t.b + std::abs(pl) * 0.5 * t.spread_left / t.R;
    }
    out.tail_error = corr * 16.0 / (t.b * t.b) * 10.0 + std::abs(last);
    if (out.at_zero) {
        out.log_modulus = -std::numeric_limits<double>::infinity();
        out.sign = 0.0;
        return out;
    }
    out.log_modulus = lm;
    if (y == 0.0)
        out.sign = (negatives % 2 == 0) ? 1.0 : -1.0;
    else
        out.sign = std::polar(1.0, std::remainder(arg, 2.0 * std::numbers::pi));
    return out;
}

// E(z) = F(z + i) for the simple-zero multiplier of gamma = tau - m.
template <class D>
multiplier_product build_shifted_multiplier(const D &g, double N, int k_min, int k_max,
                                            const quadrature_config &cfg,
                                            double bilip_half_width = 200.0)
{
    const auto bl = estimate_bilipschitz(mass_phase(g), N, {-bilip_half_width, bilip_half_width}, 4001);
    if (!(bl.C1 > 0.0))
        throw precondition_error("gamma must be positive");
    multiplier_config mc;
    mc.alpha0 = 1;
    mc.B = 2.0;
    mc.k_min = k_min;
    mc.k_max = k_max;
    return build_multiplier(g, bl, mc, cfg);
}

inline multiplier_value eval_shifted_multiplier(const multiplier_product &m, cplx z)
{
    return eval_multiplier(m, z + cplx(0.0, 1.0));
}

struct grid_point
{
    double x = 0.0, y = 0.0, ratio = 0.0;
};

struct comparability_report
{
    rect grid{};
    int nx = 0, ny = 0;
    double ratio_inf = 0.0, ratio_sup = 0.0, band_width = 0.0;
    std::vector<grid_point> worst_points;
    double max_potential_error = 0.0;
    double max_tail_error = 0.0;
};

namespace detail {

template <class LogA, class LogB>
comparability_report compare_on_grid(rect r, int nx, int ny, LogA &&log_a, LogB &&log_b)
{
    require(nx >= 1 && ny >= 1, "grid needs at least one node per axis");
    comparability_report rep;
    rep.grid = r;
    rep.nx = nx;
    rep.ny = ny;
    std::vector<grid_point> pts;
    pts.reserve(static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j) {
        const double y = ny == 1 ? r.y_min : r.y_min + (r.y_max - r.y_min) * j / (ny - 1);
        for (int i = 0; i < nx; ++i) {
            const double x = nx == 1 ? r.x_min : r.x_min + (r.x_max - r.x_min) * i / (nx - 1);
            const cplx z(x, y);
            const estimate a = log_a(z);
            const estimate b = log_b(z);
            rep.max_tail_error = std::max(rep.max_tail_error, a.error);
            rep.max_potential_error = std::max(rep.max_potential_error, b.error);
            pts.push_back({x, y, std::exp(a.value - b.value)});
        }
    }
    auto by_ratio = [](const grid_point &p, const grid_point &q) {
        if (p.ratio != q.ratio)
            return p.ratio < q.ratio;
        if (p.y != q.y)
            return p.y < q.y;
        return p.x < q.x;
    };
    std::sort(pts.begin(), pts.end(), by_ratio);
    rep.ratio_inf = pts.front().ratio;
    rep.ratio_sup = pts.back().ratio;
    rep.band_width = rep.ratio_sup / rep.ratio_inf;
    const std::size_t k = std::min<std::size_t>(5, pts.size());
    for (std::size_t i = 0; i < k; ++i)
        rep.worst_points.push_back(pts[i]);
    for (std::size_t i = pts.size() - k; i < pts.size(); ++i)
        if (i >= k)
            rep.worst_points.push_back(pts[i]);
    return rep;
}

} // namespace detail

// Band of |F(z)| / e^{omega(z)} over a grid with Im z >= eps > 0.
template <class D>
comparability_report verify_comparability(const multiplier_product &m, const D &g, rect r, int nx,
                                          int ny, const quadrature_config &cfg)
{
    require(r.y_min > 0.0, "grid must stay in Im z >= eps > 0");
    require(std::max(std::abs(r.x_min), std::abs(r.x_max)) <= m.trusted_radius(),
            "grid outside the trusted window");
    auto log_f = [&](cplx z) {
        const multiplier_value v = eval_multiplier(m, z);
        return estimate{v.log_modulus, v.tail_error, true};
    };
    if constexpr (is_zero_sum_v<D>) {
        return detail::compare_on_grid(r, nx, ny, log_f, [&](cplx z) { return potential(g, z, cfg); });
    } else {
        double reach = std::abs(cplx(std::max(std::abs(r.x_min), std::abs(r.x_max)), r.y_max));
        potential_field<D> field(g, cfg, detail::field_radius<D>(cfg, reach));
        return detail::compare_on_grid(r, nx, ny, log_f, [&](cplx z) { return field.omega(z); });
    }
}

inline comparability_report verify_comparability(const multiplier_product &m, const any_density &g,
                                                 rect r, int nx, int ny, const quadrature_config &cfg)
{
    return std::visit([&](const auto &d) { return verify_comparability(m, d, r, nx, ny, cfg); }, g);
}

} // namespace bilip

#endif
