#ifndef BILIP_SPACES_HPP
#define BILIP_SPACES_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <vector>

#include "density.hpp"
#include "error.hpp"
#include "phase.hpp"
#include "potential.hpp"
#include "quadrature.hpp"
#include "zeros.hpp"

namespace bilip {

// The worked example: zeros -i and +-n - i n^-alpha.
class example_family
{
public:
    explicit example_family(double alpha, int window = 200)
        : alpha_(alpha),
          zeros_(std::make_shared<const zero_sequence>(example_zeros(alpha, window)))
    {
    }

    double alpha() const { return alpha_; }
    const std::shared_ptr<const zero_sequence> &zeros() const { return zeros_; }
    zero_sum_density density(const quadrature_config &cfg = {}) const { return {zeros_, cfg}; }
    phase_model phase(const quadrature_config &cfg = {}) const
    {
        return phase_model::from_zeros(zeros_, cfg);
    }
    double eta(double n) const { return n == 0.0 ? 1.0 : std::pow(std::abs(n), -alpha_); }

private:
    double alpha_;
    std::shared_ptr<const zero_sequence> zeros_;
};

struct entire_value
{
    double log_modulus = 0.0;
    double arg = 0.0;
    double tail_error = 0.0;
    bool at_zero = false;
};

// E(z) = (z + i) prod_{n>=1} (1 - (z^2 + 2 i eta_n z) / (n^2 + eta_n^2)), factors for +-n paired.
inline entire_value eval_example_E(const example_family &fam, cplx z, int truncation = 0)
{
    const int T = truncation > 0 ? truncation
                                 : std::max(1000, static_cast<int>(std::ceil(20.0 * std::abs(z))));
    require(std::abs(z) <= 0.5 * T, "truncation too small for z");
    entire_value out;
    auto factor = [&](double n) {
        const double eta = fam.eta(n);
        return 1.0 - (z * z + cplx(0.0, 2.0 * eta) * z) / (n * n + eta * eta);
    };
    auto absorb = [&](cplx w) {
        if (w == 0.0) {
            out.at_zero = true;
            return;
        }
        out.log_modulus += std::log(std::abs(w));
        out.arg += std::arg(w);
    };
    absorb(z + cplx(0.0, 1.0));
    for (int n = 1; n <= T; ++n)
        absorb(factor(n));
    const tolerance tol{1e-14, 1e-12, 4000};
    const estimate re = lattice_tail([&](double s) { return std::log(std::abs(factor(s))); }, T + 1.0, tol);
    const estimate im = lattice_tail([&](double s) { return std::arg(factor(s)); }, T + 1.0, tol);
    out.log_modulus += re.value;
    out.arg += im.value;
    out.tail_error = re.error;
    if (out.at_zero)
        out.log_modulus = -std::numeric_limits<double>::infinity();
    return out;
}

inline double phi_prime_example(const example_family &fam, double x, const quadrature_config &cfg = {})
{
    return phase_derivative_from_zeros(*fam.zeros(), x, cfg).value;
}

inline double mu_example(const example_family &fam, double delta, double x)
{
    return mountain_chain(*fam.zeros(), delta, x);
}

// Nearest integer with ties going to the smaller one.
inline double nearest_integer(double x)
{
    return std::ceil(x - 0.5);
}

// |n_x|^alpha / (1 + |n_x|^alpha |x - n_x|) for x outside (-1/2, 1/2].
inline double theta_asymptotic_target(const example_family &fam, double x)
{
    if (x > -0.5 && x <= 0.5)
        throw precondition_error("x in the excluded center interval (-1/2, 1/2]");
    const double n = nearest_integer(x);
    const double p = std::pow(std::abs(n), fam.alpha());
    return p / (1.0 + p * std::abs(x - n));
}

// sqrt(phi'(x) / sigma(x)) with sigma = min(eta_x, 1) for the horizontally nearest zero.
inline double ls_weight(const example_family &fam, double x, const quadrature_config &cfg = {})
{
    const double sigma = std::min(fam.zeros()->nearest(x).eta, 1.0);
    return std::sqrt(phi_prime_example(fam, x, cfg) / sigma);
}

struct a2_interval
{
    double lo = 0.0, hi = 0.0, ratio = 0.0;
};

struct a2_report
{
    double alpha_phase = 0.0;
    std::vector<double> lambda;
    long intervals_tested = 0;
    double sup_ratio = 0.0;
    a2_interval worst{};
    std::vector<double> sup_by_length;   // one entry per dyadic length 1, 2, 4, ...
    bool separated = false;
    double min_gap = 0.0;
};

namespace detail {

// Sup over dyadic lengths 1..128 at positions stepping by max(L/2, 0.5) of
// (mean v)(mean 1/v), from cumulative integrals on the 0.5 grid.
inline void sweep_intervals(double lo, double hi, const std::vector<double> &cum_v,
                            const std::vector<double> &cum_inv, long budget, a2_report &rep)
{
    constexpr double h = 0.5;
    const int cells = static_cast<int>(cum_v.size()) - 1;
    rep.sup_ratio = 0.0;
    for (int L = 1; L <= 128 && L <= hi - lo; L *= 2) {
        const int len = static_cast<int>(std::lround(L / h));
        const int step = std::max(1, len / 2);
        const long count = (cells - len) / step + 1;
        const long stride = budget > 0 ? std::max(1L, (count + budget - 1) / budget) : 1L;
        double best = 0.0;
        for (long q = 0; q < count; q += stride) {
            const int a = static_cast<int>(q * step);
            const int b = a + len;
            const double ratio = (cum_v[b] - cum_v[a]) * (cum_inv[b] - cum_inv[a]) / (L * static_cast<double>(L));
            ++rep.intervals_tested;
            best = std::max(best, ratio);
            if (ratio > rep.sup_ratio) {
                rep.sup_ratio = ratio;
                rep.worst = {lo + a * h, lo + b * h, ratio};
            }
        }
        rep.sup_by_length.push_back(best);
    }
}

template <class V>
void cumulative(V &&f, double lo, double hi, const std::vector<double> &breaks,
                const tolerance &tol, std::vector<double> &out)
{
    constexpr double h = 0.5;
    const int cells = static_cast<int>(std::lround((hi - lo) / h));
    out.assign(static_cast<std::size_t>(cells) + 1, 0.0);
    auto it = breaks.begin();
    for (int i = 0; i < cells; ++i) {
        const double a = lo + i * h, b = lo + (i + 1) * h;
        std::vector<double> inner;
        while (it != breaks.end() && *it <= a)
            ++it;
        for (auto jt = it; jt != breaks.end() && *jt < b; ++jt)
            inner.push_back(*jt);
        out[i + 1] = out[i] + integrate(f, a, b, inner, tol).value;
    }
}

} // namespace detail

// A2 ratios for the weight v(x) = sin^2(phi - a) / (phi' dist(x, Lambda)^2), Lambda = {phi = a mod pi}.
inline a2_report muckenhoupt_a2(const phase_model &phase, double alpha_phase, interval domain,
                                long interval_budget = 0, const quadrature_config &cfg = {})
{
    constexpr double h = 0.5;
    require(alpha_phase >= 0.0 && alpha_phase < std::numbers::pi, "alpha_phase must lie in [0, pi)");
    require(domain.hi - domain.lo >= 1.0, "domain too small");
    const double lo = domain.lo;
    const double hi = lo + h * std::floor((domain.hi - domain.lo) / h);
    a2_report rep;
    rep.alpha_phase = alpha_phase;

    // Lambda by bisection on phi(x) = alpha + k pi inside each monotone grid cell.
    const int cells = static_cast<int>(std::lround((hi - lo) / h));
    std::vector<double> grid_phi(static_cast<std::size_t>(cells) + 1);
    for (int i = 0; i <= cells; ++i)
        grid_phi[i] = phase.phi(lo + i * h);
    for (int i = 0; i < cells; ++i)
        if (!(grid_phi[i + 1] > grid_phi[i]))
            throw precondition_error("phase must be strictly increasing on the domain");
    const double k_first = std::ceil((grid_phi.front() - alpha_phase) / std::numbers::pi);
    for (double k = k_first; alpha_phase + k * std::numbers::pi <= grid_phi.back(); k += 1.0) {
        const double level = alpha_phase + k * std::numbers::pi;
        if (level < grid_phi.front())
            continue;
        // Cell with grid_phi[i] <= level < grid_phi[i + 1], clamped at the right end.
        auto it = std::upper_bound(grid_phi.begin(), grid_phi.end(), level);
        const int i = std::min(static_cast<int>(std::distance(grid_phi.begin(), it)) - 1, cells - 1);
        double a = lo + i * h, b = a + h;
        if (grid_phi[i] == level) {
            rep.lambda.push_back(a);
            continue;
        }
        for (int it2 = 0; it2 < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it2) {
            const double m = 0.5 * (a + b);
            (phase.phi(m) < level ? a : b) = m;
        }
        rep.lambda.push_back(0.5 * (a + b));
    }
    if (rep.lambda.size() < 2)
        throw precondition_error("domain too small");
    rep.min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < rep.lambda.size(); ++i)
        rep.min_gap = std::min(rep.min_gap, rep.lambda[i] - rep.lambda[i - 1]);
    rep.separated = rep.min_gap > 0.0;

    const std::vector<double> &L = rep.lambda;
    auto dist = [&](double x) {
        auto it = std::lower_bound(L.begin(), L.end(), x);
        double d = std::numeric_limits<double>::infinity();
        if (it != L.end())
            d = *it - x;
        if (it != L.begin())
            d = std::min(d, x - *std::prev(it));
        return d;
    };
    auto v = [&](double x) {
        const double d = dist(x);
        const double pp = phase.phi_prime(x);
        if (d < 1e-7)
            return pp;
        const double s = std::sin(phase.phi(x) - alpha_phase);
        return s * s / (pp * d * d);
    };
    std::vector<double> breaks = L;
    for (std::size_t i = 1; i < L.size(); ++i)
        breaks.push_back(0.5 * (L[i] + L[i - 1]));
    if (phase.zeros())
        phase.zeros()->for_each(static_cast<int>(std::ceil(std::max(std::abs(lo), std::abs(hi)))) + 1,
                                [&](const zero &z) {
                                    if (z.xi > lo && z.xi < hi)
                                        breaks.push_back(z.xi);
                                });
    std::sort(breaks.begin(), breaks.end());
    const tolerance tol{1e-9, 1e-9, cfg.max_subdivisions};
    std::vector<double> cum_v, cum_inv;
    detail::cumulative(v, lo, hi, breaks, tol, cum_v);
    detail::cumulative([&](double x) { return 1.0 / v(x); }, lo, hi, breaks, tol, cum_inv);
    detail::sweep_intervals(lo, hi, cum_v, cum_inv, interval_budget, rep);
    return rep;
}

// Same interval family for a caller-supplied weight.
inline a2_report muckenhoupt_a2_weight(const std::function<double(double)> &weight, interval domain,
                                       long interval_budget = 0,
                                       const std::vector<double> &breaks = {})
{
    constexpr double h = 0.5;
    require(domain.hi - domain.lo >= 1.0, "domain too small");
    const double lo = domain.lo;
    const double hi = lo + h * std::floor((domain.hi - domain.lo) / h);
    a2_report rep;
    const tolerance tol{1e-12, 1e-12, 4000};
    std::vector<double> cum_v, cum_inv;
    detail::cumulative(weight, lo, hi, breaks, tol, cum_v);
    detail::cumulative([&](double x) { return 1.0 / weight(x); }, lo, hi, breaks, tol, cum_inv);
    detail::sweep_intervals(lo, hi, cum_v, cum_inv, interval_budget, rep);
    return rep;
}

struct summit_report
{
    double eps = 0.0;
    double K = 0.0;                  // over every pair with |k - l| >= 2
    std::vector<double> windows;     // W: summits with |xi| <= W
    std::vector<double> K_series;    // K restricted to each window
    bool flagged = false;            // K still growing across the last doubling
};

// Minimal K with |log eta_k - log eta_l| <= K |xi_k - xi_l|^(1 - eps) over summit pairs.
inline summit_report summit_growth_check(const zero_sequence &zs, double eps)
{
    require(eps > 0.0 && eps < 1.0, "eps must lie in (0, 1)");
    std::vector<zero> s;
    zs.for_each(zs.tail() ? zs.tail()->window : 0, [&](const zero &z) { s.push_back(z); });
    std::stable_sort(s.begin(), s.end(), [](const zero &a, const zero &b) { return a.xi < b.xi; });
    require(s.size() >= 2, "need at least two summits");
    summit_report rep;
    rep.eps = eps;
    double reach = 0.0;
    for (const auto &z : s)
        reach = std::max(reach, std::abs(z.xi));
    std::vector<double> ws;
    for (double W = 1.0; W < reach; W *= 2.0)
        ws.push_back(W);
    ws.push_back(reach);
    for (double W : ws) {
        double K = 0.0;
        for (std::size_t k = 0; k < s.size(); ++k) {
            if (std::abs(s[k].xi) > W)
                continue;
            for (std::size_t l = k + 2; l < s.size(); ++l) {
                if (std::abs(s[l].xi) > W)
                    continue;
                const double d = s[l].xi - s[k].xi;
                if (!(d > 0.0))
                    continue;
                const double num = std::abs(std::log(s[k].eta) - std::log(s[l].eta));
                K = std::max(K, num / std::pow(d, 1.0 - eps));
            }
        }
        rep.windows.push_back(W);
        rep.K_series.push_back(K);
    }
    rep.K = rep.K_series.back();
    if (rep.K_series.size() >= 2) {
        const double prev = rep.K_series[rep.K_series.size() - 2];
        rep.flagged = prev > 0.0 && rep.K / prev >= 1.01;
    }
    return rep;
}

// A sampled comparability band: ratio = a / b per row.
struct band
{
    std::vector<double> x, a, b, ratio;
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;

    void add(double xv, double av, double bv)
    {
        const double r = av / bv;
        x.push_back(xv);
        a.push_back(av);
        b.push_back(bv);
        ratio.push_back(r);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    double width() const { return hi / lo; }
    bool finite() const { return lo > 0.0 && std::isfinite(hi); }
};

inline std::vector<double> sample_points(double lo, double hi, double step)
{
    std::vector<double> out;
    const long n = std::lround((hi - lo) / step);
    for (long i = 0; i <= n; ++i)
        out.push_back(lo + i * step);
    return out;
}

// phi' / mu over [lo, hi].
inline band phi_mu_band(const example_family &fam, double delta, double lo, double hi, double step,
                        const quadrature_config &cfg = {})
{
    band b;
    for (double x : sample_points(lo, hi, step))
        b.add(x, phi_prime_example(fam, x, cfg), mu_example(fam, delta, x));
    return b;
}

// e^theta / target over [lo, hi].
inline band theta_band(const example_family &fam, double N, double lo, double hi, double step,
                       const quadrature_config &cfg = {})
{
    const auto g = fam.density(cfg);
    band b;
    for (double x : sample_points(lo, hi, step))
        b.add(x, std::exp(theta_weight(g, N, x, cfg).value), theta_asymptotic_target(fam, x));
    return b;
}

// e^theta / ls_weight over [lo, hi].
inline band weight_band(const example_family &fam, double N, double lo, double hi, double step,
                        const quadrature_config &cfg = {})
{
    const auto g = fam.density(cfg);
    band b;
    for (double x : sample_points(lo, hi, step))
        b.add(x, std::exp(theta_weight(g, N, x, cfg).value), ls_weight(fam, x, cfg));
    return b;
}

struct sandwich_row
{
    double x = 0.0, y = 0.0, log_E = 0.0, log_sin = 0.0, log_sin_shift = 0.0, tail_error = 0.0;
};

struct sandwich_report
{
    std::vector<sandwich_row> rows;
    double c_lower = -std::numeric_limits<double>::infinity(); // max log|sin pi z| - log|E|
    double c_upper = -std::numeric_limits<double>::infinity(); // max log|E| - log|sin pi(z+i)|
    double growth_min = std::numeric_limits<double>::infinity(); // log|E| - pi y
    double growth_max = -std::numeric_limits<double>::infinity();
    double max_tail_error = 0.0;
};

// log|sin(pi z)| from |sin(pi z)|^2 = sin^2(pi x) + sinh^2(pi y).
inline double log_abs_sin_pi(cplx z)
{
    const double s = std::sin(std::numbers::pi * z.real());
    const double sh = std::sinh(std::numbers::pi * z.imag());
    return 0.5 * std::log(s * s + sh * sh);
}

inline sandwich_report sine_sandwich(const example_family &fam, rect r, int nx, int ny)
{
    require(nx >= 1 && ny >= 1, "grid needs at least one node per axis");
    require(r.y_min > 0.0, "sandwich grid must stay above the real axis");
    sandwich_report rep;
    for (int j = 0; j < ny; ++j) {
        const double y = ny == 1 ? r.y_min : r.y_min + (r.y_max - r.y_min) * j / (ny - 1);
        for (int i = 0; i < nx; ++i) {
            const double x = nx == 1 ? r.x_min : r.x_min + (r.x_max - r.x_min) * i / (nx - 1);
            const cplx z(x, y);
            const entire_value e = eval_example_E(fam, z);
            sandwich_row row{x, y, e.log_modulus, log_abs_sin_pi(z),
                             log_abs_sin_pi(z + cplx(0.0, 1.0)), e.tail_error};
            rep.c_lower = std::max(rep.c_lower, row.log_sin - row.log_E);
            rep.c_upper = std::max(rep.c_upper, row.log_E - row.log_sin_shift);
            rep.growth_min = std::min(rep.growth_min, row.log_E - std::numbers::pi * y);
            rep.growth_max = std::max(rep.growth_max, row.log_E - std::numbers::pi * y);
            rep.max_tail_error = std::max(rep.max_tail_error, e.tail_error);
            rep.rows.push_back(row);
        }
    }
    return rep;
}

} // namespace bilip

#endif
