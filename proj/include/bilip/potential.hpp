#ifndef BILIP_POTENTIAL_HPP
#define BILIP_POTENTIAL_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <type_traits>
#include <variant>
#include <vector>

#include "density.hpp"
#include "error.hpp"
#include "phase.hpp"
#include "quadrature.hpp"

namespace bilip {

using cplx = std::complex<double>;

namespace detail {

// log|1 - z/t| (+ x/t when |t| > 1) without the t = 0 check.
inline double log_star(double x, double y, double t)
{
    const double d = t - x;
    const double v = (x * x + y * y < 0.0625 * t * t)
                         ? 0.5 * std::log1p((x * x + y * y - 2.0 * t * x) / (t * t))
                         : 0.5 * std::log((d * d + y * y) / (t * t));
    return std::abs(t) > 1.0 ? v + x / t : v;
}

// Potential of the unit-mass Poisson bump centred at xi + i*eta, at x + i*y.
inline double bump_potential(double x, double y, double xi, double eta)
{
    const double ay = std::abs(y);
    const double w2 = xi * xi + eta * eta;
    const double log_part = 0.5 * std::log1p((x * x - 2.0 * xi * x + 2.0 * eta * ay + ay * ay) / w2);
    const double theta = std::atan2(eta, 1.0 + xi) + std::atan2(eta, 1.0 - xi);
    const double L = 0.5 * std::log1p(4.0 * xi / ((1.0 - xi) * (1.0 - xi) + eta * eta));
    const double J = (xi * theta - eta * L) / (std::numbers::pi * w2);
    return log_part + x * J;
}

inline double bump_poisson(double x, double y, double xi, double eta)
{
    const double d = x - xi, h = y + eta;
    return h / (std::numbers::pi * (d * d + h * h));
}

inline double theta0_log_kernel(double u) { return 0.5 * std::log1p(1.0 / (u * u)); }

inline double theta0_arctan_kernel(double u) { return 1.0 / (u * (1.0 + u * u)); }

inline std::vector<double> merged_breaks(std::vector<double> a, const std::vector<double> &b,
                                         double lo, double hi)
{
    for (double v : b)
        a.push_back(v);
    std::vector<double> out;
    for (double v : a)
        if (v > lo && v < hi)
            out.push_back(v);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace detail

template <class D>
inline constexpr bool is_zero_sum_v = std::is_same_v<D, zero_sum_density>;

// log|1 - z/t|, regularised by + Re(z)/t when |t| > 1.
inline double log_star(cplx z, double t)
{
    if (t == 0.0)
        throw precondition_error("kernel singularity");
    return detail::log_star(z.real(), z.imag(), t);
}

// Far-field data of a density beyond |t| = R: the moments
// mu_j = int_{|t|>R} Phi(t) t^(-j-1) dt for both sides, computed once and
// stored as R^j * mu_j.
template <class D>
class potential_field
{
public:
    static constexpr int max_order = 96;

    potential_field(const D &g, const quadrature_config &cfg, double radius)
        : g_(g), cfg_(cfg), R_(std::max(radius, cfg.tail_radius))
    {
        cfg_.validate();
        const tolerance tol = make_tolerance(cfg_);
        mu_plus_.assign(max_order + 2, 0.0);
        mu_minus_.assign(max_order + 2, 0.0);
        const asymptote right = g_.far(1), left = g_.far(-1);
        for (int j = 2; j <= max_order + 1; ++j) {
            mu_plus_[j] = detail::linear_moment(right, j, R_, 1) +
                          g_.remainder_moment(j, R_, 1, tol);
            mu_minus_[j] = detail::linear_moment(left, j, R_, -1) +
                           g_.remainder_moment(j, R_, -1, tol);
        }
        phi_plus_ = g_.primitive(R_);
        phi_minus_ = g_.primitive(-R_);
    }

    double radius() const { return R_; }
    bool covers(cplx z) const { return std::abs(z) <= 0.5 * R_; }

    // Contribution of |t| > R to the potential.
    estimate far_potential(cplx z) const
    {
        const double x = z.real(), y = z.imag();
        double v = detail::log_star(x, y, -R_) * phi_minus_ - detail::log_star(x, y, R_) * phi_plus_;
        const cplx q = z / R_;
        cplx p = q;
        double last = 0.0;
        for (int j = 2; j <= max_order; ++j) {
            p *= q;
            last = p.real() * (mu_plus_[j] + mu_minus_[j]);
            v -= last;
        }
        return {v, std::abs(last) + 1e-15 * std::abs(v), true};
    }

    // Contribution of |t| > R to the Poisson transform.
    estimate far_poisson(cplx z) const
    {
        // R^(j+1) * int_{|t|>R} gamma t^(-j-1), after one integration by parts.
        double v = 0.0;
        const cplx q = z / R_;
        cplx p = 1.0;
        for (int j = 1; j <= max_order; ++j) {
            p *= q;
            const double sign = (j % 2 == 0) ? -1.0 : 1.0;
            const double nu = -phi_plus_ + sign * phi_minus_ + (j + 1) * (mu_plus_[j + 1] + mu_minus_[j + 1]);
            v += p.imag() * nu;
        }
        v /= R_;
        return {v / std::numbers::pi, 1e-15 * std::abs(v), true};
    }

    // Contribution of |t| > R to the arctan form of theta0 at x.
    estimate far_theta0_arctan(double x) const
    {
        const cplx a(x, 1.0);
        const double phix = g_.primitive(x);
        double v = 0.0;
        double xm = (x / R_) * (x / R_);
        cplx am = (a / R_) * (a / R_);
        for (int m = 2; m <= max_order; ++m) {
            const double c = xm - am.real();
            const double odd = (m % 2 == 1) ? 2.0 / m : 0.0;
            v += c * (mu_plus_[m] + mu_minus_[m] - phix * odd);
            xm *= x / R_;
            am *= a / R_;
        }
        return {v, 1e-15 * std::abs(v), true};
    }

    std::vector<double> body_breaks(double x) const
    {
        std::vector<double> b{-1.0, 0.0, 1.0, x};
        return detail::merged_breaks(b, g_.breakpoints(-R_, R_), -R_, R_);
    }

    estimate omega(cplx z) const
    {
        require(covers(z), "point outside the far-field expansion radius");
        const double x = z.real(), y = z.imag();
        auto breaks = detail::merged_breaks(body_breaks(x), cfg_.split_points, -R_, R_);
        auto f = [&](double t) { return detail::log_star(x, y, t) * g_(t); };
        estimate body = integrate(f, -R_, R_, breaks, make_tolerance(cfg_));
        return body + far_potential(z);
    }

    estimate poisson(cplx z) const
    {
        require(covers(z), "point outside the far-field expansion radius");
        const double x = z.real(), y = z.imag();
        std::vector<double> extra{x - y, x + y};
        extra.insert(extra.end(), cfg_.split_points.begin(), cfg_.split_points.end());
        auto breaks = detail::merged_breaks(body_breaks(x), extra, -R_, R_);
        auto f = [&](double t) {
            const double d = x - t;
            return y / (d * d + y * y) * g_(t);
        };
        estimate body = integrate(f, -R_, R_, breaks, make_tolerance(cfg_));
        return (1.0 / std::numbers::pi) * body + far_poisson(z);
    }

    estimate theta0(double x) const
    {
        require(covers(cplx(x, 1.0)), "point outside the far-field expansion radius");
        auto breaks = detail::merged_breaks(body_breaks(x), cfg_.split_points, -R_, R_);
        auto f = [&](double t) { return detail::theta0_log_kernel(t - x) * g_(t); };
        estimate body = integrate(f, -R_, R_, breaks, make_tolerance(cfg_));
        return body + far_potential(cplx(x, 1.0)) - far_potential(cplx(x, 0.0));
    }

    estimate theta0_arctan(double x) const
    {
        require(covers(cplx(x, 1.0)), "point outside the far-field expansion radius");
        auto breaks = detail::merged_breaks(body_breaks(x), cfg_.split_points, -R_, R_);
        const double phix = g_.primitive(x);
        auto f = [&](double t) {
            return (g_.primitive(t) - phix) * detail::theta0_arctan_kernel(t - x);
        };
        estimate body = integrate(f, -R_, R_, breaks, make_tolerance(cfg_));
        return body + far_theta0_arctan(x);
    }

private:
    D g_;
    quadrature_config cfg_;
    double R_;
    std::vector<double> mu_plus_, mu_minus_;
    double phi_plus_ = 0.0, phi_minus_ = 0.0;
};

namespace detail {

template <class D>
double field_radius(const quadrature_config &cfg, double reach)
{
    return std::max(cfg.tail_radius, 2.0 * reach + 2.0);
}

inline tolerance tight(const quadrature_config &cfg)
{
    return {std::min(cfg.abs_tol, 1e-10) * 1e-3, 1e-12, std::max(cfg.max_subdivisions, 2000)};
}

// (1/pi) * (atan((x + s - xi)/eta) - atan((x - xi)/eta)): one zero's share
// of (Phi(x + s) - Phi(x)).
inline double bump_mass_shift(double x, double s, double xi, double eta)
{
    const double a = (x - xi) / eta;
    return atan_diff(a + s / eta, a, s / eta) / std::numbers::pi;
}

} // namespace detail

// omega_gamma(z) = int log*|1 - z/t| gamma(t) dt.
template <class D>
estimate potential(const D &g, cplx z, const quadrature_config &cfg)
{
    cfg.validate();
    if constexpr (is_zero_sum_v<D>) {
        const double x = z.real(), y = z.imag();
        return sum_over_zeros(g.zeros(), std::abs(z), cfg, [x, y](double xi, double eta) {
            return detail::bump_potential(x, y, xi, eta);
        });
    } else {
        potential_field<D> field(g, cfg, detail::field_radius<D>(cfg, std::abs(z)));
        return field.omega(z);
    }
}

// P_gamma(z) = (1/pi) int y / ((x - t)^2 + y^2) gamma(t) dt, Im z > 0.
template <class D>
estimate poisson(const D &g, cplx z, const quadrature_config &cfg)
{
    require(z.imag() > 0.0, "upper half-plane only");
    cfg.validate();
    if constexpr (is_zero_sum_v<D>) {
        const double x = z.real(), y = z.imag();
        return sum_over_zeros(g.zeros(), std::abs(z), cfg, [x, y](double xi, double eta) {
            return detail::bump_poisson(x, y, xi, eta);
        });
    } else {
        potential_field<D> field(g, cfg, detail::field_radius<D>(cfg, std::abs(z)));
        return field.poisson(z);
    }
}

// theta0(x) = omega(x + i) - omega(x) = (1/2) int log(1 + 1/(t - x)^2) gamma(t) dt.
template <class D>
estimate theta0(const D &g, double x, const quadrature_config &cfg)
{
    cfg.validate();
    if constexpr (is_zero_sum_v<D>) {
        return sum_over_zeros(g.zeros(), std::abs(x) + 1.0, cfg, [x](double xi, double eta) {
            const double d = xi - x;
            return 0.5 * std::log1p((2.0 * eta + 1.0) / (d * d + eta * eta));
        });
    } else {
        potential_field<D> field(g, cfg, detail::field_radius<D>(cfg, std::abs(x) + 1.0));
        return field.theta0(x);
    }
}

// theta0(x) = int (Phi(t) - Phi(x)) / ((t - x)(1 + (t - x)^2)) dt.
template <class D>
estimate theta0_arctan(const D &g, double x, const quadrature_config &cfg)
{
    cfg.validate();
    if constexpr (is_zero_sum_v<D>) {
        const tolerance tol = detail::tight(cfg);
        auto term = [x, tol](double xi, double eta) {
            auto f = [&](double s) {
                return detail::bump_mass_shift(x, s, xi, eta) * detail::theta0_arctan_kernel(s);
            };
            // A far bump contributes about 1/(xi - x)^2; keep the tolerance relative to that.
            tolerance t = tol;
            t.abs = tol.abs / (1.0 + (xi - x) * (xi - x));
            return integrate_line(f, {0.0, xi - x}, t).value;
        };
        return sum_over_zeros(g.zeros(), std::abs(x) + 1.0, cfg, term);
    } else {
        potential_field<D> field(g, cfg, detail::field_radius<D>(cfg, std::abs(x) + 1.0));
        return field.theta0_arctan(x);
    }
}

// theta(x) = (1/pi) int_{|t-x|<N} (phi(t) - phi(x)) / (t - x) dt with phi = pi * Phi.
template <class D>
estimate theta_weight(const D &g, double N, double x, const quadrature_config &cfg)
{
    require(N > 0.0, "N must be positive");
    cfg.validate();
    if constexpr (is_zero_sum_v<D>) {
        const tolerance tol = detail::tight(cfg);
        auto term = [x, N, tol](double xi, double eta) {
            auto f = [&](double s) { return detail::bump_mass_shift(x, s, xi, eta) / s; };
            if (std::abs(xi - x) < N + 1.0)
                return integrate(f, -N, N, std::vector<double>{0.0, xi - x}, tol).value;
            return gl16()(f, -N, N);
        };
        return sum_over_zeros(g.zeros(), std::abs(x) + N, cfg, term);
    } else {
        const double phix = g.primitive(x);
        auto f = [&](double s) { return (g.primitive(x + s) - phix) / s; };
        std::vector<double> breaks{0.0};
        for (double b : g.breakpoints(x - N, x + N))
            breaks.push_back(b - x);
        return integrate(f, -N, N, breaks, make_tolerance(cfg));
    }
}

// Same weight for an arbitrary phase model.
inline estimate theta_weight(const phase_model &phase, double N, double x,
                             const quadrature_config &cfg)
{
    require(N > 0.0, "N must be positive");
    cfg.validate();
    const double px = phase.phi(x);
    auto f = [&](double s) { return (phase.phi(x + s) - px) / s; };
    return (1.0 / std::numbers::pi) *
           integrate(f, -N, N, std::vector<double>{0.0}, make_tolerance(cfg));
}

// Five-point finite-difference Laplacian of omega at z with step h.
template <class D>
double laplacian_probe(const D &g, cplx z, double h, const quadrature_config &cfg)
{
    require(h > 0.0, "step must be positive");
    if (!(std::abs(z.imag()) > 2.0 * h))
        throw precondition_error("stencil touches support of Laplacian");
    const quadrature_config fine = cfg.tightened(h * h);
    auto stencil = [&](auto &&w) {
        const double c = w(z);
        return (w(z + h) + w(z - h) + w(z + cplx(0, h)) + w(z - cplx(0, h)) - 4.0 * c) / (h * h);
    };
    if constexpr (is_zero_sum_v<D>) {
        return stencil([&](cplx p) { return potential(g, p, fine).value; });
    } else {
        potential_field<D> field(g, fine, detail::field_radius<D>(fine, std::abs(z) + h));
        return stencil([&](cplx p) { return field.omega(p).value; });
    }
}

struct rect
{
    double x_min = 0.0, x_max = 0.0, y_min = 0.0, y_max = 0.0;
};

struct potential_grid
{
    rect r{};
    int nx = 0, ny = 0;
    std::vector<double> values; // row-major in y: values[j * nx + i]
    std::vector<double> errors;

    double x(int i) const { return nx == 1 ? r.x_min : r.x_min + (r.x_max - r.x_min) * i / (nx - 1); }
    double y(int j) const { return ny == 1 ? r.y_min : r.y_min + (r.y_max - r.y_min) * j / (ny - 1); }
    double at(int i, int j) const { return values[static_cast<std::size_t>(j) * nx + i]; }
};

template <class D>
potential_grid fill_grid(const D &g, rect r, int nx, int ny, const quadrature_config &cfg)
{
    require(nx >= 1 && ny >= 1, "grid needs at least one node per axis");
    require((nx == 1 || r.x_max > r.x_min) && (ny == 1 || r.y_max > r.y_min),
            "grid spacing must be positive");
    potential_grid out{r, nx, ny, {}, {}};
    out.values.resize(static_cast<std::size_t>(nx) * ny);
    out.errors.resize(out.values.size());
    double reach = 0.0;
    for (double a : {r.x_min, r.x_max})
        for (double b : {r.y_min, r.y_max})
            reach = std::max(reach, std::abs(cplx(a, b)));
    auto store = [&](int i, int j, const estimate &e) {
        if (!std::isfinite(e.value))
            throw numeric_error("non-finite potential value", e.error);
        out.values[static_cast<std::size_t>(j) * nx + i] = e.value;
        out.errors[static_cast<std::size_t>(j) * nx + i] = e.error;
    };
    if constexpr (is_zero_sum_v<D>) {
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                store(i, j, potential(g, cplx(out.x(i), out.y(j)), cfg));
    } else {
        potential_field<D> field(g, cfg, detail::field_radius<D>(cfg, reach));
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                store(i, j, field.omega(cplx(out.x(i), out.y(j))));
    }
    return out;
}

// Variant front ends.
inline estimate potential(const any_density &g, cplx z, const quadrature_config &cfg)
{
    return std::visit([&](const auto &d) { return potential(d, z, cfg); }, g);
}
inline estimate poisson(const any_density &g, cplx z, const quadrature_config &cfg)
{
    return std::visit([&](const auto &d) { return poisson(d, z, cfg); }, g);
}
inline estimate theta0(const any_density &g, double x, const quadrature_config &cfg)
{
    return std::visit([&](const auto &d) { return theta0(d, x, cfg); }, g);
}
inline estimate theta0_arctan(const any_density &g, double x, const quadrature_config &cfg)
{
    return std::visit([&](const auto &d) { return theta0_arctan(d, x, cfg); }, g);
}
inline estimate theta_weight(const any_density &g, double N, double x, const quadrature_config &cfg)
{
    return std::visit([&](const auto &d) { return theta_weight(d, N, x, cfg); }, g);
}
inline double laplacian_probe(const any_density &g, cplx z, double h, const quadrature_config &cfg)
{
    return std::visit([&](const auto &d) { return laplacian_probe(d, z, h, cfg); }, g);
}
inline potential_grid fill_grid(const any_density &g, rect r, int nx, int ny,
                                const quadrature_config &cfg)
{
    return std::visit([&](const auto &d) { return fill_grid(d, r, nx, ny, cfg); }, g);
}

} // namespace bilip

#endif
