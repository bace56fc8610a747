#ifndef BILIP_DENSITY_HPP
#define BILIP_DENSITY_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "error.hpp"
#include "phase.hpp"
#include "quadrature.hpp"
#include "zeros.hpp"

namespace bilip {

// Densities gamma >= 0 with primitive Phi(t) = int_0^t gamma. Far from the
// origin Phi(t) = slope * t + offset + r(t); remainder_moment returns
// R^j * int r(t) t^(-j-1) dt over t > R (side = +1) or t < -R (side = -1).
// The R^j scaling keeps high orders representable.
struct asymptote
{
    double slope = 0.0;
    double offset = 0.0;
};

namespace detail {

// R^j * int_R^inf (slope t + offset) t^(-j-1) dt, or over (-inf, -R) for side < 0.
inline double linear_moment(const asymptote &a, int j, double R, int side)
{
    const double jj = j;
    const double up = a.slope * R / (jj - 1.0);
    const double flat = a.offset / jj;
    if (side > 0)
        return up + flat;
    const double s = (j % 2 == 0) ? -1.0 : 1.0; // (-1)^(j+1)
    return s * (flat - up);
}

} // namespace detail

class constant_density
{
public:
    explicit constant_density(double c) : c_(c) { require(c >= 0.0, "density must be nonnegative"); }

    double operator()(double) const { return c_; }
    double primitive(double t) const { return c_ * t; }
    std::vector<double> breakpoints(double, double) const { return {}; }
    asymptote far(int) const { return {c_, 0.0}; }
    double remainder_moment(int, double, int, const tolerance &) const { return 0.0; }
    double level() const { return c_; }
    std::string name() const;

private:
    double c_;
};

// gamma(t) = 1 + sin(t) / 2.
class sine_density
{
public:
    double operator()(double t) const { return 1.0 + 0.5 * std::sin(t); }
    double primitive(double t) const { return t + 0.5 * (1.0 - std::cos(t)); }
    std::vector<double> breakpoints(double, double) const { return {}; }
    asymptote far(int) const { return {1.0, 0.5}; }

    // r(t) = -cos(t)/2; int_R^inf cos(t) t^-k dt is taken along t = R + i s.
    double remainder_moment(int j, double R, int side, const tolerance &tol) const
    {
        const int k = j + 1;
        auto part = [&](bool imag) {
            auto f = [&](double s) {
                const std::complex<double> w =
                    std::exp(-s) * std::pow(std::complex<double>(1.0, s / R), -k);
                return imag ? w.imag() : w.real();
            };
            const tolerance t{tol.abs * 1e-3, 1e-13, tol.max_subdivisions};
            return integrate(f, 0.0, 60.0, t).value;
        };
        const std::complex<double> I(part(false), part(true));
        const std::complex<double> rot = std::complex<double>(0.0, 1.0) * std::polar(1.0, R);
        const double cos_moment = (rot * I).real() / R;
        const double right = -0.5 * cos_moment;
        if (side > 0)
            return right;
        return (j % 2 == 0) ? -right : right;
    }
    std::string name() const { return "sin1"; }
};

// Piecewise-linear gamma through (t_i, g_i), constant beyond the table.
class tabulated_density
{
public:
    tabulated_density(std::vector<double> t, std::vector<double> g)
        : t_(std::move(t)), g_(std::move(g))
    {
        require(t_.size() >= 2 && t_.size() == g_.size(), "table needs at least two rows");
        for (std::size_t i = 0; i < t_.size(); ++i) {
            require(g_[i] >= 0.0, "density must be nonnegative");
            if (i > 0)
                require(t_[i] > t_[i - 1], "table abscissae must increase");
        }
        cum_.assign(t_.size(), 0.0);
        for (std::size_t i = 1; i < t_.size(); ++i)
            cum_[i] = cum_[i - 1] + 0.5 * (g_[i] + g_[i - 1]) * (t_[i] - t_[i - 1]);
        const double base = raw_primitive(0.0);
        for (auto &c : cum_)
            c -= base;
    }

    double operator()(double t) const
    {
        if (t <= t_.front())
            return g_.front();
        if (t >= t_.back())
            return g_.back();
        const std::size_t i = cell(t);
        const double u = (t - t_[i]) / (t_[i + 1] - t_[i]);
        return g_[i] + u * (g_[i + 1] - g_[i]);
    }

    double primitive(double t) const { return raw_primitive(t); }

    std::vector<double> breakpoints(double lo, double hi) const
    {
        std::vector<double> out;
        for (double v : t_)
            if (v > lo && v < hi)
                out.push_back(v);
        return out;
    }

    asymptote far(int side) const
    {
        if (side > 0)
            return {g_.back(), primitive(t_.back()) - g_.back() * t_.back()};
        return {g_.front(), primitive(t_.front()) - g_.front() * t_.front()};
    }

    double remainder_moment(int j, double R, int side, const tolerance &tol) const
    {
        const asymptote a = far(side);
        auto r = [&](double t) {
            return (primitive(t) - a.slope * t - a.offset) * std::pow(R / t, j + 1.0) / R;
        };
        if (side > 0) {
            if (t_.back() <= R)
                return 0.0;
            return integrate(r, R, t_.back(), breakpoints(R, t_.back()), tol).value;
        }
        if (t_.front() >= -R)
            return 0.0;
        return integrate(r, t_.front(), -R, breakpoints(t_.front(), -R), tol).value;
    }

    std::string name() const { return "csv"; }

private:
    std::size_t cell(double t) const
    {
        auto it = std::upper_bound(t_.begin(), t_.end(), t);
        return static_cast<std::size_t>(std::distance(t_.begin(), it)) - 1;
    }

    double raw_primitive(double t) const
    {
        if (t <= t_.front())
            return (cum_.empty() ? 0.0 : cum_.front()) + g_.front() * (t - t_.front());
        if (t >= t_.back())
            return cum_.back() + g_.back() * (t - t_.back());
        const std::size_t i = cell(t);
        const double h = t - t_[i];
        const double slope = (g_[i + 1] - g_[i]) / (t_[i + 1] - t_[i]);
        return cum_[i] + g_[i] * h + 0.5 * slope * h * h;
    }

    std::vector<double> t_, g_, cum_;
};

// gamma = phi'/pi for a phase built from zeros: a sum of unit-mass Poisson
// bumps (1/pi) eta / ((t - xi)^2 + eta^2), one per zero and multiplicity.
class zero_sum_density
{
public:
    zero_sum_density(std::shared_ptr<const zero_sequence> zs, quadrature_config cfg = {})
        : zs_(std::move(zs)), cfg_(std::move(cfg))
    {
        zs_->require_off_axis();
        cfg_.validate();
    }

    double operator()(double t) const
    {
        return phase_derivative_from_zeros(*zs_, t, cfg_).value / std::numbers::pi;
    }

    double primitive(double t) const
    {
        return phase_from_zeros(*zs_, t, cfg_).value / std::numbers::pi;
    }

    std::vector<double> breakpoints(double lo, double hi) const
    {
        std::vector<double> out;
        const int limit = static_cast<int>(std::ceil(std::max(std::abs(lo), std::abs(hi)))) + 1;
        zs_->for_each(limit, [&](const zero &z) {
            if (z.xi > lo && z.xi < hi && z.eta < 0.5)
                out.push_back(z.xi);
        });
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    asymptote far(int side) const
    {
        if (zs_->tail())
            return {1.0, 0.0};
        double total = 0.0;
        for (const auto &z : zs_->entries())
            total += z.mult * (side * std::numbers::pi / 2 - std::atan(-z.xi / z.eta));
        return {0.0, total / std::numbers::pi};
    }

    double remainder_moment(int, double, int, const tolerance &) const { return 0.0; }

    // int_a^b (t - a) gamma(t) dt.
    estimate cell_moment(double a, double b) const
    {
        return (1.0 / std::numbers::pi) *
               sum_over_zeros(*zs_, std::max(std::abs(a), std::abs(b)), cfg_,
                              [a, b](double xi, double eta) {
                                  const double da = a - xi, db = b - xi;
                                  const double mass =
                                      atan_diff(db / eta, da / eta, (b - a) / eta);
                                  const double spread = 0.5 * eta *
                                      std::log((db * db + eta * eta) / (da * da + eta * eta));
                                  return spread + (xi - a) * mass;
                              });
    }

    const zero_sequence &zeros() const { return *zs_; }
    const std::shared_ptr<const zero_sequence> &zeros_ptr() const { return zs_; }
    const quadrature_config &config() const { return cfg_; }
    std::string name() const { return "zeros"; }

private:
    std::shared_ptr<const zero_sequence> zs_;
    quadrature_config cfg_;
};

inline std::string constant_density::name() const
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "const:%.17g", c_);
    return buf;
}

// int_a^b (t - a) gamma(t) dt by quadrature for densities without a closed form.
template <class D>
estimate cell_moment(const D &g, double a, double b, const tolerance &tol)
{
    if constexpr (std::is_same_v<D, zero_sum_density>) {
        return g.cell_moment(a, b);
    } else {
        return integrate([&](double t) { return (t - a) * g(t); }, a, b, g.breakpoints(a, b),
                         tol);
    }
}

using any_density =
    std::variant<constant_density, sine_density, tabulated_density, zero_sum_density>;

inline tabulated_density load_tabulated_density(const std::string &path)
{
    std::ifstream in(path);
    require(in.good(), "cannot open density table");
    std::string line;
    std::getline(in, line);
    require(line.rfind("t,gamma", 0) == 0, "density table needs header t,gamma");
    std::vector<double> t, g;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::stringstream ss(line);
        std::string a, b;
        std::getline(ss, a, ',');
        std::getline(ss, b, ',');
        t.push_back(std::stod(a));
        g.push_back(std::stod(b));
    }
    return tabulated_density(std::move(t), std::move(g));
}

// Selectors: const:<c>, sin1, example:<alpha>, csv:<path>.
inline any_density parse_density(const std::string &sel, const quadrature_config &cfg = {})
{
    auto number = [&](const std::string &s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception &) {
            throw precondition_error("bad number in density selector: " + sel);
        }
        require(used == s.size(), "bad number in density selector");
        return v;
    };
    if (sel.rfind("const:", 0) == 0)
        return constant_density(number(sel.substr(6)));
    if (sel == "sin1")
        return sine_density{};
    if (sel.rfind("example:", 0) == 0) {
        auto zs = std::make_shared<const zero_sequence>(example_zeros(number(sel.substr(8))));
        return zero_sum_density(zs, cfg);
    }
    if (sel.rfind("csv:", 0) == 0)
        return load_tabulated_density(sel.substr(4));
    throw precondition_error("unknown density selector: " + sel);
}

inline std::string density_name(const any_density &d)
{
    return std::visit([](const auto &g) { return g.name(); }, d);
}

// Phase phi = pi * Phi of a density, so that gamma = phi'/pi.
template <class D>
phase_model phase_of(const D &g)
{
    if constexpr (std::is_same_v<D, zero_sum_density>) {
        return phase_model::from_zeros(g.zeros_ptr(), g.config());
    } else {
        return phase_model::user([g](double x) { return std::numbers::pi * g.primitive(x); },
                                 [g](double x) { return std::numbers::pi * g(x); });
    }
}

// The primitive Phi itself as a phase; its bi-Lipschitz constants drive the multiplier.
template <class D>
phase_model mass_phase(const D &g)
{
    return phase_model::user([g](double x) { return g.primitive(x); },
                             [g](double x) { return g(x); });
}

} // namespace bilip

#endif
