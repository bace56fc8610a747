#ifndef BILIP_PHASE_HPP
#define BILIP_PHASE_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <utility>

#include "error.hpp"
#include "quadrature.hpp"
#include "zeros.hpp"

namespace bilip {

// atan(b) - atan(a) where b - a = d is known exactly.
inline double atan_diff(double b, double a, double d)
{
    return std::atan2(d, 1.0 + a * b);
}

// One zero's contribution to phi(x) - phi(0).
inline double zero_phase(double x, double xi, double eta)
{
    return std::atan2(x * eta, eta * eta - xi * (x - xi));
}

inline double zero_phase_derivative(double x, double xi, double eta)
{
    const double d = x - xi;
    return eta / (d * d + eta * eta);
}

// phi'(x) = sum mult * eta / ((x - xi)^2 + eta^2).
inline estimate phase_derivative_from_zeros(const zero_sequence &zs, double x,
                                            const quadrature_config &cfg)
{
    zs.require_off_axis();
    cfg.validate();
    return sum_over_zeros(zs, std::abs(x), cfg, [x](double xi, double eta) {
        return zero_phase_derivative(x, xi, eta);
    });
}

// phi(x) normalised by phi(0) = 0.
inline estimate phase_from_zeros(const zero_sequence &zs, double x, const quadrature_config &cfg)
{
    zs.require_off_axis();
    cfg.validate();
    return sum_over_zeros(zs, std::abs(x), cfg,
                          [x](double xi, double eta) { return zero_phase(x, xi, eta); });
}

class phase_model
{
public:
    enum class kind { zero_sum, linear, user };

    static phase_model linear(double slope)
    {
        require(slope > 0.0, "linear phase needs a positive slope");
        phase_model p;
        p.kind_ = kind::linear;
        p.phi_ = [slope](double x) { return slope * x; };
        p.phi_prime_ = [slope](double) { return slope; };
        return p;
    }

    static phase_model from_zeros(std::shared_ptr<const zero_sequence> zs,
                                  quadrature_config cfg = {})
    {
        zs->require_off_axis();
        cfg.validate();
        phase_model p;
        p.kind_ = kind::zero_sum;
        p.zeros_ = zs;
        p.phi_ = [zs, cfg](double x) { return phase_from_zeros(*zs, x, cfg).value; };
        p.phi_prime_ = [zs, cfg](double x) {
            return phase_derivative_from_zeros(*zs, x, cfg).value;
        };
        return p;
    }

    static phase_model user(std::function<double(double)> phi,
                            std::function<double(double)> phi_prime)
    {
        phase_model p;
        p.kind_ = kind::user;
        p.phi_ = std::move(phi);
        p.phi_prime_ = std::move(phi_prime);
        return p;
    }

    double phi(double x) const { return phi_(x); }
    double phi_prime(double x) const { return phi_prime_(x); }
    kind model_kind() const { return kind_; }
    const std::shared_ptr<const zero_sequence> &zeros() const { return zeros_; }

private:
    phase_model() = default;

    kind kind_ = kind::user;
    std::function<double(double)> phi_;
    std::function<double(double)> phi_prime_;
    std::shared_ptr<const zero_sequence> zeros_;
};

struct interval
{
    double lo = 0.0;
    double hi = 0.0;
};

struct bilipschitz_estimate
{
    double N = 1.0;
    double C1 = 0.0;
    double C2 = 0.0;
    interval domain{};
    long pair_count = 0;

    bool holds() const { return C1 > 0.0; }
    std::string diagnosis() const
    {
        return holds() ? std::string("ok") : std::string("bi-Lipschitz hypothesis fails on domain");
    }
};

// Extremes of the difference quotient over pairs (x, x + g) with x on a
// uniform grid of `samples` points and g = N, 2N, 4N, ... inside the domain.
inline bilipschitz_estimate estimate_bilipschitz(const phase_model &phase, double N,
                                                 interval domain, int samples)
{
    require(N > 0.0, "N must be positive");
    require(domain.hi - domain.lo > N, "domain must be longer than N");
    require(samples >= 2, "need at least two samples");
    bilipschitz_estimate est;
    est.N = N;
    est.domain = domain;
    est.C1 = std::numeric_limits<double>::infinity();
    est.C2 = -std::numeric_limits<double>::infinity();
    const double span = domain.hi - domain.lo - N;
    for (int i = 0; i < samples; ++i) {
        const double x1 = domain.lo + span * i / (samples - 1);
        const double p1 = phase.phi(x1);
        for (double g = N; x1 + g <= domain.hi * (1.0 + 1e-15) + 1e-15; g *= 2.0) {
            const double q = (phase.phi(x1 + g) - p1) / g;
            est.C1 = std::min(est.C1, q);
            est.C2 = std::max(est.C2, q);
            ++est.pair_count;
        }
    }
    return est;
}

// Mountain chain: the Poisson bump of the horizontally nearest zero when it
// is closer than delta to the axis, the plateau value 1 otherwise.
inline double mountain_chain(const zero_sequence &zs, double delta, double x)
{
    require(delta > 0.0, "delta must be positive");
    const zero z = zs.nearest(x);
    if (z.eta < delta)
        return zero_phase_derivative(x, z.xi, z.eta);
    return 1.0;
}

} // namespace bilip

#endif
