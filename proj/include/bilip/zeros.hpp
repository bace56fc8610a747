#ifndef BILIP_ZEROS_HPP
#define BILIP_ZEROS_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "quadrature.hpp"

namespace bilip {

// A zero xi - i*eta of multiplicity mult.
struct zero
{
    double xi = 0.0;
    double eta = 1.0;
    int mult = 1;
};

// Zeros +-n - i*n^-alpha for every integer n with |n| > window.
struct power_tail
{
    double alpha = 1.0;
    int window = 200;
};

class zero_sequence
{
public:
    zero_sequence() = default;

    explicit zero_sequence(std::vector<zero> entries, std::optional<power_tail> tail = {})
        : entries_(std::move(entries)), tail_(tail)
    {
        std::stable_sort(entries_.begin(), entries_.end(),
                         [](const zero &a, const zero &b) { return a.xi < b.xi; });
        for (const auto &z : entries_) {
            require(z.eta >= 0.0, "zeros must lie in the closed lower half-plane");
            require(z.mult >= 1, "multiplicity must be a positive integer");
            if (tail_)
                require(std::abs(z.xi) <= tail_->window + 0.5,
                        "explicit zeros must lie inside the tail rule's window");
        }
        if (tail_)
            require(tail_->window >= 0, "tail window must be nonnegative");
    }

    const std::vector<zero> &entries() const { return entries_; }
    const std::optional<power_tail> &tail() const { return tail_; }
    bool empty() const { return entries_.empty() && !tail_; }

    // Throws unless every zero is strictly off the real axis.
    void require_off_axis() const
    {
        require(!empty(), "no zeros");
        for (const auto &z : entries_)
            require(z.eta > 0.0, "real zero unsupported");
    }

    // Index of the last integer handled explicitly when evaluating at points
    // of modulus up to reach; beyond it the tail is smooth in n.
    int explicit_limit(double reach, int budget) const
    {
        if (!tail_)
            return 0;
        const double need = 2.0 * reach + 16.0;
        return std::max({budget, tail_->window, static_cast<int>(std::ceil(need))});
    }

    // Calls f(zero) for every entry and every tail zero with |n| <= limit.
    template <class F>
    void for_each(int limit, F &&f) const
    {
        for (const auto &z : entries_)
            f(z);
        if (!tail_)
            return;
        for (int n = tail_->window + 1; n <= limit; ++n) {
            const double eta = std::pow(static_cast<double>(n), -tail_->alpha);
            f(zero{-static_cast<double>(n), eta, 1});
            f(zero{static_cast<double>(n), eta, 1});
        }
    }

    // Zero whose real part is nearest to x; ties go to the smaller real part.
    zero nearest(double x) const
    {
        require(!empty(), "no zeros");
        std::optional<zero> best;
        auto consider = [&](const zero &z) {
            if (!best) {
                best = z;
                return;
            }
            const double d = std::abs(x - z.xi), db = std::abs(x - best->xi);
            if (d < db || (d == db && z.xi < best->xi))
                best = z;
        };
        auto it = std::lower_bound(entries_.begin(), entries_.end(), x,
                                   [](const zero &z, double v) { return z.xi < v; });
        if (it != entries_.end())
            consider(*it);
        if (it != entries_.begin())
            consider(*std::prev(it));
        // Equal real parts: the first one in sorted order is kept above.
        if (tail_) {
            const double n = std::ceil(x - 0.5);
            for (double c : {n - 1.0, n, n + 1.0})
                if (std::abs(c) > tail_->window)
                    consider(zero{c, std::pow(std::abs(c), -tail_->alpha), 1});
            if (std::abs(n) <= tail_->window) {
                // x is inside the window; the closest tail zero is the first one out.
                const double w = tail_->window + 1.0;
                const double c = x < 0 ? -w : w;
                consider(zero{c, std::pow(w, -tail_->alpha), 1});
            }
        }
        return *best;
    }

private:
    std::vector<zero> entries_;
    std::optional<power_tail> tail_;
};

// Sum of mult * term(xi, eta) over every zero of zs. Zeros within the
// explicit limit are summed directly; for the power tail, term is paired as
// term(n, eta_n) + term(-n, eta_n) and summed by lattice_tail.
template <class Term>
estimate sum_over_zeros(const zero_sequence &zs, double reach, const quadrature_config &cfg,
                        Term &&term)
{
    const int limit = zs.explicit_limit(reach, cfg.truncation_budget);
    estimate out;
    zs.for_each(limit, [&](const zero &z) { out.value += z.mult * term(z.xi, z.eta); });
    if (zs.tail()) {
        const double alpha = zs.tail()->alpha;
        auto pair = [&](double s) {
            const double eta = std::pow(s, -alpha);
            return term(s, eta) + term(-s, eta);
        };
        const tolerance tail_tol{cfg.abs_tol * 1e-3, 1e-12, cfg.max_subdivisions};
        out += lattice_tail(pair, limit + 1.0, tail_tol);
    }
    return out;
}

// The worked-example family: zeros -i and +-n - i|n|^-alpha, n >= 1.
inline zero_sequence example_zeros(double alpha, int window = 200)
{
    require(alpha >= 0.0 && alpha <= 2.0, "alpha out of [0,2]");
    std::vector<zero> z;
    z.push_back({0.0, 1.0, 1});
    for (int n = 1; n <= window; ++n) {
        const double eta = std::pow(static_cast<double>(n), -alpha);
        z.push_back({-static_cast<double>(n), eta, 1});
        z.push_back({static_cast<double>(n), eta, 1});
    }
    return zero_sequence(std::move(z), power_tail{alpha, window});
}

// Reads `xi,eta,mult` rows (header required). A JSON sidecar of the form
// {"family":"power","alpha":1.0,"window":200} attaches a tail rule.
inline zero_sequence load_zeros(const std::string &csv_path, const std::string &sidecar_path = {})
{
    std::ifstream in(csv_path);
    require(in.good(), "cannot open zero file");
    std::string line;
    std::getline(in, line);
    require(line.rfind("xi,eta,mult", 0) == 0, "zero file needs header xi,eta,mult");
    std::vector<zero> entries;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::stringstream ss(line);
        std::string a, b, c;
        std::getline(ss, a, ',');
        std::getline(ss, b, ',');
        std::getline(ss, c, ',');
        entries.push_back({std::stod(a), std::stod(b), c.empty() ? 1 : std::stoi(c)});
    }
    std::optional<power_tail> tail;
    if (!sidecar_path.empty()) {
        std::ifstream js(sidecar_path);
        require(js.good(), "cannot open tail sidecar");
        const auto j = nlohmann::json::parse(js);
        require(j.value("family", "") == "power", "unknown tail family");
        tail = power_tail{j.at("alpha").get<double>(), j.at("window").get<int>()};
    }
    return zero_sequence(std::move(entries), tail);
}

} // namespace bilip

#endif
