#ifndef BILIP_IO_HPP
#define BILIP_IO_HPP

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "multiplier.hpp"
#include "potential.hpp"
#include "spaces.hpp"

namespace bilip {

inline std::string format_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Comma-separated rows with a header and LF line endings.
class csv_writer
{
public:
    csv_writer(std::ostream &out, std::initializer_list<const char *> header) : out_(out)
    {
        bool first = true;
        for (const char *h : header) {
            out_ << (first ? "" : ",") << h;
            first = false;
        }
        out_ << '\n';
    }

    void row(std::initializer_list<double> values)
    {
        bool first = true;
        for (double v : values) {
            out_ << (first ? "" : ",") << format_number(v);
            first = false;
        }
        out_ << '\n';
    }

private:
    std::ostream &out_;
};

inline std::ofstream open_output(const std::string &path)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw precondition_error("cannot write " + path);
    return f;
}

inline void write_json(const std::string &path, const nlohmann::json &j)
{
    auto f = open_output(path);
    f << j.dump(2) << '\n';
}

inline void write_grid_csv(std::ostream &out, const potential_grid &g)
{
    csv_writer w(out, {"x", "y", "omega", "omega_err"});
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * g.nx + i;
            w.row({g.x(i), g.y(j), g.values[k], g.errors[k]});
        }
}

inline nlohmann::json to_json(const quadrature_config &c)
{
    return {{"abs_tol", c.abs_tol},
            {"rel_tol", c.rel_tol},
            {"tail_radius", c.tail_radius},
            {"max_subdivisions", c.max_subdivisions},
            {"truncation_budget", c.truncation_budget}};
}

inline nlohmann::json to_json(const rect &r)
{
    return nlohmann::json::array({r.x_min, r.x_max, r.y_min, r.y_max});
}

inline nlohmann::json to_json(const bilipschitz_estimate &b)
{
    return {{"N", b.N},
            {"C1", b.C1},
            {"C2", b.C2},
            {"domain", {b.domain.lo, b.domain.hi}},
            {"pairs", b.pair_count},
            {"holds", b.holds()},
            {"diagnosis", b.diagnosis()}};
}

inline nlohmann::json to_json(const multiplier_product &m)
{
    nlohmann::json zeros = nlohmann::json::array();
    for (std::size_t i = 0; i < m.xi.size(); ++i)
        zeros.push_back({{"xi", m.xi[i]}, {"mult", m.mult[i]}});
    return {{"alpha", m.alpha},
            {"alpha_error", m.coefficient.quadrature_error + m.coefficient.tail_bound},
            {"gamma", m.gamma_name},
            {"window", {m.k_min(), m.k_max()}},
            {"partition", m.cells.x},
            {"zeros", zeros}};
}

inline nlohmann::json to_json(const comparability_report &r)
{
    nlohmann::json worst = nlohmann::json::array();
    for (const auto &p : r.worst_points)
        worst.push_back({{"x", p.x}, {"y", p.y}, {"ratio", p.ratio}});
    return {{"grid", to_json(r.grid)},
            {"nx", r.nx},
            {"ny", r.ny},
            {"ratio_inf", r.ratio_inf},
            {"ratio_sup", r.ratio_sup},
            {"band_width", r.band_width},
            {"worst_points", worst},
            {"max_potential_error", r.max_potential_error},
            {"max_tail_error", r.max_tail_error}};
}

inline nlohmann::json to_json(const a2_report &r)
{
    return {{"alpha_phase", r.alpha_phase},
            {"lambda_count", r.lambda.size()},
            {"lambda", r.lambda},
            {"intervals_tested", r.intervals_tested},
            {"sup_ratio", r.sup_ratio},
            {"sup_by_length", r.sup_by_length},
            {"worst_interval", {r.worst.lo, r.worst.hi}},
            {"separated", r.separated},
            {"min_gap", r.min_gap}};
}

inline void write_band_csv(std::ostream &out, const band &b, const char *a_name, const char *b_name)
{
    out << "x," << a_name << ',' << b_name << ",ratio\n";
    for (std::size_t i = 0; i < b.x.size(); ++i)
        out << format_number(b.x[i]) << ',' << format_number(b.a[i]) << ','
            << format_number(b.b[i]) << ',' << format_number(b.ratio[i]) << '\n';
}

inline void write_sandwich_csv(std::ostream &out, const sandwich_report &s)
{
    csv_writer w(out, {"x", "y", "log_E", "log_sin", "log_sin_shift", "log_E_err"});
    for (const auto &r : s.rows)
        w.row({r.x, r.y, r.log_E, r.log_sin, r.log_sin_shift, r.tail_error});
}

} // namespace bilip

#endif
