#ifndef BILIP_CLI_COMMANDS_HPP
#define BILIP_CLI_COMMANDS_HPP

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <bilip/density.hpp>
#include <bilip/error.hpp>
#include <bilip/io.hpp>
#include <bilip/multiplier.hpp>
#include <bilip/phase.hpp>
#include <bilip/potential.hpp>
#include <bilip/spaces.hpp>

namespace bilip::cli {

struct tolerance_options
{
    double abs_tol = 1e-8;
    double rel_tol = 1e-8;
    double tail_radius = 256.0;
    int max_subdivisions = 4000;

    void attach(CLI::App *app)
    {
        app->add_option("--abs-tol", abs_tol, "absolute quadrature tolerance");
        app->add_option("--rel-tol", rel_tol, "relative quadrature tolerance");
        app->add_option("--tail-radius", tail_radius, "radius beyond which tails are summed analytically");
        app->add_option("--max-subdivisions", max_subdivisions, "adaptive subdivision budget");
    }

    quadrature_config config() const
    {
        quadrature_config c;
        c.abs_tol = abs_tol;
        c.rel_tol = rel_tol;
        c.tail_radius = tail_radius;
        c.max_subdivisions = max_subdivisions;
        c.validate();
        return c;
    }
};

// Fills options not given on the command line from a JSON object keyed by long flag name.
inline void merge_config(CLI::App *sub, const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw precondition_error("cannot open config " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception &) {
        throw precondition_error("config is not valid JSON");
    }
    require(j.is_object(), "config must be a JSON object");
    auto text = [](const nlohmann::json &v) {
        if (v.is_string())
            return v.get<std::string>();
        if (v.is_boolean())
            return std::string(v.get<bool>() ? "true" : "false");
        return v.dump();
    };
    for (const auto &[key, value] : j.items()) {
        CLI::Option *opt = sub->get_option_no_throw("--" + key);
        if (!opt)
            throw precondition_error("unknown config key: " + key);
        if (opt->count() > 0)
            continue;
        if (value.is_array())
            for (const auto &e : value)
                opt->add_result(text(e));
        else
            opt->add_result(text(value));
        opt->run_callback();
    }
}

inline std::ostream &pick_stream(const std::string &path, std::ostream &out,
                                 std::unique_ptr<std::ofstream> &holder)
{
    if (path.empty() || path == "-")
        return out;
    holder = std::make_unique<std::ofstream>(open_output(path));
    return *holder;
}

inline rect to_rect(const std::vector<double> &v)
{
    require(v.size() == 4, "rectangle needs four numbers");
    rect r{v[0], v[1], v[2], v[3]};
    require(r.x_max >= r.x_min && r.y_max >= r.y_min, "degenerate rectangle");
    return r;
}

struct potential_cmd
{
    std::string gamma, out;
    std::vector<double> rect_v{-5.0, 5.0, 0.5, 5.0};
    std::vector<double> point;
    int nx = 41, ny = 19;
    tolerance_options tol;

    void attach(CLI::App *app)
    {
        app->add_option("--gamma", gamma, "density selector: const:<c>, sin1, example:<alpha>, csv:<path>");
        app->add_option("--rect", rect_v, "x_min x_max y_min y_max")->expected(4);
        app->add_option("--nx", nx, "grid nodes along x");
        app->add_option("--ny", ny, "grid nodes along y");
        app->add_option("--point", point, "single point x y")->expected(2);
        app->add_option("--out", out, "CSV path, - for stdout");
        tol.attach(app);
    }

    int run(std::ostream &os)
    {
        require(!gamma.empty(), "--gamma is required");
        const auto cfg = tol.config();
        const any_density g = parse_density(gamma, cfg);
        std::unique_ptr<std::ofstream> holder;
        std::ostream &dst = pick_stream(out, os, holder);
        if (!point.empty()) {
            const cplx z(point[0], point[1]);
            const estimate w = potential(g, z, cfg);
            csv_writer w_csv(dst, {"x", "y", "omega", "omega_err"});
            w_csv.row({z.real(), z.imag(), w.value, w.error});
            return 0;
        }
        require(nx >= 1 && ny >= 1, "grid needs at least one node per axis");
        const rect r = to_rect(rect_v);
        const potential_grid grid = fill_grid(g, r, nx, ny, cfg);
        write_grid_csv(dst, grid);
        if (holder) {
            double max_err = 0.0;
            for (double e : grid.errors)
                max_err = std::max(max_err, e);
            write_json(out + ".json", {{"gamma", density_name(g)},
                                       {"rect", to_json(r)},
                                       {"nx", nx},
                                       {"ny", ny},
                                       {"config", to_json(cfg)},
                                       {"max_error", max_err}});
        }
        return 0;
    }
};

struct theta_cmd
{
    std::string gamma, out;
    double N = 1.25, step = 0.5;
    std::vector<double> range{-10.0, 10.0};
    bool with_theta0 = false;
    tolerance_options tol;

    void attach(CLI::App *app)
    {
        app->add_option("--gamma", gamma, "density selector");
        app->add_option("--N", N, "half-width of the weight window");
        app->add_option("--range", range, "x_min x_max")->expected(2);
        app->add_option("--step", step, "sampling step");
        app->add_flag("--theta0", with_theta0, "also emit the Poisson-integral weight");
        app->add_option("--out", out, "CSV path, - for stdout");
        tol.attach(app);
    }

    int run(std::ostream &os)
    {
        require(!gamma.empty(), "--gamma is required");
        require(step > 0.0 && range.size() == 2 && range[1] >= range[0], "bad sampling range");
        const auto cfg = tol.config();
        const any_density g = parse_density(gamma, cfg);
        std::unique_ptr<std::ofstream> holder;
        std::ostream &dst = pick_stream(out, os, holder);
        if (with_theta0)
            dst << "x,theta,theta_err,theta0,theta0_err\n";
        else
            dst << "x,theta,theta_err\n";
        for (double x : sample_points(range[0], range[1], step)) {
            const estimate t = theta_weight(g, N, x, cfg);
            dst << format_number(x) << ',' << format_number(t.value) << ',' << format_number(t.error);
            if (with_theta0) {
                const estimate t0 = theta0(g, x, cfg);
                dst << ',' << format_number(t0.value) << ',' << format_number(t0.error);
            }
            dst << '\n';
        }
        return 0;
    }
};

struct multiplier_cmd
{
    std::string gamma, out;
    double N = 0.25, bilip_half_width = 200.0;
    int alpha0 = 0, window = 200, samples = 4001, nx = 41, ny = 9;
    std::vector<double> verify;
    tolerance_options tol;

    void attach(CLI::App *app)
    {
        app->add_option("--gamma", gamma, "density selector");
        app->add_option("--N", N, "bi-Lipschitz distance");
        app->add_option("--alpha0", alpha0, "constant multiplicity, 0 for the minimal admissible one");
        app->add_option("--window", window, "cells k in [-window, window]");
        app->add_option("--bilip-half-width", bilip_half_width, "half-width of the constant estimation domain");
        app->add_option("--samples", samples, "sample count for the constant estimation");
        app->add_option("--verify", verify, "comparability grid x_min x_max y_min y_max")->expected(4);
        app->add_option("--nx", nx, "grid nodes along x");
        app->add_option("--ny", ny, "grid nodes along y");
        app->add_option("--out", out, "output directory");
        tol.attach(app);
    }

    int run(std::ostream &os)
    {
        require(!gamma.empty(), "--gamma is required");
        require(window >= 1, "window must be positive");
        const auto cfg = tol.config();
        const any_density g = parse_density(gamma, cfg);
        const auto bl = std::visit(
            [&](const auto &d) {
                return estimate_bilipschitz(mass_phase(d), N, {-bilip_half_width, bilip_half_width}, samples);
            },
            g);
        multiplier_config mc;
        mc.alpha0 = alpha0;
        mc.k_min = -window;
        mc.k_max = window;
        const multiplier_product m = build_multiplier(g, bl, mc, cfg);
        const double B = (alpha0 == 0 ? minimal_multiplicity(bl) : alpha0) + 1.0;
        const partition_check chk =
            std::visit([&](const auto &d) { return check_partition(d, m.cells, m.xi, bl, B); }, g);
        nlohmann::json summary = {{"gamma", m.gamma_name},
                                  {"bilipschitz", to_json(bl)},
                                  {"B", B},
                                  {"alpha", m.alpha},
                                  {"alpha_error", m.coefficient.quadrature_error + m.coefficient.tail_bound},
                                  {"window", {m.k_min(), m.k_max()}},
                                  {"partition_check",
                                   {{"gaps_ok", chk.gaps_ok},
                                    {"multiplicities_ok", chk.multiplicities_ok},
                                    {"centroids_ok", chk.centroids_ok},
                                    {"min_gap", chk.min_gap},
                                    {"max_gap", chk.max_gap},
                                    {"min_offset", chk.min_offset},
                                    {"max_mass_error", chk.max_mass_error}}}};
        nlohmann::json report;
        if (!verify.empty()) {
            const auto rep = verify_comparability(m, g, to_rect(verify), nx, ny, cfg);
            report = to_json(rep);
            summary["band"] = {{"ratio_inf", rep.ratio_inf},
                               {"ratio_sup", rep.ratio_sup},
                               {"band_width", rep.band_width}};
        }
        if (!out.empty()) {
            std::filesystem::create_directories(out);
            write_json(out + "/multiplier.json", to_json(m));
            if (!report.is_null())
                write_json(out + "/comparability.json", report);
        }
        os << summary.dump(2) << '\n';
        return 0;
    }
};

struct reproduce_cmd
{
    double alpha = -1.0, N = 1.25, delta = 0.5;
    std::string out = "reproduce";
    tolerance_options tol;

    void attach(CLI::App *app)
    {
        app->add_option("--alpha", alpha, "exponent of the example family, in [0, 2]");
        app->add_option("--N", N, "half-width of the weight window");
        app->add_option("--delta", delta, "mountain-chain height threshold");
        app->add_option("--out", out, "output directory");
        tol.attach(app);
    }

    int run(std::ostream &os)
    {
        require(alpha >= 0.0 && alpha <= 2.0, "alpha out of [0,2]");
        const auto cfg = tol.config();
        const example_family fam(alpha);
        std::filesystem::create_directories(out);

        const band pm = phi_mu_band(fam, delta, -200.0, 200.0, 0.1, cfg);
        const band tb = theta_band(fam, N, 5.0, 200.0, 0.1, cfg);
        band wb;
        for (std::size_t i = 0; i < tb.x.size(); ++i)
            wb.add(tb.x[i], tb.a[i], ls_weight(fam, tb.x[i], cfg));
        const sandwich_report sw = sine_sandwich(fam, {-50.0, 50.0, 1.0, 5.0}, 101, 5);
        const a2_report a2 = muckenhoupt_a2(fam.phase(cfg), 0.0, {2.0, 300.0}, 0, cfg);
        const summit_report sr = summit_growth_check(*fam.zeros(), 0.1);

        {
            auto f = open_output(out + "/phi_mu_band.csv");
            write_band_csv(f, pm, "phi_prime", "mu");
        }
        {
            auto f = open_output(out + "/theta_band.csv");
            write_band_csv(f, tb, "exp_theta", "target");
        }
        {
            auto f = open_output(out + "/weight_band.csv");
            write_band_csv(f, wb, "exp_theta", "ls_weight");
        }
        {
            auto f = open_output(out + "/sandwich.csv");
            write_sandwich_csv(f, sw);
        }
        write_json(out + "/a2.json", to_json(a2));

        const bool sandwich_ok = std::isfinite(sw.c_lower) && std::isfinite(sw.c_upper);
        const bool growth_ok = std::isfinite(sw.growth_min) && std::isfinite(sw.growth_max);
        const bool all_ok = pm.finite() && tb.finite() && wb.finite() && sandwich_ok && growth_ok;

        std::ostringstream s;
        auto line = [&](const std::string &name, double v) { s << name << " = " << format_number(v) << '\n'; };
        s << "alpha = " << format_number(alpha) << '\n';
        s << "N = " << format_number(N) << '\n';
        s << "\n[phi_prime / mu, x in [-200, 200], delta = " << format_number(delta) << "]\n";
        line("c", pm.lo);
        line("C", pm.hi);
        s << "\n[exp(theta) / target, x in [5, 200]]\n";
        line("c", tb.lo);
        line("C", tb.hi);
        line("C/c", tb.width());
        s << "\n[exp(theta) / ls_weight, x in [5, 200]]\n";
        line("c", wb.lo);
        line("C", wb.hi);
        s << "\n[sine sandwich, |x| <= 50, y in [1, 5]]\n";
        s << "log|sin(pi z)| <= log|E| + c1, log|E| <= log|sin(pi (z + i))| + c2\n";
        line("c1", sw.c_lower);
        line("c2", sw.c_upper);
        s << "\n[log|E| - pi y, |x| <= 50, y in [1, 5]]\n";
        line("min", sw.growth_min);
        line("max", sw.growth_max);
        line("max tail error", sw.max_tail_error);
        s << "\n[A2, phase alpha = 0, domain [2, 300]]\n";
        line("sup_ratio", a2.sup_ratio);
        line("min_gap", a2.min_gap);
        s << "intervals_tested = " << a2.intervals_tested << '\n';
        s << "\n[summit growth, eps = 0.1]\n";
        line("K", sr.K);
        s << "flagged = " << (sr.flagged ? "yes" : "no") << '\n';
        if (alpha == 0.0)
            s << "\nnote: alpha = 0 flattens the family; the theta band degenerates to constants (PW(1)-like regime)\n";
        s << "\nall bands finite = " << (all_ok ? "yes" : "no") << '\n';
        {
            auto f = open_output(out + "/summary.txt");
            f << s.str();
        }
        os << s.str();
        return all_ok ? 0 : 1;
    }
};

// Phase selectors: linear:<slope>, example:<alpha>, or any density selector (phi = pi * Phi).
inline phase_model parse_phase(const std::string &sel, const quadrature_config &cfg)
{
    if (sel.rfind("linear:", 0) == 0) {
        double slope = 0.0;
        try {
            slope = std::stod(sel.substr(7));
        } catch (const std::exception &) {
            throw precondition_error("bad number in phase selector");
        }
        return phase_model::linear(slope);
    }
    const any_density g = parse_density(sel, cfg);
    return std::visit([](const auto &d) { return phase_of(d); }, g);
}

struct a2_cmd
{
    std::string phase, out;
    double alpha_phase = 0.0;
    std::vector<double> domain{-100.0, 100.0};
    long budget = 0;
    tolerance_options tol;

    void attach(CLI::App *app)
    {
        app->add_option("--phase", phase, "linear:<slope>, example:<alpha>, or a density selector");
        app->add_option("--alpha-phase", alpha_phase, "level alpha in [0, pi)");
        app->add_option("--domain", domain, "lo hi")->expected(2);
        app->add_option("--budget", budget, "max intervals per dyadic length, 0 for all");
        app->add_option("--out", out, "JSON path, - for stdout");
        tol.attach(app);
    }

    int run(std::ostream &os)
    {
        require(!phase.empty(), "--phase is required");
        const auto cfg = tol.config();
        const auto rep = muckenhoupt_a2(parse_phase(phase, cfg), alpha_phase, {domain[0], domain[1]}, budget, cfg);
        std::unique_ptr<std::ofstream> holder;
        std::ostream &dst = pick_stream(out, os, holder);
        dst << to_json(rep).dump(2) << '\n';
        return 0;
    }
};

struct bilip_cmd
{
    std::string gamma, of = "phase";
    double N = 1.0;
    std::vector<double> domain{-200.0, 200.0};
    int samples = 4001;
    tolerance_options tol;

    void attach(CLI::App *app)
    {
        app->add_option("--gamma", gamma, "density selector");
        app->add_option("--of", of, "phase (phi = pi * Phi) or mass (Phi)")->check(CLI::IsMember({"phase", "mass"}));
        app->add_option("--N", N, "minimal pair distance");
        app->add_option("--domain", domain, "lo hi")->expected(2);
        app->add_option("--samples", samples, "left endpoints sampled");
        tol.attach(app);
    }

    int run(std::ostream &os)
    {
        require(!gamma.empty(), "--gamma is required");
        const auto cfg = tol.config();
        const any_density g = parse_density(gamma, cfg);
        const auto bl = std::visit(
            [&](const auto &d) {
                return estimate_bilipschitz(of == "mass" ? mass_phase(d) : phase_of(d), N,
                                            {domain[0], domain[1]}, samples);
            },
            g);
        os << to_json(bl).dump(2) << '\n';
        return 0;
    }
};

inline int run_cli(const std::vector<std::string> &args, std::ostream &out = std::cout,
                   std::ostream &err = std::cerr)
{
    CLI::App app{"Logarithmic potentials, multipliers and weighted Paley-Wiener checks"};
    app.require_subcommand(1);
    std::string config;
    potential_cmd pot;
    theta_cmd th;
    multiplier_cmd mul;
    reproduce_cmd rep;
    a2_cmd a2;
    bilip_cmd bl;
    struct entry
    {
        CLI::App *app;
        std::function<int(std::ostream &)> run;
    };
    std::vector<entry> subs;
    auto add = [&](const char *name, const char *help, auto &cmd) {
        CLI::App *s = app.add_subcommand(name, help);
        cmd.attach(s);
        s->add_option("--config", config, "JSON file of option values; flags win");
        subs.push_back({s, [&cmd](std::ostream &o) { return cmd.run(o); }});
    };
    add("potential", "evaluate omega on a grid or at a point", pot);
    add("theta", "sample the extra weight theta", th);
    add("multiplier", "build the multiplier and certify comparability", mul);
    add("reproduce", "reproduce the worked example bundle", rep);
    add("a2", "Muckenhoupt A2 check for a phase", a2);
    add("bilip", "estimate bi-Lipschitz constants", bl);

    std::vector<const char *> argv{"bilip"};
    for (const auto &a : args)
        argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }
    try {
        for (auto &s : subs) {
            if (!s.app->parsed())
                continue;
            if (!config.empty())
                merge_config(s.app, config);
            return s.run(out);
        }
    } catch (const precondition_error &e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const CLI::Error &e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const numeric_error &e) {
        err << "numeric failure: " << e.what() << " (achieved " << e.achieved_error() << ")\n";
        return 1;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

} // namespace bilip::cli

#endif
