#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "commands.hpp"

using bilip::cli::run_cli;

namespace {

struct result
{
    int code;
    std::string out, err;
};

result run(const std::vector<std::string> &args)
{
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<double>> parse_csv(const std::string &text)
{
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ','))
            row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

} // namespace

TEST(Cli, FlatPotentialGrid)
{
    const auto r = run({"potential", "--gamma", "const:1", "--rect", "-5", "5", "0.5", "5", "--nx", "41", "--ny", "19"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.rfind("x,y,omega,omega_err\n", 0), 0u);
    EXPECT_EQ(r.out.find('\r'), std::string::npos);
    const auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 41u * 19u);
    for (const auto &row : rows)
        EXPECT_NEAR(row[2], std::numbers::pi * row[1], 1e-6);
}

TEST(Cli, PointMatchesLibrary)
{
    const auto r = run({"potential", "--gamma", "example:1.0", "--point", "0", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 1u);
    const auto g = bilip::parse_density("example:1.0");
    EXPECT_EQ(rows[0][2], bilip::potential(g, bilip::cplx(0.0, 1.0), {}).value);
}

TEST(Cli, UsageErrors)
{
    EXPECT_EQ(run({"potential", "--rect", "-5", "5", "0.5", "5"}).code, 2);
    EXPECT_EQ(run({"potential", "--gamma", "nonsense"}).code, 2);
    EXPECT_EQ(run({"potential", "--gamma", "const:1", "--no-such-flag"}).code, 2);
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
    const auto r = run({"reproduce", "--alpha", "2.5"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("alpha out of [0,2]"), std::string::npos);
}

TEST(Cli, MultiplierCosineBand)
{
    const auto r = run({"multiplier", "--gamma", "const:1", "--alpha0", "1", "--window", "500", "--verify", "-20", "20", "1", "5"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_LE(j["band"]["band_width"].get<double>(), 1.01);
    EXPECT_NEAR(j["alpha"].get<double>(), 0.0, 1e-8);
}

TEST(Cli, MultiplierBoundViolation)
{
    const auto r = run({"multiplier", "--gamma", "sin1", "--N", "1", "--alpha0", "1"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("multiplicity bound violated"), std::string::npos);
}

TEST(Cli, ConfigMergeFlagsWin)
{
    const auto dir = std::filesystem::temp_directory_path() / "bilip_cli_test";
    std::filesystem::create_directories(dir);
    const auto cfg = (dir / "cfg.json").string();
    {
        std::ofstream f(cfg);
        f << R"({"gamma": "const:2", "rect": [0, 1, 1, 1], "nx": 2, "ny": 1})";
    }
    const auto merged = parse_csv(run({"potential", "--config", cfg}).out);
    ASSERT_EQ(merged.size(), 2u);
    EXPECT_NEAR(merged[0][2], 2.0 * std::numbers::pi, 1e-6);
    const auto overridden = parse_csv(run({"potential", "--config", cfg, "--nx", "3", "--gamma", "const:1"}).out);
    ASSERT_EQ(overridden.size(), 3u);
    EXPECT_NEAR(overridden[0][2], std::numbers::pi, 1e-6);
    {
        std::ofstream f(cfg);
        f << R"({"bogus": 1})";
    }
    EXPECT_EQ(run({"potential", "--config", cfg}).code, 2);
}

TEST(Cli, DeterministicOutput)
{
    const std::vector<std::string> args{"potential", "--gamma", "sin1", "--rect", "-3", "3", "0.5", "2", "--nx", "7", "--ny", "3"};
    const auto a = run(args);
    const auto b = run(args);
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
}

TEST(Cli, A2AndBilip)
{
    const auto a2 = run({"a2", "--phase", "linear:3.141592653589793", "--domain", "-100", "100"});
    ASSERT_EQ(a2.code, 0) << a2.err;
    EXPECT_LE(nlohmann::json::parse(a2.out)["sup_ratio"].get<double>(), 10.0);
    const auto bl = run({"bilip", "--gamma", "const:1", "--N", "1"});
    ASSERT_EQ(bl.code, 0) << bl.err;
    EXPECT_NEAR(nlohmann::json::parse(bl.out)["C1"].get<double>(), std::numbers::pi, 1e-12);
}
