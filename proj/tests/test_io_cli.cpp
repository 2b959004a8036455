#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "densitylab/cli.hpp"

using namespace densitylab;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir()
    {
        std::random_device rd;
        path = fs::temp_directory_path() / ("densitylab_test_" + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    [[nodiscard]] std::string file(const char* name) const { return (path / name).string(); }
};

struct CliResult {
    int code;
    std::string out, err;
};

CliResult invoke(std::vector<std::string> args)
{
    args.insert(args.begin(), "densitylab");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path)
{
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace

TEST(Io, NumberFormatRoundTripsExactly)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int i = 0; i < 1000; ++i) {
        const double x = std::exp(u(rng)) * (i % 2 ? -1 : 1);
        EXPECT_EQ(io::parse_double(io::fmt(x)), x);
    }
    EXPECT_EQ(io::fmt(INFINITY), "inf");
    EXPECT_TRUE(std::isnan(io::parse_double(io::fmt(NAN))));
    EXPECT_THROW((void)io::parse_double("1.5x"), ConfigError);
}

TEST(Io, CsvTableQuotesAndMetadata)
{
    io::CsvTable t;
    t.add_meta("schema", "1");
    t.columns = {"a", "note"};
    t.rows = {{"1", "plain"}, {"2", "has, comma and \"quote\""}};
    std::stringstream ss;
    t.write(ss);
    const auto r = io::CsvTable::read(ss);
    EXPECT_EQ(r.columns, t.columns);
    EXPECT_EQ(r.rows, t.rows);
    ASSERT_EQ(r.meta.size(), 1u);
    EXPECT_EQ(r.meta[0].second, "1");
}

TEST(Io, ProfileCsvRoundTrip)
{
    const auto e = make_entry(EntryId::euclidean_catenoid, SpaceFormParams::make(2, 3, 0.0));
    const auto p = build_profile(e, Grid(std::vector<double>{0.5, 1.0, 1.7, 3.0, 8.0}));
    std::stringstream ss;
    io::write_profile_csv(ss, p);
    const auto q = io::read_profile_csv(ss);
    ASSERT_EQ(q.size(), p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        EXPECT_EQ(q.grid[i], p.grid[i]);
        EXPECT_EQ(q.theta[i], p.theta[i]);
        EXPECT_EQ(q.flux_j[i], p.flux_j[i]);
        EXPECT_EQ(q.barj[i], p.barj[i]);
        EXPECT_EQ(q.tilt_t[i], p.tilt_t[i]);
        EXPECT_EQ(q.empty_level[i], p.empty_level[i]);
        EXPECT_EQ(q.annotations[i], p.annotations[i]);
    }
    EXPECT_EQ(q.params.m, 2);
    EXPECT_EQ(q.critical_levels.size(), p.critical_levels.size());
}

TEST(Cli, VersionAndUsage)
{
    EXPECT_EQ(invoke({"--version"}).code, 0);
    EXPECT_EQ(invoke({}).code, cli::exit_usage);
    EXPECT_EQ(invoke({"density"}).code, cli::exit_usage);
    EXPECT_EQ(invoke({"density", "--entry", "helicoid", "--grid", "1:2:3"}).code, cli::exit_usage);
    EXPECT_EQ(invoke({"flow", "--alpha", "-1"}).code, cli::exit_usage);
}

TEST(Cli, DensityThenMonotone)
{
    TempDir dir;
    const auto csv = dir.file("prof.csv");
    const auto r = invoke({"density", "--entry", "euclidean_catenoid", "--grid", "1.05:30:120", "--out", csv});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = io::json::parse(r.out);
    EXPECT_EQ(doc["tool"], "densitylab");
    EXPECT_EQ(doc["command"], "density");
    EXPECT_TRUE(doc["pass"].get<bool>());
    const auto m = invoke({"monotone", "--profile", csv});
    EXPECT_EQ(m.code, 0) << m.err;
    EXPECT_TRUE(io::json::parse(m.out)["pass"].get<bool>());
}

TEST(Cli, VerdictFailureExitsTwo)
{
    const auto r = invoke({"flow", "--alpha", "1.0"});
    EXPECT_EQ(r.code, cli::exit_verdict);
    EXPECT_NE(r.err.find("verdict failed"), std::string::npos);
    EXPECT_EQ(invoke({"flow", "--alpha", "2.0"}).code, 0);
}

TEST(Cli, DomainErrorsExitOne)
{
    EXPECT_EQ(invoke({"spectrum", "--entry", "totally_geodesic", "--k", "1", "--lambda", "0.2"}).code, cli::exit_usage);
    EXPECT_EQ(invoke({"density", "--entry", "totally_geodesic", "--grid", "1:2:3", "--out", "/nonexistent/dir/x.csv"}).code,
              cli::exit_usage);
}

TEST(Cli, ConfigFileSectionsAndOverrides)
{
    TempDir dir;
    const auto cfg = dir.file("run.ini");
    std::ofstream(cfg) << "[flow]\nalpha=1.0\nc=0.5\n[density]\ngrid=1:2:3\n";
    EXPECT_EQ(invoke({"--config", cfg, "flow"}).code, cli::exit_verdict);
    const auto r = invoke({"--config", cfg, "flow", "--alpha", "2.0"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(io::json::parse(r.out)["config"]["c"], 0.5);

    const auto bad = dir.file("bad.ini");
    std::ofstream(bad) << "[flow]\nnot_an_option=3\n";
    EXPECT_EQ(invoke({"--config", bad, "flow"}).code, cli::exit_usage);
    EXPECT_EQ(invoke({"--config", dir.file("missing.ini"), "flow"}).code, cli::exit_usage);
}

TEST(Cli, RepeatedRunsAreBitIdentical)
{
    TempDir dir;
    const auto a = dir.file("a.csv"), b = dir.file("b.csv");
    ASSERT_EQ(invoke({"density", "--entry", "euclidean_catenoid", "--grid", "0.5:6:40", "--out", a}).code, 0);
    ASSERT_EQ(invoke({"density", "--entry", "euclidean_catenoid", "--grid", "0.5:6:40", "--out", b}).code, 0);
    EXPECT_EQ(slurp(a), slurp(b));
    const auto s1 = invoke({"spectrum", "--t", "10,20"}), s2 = invoke({"spectrum", "--t", "10,20"});
    EXPECT_EQ(s1.out, s2.out);
}
