#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "zksem/cli.hpp"

using namespace zksem;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("zksem_cli_io_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

struct Outcome {
    int code;
    std::string err;
};

Outcome run(std::vector<std::string> args)
{
    args.insert(args.begin(), "zksem_cli");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream err;
    const int code = cli_dispatch(int(argv.size()), argv.data(), err);
    return {code, err.str()};
}

std::string config_path(const std::string& name) { return (fs::path(ZKSEM_CONFIG_DIR) / name).string(); }

Field random_field(const Grid2D& g, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n;
    Field f(g);
    for (double& v : f.data) v = n(rng);
    return f;
}

std::string write_text(const fs::path& p, const std::string& text)
{
    write_file(p.string(), text);
    return p.string();
}

} // namespace

TEST(Snapshot, LayoutLength)
{
    const Grid2D g = make_grid(8, 16, 3.0, 2.0);
    EXPECT_EQ(encode_snapshot(random_field(g, 1), 0.5).size(), 4u + 4 + 16 + 24 + 8 * 8 * 16);
}

TEST(Snapshot, HeaderBytes)
{
    const Grid2D g = make_grid(8, 16, 1.0, 1.0);
    const std::string s = encode_snapshot(Field(g), 0.0);
    EXPECT_EQ(s.substr(0, 4), "SEM2");
    EXPECT_EQ(s[4], 1);
    EXPECT_EQ(s[5], 0);
    EXPECT_EQ(s[8], 8);
    EXPECT_EQ(s[16], 16);
}

TEST(Snapshot, ByteIdenticalRoundTrip)
{
    const fs::path dir = scratch("roundtrip");
    const Grid2D g = make_grid(32, 16, 7.5, 3.25);
    const Field f = random_field(g, 2);
    const std::string a = (dir / "a.sem2").string(), b = (dir / "b.sem2").string();
    write_snapshot(a, f, 1.25);
    const Snapshot s = read_snapshot(a);
    EXPECT_EQ(s.t, 1.25);
    EXPECT_TRUE(s.field.grid == g);
    EXPECT_EQ(s.field.data, f.data);
    write_snapshot(b, s.field, s.t);
    EXPECT_EQ(read_file(a), read_file(b));
}

TEST(Snapshot, TruncatedPayload)
{
    const std::string s = encode_snapshot(random_field(make_grid(8, 8, 1.0, 1.0), 3), 0.0);
    try {
        decode_snapshot(s.substr(0, s.size() - 3));
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("truncated payload"), std::string::npos);
    }
}

TEST(Snapshot, UnsupportedVersion)
{
    std::string s = encode_snapshot(random_field(make_grid(8, 8, 1.0, 1.0), 4), 0.0);
    s[4] = 2;
    try {
        decode_snapshot(s);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("unsupported version"), std::string::npos);
    }
}

TEST(Snapshot, BadMagicAndShortHeader)
{
    std::string s = encode_snapshot(Field(make_grid(8, 8, 1.0, 1.0)), 0.0);
    s[0] = 'X';
    EXPECT_THROW(decode_snapshot(s), ValidationError);
    EXPECT_THROW(decode_snapshot("SEM2"), ValidationError);
    EXPECT_THROW(decode_snapshot(""), ValidationError);
}

TEST(Snapshot, TrailingBytesRejected)
{
    const std::string s = encode_snapshot(Field(make_grid(8, 8, 1.0, 1.0)), 0.0);
    EXPECT_THROW(decode_snapshot(s + "x"), ValidationError);
}

TEST(Config, UnknownKeyRejected)
{
    const json j = json::parse(R"({"nx": 8, "ny": 8, "Lx": 1.0, "Ly": 1.0, "nz": 3})");
    try {
        read_grid(ConfigReader(j, "grid"));
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("unknown key grid.nz"), std::string::npos);
    }
}

TEST(Config, WrongTypeAndMissingKey)
{
    EXPECT_THROW(read_grid(ConfigReader(json::parse(R"({"nx": "8", "ny": 8, "Lx": 1, "Ly": 1})"), "grid")),
                 ValidationError);
    EXPECT_THROW(read_grid(ConfigReader(json::parse(R"({"nx": 8, "Lx": 1, "Ly": 1})"), "grid")), ValidationError);
    EXPECT_THROW(read_grid(ConfigReader(json::parse(R"({"nx": -8, "ny": 8, "Lx": 1, "Ly": 1})"), "grid")),
                 ValidationError);
    EXPECT_THROW(ConfigReader(json::parse("[1, 2]"), "root"), ValidationError);
}

TEST(Config, InitialFamilies)
{
    const Grid2D g = make_grid(64, 8, 40.0, 8.0);
    const Field a = read_initial(ConfigReader(json::parse(R"({"family": "gaussian", "amplitude": 2.0,
        "widths": [1.0, 2.0], "center": [1.25, 0.0]})"), "initial"), g);
    EXPECT_NEAR(max_abs(a), 2.0, 1e-12);
    const Field s = read_initial(ConfigReader(json::parse(R"({"family": "line_soliton", "c": 1.0,
        "zero_mean": true})"), "initial"), g);
    EXPECT_NEAR(mean(s), 0.0, 1e-14);
    EXPECT_THROW(read_initial(ConfigReader(json::parse(R"({"family": "vortex"})"), "initial"), g), ValidationError);
    const auto [u1, u2] = cli::read_pair_initial(ConfigReader(json::parse(R"({"family": "perturbed_pair",
        "base": {"family": "line_soliton", "c": 1.0},
        "bump": {"family": "gaussian", "amplitude": 0.1, "widths": [1.0, 1.0]}})"), "initial"), g);
    EXPECT_NEAR(max_abs(u2 - u1), 0.1, 1e-12);
}

TEST(Cli, UnknownSubcommand)
{
    const Outcome r = run({"bogus", "--config", "x.json"});
    EXPECT_EQ(r.code, 1);
    EXPECT_FALSE(r.err.empty());
}

TEST(Cli, MissingConfigFlag)
{
    EXPECT_EQ(run({"simulate"}).code, 1);
}

TEST(Cli, MalformedJson)
{
    const fs::path dir = scratch("malformed");
    const Outcome r = run({"simulate", "--config", write_text(dir / "c.json", "{\"model\": "), "--out", dir.string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST(Cli, MissingConfigFile)
{
    EXPECT_EQ(run({"simulate", "--config", "/nonexistent/c.json"}).code, 1);
}

TEST(Cli, AlphaBelowAdmissibility)
{
    const fs::path dir = scratch("bad");
    const Outcome r = run({"carleman-check", "--config", config_path("bad.json"), "--out", dir.string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.err, "alpha below admissibility\n");
}

TEST(Cli, UnknownTopLevelKey)
{
    const fs::path dir = scratch("unknown");
    const Outcome r = run({"persistence-check", "--config",
                       write_text(dir / "c.json", R"({"lambda": 1, "beta": 0.5, "colour": "red"})"), "--out",
                       dir.string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.err, "unknown key colour\n");
}

TEST(Cli, SimulateWritesSnapshotsAndInvariants)
{
    const fs::path dir = scratch("run1");
    const Outcome r = run({"simulate", "--config", config_path("zk_soliton.json"), "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(dir / "invariants.csv"));
    EXPECT_TRUE(fs::exists(dir / "report.json"));
    const Snapshot first = read_snapshot((dir / "snap_000000.sem2").string());
    EXPECT_EQ(first.t, 0.0);
    EXPECT_TRUE(fs::exists(dir / "snap_000004.sem2"));
    const json rep = load_json((dir / "report.json").string());
    EXPECT_EQ(rep.at("seed"), 0);
    EXPECT_LT(rep.at("mass_drift").get<double>(), 1e-8 * 96);
}

TEST(Cli, ReportsAreDeterministic)
{
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    ASSERT_EQ(run({"persistence-check", "--config", config_path("persistence.json"), "--out", a.string()}).code, 0);
    ASSERT_EQ(run({"persistence-check", "--config", config_path("persistence.json"), "--out", b.string()}).code, 0);
    EXPECT_EQ(read_file((a / "report.json").string()), read_file((b / "report.json").string()));
}

TEST(Cli, NumericalFailureExitsTwo)
{
    // a large beta on a wide window trips the exponent guard
    const fs::path dir = scratch("numerical");
    const Outcome r = run({"interp-check", "--config",
                       write_text(dir / "c.json", R"({"grid": {"nx": 32, "ny": 32, "Lx": 400.0, "Ly": 400.0},
                           "beta": 4.0, "k": 4, "thetas": [0.5], "count": 1, "seed": 3})"),
                       "--out", dir.string()});
    EXPECT_EQ(r.code, 2) << r.err;
    EXPECT_NE(r.err.find("overflow"), std::string::npos);
}

TEST(Cli, AnnulusReportFromSnapshots)
{
    const fs::path dir = scratch("annulus");
    const Grid2D g = make_grid(64, 64, 32.0, 32.0);
    const Field f = Field::sample(g, [](double x, double y) { return std::exp(-(x * x + y * y) / 4); });
    write_snapshot((dir / "a.sem2").string(), f, 0.0);
    write_snapshot((dir / "b.sem2").string(), f, 0.5);
    const std::string cfg = write_text(dir / "c.json", json{{"inputs", {(dir / "a.sem2").string(), (dir / "b.sem2").string()}},
                                                            {"radii", {2.0, 4.0, 6.0}}}
                                                           .dump());
    const Outcome r = run({"annulus-report", "--config", cfg, "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const json rep = load_json((dir / "report.json").string());
    EXPECT_EQ(rep.at("a_values").size(), 3u);
    EXPECT_TRUE(fs::exists(dir / "annulus.csv"));
}
