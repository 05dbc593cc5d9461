#include "cli.hpp"

#include "lrac/dynamics.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

namespace fs = std::filesystem;

namespace {
struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream o, e;
    int c = lrac::cli::run(args, o, e);
    return {c, o.str(), e.str()};
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("lrac_cli_" + name);
    fs::remove_all(p);
    return p;
}

std::vector<std::string> lines(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> v;
    for (std::string l; std::getline(in, l);)
        v.push_back(l);
    return v;
}

nlohmann::json report(const fs::path& dir) {
    std::ifstream in(dir / "report.json");
    return nlohmann::json::parse(in);
}
} // namespace

TEST(Cli, EigenTable) {
    auto dir = scratch("eigen");
    auto r = run({"eigen", "--n", "64", "--zeta", "0.25", "--out", dir.string()});
    auto rows = lines(dir / "eigen.csv");
    ASSERT_EQ(rows.size(), 66u); // header + k = 0..64
    const double pi = std::numbers::pi;
    int R = 3;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        int k;
        double lam;
        std::sscanf(rows[i].c_str(), "%d,%lf", &k, &lam);
        EXPECT_LE(lam, pi * pi * k * k * (1 + 1e-10));
        if (k * R <= 64)
            EXPECT_GE(lam, 4.0 * k * k * (1 - 1e-10));
    }
    // exit code mirrors the full-range sandwich check recorded in the report
    auto j = report(dir);
    EXPECT_EQ(r.code, j["passed"].get<bool>() ? 0 : 1);
    EXPECT_EQ(j["parameters"]["config"]["grid"]["n"], "64");
}

TEST(Cli, SimulateEquilibrium) {
    auto dir = scratch("simulate");
    auto r = run({"simulate", "--sigma", "0", "--u0", "-1", "--n", "32", "--T", "0.05", "--dt", "0.001",
                  "--record-every", "10", "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    auto t = lrac::Trajectory::read_binary(dir / "trajectory.bin");
    ASSERT_EQ(t.states.size(), 6u);
    for (const auto& s : t.states)
        for (double v : s)
            EXPECT_NEAR(v, -1.0, 1e-13);
    EXPECT_EQ(lines(dir / "trajectory.csv").size(), 7u);
}

TEST(Cli, ConfigFileAndOverrides) {
    auto dir = scratch("config");
    fs::create_directories(dir);
    auto ini = dir / "run.ini";
    std::ofstream(ini) << "[grid]\nn = 16\nzeta = 0.25\n[physics]\nsigma = 0\ngamma = 2\n[time]\nT = 0.01\n"
                          "dt = 0.001\nrecord_every = 5\n[initial]\nkind = constant\nvalue = 1\n";
    auto r = run({"simulate", "--config", ini.string(), "--gamma", "3", "--out", (dir / "o").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = report(dir / "o");
    EXPECT_EQ(j["parameters"]["gamma"], 3.0);
    EXPECT_EQ(j["parameters"]["N"], 16);
    EXPECT_EQ(j["parameters"]["config"]["physics"]["gamma"], "3");
}

TEST(Cli, InvalidConfigExitsTwo) {
    auto dir = scratch("bad");
    auto r = run({"simulate", "--zeta", "0.7", "--out", dir.string()});
    EXPECT_EQ(r.code, 2);
    auto j = report(dir);
    EXPECT_EQ(j["error"]["exit_code"], 2);
    EXPECT_EQ(run({"simulate", "--n", "4", "--zeta", "0.4", "--out", dir.string()}).code, 2);
    EXPECT_EQ(run({"simulate", "--drift", "truncated", "--Z", "1.0", "--out", dir.string()}).code, 2);
    EXPECT_EQ(run({"simulate", "--dt", "abc", "--out", dir.string()}).code, 2);
    EXPECT_EQ(run({"nosuchcommand"}).code, 2);
    EXPECT_EQ(run({"simulate", "--config", "/nonexistent.ini"}).code, 2);
}

TEST(Cli, SimulateOnFinerNoiseSheet) {
    auto dir = scratch("master");
    std::vector<std::string> base{"simulate", "--n", "16", "--T", "0.01", "--dt", "0.002", "--record-every", "1"};
    auto a = base, b = base;
    a.insert(a.end(), {"--set", "noise.master_n=64", "--set", "noise.dt_master=0.0005", "--out", (dir / "a").string()});
    b.insert(b.end(), {"--set", "noise.master_n=40", "--out", (dir / "b").string()});
    EXPECT_EQ(run(a).code, 0);
    EXPECT_EQ(run(b).code, 2);
}

TEST(Cli, SameSeedSameBytes) {
    auto a = scratch("det_a"), b = scratch("det_b");
    std::vector<std::string> base{"compare", "--replicas", "4", "--T", "0.05", "--seed", "17"};
    auto ra = base, rb = base;
    ra.insert(ra.end(), {"--threads", "1", "--out", a.string()});
    rb.insert(rb.end(), {"--threads", "4", "--out", b.string()});
    ASSERT_EQ(run(ra).code, 0);
    ASSERT_EQ(run(rb).code, 0);
    for (const char* f : {"errors.csv", "rates.csv", "comparison.csv"}) {
        std::ifstream fa(a / f), fb(b / f);
        std::stringstream sa, sb;
        sa << fa.rdbuf();
        sb << fb.rdbuf();
        EXPECT_EQ(sa.str(), sb.str()) << f;
    }
}

TEST(Cli, HomogeneousPasses) {
    auto dir = scratch("homog");
    auto r = run({"converge-homogeneous", "--set", "study.log2_fine=7", "--out", dir.string()});
    EXPECT_EQ(r.code, 0) << r.out << r.err;
    EXPECT_TRUE(fs::exists(dir / "rates.csv"));
}
