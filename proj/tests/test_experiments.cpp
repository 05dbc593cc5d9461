#include "lrac/error.hpp"
#include "lrac/experiments.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

using namespace lrac;

TEST(FitRate, ExactPowerLaw) {
    std::vector<double> hs = dyadic_hs(2, 6), e;
    for (double h : hs)
        e.push_back(3.0 * h * h);
    auto f = fit_rate(hs, e);
    EXPECT_NEAR(f.exponent, 2.0, 1e-12);
    EXPECT_NEAR(f.r2, 1.0, 1e-12);
    EXPECT_NEAR(std::exp(f.intercept), 3.0, 1e-10);
}

TEST(FitRate, TwoLevels) {
    EXPECT_NEAR(fit_rate({0.1, 0.05}, {0.1, 0.025}).exponent, 2.0, 1e-12);
}

TEST(FitRate, NoisySqrt) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> eps(-0.1, 0.1);
    auto hs = dyadic_hs(3, 10);
    std::vector<double> e;
    for (double h : hs)
        e.push_back(0.7 * std::sqrt(h) * (1 + eps(rng)));
    double a = fit_rate(hs, e).exponent;
    EXPECT_GE(a, 0.4);
    EXPECT_LE(a, 0.6);
}

TEST(FitRate, Errors) {
    try {
        fit_rate({0.1, 0.05}, {0.1, 0.0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonPositiveError);
    }
    EXPECT_THROW(fit_rate({0.1}, {0.1}), Error);
    EXPECT_THROW(fit_rate({0.05, 0.1}, {0.1, 0.2}), Error);
}

TEST(Bootstrap, DeterministicAndCoversPointEstimate) {
    std::mt19937_64 rng(5);
    std::lognormal_distribution<double> ln(0.0, 0.3);
    auto hs = dyadic_hs(4, 7);
    std::vector<std::vector<double>> table(60);
    for (auto& row : table)
        for (double h : hs)
            row.push_back(std::sqrt(h) * ln(rng));
    auto f1 = fit_rate(hs, lp_mean(table, 2.0)), f2 = f1;
    bootstrap_exponent(f1, table, 2.0, 500, 9);
    bootstrap_exponent(f2, table, 2.0, 500, 9);
    EXPECT_EQ(f1.ci_lo, f2.ci_lo);
    EXPECT_EQ(f1.ci_hi, f2.ci_hi);
    EXPECT_LE(f1.ci_lo, f1.exponent);
    EXPECT_GE(f1.ci_hi, f1.exponent);
    auto ci = bootstrap_mean_ci({1, 2, 3, 4, 5, 6, 7, 8}, 1000, 3);
    EXPECT_LT(ci.lo, 4.5);
    EXPECT_GT(ci.hi, 4.5);
}

TEST(Stats, MedianMeanLp) {
    EXPECT_EQ(median({3, 1, 2}), 2.0);
    EXPECT_EQ(median({4, 1, 2, 3}), 2.5);
    EXPECT_EQ(mean({1, 2, 3}), 2.0);
    auto lp = lp_mean({{1.0}, {3.0}}, 2.0);
    EXPECT_NEAR(lp[0], std::sqrt(5.0), 1e-15);
}

TEST(ParallelFor, CoversAllIndicesAndRethrows) {
    std::vector<int> hit(1000, 0);
    parallel_for(hit.size(), 4, [&](std::size_t i) { hit[i] += 1; });
    for (int v : hit)
        EXPECT_EQ(v, 1);
    EXPECT_THROW(parallel_for(10, 3,
                              [](std::size_t i) {
                                  if (i == 7)
                                      throw Error(ErrorCode::NonFinite, "x");
                              }),
                 Error);
}

TEST(Report, WritesArtifacts) {
    ExperimentReport r;
    r.claim = "unit";
    r.errors.push_back({"e", 0.5, 0, 0.1});
    r.add_rate("fit", fit_rate({0.1, 0.05}, {0.1, 0.025}));
    r.check("gate", true);
    r.check("info", false, "n/a", false);
    EXPECT_TRUE(r.passed());
    r.tables.emplace_back("extra.csv", std::vector<std::string>{"a,b", "1,2"});
    auto dir = std::filesystem::temp_directory_path() / "lrac_report_test";
    std::filesystem::remove_all(dir);
    r.write(dir);
    for (const char* f : {"report.json", "errors.csv", "rates.csv", "extra.csv"})
        EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
    std::ifstream in(dir / "errors.csv");
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    EXPECT_EQ(header, "label,h,replica,error");
    EXPECT_EQ(row, "e,0.5,0,0.10000000000000001");
    r.check("gate2", false);
    EXPECT_FALSE(r.passed());
    std::filesystem::remove_all(dir);
}

TEST(Studies, HomogeneousConvergence) {
    HomogeneousStudy s;
    s.hs = dyadic_hs(4, 7);
    auto rep = study_homogeneous_convergence(s);
    EXPECT_TRUE(rep.passed());
}

TEST(Studies, CoupledErrorsAreThreadIndependent) {
    CoupledStudy s;
    s.ns = {16, 32};
    s.n_ref = 64;
    s.T = 1.0 / 16;
    s.dt = 1.0 / 16384;
    s.frame_dt = 1.0 / 128;
    s.replicas = 6;
    s.common.threads = 1;
    auto a = coupled_sup_errors(s);
    s.common.threads = 3;
    auto b = coupled_sup_errors(s);
    EXPECT_EQ(a, b);
    for (const auto& row : a)
        for (double v : row)
            EXPECT_GT(v, 0.0);
}

TEST(Studies, TransitionDegenerateImmediateHit) {
    TransitionStudy s;
    s.ns = {16, 32, 64};
    s.rho = 3.0;
    s.T = 0.1;
    s.replicas = 8;
    s.bootstrap = 50;
    auto rep = study_transition_times(s);
    for (const auto& e : rep.errors)
        EXPECT_EQ(e.error, 0.0);
}

TEST(Studies, TransitionTooFewHits) {
    TransitionStudy s;
    s.ns = {16, 32, 64};
    s.sigma = 1e-4;
    s.T = 0.5;
    s.replicas = 4;
    s.bootstrap = 10;
    try {
        study_transition_times(s);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InsufficientTransitions);
    }
}
