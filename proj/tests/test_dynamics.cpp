#include "lrac/dynamics.hpp"
#include "lrac/error.hpp"
#include "lrac/noise.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

using namespace lrac;
constexpr double pi = std::numbers::pi;

TEST(Drift, TruncationAndOrdering) {
    EXPECT_THROW(DriftSpec::truncated(1.1), Error);
    auto full = DriftSpec::full();
    auto tr = DriftSpec::truncated(1.5), lo = DriftSpec::lower(1.5), up = DriftSpec::upper(1.5);
    for (double u = -4; u <= 4; u += 0.01) {
        if (std::abs(u) < 1.5)
            EXPECT_EQ(tr(u), full(u));
        // u^- is pushed down harder than the truncated drift, u^+ less.
        EXPECT_GE(lo(u), tr(u) - 1e-15);
        EXPECT_LE(up(u), tr(u) + 1e-15);
    }
    EXPECT_EQ(DriftSpec::none()(3.0), 0.0);
}

TEST(Stepper, FixedPoints) {
    auto op = make_operator(32, 0.25, 1.0, "indicator");
    for (auto kind : {Integrator::Explicit, Integrator::SemiImplicit}) {
        Stepper s(op, DriftSpec::full(), 1e-6, 0.0, kind);
        std::vector<double> u(32, 1.0), v(32, -1.0);
        for (int k = 0; k < 10; ++k) {
            s.step(u, {});
            s.step(v, {});
        }
        for (int i = 0; i < 32; ++i) {
            EXPECT_NEAR(u[static_cast<std::size_t>(i)], 1.0, 1e-14);
            EXPECT_NEAR(v[static_cast<std::size_t>(i)], -1.0, 1e-14);
        }
    }
}

TEST(Stepper, HandEvaluatedDrift) {
    auto op = make_operator(16, 0.25, 1.0, "indicator");
    const double dt = 1e-3;
    ExplicitStepper s(op, DriftSpec::full(), dt, 0.0);
    std::vector<double> u(16, 0.5);
    s.step(u, {});
    for (double v : u)
        EXPECT_NEAR(v, 0.5 + 0.375 * dt, 1e-15);
}

TEST(Stepper, ModeMultipliers) {
    const int N = 32;
    auto op = make_operator(N, 0.25, 1.0, "indicator");
    const double dt = 2e-6;
    for (int k : {1, 4}) {
        std::vector<double> u(N), w(N);
        for (int m = 0; m < N; ++m)
            u[static_cast<std::size_t>(m)] = w[static_cast<std::size_t>(m)] = std::cos(2 * pi * k * m / N);
        ExplicitStepper e(op, DriftSpec::none(), dt, 0.0);
        SemiImplicitStepper si(op, DriftSpec::none(), dt, 0.0);
        e.step(u, {});
        si.step(w, {});
        double mu = op.eigenvalue_circulant(k);
        for (int m = 0; m < N; ++m) {
            double c = std::cos(2 * pi * k * m / N);
            EXPECT_NEAR(u[static_cast<std::size_t>(m)], (1 - dt * mu) * c, 1e-12);
            EXPECT_NEAR(w[static_cast<std::size_t>(m)], c / (1 + dt * mu), 1e-12);
        }
    }
}

TEST(Stepper, ExplicitStabilityGuard) {
    auto op = make_operator(64, 0.25, 1.0, "indicator");
    double limit = 2.0 / op.max_circulant_eigenvalue();
    try {
        ExplicitStepper(op, DriftSpec::full(), 1.01 * limit, 0.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnstableStep);
    }
    EXPECT_NO_THROW(SemiImplicitStepper(op, DriftSpec::full(), 10 * limit, 0.0));
}

TEST(Stepper, ExplicitAndSemiImplicitAgreeToSecondOrder) {
    // One step differs by dt^2 mu^2 u per mode plus a drift cross term.
    const int N = 16;
    auto op = make_operator(N, 0.25, 1.0, "indicator");
    std::vector<double> u0(N);
    for (int m = 0; m < N; ++m) {
        double x = double(m) / N;
        u0[static_cast<std::size_t>(m)] = 0.8 * std::sin(2 * pi * x) + 0.3 * std::cos(4 * pi * x);
    }
    double mu2 = op.eigenvalue_circulant(2);
    auto diff = [&](double dt) {
        auto u = u0, w = u0;
        ExplicitStepper(op, DriftSpec::full(), dt, 0.0).step(u, {});
        SemiImplicitStepper(op, DriftSpec::full(), dt, 0.0).step(w, {});
        double d = 0;
        for (int m = 0; m < N; ++m)
            d = std::max(d, std::abs(u[static_cast<std::size_t>(m)] - w[static_cast<std::size_t>(m)]));
        return d;
    };
    double d1 = diff(1e-4), d2 = diff(5e-5);
    EXPECT_LE(d1, 1e-8 * mu2 * mu2 * 1.1 * 1.1 + 1e-8);
    EXPECT_NEAR(d1 / d2, 4.0, 0.1);
}

TEST(Stepper, NonFinite) {
    auto op = make_operator(16, 0.25, 1.0, "indicator");
    SemiImplicitStepper s(op, DriftSpec::full(), 1e-3, 0.0);
    std::vector<double> u(16, 0.0);
    u[3] = std::nan("");
    try {
        s.step(u, {});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonFinite);
    }
}

TEST(Simulate, EquilibriumStaysPut) {
    SimulationConfig c;
    c.N = 32;
    c.sigma = 0.0;
    c.T = 0.1;
    c.dt = 1e-3;
    c.record_every = 10;
    c.u0 = [](double) { return -1.0; };
    auto tr = simulate(c, NoisePlan(1, 32, 1e-3));
    ASSERT_EQ(tr.times.size(), 11u);
    for (const auto& s : tr.states)
        for (double v : s)
            EXPECT_NEAR(v, -1.0, 1e-13);
}

TEST(Simulate, HeatDecay) {
    SimulationConfig c;
    c.N = 64;
    c.sigma = 0.0;
    c.T = 0.01;
    c.dt = 1e-4;
    c.record_every = 100;
    c.drift = DriftSpec::none();
    c.u0 = [](double x) { return std::sin(2 * pi * x); };
    auto tr = simulate(c, NoisePlan(1, 64, 1e-4));
    auto op = make_operator(64, 0.25, 1.0, "indicator");
    double sup0 = 0, sup1 = 0;
    for (double v : tr.states.front())
        sup0 = std::max(sup0, std::abs(v));
    for (double v : tr.states.back())
        sup1 = std::max(sup1, std::abs(v));
    double want = std::exp(-op.eigenvalue_circulant(1) * c.T);
    EXPECT_NEAR(sup1 / sup0, want, 0.01 * want);
}

TEST(Simulate, TruncatedMatchesFullInsideZ) {
    SimulationConfig a;
    a.N = 32;
    a.sigma = 0.05;
    a.T = 1.0;
    a.dt = 1e-3;
    a.record_every = 1;
    a.u0 = [](double) { return -1.0; };
    auto b = a;
    b.drift = DriftSpec::truncated(2.0);
    NoisePlan plan(77, 32, 1e-3);
    auto ta = simulate(a, plan), tb = simulate(b, plan);
    for (std::size_t f = 0; f < ta.states.size(); ++f) {
        double sup = 0;
        for (double v : ta.states[f])
            sup = std::max(sup, std::abs(v));
        if (sup >= 2.0)
            break;
        for (std::size_t i = 0; i < ta.states[f].size(); ++i)
            EXPECT_EQ(ta.states[f][i], tb.states[f][i]);
    }
}

TEST(Simulate, SameSeedSameTrajectory) {
    SimulationConfig c;
    c.N = 16;
    c.T = 0.05;
    c.dt = 1e-3;
    c.record_every = 5;
    auto a = simulate(c, NoisePlan(3, 16, 1e-3)), b = simulate(c, NoisePlan(3, 16, 1e-3));
    EXPECT_EQ(a.states, b.states);
    EXPECT_THROW(
        [&] {
            auto d = c;
            d.dt = 3e-3;
            simulate(d, NoisePlan(3, 16, 3e-3));
        }(),
        Error);
}

TEST(Trajectory, BinaryRoundTrip) {
    SimulationConfig c;
    c.N = 8;
    c.T = 0.02;
    c.dt = 1e-3;
    c.record_every = 4;
    auto t = simulate(c, NoisePlan(9, 8, 1e-3));
    auto p = std::filesystem::temp_directory_path() / "lrac_traj_test.bin";
    t.write_binary(p);
    auto r = Trajectory::read_binary(p);
    EXPECT_EQ(r.N, t.N);
    EXPECT_EQ(r.times, t.times);
    EXPECT_EQ(r.states, t.states);
    std::filesystem::remove(p);
}

TEST(Distance, ExactNorms) {
    std::vector<double> a{0, 0, 0, 0}, b{1, 1, 1, 1}, c{1, -1, 1, -1};
    EXPECT_NEAR(lq_distance(a, b, 1), 1.0, 1e-14);
    EXPECT_NEAR(lq_distance(a, b, 2), 1.0, 1e-14);
    EXPECT_NEAR(lq_distance(a, b, 3), 1.0, 1e-12);
    EXPECT_NEAR(lq_distance(a, c, std::numeric_limits<double>::infinity()), 1.0, 0);
    // zig-zag between +-1: |f| is a tent of height 1, int |f| = 1/2, int f^2 = 1/3
    EXPECT_NEAR(lq_distance(a, c, 1), 0.5, 1e-14);
    EXPECT_NEAR(lq_distance(a, c, 2), std::sqrt(1.0 / 3), 1e-14);
    EXPECT_NEAR(lq_distance(a, c, 4), std::pow(0.2, 0.25), 1e-12);
}

TEST(Hitting, Examples) {
    Trajectory t;
    t.N = 4;
    t.times = {0.0, 0.5, 1.0};
    t.states = {{0.9, 0.9, 0.9, 0.9}, {1, 1, 1, 1}, {1, 1, 1, 1}};
    HittingSpec s{std::vector<double>(4, 1.0), 0.4, 2.0};
    EXPECT_EQ(hitting_time(t, s), 0.0);

    SimulationConfig c;
    c.N = 16;
    c.sigma = 0.0;
    c.T = 1.0;
    c.dt = 1e-2;
    c.record_every = 1;
    c.u0 = [](double) { return -1.0; };
    auto tr = simulate(c, NoisePlan(1, 16, 1e-2));
    EXPECT_FALSE(hitting_time(tr, HittingSpec{std::vector<double>(16, 1.0), 0.5, 2.0}).has_value());
}

TEST(Hitting, MonotoneInRho) {
    SimulationConfig c;
    c.N = 16;
    c.sigma = 0.3;
    c.T = 5.0;
    c.dt = 1e-3;
    c.record_every = 10;
    c.u0 = [](double) { return -1.0; };
    for (std::uint32_t r = 0; r < 5; ++r) {
        auto tr = simulate(c, NoisePlan(42, 16, 1e-3, r));
        double prev = -1.0;
        for (double rho : {1.5, 1.0, 0.7, 0.5}) {
            auto tau = hitting_time(tr, HittingSpec{std::vector<double>(16, 1.0), rho, 2.0});
            double v = tau.value_or(1e300);
            EXPECT_GE(v, prev);
            prev = v;
        }
    }
}

TEST(Hitting, Validation) {
    EXPECT_THROW(HittingSpec({std::vector<double>(4, 1.0), -0.1, 2.0}).validate(4), Error);
    EXPECT_THROW(HittingSpec({std::vector<double>(3, 1.0), 0.4, 2.0}).validate(4), Error);
    EXPECT_THROW(HittingSpec({std::vector<double>(4, 1.0), 0.4, 0.5}).validate(4), Error);
}
