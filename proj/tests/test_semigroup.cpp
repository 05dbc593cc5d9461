#include "lrac/dynamics.hpp"
#include "lrac/error.hpp"
#include "lrac/oracles.hpp"
#include "lrac/semigroup.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace lrac;
constexpr double pi = std::numbers::pi;

TEST(Semigroup, Symmetry) {
    DiscreteSemigroup g(make_operator(32, 0.25, 1.0, "indicator"));
    for (double x : {0.1, 0.37, 0.5})
        for (double y : {0.2, 0.61, 0.93})
            EXPECT_NEAR(g.eval(0.05, x, y), g.eval(0.05, y, x), 1e-12);
}

TEST(Semigroup, DecaysAtLargeTimes) {
    DiscreteSemigroup g(make_operator(32, 0.25, 1.0, "indicator"));
    EXPECT_LT(std::abs(g.eval(5.0, 0.5, 0.5)), 1e-12);
}

TEST(Semigroup, MatchesMatrixExponentialNearestNeighbour) {
    auto op = LongRangeOperator(build_weights(WeightKernel::indicator(), 1, 0.0), 8, 1.0);
    DiscreteSemigroup g(op);
    auto G = oracle::reflected_kernel_nodes(op, 0.1);
    EXPECT_NEAR(g.eval(0.1, 0.5, 0.5), G(4, 4), 1e-8);
}

TEST(Semigroup, MatchesMatrixExponentialOffNode) {
    for (double zeta : {0.1, 0.25, 0.4}) {
        auto op = make_operator(32, zeta, 1.0, "exponential");
        DiscreteSemigroup g(op);
        auto G = oracle::reflected_kernel_nodes(op, 0.02);
        for (double x : {0.0, 0.3, 0.515625, 1.0})
            for (double y : {0.125, 0.71})
                EXPECT_NEAR(g.eval(0.02, x, y), oracle::bilinear(G, x, y), 1e-8);
    }
}

TEST(Semigroup, ChapmanKolmogorov) {
    for (int N : {8, 16, 32}) {
        auto op = make_operator(N, 0.3, 1.0, "indicator");
        Eigen::MatrixXd A = oracle::dense_circulant(op);
        CirculantPropagator P(op);
        std::mt19937_64 rng(N);
        std::normal_distribution<double> nd;
        std::vector<double> u(static_cast<std::size_t>(N));
        for (auto& v : u)
            v = nd(rng);
        double s = 0.003, t = 0.011;
        auto st = P.propagate(P.propagate(u, s), t);
        auto direct = P.propagate(u, s + t);
        Eigen::VectorXd viaexp = oracle::expm(A * (s + t)) * Eigen::Map<Eigen::VectorXd>(u.data(), N);
        for (int i = 0; i < N; ++i) {
            EXPECT_NEAR(st[static_cast<std::size_t>(i)], direct[static_cast<std::size_t>(i)], 1e-8);
            EXPECT_NEAR(direct[static_cast<std::size_t>(i)], viaexp[i], 1e-8);
        }
    }
}

TEST(Semigroup, ReflectedChapmanKolmogorov) {
    // g_{s+t}(x_m, x_n) = h sum_l g_s(x_m, x_l) g_t(x_l, x_n) on nodes.
    auto op = make_operator(16, 0.25, 1.0, "indicator");
    DiscreteSemigroup g(op);
    const int N = 16;
    double s = 0.01, t = 0.02;
    for (int m : {3, 8})
        for (int n : {5, 12}) {
            double acc = 0.0;
            for (int l = 1; l < N; ++l)
                acc += g.eval(s, m / 16.0, l / 16.0) * g.eval(t, l / 16.0, n / 16.0) / N;
            EXPECT_NEAR(acc, g.eval(s + t, m / 16.0, n / 16.0), 1e-8);
        }
}

TEST(Semigroup, ContinuousKernel) {
    ContinuousHeatKernel g(1.0, 1e-3);
    EXPECT_LT(g.tail_bound(), 1e-12);
    double want = 0.0;
    for (int k = 1; k <= 200; ++k)
        want += 2 * std::exp(-pi * pi * k * k * 0.01) * std::sin(pi * k * 0.3) * std::sin(pi * k * 0.4);
    EXPECT_NEAR(g.eval(0.01, 0.3, 0.4), want, 1e-12);
    EXPECT_THROW(g.eval(1e-4, 0.5, 0.5), Error);
}

TEST(Semigroup, IncrementsVanishOnDiagonal) {
    DiscreteSemigroup g(make_operator(32, 0.25, 1.0, "indicator"));
    EXPECT_EQ(g.space_increment(0.3, 0.4, 0.4), 0.0);
    EXPECT_EQ(g.time_increment(0.3, 0.3, 0.4), 0.0);
}

TEST(Semigroup, IncrementExponents) {
    DiscreteSemigroup g(make_operator(256, 0.1, 1.0, "indicator"));
    auto slope = [](const std::vector<double>& xs, const std::vector<double>& ys) {
        double n = static_cast<double>(xs.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            double x = std::log(xs[i]), y = std::log(ys[i]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };
    std::vector<double> dx, sv, dt, tv;
    for (int j : {8, 16, 32}) {
        dx.push_back(j / 256.0);
        sv.push_back(g.space_increment(0.5, 0.4, 0.4 + j / 256.0));
    }
    for (double tau : {4e-3, 1.6e-2, 6.4e-2}) {
        dt.push_back(tau);
        tv.push_back(g.time_increment(0.5, 0.5 + tau, 0.5));
    }
    EXPECT_GE(slope(dx, sv), 0.85);
    EXPECT_GE(slope(dt, tv), 0.4);
}

TEST(Semigroup, L2Envelopes) {
    DiscreteSemigroup g(make_operator(32, 0.25, 1.0, "indicator"));
    for (double t : {0.05, 0.2, 1.0})
        for (int m = 0; m <= 32; ++m) {
            auto f = g.l2_functionals(t, m / 32.0);
            EXPECT_LE(f.space_int, DiscreteSemigroup::space_envelope(1.0, t));
            EXPECT_LE(f.space_time, DiscreteSemigroup::time_envelope(1.0, t));
        }
    double prev = 0.0;
    for (double t : {0.1, 1.0, 10.0, 100.0}) {
        double v = g.l2_functionals(t, 0.5).full_time;
        EXPECT_GE(v, prev);
        prev = v;
    }
    EXPECT_NEAR(g.l2_functionals(200.0, 0.5).full_time, prev, 1e-12);
}

TEST(Semigroup, L2ClosedFormAgainstQuadrature) {
    auto op = make_operator(32, 0.25, 1.0, "indicator");
    DiscreteSemigroup g(op);
    auto G = oracle::reflected_kernel_nodes(op, 0.2);
    double full = oracle::square_integral_2d(G);
    EXPECT_NEAR(g.l2_functionals(0.2, 0.5).full_int, full, 1e-3 * full);
    Eigen::VectorXd row = G.row(16).transpose();
    double sp = oracle::square_integral_1d(row);
    EXPECT_NEAR(g.l2_functionals(0.2, 0.5).space_int, sp, 1e-3 * sp);
}

TEST(Semigroup, KernelDistanceShrinks) {
    ContinuousHeatKernel g(1.0, 0.1);
    std::vector<double> ts{0.1};
    auto grid = kernel_grid(ts, 21);
    double prev = 1e300;
    for (int N : {16, 32, 64, 128}) {
        double d = kernel_distance(DiscreteSemigroup(make_operator(N, 0.25, 1.0, "indicator")), g, grid);
        EXPECT_LT(d, prev);
        prev = d;
    }
}
