#include "lrac/dynamics.hpp"
#include "lrac/error.hpp"
#include "lrac/operator.hpp"
#include "lrac/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace lrac;
constexpr double pi = std::numbers::pi;

namespace {
LongRangeOperator nn(int N, double gamma = 1.0) {
    return LongRangeOperator(build_weights(WeightKernel::indicator(), 1, 0.0), N, gamma);
}
} // namespace

TEST(Operator, ConstantInKernel) {
    auto op = make_operator(32, 0.4, 1.7, "exponential");
    std::vector<double> u(32, 3.25);
    for (double v : op.apply(u))
        EXPECT_NEAR(v, 0.0, 1e-9);
}

TEST(Operator, HandStencil) {
    auto op = nn(8);
    std::vector<double> e0(8, 0.0);
    e0[0] = 1.0;
    auto out = op.apply(e0);
    std::vector<double> want{-128, 64, 0, 0, 0, 0, 0, 64};
    for (int i = 0; i < 8; ++i)
        EXPECT_DOUBLE_EQ(out[static_cast<std::size_t>(i)], want[static_cast<std::size_t>(i)]);
}

TEST(Operator, SineEigenvalueExamples) {
    auto op = nn(4);
    EXPECT_EQ(op.eigenvalue_sine(0), 0.0);
    EXPECT_NEAR(op.eigenvalue_sine(4), 64.0, 1e-12);
    auto op6 = make_operator(64, 0.4, 1.0, "indicator");
    ASSERT_EQ(op6.R(), 6);
    double l3 = op6.eigenvalue_sine(3);
    EXPECT_GE(l3, 36.0);
    EXPECT_LE(l3, 9 * pi * pi);
    EXPECT_THROW(op.eigenvalue_sine(5), Error);
    EXPECT_THROW(op.eigenvalue_circulant(4), Error);
}

TEST(Operator, HalfAngleIdentity) {
    for (double zeta : {0.1, 0.25, 0.4})
        for (int N : {16, 64, 256}) {
            auto op = make_operator(N, zeta, 1.3, "exponential");
            EXPECT_EQ(op.eigenvalue_circulant(0), 0.0);
            for (int k = 1; k < N / 2; ++k)
                EXPECT_NEAR(op.eigenvalue_sine(2 * k), op.eigenvalue_circulant(k), 1e-12 * op.eigenvalue_circulant(k));
        }
}

TEST(Operator, EigenvectorsAgainstDenseMatrix) {
    for (double zeta : {0.1, 0.3, 0.45}) {
        auto op = make_operator(64, zeta, 1.0, "indicator");
        auto A = oracle::dense_circulant(op);
        for (int k : {1, 3, 10, 31}) {
            Eigen::VectorXd s(64), c(64);
            for (int m = 0; m < 64; ++m) {
                s[m] = std::sin(2 * pi * k * m / 64.0);
                c[m] = std::cos(2 * pi * k * m / 64.0);
            }
            double mu = op.eigenvalue_circulant(k);
            EXPECT_LT(((A * s) + mu * s).cwiseAbs().maxCoeff(), 1e-10 * std::max(1.0, mu));
            EXPECT_LT(((A * c) + mu * c).cwiseAbs().maxCoeff(), 1e-10 * std::max(1.0, mu));
            std::vector<double> cv(c.data(), c.data() + 64);
            auto Ac = op.apply(cv);
            for (int m = 0; m < 64; ++m)
                EXPECT_NEAR(Ac[static_cast<std::size_t>(m)], -mu * cv[static_cast<std::size_t>(m)], 1e-10 * std::max(1.0, mu));
        }
    }
}

TEST(Operator, DirectSpectralAndDenseAgree) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    for (int N : {8, 16, 32, 64}) {
        auto op = make_operator(N, 0.45, 0.7, "exponential");
        auto A = oracle::dense_circulant(op);
        for (int rep = 0; rep < 20; ++rep) {
            std::vector<double> u(static_cast<std::size_t>(N));
            for (auto& v : u)
                v = g(rng);
            auto a = op.apply(u), b = op.apply_spectral(u);
            Eigen::VectorXd d = A * Eigen::Map<Eigen::VectorXd>(u.data(), N);
            double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
            for (int i = 0; i < N; ++i) {
                EXPECT_LT(std::abs(a[static_cast<std::size_t>(i)] - d[i]), 1e-10 * scale);
                EXPECT_LT(std::abs(b[static_cast<std::size_t>(i)] - d[i]), 1e-10 * scale);
            }
        }
    }
}

TEST(Operator, Symmetric) {
    auto A = oracle::dense_circulant(make_operator(32, 0.4, 1.0, "exponential"));
    EXPECT_LT((A - A.transpose()).cwiseAbs().maxCoeff(), 1e-12 * A.cwiseAbs().maxCoeff());
}

TEST(Operator, SandwichOnLowModes) {
    // The lower bound 4 gamma k^2 relies on sin x >= 2x/pi, i.e. k R h <= 1.
    for (int N : {8, 16, 32, 64, 128, 256})
        for (double zeta : {0.1, 0.25, 0.4, 0.49})
            for (const char* k : {"indicator", "exponential"}) {
                auto op = make_operator(N, zeta, 1.0, k);
                for (int m = 1; m <= N; ++m) {
                    double l = op.eigenvalue_sine(m);
                    EXPECT_LE(l, pi * pi * m * m * (1 + 1e-10));
                    if (m * op.R() <= N)
                        EXPECT_GE(l, 4.0 * m * m * (1 - 1e-10));
                }
            }
}

TEST(Operator, NearestNeighbourGap) {
    auto op = nn(64, 2.0);
    for (int k : {0, 1, 2, 5}) {
        double h = 1.0 / 64;
        double want = 2.0 * pi * pi * k * k - 4 * 2.0 / (h * h) * std::pow(std::sin(pi * k * h / 2), 2);
        EXPECT_NEAR(op.eigenvalue_gap_to_continuum(k), want, 1e-9 * std::max(1.0, want));
    }
}

TEST(Operator, GapTaylorBound) {
    // gap <= (gamma/12) pi^4 k^4 h^2 M4 with M4 the fourth moment.
    for (double zeta : {0.1, 0.25, 0.4})
        for (int N : {64, 256, 1024}) {
            auto op = make_operator(N, zeta, 1.0, "indicator");
            double m4 = fourth_moment(op.weights());
            for (int k = 1; k <= 3; ++k) {
                double gap = op.eigenvalue_gap_to_continuum(k);
                EXPECT_GE(gap, 0.0);
                EXPECT_LE(gap, std::pow(pi, 4) * std::pow(k, 4) * m4 / (12.0 * N * N) * (1 + 1e-9));
            }
        }
}

TEST(Operator, GapEnvelopeForSmallKh) {
    auto op = make_operator(1024, 0.25, 1.0, "indicator");
    double h = 1.0 / 1024;
    EXPECT_LE(op.eigenvalue_gap_to_continuum(1), std::pow(pi, 4) / 12.0 * std::pow(h, 1.5) * 1.05);
}

TEST(Operator, InverseTraceByHand) {
    EXPECT_NEAR(nn(4).inverse_trace(), 11.0 / 64.0, 1e-15);
}

TEST(Operator, InverseTraceEnvelope) {
    auto op = make_operator(256, 0.3, 1.0, "indicator");
    // pi^2/24 plus a margin for the o(h^{1-2 zeta}) term
    EXPECT_LE(op.inverse_trace(), pi * pi / 24.0 + std::pow(1.0 / 256, 0.4));
}

TEST(Operator, Consistency) {
    auto op = make_operator(64, 0.25, 1.0, "indicator");
    EXPECT_EQ(consistency_error(op, [](double) { return 2.0; }, [](double) { return 0.0; }), 0.0);
    for (double zeta : {0.1, 0.25, 0.4})
        for (int N : {32, 128, 512}) {
            auto o = make_operator(N, zeta, 1.0, "exponential");
            auto f = [](double x) { return std::cos(2 * pi * x) + 0.5 * std::cos(4 * pi * x); };
            auto f2 = [](double x) {
                return -4 * pi * pi * std::cos(2 * pi * x) - 8 * pi * pi * std::cos(4 * pi * x);
            };
            double f4 = std::pow(2 * pi, 4) + 0.5 * std::pow(4 * pi, 4);
            double bound = fourth_moment(o.weights()) / 12.0 * f4 / (double(N) * N) * 1.1;
            EXPECT_LE(consistency_error(o, f, f2), bound);
        }
}

TEST(Operator, Validation) {
    auto w = build_weights(WeightKernel::indicator(), 3, 0.0);
    EXPECT_THROW(LongRangeOperator(w, 6, 1.0), Error);
    EXPECT_THROW(LongRangeOperator(w, 16, 0.0), Error);
    auto op = make_operator(16, 0.25, 1.0, "indicator");
    std::vector<double> u(15), out(16);
    EXPECT_THROW(op.apply(u, out), Error);
}
