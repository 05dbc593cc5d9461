#include "lrac/error.hpp"
#include "lrac/kernel.hpp"

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace lrac;

TEST(Kernel, IndicatorNormalization) {
    auto w1 = build_weights(WeightKernel::indicator(), 1, 0.0);
    EXPECT_DOUBLE_EQ(w1.c, 1.0);
    auto w2 = build_weights(WeightKernel::indicator(), 2, 0.0);
    EXPECT_NEAR(w2.c, 1.6, 1e-15);
    EXPECT_NEAR(w2.diag, 2 * 2 * 1.6, 1e-14);
}

TEST(Kernel, ExponentialConstantMatchesHighPrecisionSum) {
    using mp = boost::multiprecision::cpp_dec_float_50;
    mp s = 0;
    for (int j = 1; j <= 4; ++j)
        s += boost::multiprecision::exp(mp(-j) / 4) * j * j;
    mp c = mp(64) / s;
    auto w = build_weights(WeightKernel::exponential(), 4, 0.0);
    EXPECT_NEAR(w.c, c.convert_to<double>(), 1e-14);
    // mpmath, 30 digits
    EXPECT_NEAR(w.c, 4.79677652228622536853016457041, 1e-14);
}

TEST(Kernel, FourthMoment) {
    EXPECT_NEAR(fourth_moment(build_weights(WeightKernel::indicator(), 1, 0.0)), 1.0, 1e-15);
    EXPECT_NEAR(fourth_moment(build_weights(WeightKernel::indicator(), 2, 0.0)), 3.4, 1e-14);
}

TEST(Kernel, FourthMomentGrowth) {
    // R = ceil(h^-zeta) so the fourth moment grows like R^2 ~ h^{-2 zeta}.
    const double zeta = 0.3;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int a = 4; a <= 10; ++a, ++n) {
        double h = std::ldexp(1.0, -a);
        auto w = build_weights(WeightKernel::indicator(), radius_for(h, zeta), zeta);
        double x = std::log(h), y = std::log(fourth_moment(w));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    EXPECT_NEAR(slope, -2 * zeta, 0.15);
}

TEST(Kernel, NormalizationInvariant) {
    for (auto k : {WeightKernel::indicator(), WeightKernel::exponential()})
        for (int R = 1; R <= 64; ++R)
            EXPECT_LT(std::abs(second_moment(build_weights(k, R, 0.0)) - 1.0), 1e-12);
}

TEST(Kernel, Radius) {
    EXPECT_EQ(radius_for(1.0 / 64, 0.4), 6);
    EXPECT_EQ(radius_for(1.0 / 4, 1e-12), 1);
    EXPECT_EQ(radius_for(1.0 / 4, 0.0), 1);
    EXPECT_EQ(radius_for(1.0 / 16, 0.49), 4);
    EXPECT_EQ(radius_for(64, 0.4), 6);
    EXPECT_EQ(radius_for(1.0 / 16, 0.5 - 1e-12), 4);
}

TEST(Kernel, RadiusErrors) {
    try {
        radius_for(4, 0.49);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::RadiusTooLarge);
    }
    EXPECT_THROW(radius_for(64, 0.5), Error);
    EXPECT_THROW(radius_for(64, -0.1), Error);
}

TEST(Kernel, ZeroSecondMoment) {
    auto zero = WeightKernel::tabulated({0.0, 1.0}, {0.0, 0.0});
    try {
        build_weights(zero, 3, 0.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ZeroSecondMoment);
    }
}

TEST(Kernel, TabulatedValidation) {
    EXPECT_THROW(WeightKernel::tabulated({0.0, 0.5}, {1.0, 1.0}), Error);
    EXPECT_THROW(WeightKernel::tabulated({0.0, 1.0}, {1.0, -1.0}), Error);
    EXPECT_THROW(WeightKernel::tabulated({1.0, 0.0}, {1.0, 1.0}), Error);
    auto k = WeightKernel::tabulated({0.0, 1.0}, {2.0, 0.0});
    EXPECT_DOUBLE_EQ(k(0.25), 1.5);
}

TEST(Kernel, LoadFromFile) {
    auto p = std::filesystem::temp_directory_path() / "lrac_kernel_test.txt";
    {
        std::ofstream f(p);
        f << "# x J\n0 1\n0.5, 0.5\n1 0.25\n";
    }
    auto k = WeightKernel::load(p);
    EXPECT_DOUBLE_EQ(k(0.75), 0.375);
    auto w = build_weights(k, 4, 0.0);
    EXPECT_NEAR(second_moment(w), 1.0, 1e-12);
    std::filesystem::remove(p);
    EXPECT_THROW(WeightKernel::load("/nonexistent/kernel.txt"), Error);
}
