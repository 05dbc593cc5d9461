#include "lrac/oracles.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

namespace lrac::oracle {

Eigen::MatrixXd dense_ring(const LongRangeOperator& op, int n) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    const auto& w = op.weights();
    for (int i = 0; i < n; ++i) {
        for (int j = 1; j <= w.R; ++j) {
            double c = op.scale() * w[j];
            m(i, (i + j) % n) += c;
            m(i, ((i - j) % n + n) % n) += c;
        }
        m(i, i) -= op.scale() * w.diag;
    }
    return m;
}

Eigen::MatrixXd dense_circulant(const LongRangeOperator& op) { return dense_ring(op, op.N()); }

Eigen::MatrixXd expm(const Eigen::MatrixXd& m) { return m.exp(); }

Eigen::MatrixXd reflected_kernel_nodes(const LongRangeOperator& op, double t) {
    const int N = op.N();
    Eigen::MatrixXd E = expm(t * dense_ring(op, 2 * N));
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(N + 1, N + 1);
    for (int n = 1; n < N; ++n) {
        Eigen::VectorXd col = (E.col(n) - E.col(2 * N - n)) * N;
        for (int m = 1; m < N; ++m)
            G(m, n) = col(m);
    }
    return G;
}

double bilinear(const Eigen::MatrixXd& nodes, double x, double y) {
    const int n = static_cast<int>(nodes.rows()) - 1;
    double sx = std::clamp(x, 0.0, 1.0) * n, sy = std::clamp(y, 0.0, 1.0) * n;
    int i = std::min(static_cast<int>(sx), n - 1), j = std::min(static_cast<int>(sy), n - 1);
    double fx = sx - i, fy = sy - j;
    return (1 - fx) * (1 - fy) * nodes(i, j) + fx * (1 - fy) * nodes(i + 1, j) + (1 - fx) * fy * nodes(i, j + 1) +
           fx * fy * nodes(i + 1, j + 1);
}

namespace {
double trapezoid_1d(const Eigen::VectorXd& v, int sub) {
    const int n = static_cast<int>(v.size()) - 1;
    const int pts = n * sub;
    double s = 0.0;
    for (int p = 0; p <= pts; ++p) {
        int i = std::min(p / sub, n - 1);
        double f = static_cast<double>(p - i * sub) / sub;
        double g = v(i) + f * (v(i + 1) - v(i));
        s += (p == 0 || p == pts ? 0.5 : 1.0) * g * g;
    }
    return s / pts;
}

double trapezoid_2d(const Eigen::MatrixXd& m, int sub) {
    const int n = static_cast<int>(m.rows()) - 1;
    const int pts = n * sub;
    double s = 0.0;
    for (int p = 0; p <= pts; ++p) {
        double wp = (p == 0 || p == pts) ? 0.5 : 1.0;
        for (int q = 0; q <= pts; ++q) {
            double wq = (q == 0 || q == pts) ? 0.5 : 1.0;
            double g = bilinear(m, static_cast<double>(p) / pts, static_cast<double>(q) / pts);
            s += wp * wq * g * g;
        }
    }
    return s / (static_cast<double>(pts) * pts);
}

// Romberg table over sub-sampling 1, 2, 4.
template <typename F>
double romberg3(F trap) {
    double t1 = trap(1), t2 = trap(2), t4 = trap(4);
    double r1 = (4 * t2 - t1) / 3, r2 = (4 * t4 - t2) / 3;
    return (16 * r2 - r1) / 15;
}
} // namespace

double square_integral_1d(const Eigen::VectorXd& nodes) {
    return romberg3([&](int s) { return trapezoid_1d(nodes, s); });
}

double square_integral_2d(const Eigen::MatrixXd& nodes) {
    return romberg3([&](int s) { return trapezoid_2d(nodes, s); });
}

double graded_time_integral(const std::function<double(double)>& f, double t, int panels) {
    using G = boost::math::quadrature::gauss<double, 15>;
    double s = 0.0;
    double hi = t;
    for (int p = 0; p < panels; ++p) {
        double lo = hi * 0.5;
        s += G::integrate(f, lo, hi);
        hi = lo;
    }
    // Remaining sliver [0, hi]: integrand is bounded there.
    return s + hi * f(hi);
}

} // namespace lrac::oracle
