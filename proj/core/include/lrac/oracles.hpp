#pragma once

// Brute-force reference computations used to cross-check the fast paths.

#include "lrac/operator.hpp"

#include <Eigen/Dense>

#include <functional>

namespace lrac::oracle {

// gamma A^h_R as a dense N x N matrix, built entry by entry from the stencil.
Eigen::MatrixXd dense_circulant(const LongRangeOperator& op);

// Same stencil on a ring of n nodes with the scale of op (used for the odd reflection).
Eigen::MatrixXd dense_ring(const LongRangeOperator& op, int n);

// Matrix exponential (Pade scaling and squaring).
Eigen::MatrixXd expm(const Eigen::MatrixXd& m);

// g_t^h(x_m, x_n) for m, n = 0..N from the 2N-ring exponential applied to odd deltas
// (e_n - e_{2N-n}) / h. Boundary rows and columns are zero.
Eigen::MatrixXd reflected_kernel_nodes(const LongRangeOperator& op, double t);

// Bilinear interpolation of a nodal matrix on [0,1]^2 with spacing 1/(rows-1).
double bilinear(const Eigen::MatrixXd& nodes, double x, double y);

// Romberg-extrapolated trapezoid integral over [0,1] of the square of the piecewise-linear
// function with the given nodal values.
double square_integral_1d(const Eigen::VectorXd& nodes);
// Same over [0,1]^2 for a bilinear nodal field.
double square_integral_2d(const Eigen::MatrixXd& nodes);

// Composite Gauss-Legendre integral of f over [0, t] on geometrically graded panels.
double graded_time_integral(const std::function<double(double)>& f, double t, int panels = 40);

} // namespace lrac::oracle
