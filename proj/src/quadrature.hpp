#pragma once

#include <functional>

namespace nskr {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int intervals = 0;
};

/// Adaptive Gauss-Legendre quadrature of f over [a, b] (a > b allowed, sign
/// follows orientation). Each panel compares a 10-point rule on the panel with
/// the sum over its two halves and bisects until the local error meets its
/// share of `abs_tol`. Throws ErrorCode::numeric, naming the offending
/// sub-interval, when the recursion depth is exhausted.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a,
                                    double b, double abs_tol = 1e-10, int max_depth = 60);

}  // namespace nskr
