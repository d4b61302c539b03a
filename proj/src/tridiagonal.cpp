#include "tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"

namespace nskr {

double Tridiagonal::dominance_margin(bool cyclic) const {
    const std::size_t n = size();
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = (i > 0 || cyclic) ? std::abs(a[i]) : 0.0;
        const double hi = (i + 1 < n || cyclic) ? std::abs(c[i]) : 0.0;
        margin = std::min(margin, std::abs(b[i]) - lo - hi);
    }
    return margin;
}

std::vector<double> solve_thomas(const Tridiagonal& m, std::span<const double> d) {
    const std::size_t n = m.size();
    if (d.size() != n || m.a.size() != n || m.c.size() != n)
        fail(ErrorCode::invalid_argument, "tridiagonal: size mismatch");
    std::vector<double> cp(n), x(n);
    double piv = m.b[0];
    if (piv == 0.0) fail(ErrorCode::numeric, "tridiagonal: zero pivot at row 0");
    cp[0] = m.c[0] / piv;
    x[0] = d[0] / piv;
    for (std::size_t i = 1; i < n; ++i) {
        piv = m.b[i] - m.a[i] * cp[i - 1];
        if (piv == 0.0)
            fail(ErrorCode::numeric, "tridiagonal: zero pivot at row " + std::to_string(i));
        cp[i] = m.c[i] / piv;
        x[i] = (d[i] - m.a[i] * x[i - 1]) / piv;
    }
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= cp[i] * x[i + 1];
    return x;
}

std::vector<double> solve_cyclic(const Tridiagonal& m, std::span<const double> d) {
    const std::size_t n = m.size();
    if (n < 3) fail(ErrorCode::invalid_argument, "cyclic tridiagonal needs n >= 3");
    const double alpha = m.c[n - 1];  // A[n-1][0]
    const double beta = m.a[0];       // A[0][n-1]
    const double gamma = -m.b[0];
    Tridiagonal t = m;
    t.b[0] -= gamma;
    t.b[n - 1] -= alpha * beta / gamma;
    std::vector<double> x = solve_thomas(t, d);
    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = alpha;
    const std::vector<double> z = solve_thomas(t, u);
    const double fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
    for (std::size_t i = 0; i < n; ++i) x[i] -= fact * z[i];
    return x;
}

}  // namespace nskr
