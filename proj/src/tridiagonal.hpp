#pragma once

#include <span>
#include <vector>

namespace nskr {

// a: sub-diagonal, b: diagonal, c: super-diagonal, d: right-hand side; all of
// length n. a[0] and c[n-1] are ignored by the open solver and are the corner
// couplings for the cyclic one.
struct Tridiagonal {
    std::vector<double> a, b, c;

    std::size_t size() const { return b.size(); }
    /// min_i (|b_i| - |a_i| - |c_i|); positive means strictly diagonally dominant.
    double dominance_margin(bool cyclic) const;
};

/// Thomas algorithm. Throws numeric error on a zero pivot.
std::vector<double> solve_thomas(const Tridiagonal& m, std::span<const double> d);

/// Periodic system (corners a[0], c[n-1]) by Sherman-Morrison on top of Thomas.
std::vector<double> solve_cyclic(const Tridiagonal& m, std::span<const double> d);

}  // namespace nskr
