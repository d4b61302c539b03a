#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace nskr {

enum class BcMode { periodic, wall };

// How a field is continued across a wall: `even` mirrors (zero Neumann),
// `odd` mirrors with a sign flip (zero Dirichlet on the wall face), `none`
// falls back to one-sided closures. Ignored in periodic mode.
enum class Parity { none, even, odd };

struct Grid1D {
    double length = 1.0;
    std::size_t n_cells = 64;
    BcMode bc = BcMode::periodic;

    static Grid1D make(double length, std::size_t n_cells, BcMode bc);

    double dx() const { return length / static_cast<double>(n_cells); }
    /// Cell centre.
    double x(std::size_t i) const { return (static_cast<double>(i) + 0.5) * dx(); }
    bool periodic() const { return bc == BcMode::periodic; }
    /// Same domain and boundary mode with n_cells scaled by `factor`.
    Grid1D refined(std::size_t factor) const;
};

using Field = std::vector<double>;

BcMode parse_bc(const std::string& s);
std::string to_string(BcMode bc);

Field sample(const Grid1D& g, const std::function<double(double)>& f);

/// Second-order central difference.
Field ddx(const Grid1D& g, std::span<const double> f, Parity parity = Parity::none);
/// Three-point Laplacian.
Field laplacian(const Grid1D& g, std::span<const double> f, Parity parity = Parity::none);
/// ddx applied to laplacian, both with the same continuation.
Field grad_laplacian(const Grid1D& g, std::span<const double> f, Parity parity = Parity::none);

/// Midpoint rule dx * sum f.
double integrate(const Grid1D& g, std::span<const double> f);
double mean(const Grid1D& g, std::span<const double> f);

// Face gradients (f_{i+1} - f_i)/dx. Periodic: n faces. Wall: the n-1 interior
// faces, plus the two wall faces (with half weight) for odd fields. The face
// quadrature makes sum_i f_i lap(f)_i dx = -integrate_faces(grad f ^ 2) exact.
Field face_gradient(const Grid1D& g, std::span<const double> f, Parity parity);
double integrate_faces(const Grid1D& g, std::span<const double> v, Parity parity);
/// int |f_x|^2 on faces.
double grad_norm_sq(const Grid1D& g, std::span<const double> f, Parity parity);

double l2_norm_sq(const Grid1D& g, std::span<const double> f);
/// ||f||^2 + ||f_x||^2
double h1_norm_sq(const Grid1D& g, std::span<const double> f, Parity parity);

/// 2:1 cell averaging from a grid with 2n cells to one with n.
Field restrict_half(std::span<const double> fine);
Field restrict_by(std::span<const double> fine, std::size_t factor);

/// Throws divergence error naming `what` if any entry is NaN/Inf.
void require_finite(std::span<const double> f, const std::string& what);

/// a - b elementwise.
Field difference(std::span<const double> a, std::span<const double> b);

}  // namespace nskr
