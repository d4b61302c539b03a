#include "grid.hpp"

#include <cmath>

#include "error.hpp"

namespace nskr {
namespace {

// Value at index i in [-2, n+1] with the boundary continuation applied.
// Only valid for wall mode with even/odd parity, or periodic mode.
double at(const Grid1D& g, std::span<const double> f, long i, Parity p) {
    const long n = static_cast<long>(f.size());
    if (i >= 0 && i < n) return f[i];
    if (g.periodic()) return f[((i % n) + n) % n];
    const double sign = p == Parity::odd ? -1.0 : 1.0;
    if (i < 0) return sign * f[-1 - i];
    return sign * f[2 * n - 1 - i];
}

bool one_sided(const Grid1D& g, Parity p) { return !g.periodic() && p == Parity::none; }

}  // namespace

Grid1D Grid1D::make(double length, std::size_t n_cells, BcMode bc) {
    if (n_cells < 8) fail(ErrorCode::invalid_argument, "grid needs at least 8 cells");
    if (!(length > 0.0)) fail(ErrorCode::invalid_argument, "grid length must be positive");
    return Grid1D{length, n_cells, bc};
}

Grid1D Grid1D::refined(std::size_t factor) const {
    return Grid1D{length, n_cells * factor, bc};
}

BcMode parse_bc(const std::string& s) {
    if (s == "periodic") return BcMode::periodic;
    if (s == "wall") return BcMode::wall;
    fail(ErrorCode::config, "unknown boundary mode '" + s + "' (periodic|wall)");
}

std::string to_string(BcMode bc) { return bc == BcMode::periodic ? "periodic" : "wall"; }

Field sample(const Grid1D& g, const std::function<double(double)>& f) {
    Field out(g.n_cells);
    for (std::size_t i = 0; i < g.n_cells; ++i) out[i] = f(g.x(i));
    return out;
}

Field ddx(const Grid1D& g, std::span<const double> f, Parity parity) {
    const long n = static_cast<long>(f.size());
    const double inv = 1.0 / (2.0 * g.dx());
    Field out(f.size());
    for (long i = 0; i < n; ++i) {
        if (one_sided(g, parity) && i == 0) {
            out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv;
        } else if (one_sided(g, parity) && i == n - 1) {
            out[i] = (3.0 * f[i] - 4.0 * f[i - 1] + f[i - 2]) * inv;
        } else {
            out[i] = (at(g, f, i + 1, parity) - at(g, f, i - 1, parity)) * inv;
        }
    }
    return out;
}

Field laplacian(const Grid1D& g, std::span<const double> f, Parity parity) {
    const long n = static_cast<long>(f.size());
    const double inv = 1.0 / (g.dx() * g.dx());
    Field out(f.size());
    for (long i = 0; i < n; ++i) {
        if (one_sided(g, parity) && i == 0) {
            out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) * inv;
        } else if (one_sided(g, parity) && i == n - 1) {
            out[i] = (2.0 * f[i] - 5.0 * f[i - 1] + 4.0 * f[i - 2] - f[i - 3]) * inv;
        } else {
            out[i] = (at(g, f, i + 1, parity) - 2.0 * f[i] + at(g, f, i - 1, parity)) * inv;
        }
    }
    return out;
}

Field grad_laplacian(const Grid1D& g, std::span<const double> f, Parity parity) {
    const Field lap = laplacian(g, f, parity);
    return ddx(g, lap, parity);
}

double integrate(const Grid1D& g, std::span<const double> f) {
    double s = 0.0;
    for (double v : f) s += v;
    return s * g.dx();
}

double mean(const Grid1D& g, std::span<const double> f) { return integrate(g, f) / g.length; }

Field face_gradient(const Grid1D& g, std::span<const double> f, Parity parity) {
    const long n = static_cast<long>(f.size());
    const double inv = 1.0 / g.dx();
    Field out;
    if (g.periodic()) {
        out.resize(n);
        for (long i = 0; i < n; ++i) out[i] = (f[(i + 1) % n] - f[i]) * inv;
        return out;
    }
    if (parity == Parity::odd) {
        out.reserve(n + 1);
        out.push_back(2.0 * f[0] * inv);
        for (long i = 0; i + 1 < n; ++i) out.push_back((f[i + 1] - f[i]) * inv);
        out.push_back(-2.0 * f[n - 1] * inv);
        return out;
    }
    out.resize(n - 1);
    for (long i = 0; i + 1 < n; ++i) out[i] = (f[i + 1] - f[i]) * inv;
    return out;
}

double integrate_faces(const Grid1D& g, std::span<const double> v, Parity parity) {
    double s = 0.0;
    const bool half_ends = !g.periodic() && parity == Parity::odd;
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double w = (half_ends && (k == 0 || k + 1 == v.size())) ? 0.5 : 1.0;
        s += w * v[k];
    }
    return s * g.dx();
}

double grad_norm_sq(const Grid1D& g, std::span<const double> f, Parity parity) {
    Field d = face_gradient(g, f, parity);
    for (double& v : d) v *= v;
    return integrate_faces(g, d, parity);
}

double l2_norm_sq(const Grid1D& g, std::span<const double> f) {
    double s = 0.0;
    for (double v : f) s += v * v;
    return s * g.dx();
}

double h1_norm_sq(const Grid1D& g, std::span<const double> f, Parity parity) {
    return l2_norm_sq(g, f) + grad_norm_sq(g, f, parity);
}

Field restrict_half(std::span<const double> fine) { return restrict_by(fine, 2); }

Field restrict_by(std::span<const double> fine, std::size_t factor) {
    if (factor == 0 || fine.size() % factor != 0)
        fail(ErrorCode::invalid_argument, "restriction factor does not divide the cell count");
    Field out(fine.size() / factor, 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < factor; ++k) s += fine[i * factor + k];
        out[i] = s / static_cast<double>(factor);
    }
    return out;
}

void require_finite(std::span<const double> f, const std::string& what) {
    for (std::size_t i = 0; i < f.size(); ++i)
        if (!std::isfinite(f[i]))
            fail(ErrorCode::divergence,
                 "non-finite value in " + what + " at cell " + std::to_string(i));
}

Field difference(std::span<const double> a, std::span<const double> b) {
    Field out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

}  // namespace nskr
