#include "hydro.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace nskr::hydro {
namespace {

constexpr long kGhost = 2;

// Copy of f with two ghost cells on each side.
Field extend(const Grid1D& g, std::span<const double> f, Parity p) {
    const long n = static_cast<long>(f.size());
    Field e(n + 2 * kGhost);
    for (long i = 0; i < n; ++i) e[i + kGhost] = f[i];
    const double sign = p == Parity::odd ? -1.0 : 1.0;
    for (long k = 1; k <= kGhost; ++k) {
        if (g.periodic()) {
            e[kGhost - k] = f[n - k];
            e[kGhost + n - 1 + k] = f[k - 1];
        } else {
            e[kGhost - k] = sign * f[k - 1];
            e[kGhost + n - 1 + k] = sign * f[n - k];
        }
    }
    return e;
}

struct FaceState {
    double rho, mom;
};

}  // namespace

void convective_rhs(const SimParams& prm, std::span<const double> rho,
                    std::span<const double> mom, double alpha, Field& d_rho, Field& d_mom) {
    const Grid1D& g = prm.grid;
    const long n = static_cast<long>(rho.size());
    const Field er = extend(g, rho, kRho);
    const Field em = extend(g, mom, kMom);
    const auto& model = prm.model;
    const double floor = prm.rho_floor;

    auto flux = [&](FaceState s, double& f1, double& f2, double& speed) {
        const double r = std::max(s.rho, floor);
        const double u = s.mom / r;
        f1 = s.mom;
        f2 = s.mom * u + eval_pressure(model, r);
        speed = std::abs(u) + std::sqrt(std::max(eval_pressure_derivative(model, r) + alpha * r, 0.0));
    };

    // Face k sits between cells k-1 and k.
    Field F1(n + 1), F2(n + 1);
    for (long k = 0; k <= n; ++k) {
        const long i = k - 1 + kGhost;  // left cell in extended indexing
        const FaceState L{er[i] + 0.25 * (er[i + 1] - er[i - 1]),
                          em[i] + 0.25 * (em[i + 1] - em[i - 1])};
        const FaceState R{er[i + 1] - 0.25 * (er[i + 2] - er[i]),
                          em[i + 1] - 0.25 * (em[i + 2] - em[i])};
        double fl1, fl2, al, fr1, fr2, ar;
        flux(L, fl1, fl2, al);
        flux(R, fr1, fr2, ar);
        const double a = std::max(al, ar);
        F1[k] = 0.5 * (fl1 + fr1) - 0.5 * a * (R.rho - L.rho);
        F2[k] = 0.5 * (fl2 + fr2) - 0.5 * a * (R.mom - L.mom);
    }
    if (g.periodic()) {
        F1[n] = F1[0];
        F2[n] = F2[0];
    } else {
        F1[0] = 0.0;
        F1[n] = 0.0;
    }
    const double inv = 1.0 / g.dx();
    d_rho.assign(n, 0.0);
    d_mom.assign(n, 0.0);
    for (long i = 0; i < n; ++i) {
        d_rho[i] = -(F1[i + 1] - F1[i]) * inv;
        d_mom[i] = -(F2[i + 1] - F2[i]) * inv;
    }
}

double max_wave_speed(const SimParams& prm, std::span<const double> rho,
                      std::span<const double> mom, double alpha) {
    double a = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        if (!(rho[i] > prm.rho_floor)) continue;
        any = true;
        const double u = mom[i] / rho[i];
        const double s2 = eval_pressure_derivative(prm.model, rho[i]) + alpha * rho[i];
        a = std::max(a, std::abs(u) + std::sqrt(std::max(s2, 0.0)));
    }
    if (!any) fail(ErrorCode::domain, "wave speed: state is empty or vacuum everywhere");
    return a;
}

Field viscous_substep(const SimParams& prm, std::span<const double> rho,
                      std::span<const double> mom, double tau) {
    const Grid1D& g = prm.grid;
    const std::size_t n = rho.size();
    const double nu = prm.nu_eff();
    const double k = 0.5 * nu / (g.dx() * g.dx());
    const Field u = velocity(prm, rho, mom);
    const Field lap = laplacian(g, u, Parity::odd);
    Tridiagonal m;
    m.a.assign(n, -k);
    m.c.assign(n, -k);
    m.b.resize(n);
    Field rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        m.b[i] = rho[i] / tau + 2.0 * k;
        rhs[i] = rho[i] / tau * u[i] + 0.5 * nu * lap[i];
    }
    Field u_new;
    if (g.periodic()) {
        u_new = solve_cyclic(m, rhs);
    } else {
        m.b[0] += k;  // ghost -u_0
        m.b[n - 1] += k;
        u_new = solve_thomas(m, rhs);
    }
    Field out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = rho[i] * u_new[i];
    return out;
}

Tridiagonal c_matrix(const SimParams& prm, double dt) {
    const Grid1D& g = prm.grid;
    const std::size_t n = g.n_cells;
    const double k = prm.kappa / (g.dx() * g.dx());
    const double diag = prm.beta / dt + prm.alpha;
    Tridiagonal m;
    m.a.assign(n, -k);
    m.c.assign(n, -k);
    m.b.assign(n, diag + 2.0 * k);
    if (!g.periodic()) {
        m.b[0] -= k;  // mirrored ghost
        m.b[n - 1] -= k;
    }
    return m;
}

namespace {

const double kGamma = 2.0 - std::sqrt(2.0);

Field solve_c(const SimParams& prm, double tau, const Field& rhs) {
    const Tridiagonal m = c_matrix(prm, tau);
    const bool cyclic = prm.grid.periodic();
    // beta/tau + alpha > 0 makes the matrix strictly diagonally dominant.
    if (!(m.dominance_margin(cyclic) > 0.0))
        fail(ErrorCode::numeric, "order-parameter matrix lost diagonal dominance");
    return cyclic ? solve_cyclic(m, rhs) : solve_thomas(m, rhs);
}

// alpha c - kappa Lap c
Field apply_A(const SimParams& prm, std::span<const double> c) {
    Field out = laplacian(prm.grid, c, kC);
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = prm.alpha * c[i] - prm.kappa * out[i];
    return out;
}

}  // namespace

Field c_backward_euler(const SimParams& prm, std::span<const double> c_old,
                       std::span<const double> rho_new, double dt) {
    const std::size_t n = c_old.size();
    Field rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = prm.beta / dt * c_old[i] + prm.alpha * rho_new[i];
    return solve_c(prm, dt, rhs);
}

Field c_tr_bdf2(const SimParams& prm, std::span<const double> c_old, std::span<const double> rho_old,
                std::span<const double> rho_new, double dt) {
    const std::size_t n = c_old.size();
    const double g = kGamma;
    // trapezoidal stage to t + g dt
    const double tau1 = 0.5 * g * dt;
    const Field ac = apply_A(prm, c_old);
    Field rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double rho_g = rho_old[i] + g * (rho_new[i] - rho_old[i]);
        rhs[i] = prm.beta / tau1 * c_old[i] - ac[i] + prm.alpha * (rho_old[i] + rho_g);
    }
    const Field cg = solve_c(prm, tau1, rhs);
    // BDF2 stage
    const double tau2 = (1.0 - g) / (2.0 - g) * dt;
    const double w1 = 1.0 / (g * (2.0 - g));
    const double w0 = (1.0 - g) * (1.0 - g) / (g * (2.0 - g));
    for (std::size_t i = 0; i < n; ++i)
        rhs[i] = prm.beta / tau2 * (w1 * cg[i] - w0 * c_old[i]) + prm.alpha * rho_new[i];
    return solve_c(prm, tau2, rhs);
}

Field c_update(const SimParams& prm, std::span<const double> c_old, std::span<const double> rho_old,
               std::span<const double> rho_new, double dt) {
    return prm.c_scheme == CScheme::backward_euler ? c_backward_euler(prm, c_old, rho_new, dt)
                                                   : c_tr_bdf2(prm, c_old, rho_old, rho_new, dt);
}

double mean_c_update(const SimParams& prm, double c, double r, double dt) {
    const double a = prm.alpha;
    if (prm.c_scheme == CScheme::backward_euler) {
        const double b = prm.beta / dt;
        return (b * c + a * r) / (b + a);
    }
    const double g = kGamma;
    const double b1 = prm.beta / (0.5 * g * dt);
    const double cg = ((b1 - a) * c + 2.0 * a * r) / (b1 + a);
    const double b2 = prm.beta / ((1.0 - g) / (2.0 - g) * dt);
    const double w1 = 1.0 / (g * (2.0 - g));
    const double w0 = (1.0 - g) * (1.0 - g) / (g * (2.0 - g));
    return (b2 * (w1 * cg - w0 * c) + a * r) / (b2 + a);
}

Field velocity(const SimParams& prm, std::span<const double> rho, std::span<const double> mom) {
    Field u(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) u[i] = mom[i] / std::max(rho[i], prm.rho_floor);
    return u;
}

std::size_t apply_floor(const SimParams& prm, Field& rho) {
    std::size_t events = 0;
    for (double& r : rho) {
        if (r < prm.rho_floor) {
            r = prm.rho_floor;
            ++events;
        }
    }
    return events;
}

}  // namespace nskr::hydro
