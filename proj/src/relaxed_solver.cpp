#include "relaxed_solver.hpp"

#include <cmath>

#include "error.hpp"
#include "hydro.hpp"

namespace nskr {
namespace {

void explicit_part(const SimParams& prm, std::span<const double> rho, std::span<const double> mom,
                   std::span<const double> c, Field& d_rho, Field& d_mom) {
    hydro::convective_rhs(prm, rho, mom, prm.alpha, d_rho, d_mom);
    const Field diff = difference(c, rho);
    const Field grad = ddx(prm.grid, diff, hydro::kC);
    for (std::size_t i = 0; i < rho.size(); ++i) d_mom[i] += prm.alpha * rho[i] * grad[i];
}

}  // namespace

RelaxedRhs rhs_relaxed(const SimState& s, const SimParams& prm, double dt) {
    RelaxedRhs out;
    explicit_part(prm, s.rho, s.mom, s.c, out.d_rho, out.d_mom);
    require_finite(out.d_rho, "d_rho (convective flux)");
    require_finite(out.d_mom, "d_mom (flux, pressure or coupling)");
    const Field u = hydro::velocity(prm, s.rho, s.mom);
    out.d_mom_viscous = laplacian(prm.grid, u, hydro::kMom);
    for (double& v : out.d_mom_viscous) v *= prm.nu_eff();
    require_finite(out.d_mom_viscous, "d_mom (viscosity)");
    out.c_matrix = hydro::c_matrix(prm, dt);
    return out;
}

double stable_dt_relaxed(const SimState& s, const SimParams& prm) {
    const double a = hydro::max_wave_speed(prm, s.rho, s.mom, prm.alpha);
    const double dx = prm.grid.dx();
    if (a > 0.0) return prm.cfl * dx / a;
    // Resting fluid, every cell clamped: fall back to |p_alpha'|, then to the viscous scale.
    double b = 0.0;
    for (std::size_t i = 0; i < s.rho.size(); ++i)
        if (s.rho[i] > prm.rho_floor)
            b = std::max(b, std::abs(eval_pressure_derivative(prm.model, s.rho[i]) + prm.alpha * s.rho[i]));
    if (b > 0.0) return prm.cfl * dx / std::sqrt(b);
    return prm.cfl * dx * dx / prm.nu_eff();
}

StepResult step_relaxed(const SimState& s, const SimParams& prm, double dt) {
    const std::size_t n = s.size();
    StepResult res;
    Field rho = s.rho;
    Field mom = hydro::viscous_substep(prm, rho, s.mom, 0.5 * dt);

    Field d_rho, d_mom;
    explicit_part(prm, rho, mom, s.c, d_rho, d_mom);
    Field rho1(n), mom1(n);
    for (std::size_t i = 0; i < n; ++i) {
        rho1[i] = rho[i] + dt * d_rho[i];
        mom1[i] = mom[i] + dt * d_mom[i];
    }
    res.floor_events += hydro::apply_floor(prm, rho1);
    const Field c_stage = hydro::c_update(prm, s.c, s.rho, rho1, dt);
    explicit_part(prm, rho1, mom1, c_stage, d_rho, d_mom);
    for (std::size_t i = 0; i < n; ++i) {
        rho[i] = 0.5 * (rho[i] + rho1[i] + dt * d_rho[i]);
        mom[i] = 0.5 * (mom[i] + mom1[i] + dt * d_mom[i]);
    }
    res.floor_events += hydro::apply_floor(prm, rho);

    mom = hydro::viscous_substep(prm, rho, mom, 0.5 * dt);
    Field c = hydro::c_update(prm, s.c, s.rho, rho, dt);
    res.dtc.resize(n);
    for (std::size_t i = 0; i < n; ++i) res.dtc[i] = (c[i] - s.c[i]) / dt;

    res.state.rho = std::move(rho);
    res.state.mom = std::move(mom);
    res.state.c = std::move(c);
    res.state.time = s.time + dt;
    return res;
}

Trajectory run_relaxed(const SimParams& prm, const SimState& init) {
    return run_time_loop(
        System::relaxed, prm, init,
        [&prm](const SimState& s, double dt) { return step_relaxed(s, prm, dt); },
        [&prm](const SimState& s) { return stable_dt_relaxed(s, prm); });
}

}  // namespace nskr
