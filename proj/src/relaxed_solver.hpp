#pragma once

#include "state.hpp"
#include "time_loop.hpp"
#include "tridiagonal.hpp"

namespace nskr {

struct RelaxedRhs {
    // Explicit part: convection, pressure and the alpha rho (c - rho)_x coupling.
    Field d_rho;
    Field d_mom;
    // Implicit part: nu_eff u_xx, applied by the trapezoidal substeps.
    Field d_mom_viscous;
    // Order-parameter equation as the linear system
    // c_matrix * c_new = (beta/dt) c_old + alpha rho_new.
    Tridiagonal c_matrix;
};

/// Right-hand side of the relaxed system. The momentum flux carries p(rho);
/// the alpha/2 rho^2 part of p_alpha enters through the source
/// alpha rho (c - rho)_x, which equals -(alpha/2 rho^2)_x + alpha rho c_x.
RelaxedRhs rhs_relaxed(const SimState& s, const SimParams& prm, double dt);

/// cfl dx / max(|u| + sqrt(max(p'(rho) + alpha rho, 0))).
double stable_dt_relaxed(const SimState& s, const SimParams& prm);

/// One step: trapezoidal viscosity over dt/2, SSP-RK2 hydro update with the
/// order parameter re-solved at the intermediate stage, trapezoidal viscosity
/// over dt/2, then the implicit c update (prm.c_scheme) with the new density.
StepResult step_relaxed(const SimState& s, const SimParams& prm, double dt);

Trajectory run_relaxed(const SimParams& prm, const SimState& init);

}  // namespace nskr
