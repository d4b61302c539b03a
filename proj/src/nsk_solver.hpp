#pragma once

#include <functional>

#include <json.hpp>

#include "state.hpp"
#include "time_loop.hpp"

namespace nskr {

struct NskRhs {
    Field d_rho;
    Field d_mom;           // convection, pressure, kappa rho (rho_xx)_x
    Field d_mom_viscous;   // nu_eff u_xx
};

NskRhs rhs_nsk(const SimState& s, const SimParams& prm);

/// min(cfl dx / max(|u| + sqrt(max(p', 0))), c_disp dx^2 / sqrt(kappa)).
double stable_dt_nsk(const SimState& s, const SimParams& prm);

StepResult step_nsk(const SimState& s, const SimParams& prm, double dt);

Trajectory run_nsk(const SimParams& prm, const SimState& init);

struct Reference {
    Trajectory trajectory;  // finest level
    double error_estimate = 0.0;
    double observed_order = 0.0;
    std::vector<std::size_t> cells;
    std::vector<double> level_differences;  // sup_t L2 differences of consecutive levels

    nlohmann::json to_json() const;
};

using InitFn = std::function<SimState(const Grid1D&)>;

/// Runs the NSK solver on prm.grid coarsened by 2^(levels-1), ..., 2, 1 and
/// returns the finest run. The error estimate is the Richardson bound
/// d_fine / (2^p - 1), p = log2(d_coarse / d_fine), where d are sup-in-time
/// L2 differences of (rho, u) between consecutive levels after cell
/// averaging. Refuses (numeric error) when p < 1.5.
Reference make_reference(const SimParams& prm, const InitFn& init, int refine_levels = 3);

}  // namespace nskr
