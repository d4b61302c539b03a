#pragma once

#include <functional>

#include "state.hpp"

namespace nskr {

struct StepResult {
    SimState state;
    Field dtc;  // (c_new - c_old)/dt; empty for NSK
    std::size_t floor_events = 0;
};

using StepFn = std::function<StepResult(const SimState&, double dt)>;
using DtFn = std::function<double(const SimState&)>;

/// Advances `init` to params.t_end, clipping steps onto frame times, and
/// records frames plus per-step scalars. Throws divergence on non-finite
/// fields and stagnation when the step size underflows 1e-12 t_end.
Trajectory run_time_loop(System system, const SimParams& params, SimState init,
                         const StepFn& step, const DtFn& stable_dt);

}  // namespace nskr
