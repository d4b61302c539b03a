#include "time_loop.hpp"

#include <cmath>

#include "diagnostics.hpp"
#include "error.hpp"

namespace nskr {
namespace {

std::vector<double> frame_schedule(const SimParams& p) {
    if (!p.frame_times.empty()) {
        std::vector<double> t = p.frame_times;
        if (std::abs(t.back() - p.t_end) > 1e-12 * p.t_end) t.push_back(p.t_end);
        t.back() = p.t_end;
        return t;
    }
    if (p.snapshot_interval <= 0.0) return {p.t_end};
    std::vector<double> t;
    for (std::size_t k = 1;; ++k) {
        const double tk = static_cast<double>(k) * p.snapshot_interval;
        if (tk >= p.t_end * (1.0 - 1e-12)) break;
        t.push_back(tk);
    }
    t.push_back(p.t_end);
    return t;
}

double mass_of(const Grid1D& g, const Field& rho) { return integrate(g, rho); }

}  // namespace

Trajectory run_time_loop(System system, const SimParams& params, SimState init,
                         const StepFn& step, const DtFn& stable_dt) {
    params.validate(system);
    const Grid1D& g = params.grid;
    if (init.rho.size() != g.n_cells || init.mom.size() != g.n_cells)
        fail(ErrorCode::invalid_argument, "initial state does not match the grid");
    if (system == System::relaxed && init.c.size() != g.n_cells)
        fail(ErrorCode::invalid_argument, "relaxed run needs an initial order parameter");
    for (double r : init.rho)
        if (!(r >= 0.0)) fail(ErrorCode::domain, "initial density must be nonnegative");
    require_finite(init.rho, "initial rho");
    require_finite(init.mom, "initial momentum");
    if (system == System::relaxed) require_finite(init.c, "initial c");

    Trajectory traj;
    traj.system = system;
    traj.params = params;
    init.time = 0.0;
    traj.frames.push_back(init);
    traj.cum_viscous.push_back(0.0);
    traj.cum_beta.push_back(0.0);
    traj.dtc.emplace_back();

    const std::vector<double> targets = frame_schedule(params);
    const bool every_step = params.frame_times.empty() && params.snapshot_interval < 0.0;
    const double eps_t = 1e-12 * params.t_end;

    SimState state = init;
    double t = 0.0;
    double cum_visc = 0.0, cum_beta = 0.0;
    double visc_rate = viscous_rate(state, params);
    std::size_t next = 0;
    std::size_t steps = 0;
    while (next < targets.size()) {
        const double target = targets[next];
        double dt = params.fixed_dt > 0.0 ? params.fixed_dt : stable_dt(state);
        if (!(dt > 0.0) || !std::isfinite(dt))
            fail(ErrorCode::divergence, "non-positive or non-finite step size at t = " +
                                            std::to_string(t));
        bool hit = false;
        if (t + dt >= target - eps_t) {
            dt = target - t;
            hit = true;
        }
        if (dt < eps_t) {
            if (!hit)
                fail(ErrorCode::stagnation, "step size underflow at t = " + std::to_string(t));
            // Target already reached up to roundoff.
            state.time = target;
            traj.frames.push_back(state);
            traj.cum_viscous.push_back(cum_visc);
            traj.cum_beta.push_back(cum_beta);
            traj.dtc.push_back(traj.dtc.back());
            ++next;
            continue;
        }
        if (++steps > params.max_steps)
            fail(ErrorCode::stagnation, "step limit exceeded at t = " + std::to_string(t));

        StepResult res = step(state, dt);
        require_finite(res.state.rho, "rho");
        require_finite(res.state.mom, "momentum");
        if (system == System::relaxed) require_finite(res.state.c, "c");
        traj.floor_events += res.floor_events;
        t = hit ? target : t + dt;
        res.state.time = t;

        const double visc_new = viscous_rate(res.state, params);
        const double d_visc = 0.5 * dt * (visc_rate + visc_new);
        double d_beta = 0.0, dtc_norm = 0.0;
        if (system == System::relaxed) {
            dtc_norm = std::sqrt(l2_norm_sq(g, res.dtc));
            d_beta = dt * params.beta * dtc_norm * dtc_norm;
        }
        visc_rate = visc_new;
        cum_visc += d_visc;
        cum_beta += d_beta;

        StepRecord rec;
        rec.t = t;
        rec.dt = dt;
        rec.mass = mass_of(g, res.state.rho);
        rec.energy = total_energy(res.state, params, system).total;
        rec.dissipation = d_visc + d_beta;
        rec.dtc_norm = dtc_norm;
        traj.steps.push_back(rec);
        if (steps == 1) traj.dtc[0] = res.dtc;

        state = std::move(res.state);
        if (hit || every_step) {
            traj.frames.push_back(state);
            traj.cum_viscous.push_back(cum_visc);
            traj.cum_beta.push_back(cum_beta);
            traj.dtc.push_back(res.dtc);
        }
        if (hit) ++next;
    }
    return traj;
}

}  // namespace nskr
