#include "nsk_solver.hpp"

#include <cmath>
#include <future>

#include "error.hpp"
#include "hydro.hpp"

namespace nskr {
namespace {

void explicit_part(const SimParams& prm, std::span<const double> rho, std::span<const double> mom,
                   Field& d_rho, Field& d_mom) {
    hydro::convective_rhs(prm, rho, mom, 0.0, d_rho, d_mom);
    const Field k3 = grad_laplacian(prm.grid, rho, hydro::kRho);
    for (std::size_t i = 0; i < rho.size(); ++i) d_mom[i] += prm.kappa * rho[i] * k3[i];
}

double sup_difference(const Trajectory& fine, const Trajectory& coarse) {
    if (fine.frames.size() != coarse.frames.size())
        fail(ErrorCode::numeric, "reference levels have different frame counts");
    const Grid1D& g = coarse.params.grid;
    double sup = 0.0;
    for (std::size_t k = 0; k < fine.frames.size(); ++k) {
        const auto& f = fine.frames[k];
        const auto& c = coarse.frames[k];
        const Field rf = restrict_half(f.rho);
        const Field uf = restrict_half(f.velocity());
        const Field uc = c.velocity();
        const double d = l2_norm_sq(g, difference(rf, c.rho)) + l2_norm_sq(g, difference(uf, uc));
        sup = std::max(sup, std::sqrt(d));
    }
    return sup;
}

}  // namespace

NskRhs rhs_nsk(const SimState& s, const SimParams& prm) {
    NskRhs out;
    explicit_part(prm, s.rho, s.mom, out.d_rho, out.d_mom);
    require_finite(out.d_rho, "d_rho (convective flux)");
    require_finite(out.d_mom, "d_mom (flux, pressure or Korteweg term)");
    const Field u = hydro::velocity(prm, s.rho, s.mom);
    out.d_mom_viscous = laplacian(prm.grid, u, hydro::kMom);
    for (double& v : out.d_mom_viscous) v *= prm.nu_eff();
    return out;
}

double stable_dt_nsk(const SimState& s, const SimParams& prm) {
    const double a = hydro::max_wave_speed(prm, s.rho, s.mom, 0.0);
    const double dx = prm.grid.dx();
    // linearised Korteweg dispersion scales with sqrt(kappa rho)
    double rmax = 1.0;
    for (double r : s.rho) rmax = std::max(rmax, r);
    const double disp = prm.c_disp * dx * dx / std::sqrt(prm.kappa * rmax);
    return a > 0.0 ? std::min(prm.cfl * dx / a, disp) : disp;
}

StepResult step_nsk(const SimState& s, const SimParams& prm, double dt) {
    const std::size_t n = s.size();
    StepResult res;
    Field rho = s.rho;
    Field mom = hydro::viscous_substep(prm, rho, s.mom, 0.5 * dt);
    Field d_rho, d_mom;
    explicit_part(prm, rho, mom, d_rho, d_mom);
    Field rho1(n), mom1(n);
    for (std::size_t i = 0; i < n; ++i) {
        rho1[i] = rho[i] + dt * d_rho[i];
        mom1[i] = mom[i] + dt * d_mom[i];
    }
    res.floor_events += hydro::apply_floor(prm, rho1);
    explicit_part(prm, rho1, mom1, d_rho, d_mom);
    for (std::size_t i = 0; i < n; ++i) {
        rho[i] = 0.5 * (rho[i] + rho1[i] + dt * d_rho[i]);
        mom[i] = 0.5 * (mom[i] + mom1[i] + dt * d_mom[i]);
    }
    res.floor_events += hydro::apply_floor(prm, rho);
    res.state.mom = hydro::viscous_substep(prm, rho, mom, 0.5 * dt);
    res.state.rho = std::move(rho);
    res.state.time = s.time + dt;
    return res;
}

Trajectory run_nsk(const SimParams& prm, const SimState& init) {
    SimState s = init;
    s.c.clear();
    return run_time_loop(
        System::nsk, prm, s, [&prm](const SimState& st, double dt) { return step_nsk(st, prm, dt); },
        [&prm](const SimState& st) { return stable_dt_nsk(st, prm); });
}

nlohmann::json Reference::to_json() const {
    return {{"cells", cells},
            {"level_differences", level_differences},
            {"observed_order", std::isfinite(observed_order) ? nlohmann::json(observed_order)
                                                             : nlohmann::json(nullptr)},
            {"error_estimate", error_estimate}};
}

Reference make_reference(const SimParams& prm, const InitFn& init, int refine_levels) {
    if (refine_levels < 3) fail(ErrorCode::invalid_argument, "make_reference needs >= 3 levels");
    const std::size_t top = std::size_t{1} << (refine_levels - 1);
    if (prm.grid.n_cells % top != 0 || prm.grid.n_cells / top < 8)
        fail(ErrorCode::invalid_argument, "finest grid is not divisible into the coarse levels");
    if (prm.frame_times.empty() && prm.snapshot_interval < 0.0)
        fail(ErrorCode::invalid_argument, "reference levels need fixed frame times");

    std::vector<std::future<Trajectory>> jobs;
    Reference ref;
    for (int l = 0; l < refine_levels; ++l) {
        SimParams p = prm;
        p.grid.n_cells = prm.grid.n_cells / (top >> l);
        ref.cells.push_back(p.grid.n_cells);
        jobs.push_back(std::async(std::launch::async, [p, &init]() { return run_nsk(p, init(p.grid)); }));
    }
    std::vector<Trajectory> levels;
    for (auto& j : jobs) levels.push_back(j.get());
    for (int l = 0; l + 1 < refine_levels; ++l)
        ref.level_differences.push_back(sup_difference(levels[l + 1], levels[l]));

    const double d_coarse = ref.level_differences[refine_levels - 3];
    const double d_fine = ref.level_differences[refine_levels - 2];
    if (d_fine == 0.0 && d_coarse == 0.0) {
        ref.observed_order = std::numeric_limits<double>::quiet_NaN();
        ref.error_estimate = 0.0;
    } else {
        ref.observed_order = std::log2(d_coarse / d_fine);
        if (!(ref.observed_order >= 1.5))
            fail(ErrorCode::numeric, "reference does not converge under refinement: observed order " +
                                         std::to_string(ref.observed_order) +
                                         " < 1.5 (non-smooth regime)");
        ref.error_estimate = d_fine / (std::pow(2.0, ref.observed_order) - 1.0);
    }
    ref.trajectory = std::move(levels.back());
    return ref;
}

}  // namespace nskr
