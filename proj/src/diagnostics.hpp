#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "state.hpp"

namespace nskr {

struct EnergyReport {
    double kinetic = 0.0;
    double internal = 0.0;
    double coupling = 0.0;
    double capillary = 0.0;
    double total = 0.0;
    double dissipation_rate = 0.0;

    nlohmann::json to_json() const;
};

/// Energy of a state. Relaxed: capillary part is kappa/2 |c_x|^2 and the
/// coupling part alpha/2 |rho - c|^2; NSK: kappa/2 |rho_x|^2 and no coupling.
/// `dtc` (optional) adds beta |c_t|^2 to the dissipation rate.
EnergyReport total_energy(const SimState& s, const SimParams& prm, System system,
                          std::span<const double> dtc = {});

/// nu_eff int |u_x|^2 on faces.
double viscous_rate(const SimState& s, const SimParams& prm);

/// tol_budget = 1e-6 |E(0)| + c_scheme (dt_max^2 + dx^2) t_end
double budget_tolerance(const Trajectory& traj, double c_scheme);

struct BudgetReport {
    bool passed = false;
    double tolerance = 0.0;
    double max_violation = 0.0;  // max_n E(t_n) + sum_{k<=n} D_k - E(0)
    std::size_t worst_step = 0;
    double worst_time = 0.0;
    double e0 = 0.0;

    nlohmann::json to_json() const;
};

BudgetReport energy_budget_check(const Trajectory& traj, double c_scheme = 10.0);

/// int rho0 + (int c0 - int rho0) exp(-(alpha/beta) t)
double mean_c_exact(const SimParams& prm, double mass_rho0, double mean_c0, double t);

struct MeanCReport {
    bool passed = false;
    double max_rel_err_discrete = 0.0;    // against the recursion of the c scheme
    double max_rel_err_continuum = 0.0;   // against the exponential
    double continuum_tolerance = 0.0;     // |int c0 - int rho0| (alpha/beta) dt_max, relative
    std::size_t frames = 0;

    nlohmann::json to_json() const;
};

/// Compares int c at every frame with the discrete recursion of the c scheme
/// (backward Euler:
/// phi_{k+1} = (beta/dt phi_k + alpha M_{k+1}) / (beta/dt + alpha)), to 1e-6
/// relative, and with the closed form to within the first-order bound.
MeanCReport mean_c_check(const Trajectory& traj, double rel_tol = 1e-6);

struct RelEnergyReport {
    double kinetic = 0.0;
    double bregman = 0.0;
    double coupling = 0.0;
    double gradient = 0.0;
    double total = 0.0;

    nlohmann::json to_json() const;
};

/// int 1/2 rho |u-U|^2 + H(rho|r) + alpha/2 |(rho-r)-(c-C)|^2 + kappa/2 |c_x - C_x|^2
RelEnergyReport relative_energy(const SimState& s, std::span<const double> ref_rho,
                                std::span<const double> ref_u, std::span<const double> ref_c,
                                const SimParams& prm);

struct RemainderSeries {
    std::string name;
    std::vector<double> times;
    std::vector<std::string> terms;
    std::vector<std::vector<double>> cumulative;  // [term][frame]
    // Named pieces of individual terms, reported but not summed.
    std::vector<std::string> part_names;
    std::vector<std::vector<double>> parts;        // [part][frame]
    std::vector<double> rel_energy;               // E_rel at each frame
    std::vector<double> lhs;                      // [E_rel]_0^s + dissipation
    std::vector<double> rhs;                      // sum of the terms
    double tolerance = 0.0;
    double max_excess = 0.0;  // max_s lhs - rhs
    bool passed = false;

    nlohmann::json to_json() const;
};

/// Discrete relative-energy inequality against a smooth reference (r, U, C).
/// Midpoint in space, trapezoid over frames in time, reference time
/// derivatives by three-point differences over frames. c is taken linear in
/// time between frames: on each interval c_t is the frame difference quotient
/// and the terms carrying it pair that constant with the endpoint values of
/// the other factors. Frames should resolve the c time scale beta/alpha;
/// coarser frames underestimate the beta dissipation.
RemainderSeries remainders_prop31(const Trajectory& traj, const Trajectory& ref,
                                  double c_scheme = 10.0);

/// Same against an NSK reference (r, U) with C = r: R_NSE plus J1..J7.
/// (The sum runs over i = 1..7; no J0 term exists.)
RemainderSeries remainders_prop51(const Trajectory& traj, const Trajectory& nsk_ref,
                                  double c_scheme = 10.0);

/// Discrete Poincare constant for face gradients: dx / (2 sin(pi/N))
/// periodic, dx / (2 sin(pi/(2N))) zero-Neumann.
double poincare_constant(const Grid1D& g);

struct PoincareGap {
    double lhs = 0.0;
    double rhs = 0.0;
};

/// ||r - c|| against C_P ||(r - c)_x|| + beta/alpha ||c_t|| + |e_alpha| sqrt|Omega|.
PoincareGap poincare_gap(const SimState& s, std::span<const double> ref_rho,
                         std::span<const double> dtc, const SimParams& prm, double e_alpha);

struct PoincareReport {
    std::size_t frames = 0;
    std::size_t violations = 0;
    double min_margin = 0.0;  // min (rhs - lhs) / max(rhs, tiny)
    bool passed = false;

    nlohmann::json to_json() const;
};

/// Every frame of a relaxed trajectory. Without a reference, r = rho and
/// e_alpha = 0. Frame 0 uses the c-equation's own rate for c_t, later frames
/// the stored backward differences.
PoincareReport poincare_check(const Trajectory& traj, const Trajectory* ref = nullptr);

struct MeanGapReport {
    std::vector<double> times;
    std::vector<double> gap;  // int (c - C)
    double max_abs = 0.0;
    bool passed = false;

    nlohmann::json to_json() const;
};

MeanGapReport ws_mean_check(const Trajectory& traj, const Trajectory& ref, double tol = 1e-10);

struct NormBundle {
    double kinetic_sup = 0.0;   // sup ||sqrt(rho)(u - U)||^2
    double density_sup = 0.0;   // sup ||rho - r||^2
    double coupling_sup = 0.0;  // alpha sup ||rho - c||^2
    double order_h1_sup = 0.0;  // sup ||c - r||_H1^2
    double velocity_h1 = 0.0;   // ||u - U||^2 in L2(0,T;H1)
    double beta_ct = 0.0;       // beta ||c_t||^2 in L2(L2)
    double e_alpha = 0.0;
    double energy0 = 0.0;       // E(rho0, u0, c0 | r0, U0)
    double rate_s = 0.0;
    double alpha = 0.0;
    double beta = 0.0;

    std::array<double, 6> values() const {
        return {kinetic_sup, density_sup, coupling_sup, order_h1_sup, velocity_h1, beta_ct};
    }
    double sum() const;
    static const std::array<const char*, 6>& names();
    nlohmann::json to_json() const;
};

/// Relaxed trajectory against an NSK reference on the same frame times; the
/// reference may live on an integer refinement of the relaxed grid.
NormBundle norm_bundle(const Trajectory& relaxed, const Trajectory& ref);

/// rate s(alpha) = 1/alpha + beta + |e|^2 + E0
double rate_s(double alpha, double beta, double e_alpha, double energy0);

struct OrderFit {
    double slope = 0.0;
    double stderr_slope = 0.0;
    double intercept = 0.0;
    std::size_t points = 0;

    nlohmann::json to_json() const;
};

/// Least squares of log y against log x.
OrderFit fit_order(std::span<const double> xs, std::span<const double> ys);

/// Reference frame fields moved onto `target` (identity or cell averaging).
Field onto_grid(const Grid1D& target, const Grid1D& source, std::span<const double> f);

}  // namespace nskr
