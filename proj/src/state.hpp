#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "grid.hpp"
#include "thermo.hpp"

namespace nskr {

enum class System { relaxed, nsk };

System parse_system(const std::string& s);
std::string to_string(System s);

// Time integrator of the order-parameter equation.
enum class CScheme { backward_euler, tr_bdf2 };

CScheme parse_c_scheme(const std::string& s);
std::string to_string(CScheme s);

struct SimState {
    Field rho;
    Field mom;
    Field c;  // empty for NSK states
    double time = 0.0;

    Field velocity() const;
    std::size_t size() const { return rho.size(); }
};

struct SimParams {
    double mu = 0.015;
    double lambda = 0.01;
    double kappa = 0.01;
    double alpha = 100.0;
    double beta = 0.01;
    double cfl = 0.4;
    double t_end = 0.2;
    /// Dispersive restriction dt <= c_disp dx^2 / sqrt(kappa) (NSK only).
    double c_disp = 0.25;
    /// Frames are stored at multiples of this time (0: only t = 0 and t_end;
    /// negative: after every step).
    double snapshot_interval = 0.0;
    /// Explicit frame times in (0, t_end]; overrides snapshot_interval.
    std::vector<double> frame_times;
    /// Constant step size when > 0; steps are still clipped onto frame times.
    double fixed_dt = 0.0;
    std::size_t max_steps = 50'000'000;
    double rho_floor = 1e-10;
    CScheme c_scheme = CScheme::backward_euler;
    PressureModel model = powerlaw_preset();
    Grid1D grid;

    double nu_eff() const { return 4.0 / 3.0 * mu + lambda; }
    void validate(System system) const;
    nlohmann::json to_json() const;
    static SimParams from_json(const nlohmann::json& j);
};

struct StepRecord {
    double t = 0.0;
    double dt = 0.0;
    double mass = 0.0;
    double energy = 0.0;
    /// dt * (nu |u_x|^2 + beta |c_t|^2) for this step.
    double dissipation = 0.0;
    double dtc_norm = 0.0;
};

struct Trajectory {
    System system = System::relaxed;
    SimParams params;
    std::vector<SimState> frames;
    std::vector<StepRecord> steps;
    // Per frame: cumulative viscous and beta dissipation of the steps so far,
    // and the backward difference (c_new - c_old)/dt of the step that ended on
    // the frame (frame 0 takes the first step's).
    std::vector<double> cum_viscous;
    std::vector<double> cum_beta;
    std::vector<Field> dtc;
    std::size_t floor_events = 0;

    std::vector<double> frame_times() const;
};

}  // namespace nskr
