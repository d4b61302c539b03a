#pragma once

#include <span>

#include "state.hpp"
#include "tridiagonal.hpp"

// Pieces shared by the relaxed and the NSK time steppers.
namespace nskr::hydro {

// Continuations across walls: density and order parameter are mirrored,
// momentum and velocity change sign.
inline constexpr Parity kRho = Parity::even;
inline constexpr Parity kC = Parity::even;
inline constexpr Parity kMom = Parity::odd;

/// -d/dx of the local Lax-Friedrichs flux of (m, m^2/rho + p(rho)) with
/// unlimited central-slope linear reconstruction. `alpha` only enters the
/// wave speed |u| + sqrt(max(p'(rho) + alpha rho, 0)); pass 0 for NSK.
void convective_rhs(const SimParams& prm, std::span<const double> rho,
                    std::span<const double> mom, double alpha, Field& d_rho, Field& d_mom);

/// max_i |u_i| + sqrt(max(p'(rho_i) + alpha rho_i, 0)).
double max_wave_speed(const SimParams& prm, std::span<const double> rho,
                      std::span<const double> mom, double alpha);

/// Trapezoidal viscous substep of length tau on u = m/rho (rho frozen);
/// returns the new momentum.
Field viscous_substep(const SimParams& prm, std::span<const double> rho,
                      std::span<const double> mom, double tau);

/// (beta/dt + alpha) I - kappa Lap, zero-Neumann or periodic.
Tridiagonal c_matrix(const SimParams& prm, double dt);

/// Backward-Euler step of beta c_t = kappa c_xx - alpha (c - rho) with rho
/// taken at the new time level.
Field c_backward_euler(const SimParams& prm, std::span<const double> c_old,
                       std::span<const double> rho_new, double dt);

/// TR-BDF2 step (gamma = 2 - sqrt 2) of the same equation; rho at the
/// intermediate level is interpolated linearly between rho_old and rho_new.
Field c_tr_bdf2(const SimParams& prm, std::span<const double> c_old, std::span<const double> rho_old,
                std::span<const double> rho_new, double dt);

/// c update with prm.c_scheme.
Field c_update(const SimParams& prm, std::span<const double> c_old, std::span<const double> rho_old,
               std::span<const double> rho_new, double dt);

/// The same update restricted to the spatial mean (mass of rho constant).
double mean_c_update(const SimParams& prm, double mean_c, double mean_rho, double dt);

Field velocity(const SimParams& prm, std::span<const double> rho, std::span<const double> mom);

/// Clamp rho from below; returns the number of clamped cells.
std::size_t apply_floor(const SimParams& prm, Field& rho);

}  // namespace nskr::hydro
