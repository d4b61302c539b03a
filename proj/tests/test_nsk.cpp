#include <doctest.h>

#include <cmath>
#include <numbers>

#include "diagnostics.hpp"
#include "nsk_solver.hpp"
#include "test_util.hpp"

using namespace nskr;
using std::numbers::pi;
using testutil::error_of;

namespace {

SimParams base(std::size_t n = 64, BcMode bc = BcMode::periodic) {
    SimParams p;
    p.grid = Grid1D::make(1.0, n, bc);
    p.t_end = 0.02;
    return p;
}

SimState bump(const Grid1D& g, double amp = 0.2) {
    SimState s;
    s.rho = sample(g, [&](double x) { return 1.0 + amp * std::exp(-std::pow((x - 0.5) / 0.15, 2)); });
    s.mom = sample(g, [&](double x) { return 0.05 * std::sin(2 * pi * x); });
    return s;
}

}  // namespace

TEST_CASE("rhs: equilibrium and conservation") {
    SimParams p = base();
    const auto r = rhs_nsk(SimState{Field(64, 1.2), Field(64, 0.0), {}, 0.0}, p);
    for (std::size_t i = 0; i < 64; ++i) {
        CHECK(r.d_rho[i] == 0.0);
        CHECK(r.d_mom[i] == 0.0);
        CHECK(r.d_mom_viscous[i] == 0.0);
    }
    for (auto bc : {BcMode::periodic, BcMode::wall}) {
        SimParams q = base(64, bc);
        const auto b = rhs_nsk(bump(q.grid), q);
        CHECK(std::abs(integrate(q.grid, b.d_rho)) <= 1e-14);
    }
}

TEST_CASE("rhs matches the linearised dispersion relation") {
    // u = 0, rho = 1 + eps sin(kx): d_mom = -(p'(1) + kappa k^2) eps k cos(kx) + O(eps^2) + O(dx^2)
    const double k = 2 * pi;
    for (const auto& model : {powerlaw_preset(), figure1_preset()}) {
        std::vector<double> err;
        for (double eps : {1e-3, 5e-4}) {
            SimParams p = base(1024);
            p.model = model;
            p.kappa = 0.01;
            SimState s;
            s.rho = sample(p.grid, [&](double x) { return 1.0 + eps * std::sin(k * x); });
            s.mom.assign(1024, 0.0);
            const auto r = rhs_nsk(s, p);
            const double dp1 = eval_pressure_derivative(model, 1.0);
            double e = 0.0;
            for (std::size_t i = 0; i < 1024; ++i) {
                const double lin = -(dp1 + p.kappa * k * k) * eps * k * std::cos(k * p.grid.x(i));
                e = std::max(e, std::abs(r.d_mom[i] - lin));
            }
            err.push_back(e / eps);
        }
        // relative error: O(eps) + O(dx^2), both well below 1e-2 here
        CHECK(err[0] < 2e-2);
        CHECK(err[1] < 1e-2);
    }
}

TEST_CASE("stable time step includes the dispersive bound") {
    SimParams p = base(128);
    SimState s{Field(128, 1.0), Field(128, 0.0), {}, 0.0};
    const double dx = p.grid.dx();
    const double disp = p.c_disp * dx * dx / std::sqrt(p.kappa);
    const double cfl = p.cfl * dx / std::sqrt(2.0);
    CHECK(stable_dt_nsk(s, p) == doctest::Approx(std::min(disp, cfl)));
    p.kappa = 1e-8;
    CHECK(stable_dt_nsk(s, p) == doctest::Approx(cfl));

    // dense phase: the Korteweg term disperses like sqrt(kappa rho)
    p.kappa = 0.01;
    p.cfl = 100.0;
    const SimState dense{Field(128, 4.0), Field(128, 0.0), {}, 0.0};
    CHECK(stable_dt_nsk(dense, p) == doctest::Approx(0.5 * disp));
    const SimState thin{Field(128, 0.25), Field(128, 0.0), {}, 0.0};
    CHECK(stable_dt_nsk(thin, p) == doctest::Approx(disp));
}

TEST_CASE("step: equilibrium fixed point and mass") {
    for (auto bc : {BcMode::periodic, BcMode::wall}) {
        SimParams p = base(64, bc);
        SimState eq{Field(64, 0.9), Field(64, 0.0), {}, 0.0};
        const auto r = step_nsk(eq, p, stable_dt_nsk(eq, p));
        for (std::size_t i = 0; i < 64; ++i) {
            CHECK(std::abs(r.state.rho[i] - 0.9) <= 1e-14);
            CHECK(std::abs(r.state.mom[i]) <= 1e-14);
        }
        SimState s = bump(p.grid);
        const double m0 = integrate(p.grid, s.rho);
        for (int k = 0; k < 50; ++k) s = step_nsk(s, p, stable_dt_nsk(s, p)).state;
        CHECK(std::abs(integrate(p.grid, s.rho) - m0) <= 1e-13 * m0);
    }
}

TEST_CASE("temporal self-convergence") {
    SimParams p = base(64);
    const SimState s0 = bump(p.grid);
    const double dt0 = stable_dt_nsk(s0, p);
    std::vector<SimState> fin;
    for (int l = 0; l < 3; ++l) {
        p.fixed_dt = dt0 / std::pow(2.0, l);
        fin.push_back(run_nsk(p, s0).frames.back());
    }
    auto gap = [&](const SimState& a, const SimState& b) {
        return std::sqrt(l2_norm_sq(p.grid, difference(a.rho, b.rho)) + l2_norm_sq(p.grid, difference(a.mom, b.mom)));
    };
    const double o = testutil::observed_order(gap(fin[0], fin[1]), gap(fin[1], fin[2]));
    MESSAGE("nsk temporal order " << o);
    CHECK(o >= 1.8);
}

TEST_CASE("energy is nonincreasing within the budget tolerance") {
    for (auto bc : {BcMode::periodic, BcMode::wall}) {
        SimParams p = base(128, bc);
        p.t_end = 0.1;
        const auto tr = run_nsk(p, bump(p.grid));
        const auto b = energy_budget_check(tr);
        CHECK(b.passed);
        const auto e0 = total_energy(tr.frames.front(), p, System::nsk);
        // kinetic + W + kappa/2 |rho_x|^2, no coupling part
        CHECK(e0.coupling == 0.0);
        CHECK(e0.capillary > 0.0);
        CHECK(tr.frames.back().c.empty());
    }
}

TEST_CASE("reference construction") {
    SUBCASE("equilibrium: zero error estimate") {
        SimParams p = base(64);
        p.snapshot_interval = 0.01;
        const auto ref = make_reference(p, [](const Grid1D& g) {
            return SimState{Field(g.n_cells, 1.0), Field(g.n_cells, 0.0), {}, 0.0};
        });
        CHECK(ref.error_estimate == 0.0);
        CHECK(ref.trajectory.params.grid.n_cells == 64);
        CHECK(ref.cells == std::vector<std::size_t>{16, 32, 64});
    }
    SUBCASE("smooth bump: second-order triple") {
        SimParams p = base(512);
        p.t_end = 0.05;
        p.snapshot_interval = 0.01;
        const auto ref = make_reference(p, [](const Grid1D& g) { return bump(g); });
        MESSAGE("observed order " << ref.observed_order);
        CHECK(ref.observed_order >= 1.8);
        CHECK(ref.observed_order <= 2.2);
        CHECK(ref.error_estimate > 0.0);
        CHECK(ref.error_estimate < ref.level_differences.back());
    }
    SUBCASE("discontinuous data is refused") {
        SimParams p = base(256);
        p.t_end = 0.01;
        p.snapshot_interval = 0.005;
        const auto code = error_of([&] {
            make_reference(p, [](const Grid1D& g) {
                SimState s;
                s.rho = sample(g, [](double x) { return x < 0.5 ? 1.0 : 2.0; });
                s.mom.assign(g.n_cells, 0.0);
                return s;
            });
        });
        CHECK(code == ErrorCode::numeric);
    }
    SUBCASE("argument checks") {
        SimParams p = base(62);
        p.snapshot_interval = 0.01;
        auto init = [](const Grid1D& g) { return bump(g); };
        CHECK(error_of([&] { make_reference(p, init); }) == ErrorCode::invalid_argument);
        p.grid = Grid1D::make(1.0, 64, BcMode::periodic);
        CHECK(error_of([&] { make_reference(p, init, 2); }) == ErrorCode::invalid_argument);
        p.snapshot_interval = -1.0;
        CHECK(error_of([&] { make_reference(p, init); }) == ErrorCode::invalid_argument);
    }
}

TEST_CASE("cell averaging commutes with norm evaluation up to interpolation error") {
    std::vector<double> err;
    for (std::size_t n : {64u, 128u, 256u}) {
        const auto fine = Grid1D::make(1.0, 2 * n, BcMode::periodic);
        const auto coarse = Grid1D::make(1.0, n, BcMode::periodic);
        const Field f = sample(fine, [](double x) { return 1.0 + 0.3 * std::sin(2 * pi * x); });
        const Field r = onto_grid(coarse, fine, f);
        err.push_back(std::abs(l2_norm_sq(coarse, r) - l2_norm_sq(fine, f)));
    }
    CHECK(testutil::observed_order(err[0], err[1]) >= 1.8);
    CHECK(testutil::observed_order(err[1], err[2]) >= 1.8);
}
