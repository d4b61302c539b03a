#include "diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "error.hpp"
#include "hydro.hpp"

namespace nskr {
namespace {

using hydro::kC;
using hydro::kMom;
using hydro::kRho;

Field times_field(std::span<const double> a, std::span<const double> b) {
    Field out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

// Three-point derivative in time over (possibly non-uniform) frames.
Field time_derivative(const std::vector<double>& t, const std::vector<const Field*>& f,
                      std::size_t k) {
    const std::size_t K = t.size();
    const std::size_t n = f[0]->size();
    Field out(n, 0.0);
    if (K < 2) return out;
    if (K == 2) {
        const double h = t[1] - t[0];
        for (std::size_t i = 0; i < n; ++i) out[i] = ((*f[1])[i] - (*f[0])[i]) / h;
        return out;
    }
    std::size_t a, b, c;
    double wa, wb, wc;
    if (k == 0 || k + 1 == K) {
        const bool left = k == 0;
        a = left ? 0 : K - 1;
        b = left ? 1 : K - 2;
        c = left ? 2 : K - 3;
        const double h1 = std::abs(t[b] - t[a]);
        const double h2 = std::abs(t[c] - t[b]);
        const double s = left ? 1.0 : -1.0;
        wa = -s * (2.0 * h1 + h2) / (h1 * (h1 + h2));
        wb = s * (h1 + h2) / (h1 * h2);
        wc = -s * h1 / (h2 * (h1 + h2));
    } else {
        a = k - 1;
        b = k;
        c = k + 1;
        const double h1 = t[k] - t[k - 1];
        const double h2 = t[k + 1] - t[k];
        wa = -h2 / (h1 * (h1 + h2));
        wb = (h2 - h1) / (h1 * h2);
        wc = h1 / (h2 * (h1 + h2));
    }
    for (std::size_t i = 0; i < n; ++i)
        out[i] = wa * (*f[a])[i] + wb * (*f[b])[i] + wc * (*f[c])[i];
    return out;
}

void check_same_times(const Trajectory& a, const Trajectory& b) {
    if (a.frames.size() != b.frames.size())
        fail(ErrorCode::invalid_argument, "trajectories have different frame counts (" +
                                              std::to_string(a.frames.size()) + " vs " +
                                              std::to_string(b.frames.size()) + ")");
    const double tol = 1e-9 * std::max(1.0, a.params.t_end);
    for (std::size_t k = 0; k < a.frames.size(); ++k)
        if (std::abs(a.frames[k].time - b.frames[k].time) > tol)
            fail(ErrorCode::invalid_argument,
                 "time-grid mismatch at frame " + std::to_string(k) + ": " +
                     std::to_string(a.frames[k].time) + " vs " + std::to_string(b.frames[k].time));
}

struct RefFrames {
    std::vector<Field> r, U, C;
};

// Reference fields moved onto the trajectory grid. C is left empty for NSK.
RefFrames reference_frames(const Trajectory& traj, const Trajectory& ref) {
    check_same_times(traj, ref);
    RefFrames out;
    const Grid1D& tg = traj.params.grid;
    const Grid1D& rg = ref.params.grid;
    if (tg.bc != rg.bc || std::abs(tg.length - rg.length) > 1e-12 * tg.length)
        fail(ErrorCode::invalid_argument, "trajectory and reference live on different domains");
    for (const auto& f : ref.frames) {
        out.r.push_back(onto_grid(tg, rg, f.rho));
        out.U.push_back(onto_grid(tg, rg, f.velocity()));
        if (ref.system == System::relaxed) out.C.push_back(onto_grid(tg, rg, f.c));
    }
    return out;
}

// c_t on (t_{k-1}, t_k] with c linear in time between frames.
Field interval_rate(const Trajectory& traj, std::size_t k) {
    const Field& a = traj.frames[k - 1].c;
    const Field& b = traj.frames[k].c;
    const double h = traj.frames[k].time - traj.frames[k - 1].time;
    Field out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = (b[i] - a[i]) / h;
    return out;
}

double trapezoid_step(double t0, double t1, double f0, double f1) {
    return 0.5 * (t1 - t0) * (f0 + f1);
}

double dissipation_gap(const Grid1D& g, const SimParams& p, const Field& u, const Field& U,
                       std::span<const double> dtc) {
    double d = p.nu_eff() * grad_norm_sq(g, difference(u, U), kMom);
    if (!dtc.empty()) d += p.beta * l2_norm_sq(g, dtc);
    return d;
}

void finish_audit(RemainderSeries& s) {
    s.max_excess = -std::numeric_limits<double>::infinity();
    s.rhs.assign(s.times.size(), 0.0);
    for (std::size_t k = 0; k < s.times.size(); ++k) {
        for (const auto& term : s.cumulative) s.rhs[k] += term[k];
        s.max_excess = std::max(s.max_excess, s.lhs[k] - s.rhs[k]);
    }
    s.passed = s.max_excess <= s.tolerance;
}

}  // namespace

// ---------------------------------------------------------------------------
// Energies

nlohmann::json EnergyReport::to_json() const {
    return {{"kinetic", kinetic},     {"internal", internal}, {"coupling", coupling},
            {"capillary", capillary}, {"total", total},       {"dissipation_rate", dissipation_rate}};
}

double viscous_rate(const SimState& s, const SimParams& prm) {
    const Field u = hydro::velocity(prm, s.rho, s.mom);
    return prm.nu_eff() * grad_norm_sq(prm.grid, u, kMom);
}

EnergyReport total_energy(const SimState& s, const SimParams& prm, System system,
                          std::span<const double> dtc) {
    const Grid1D& g = prm.grid;
    EnergyReport e;
    Field kin(s.size()), W(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double r = std::max(s.rho[i], prm.rho_floor);
        kin[i] = 0.5 * s.mom[i] * s.mom[i] / r;
        W[i] = potential(prm.model, Potential::W, s.rho[i]);
    }
    e.kinetic = integrate(g, kin);
    e.internal = integrate(g, W);
    if (system == System::relaxed) {
        e.coupling = 0.5 * prm.alpha * l2_norm_sq(g, difference(s.rho, s.c));
        e.capillary = 0.5 * prm.kappa * grad_norm_sq(g, s.c, kC);
    } else {
        e.capillary = 0.5 * prm.kappa * grad_norm_sq(g, s.rho, kRho);
    }
    e.total = e.kinetic + e.internal + e.coupling + e.capillary;
    e.dissipation_rate = viscous_rate(s, prm);
    if (!dtc.empty()) e.dissipation_rate += prm.beta * l2_norm_sq(g, dtc);
    return e;
}

double budget_tolerance(const Trajectory& traj, double c_scheme) {
    double dt_max = 0.0;
    for (const auto& s : traj.steps) dt_max = std::max(dt_max, s.dt);
    const double dx = traj.params.grid.dx();
    const double e0 = traj.frames.empty()
                          ? 0.0
                          : total_energy(traj.frames[0], traj.params, traj.system).total;
    return 1e-6 * std::abs(e0) + c_scheme * (dt_max * dt_max + dx * dx) * traj.params.t_end;
}

nlohmann::json BudgetReport::to_json() const {
    return {{"passed", passed},       {"tolerance", tolerance}, {"max_violation", max_violation},
            {"worst_step", worst_step}, {"worst_time", worst_time}, {"e0", e0}};
}

BudgetReport energy_budget_check(const Trajectory& traj, double c_scheme) {
    BudgetReport rep;
    if (traj.frames.empty()) fail(ErrorCode::invalid_argument, "empty trajectory");
    rep.e0 = total_energy(traj.frames[0], traj.params, traj.system).total;
    rep.tolerance = budget_tolerance(traj, c_scheme);
    double cum = 0.0;
    rep.max_violation = 0.0;
    for (std::size_t k = 0; k < traj.steps.size(); ++k) {
        cum += traj.steps[k].dissipation;
        const double v = traj.steps[k].energy + cum - rep.e0;
        if (k == 0 || v > rep.max_violation) {
            rep.max_violation = v;
            rep.worst_step = k;
            rep.worst_time = traj.steps[k].t;
        }
    }
    rep.passed = rep.max_violation <= rep.tolerance;
    return rep;
}

// ---------------------------------------------------------------------------
// Mean of c

double mean_c_exact(const SimParams& prm, double mass_rho0, double mean_c0, double t) {
    if (!(prm.beta > 0.0)) fail(ErrorCode::invalid_argument, "mean_c_exact needs beta > 0");
    return mass_rho0 + (mean_c0 - mass_rho0) * std::exp(-(prm.alpha / prm.beta) * t);
}

nlohmann::json MeanCReport::to_json() const {
    return {{"passed", passed},
            {"max_rel_err_discrete", max_rel_err_discrete},
            {"max_rel_err_continuum", max_rel_err_continuum},
            {"continuum_tolerance", continuum_tolerance},
            {"frames", frames}};
}

MeanCReport mean_c_check(const Trajectory& traj, double rel_tol) {
    if (traj.system != System::relaxed)
        fail(ErrorCode::invalid_argument, "mean-of-c check needs a relaxed trajectory");
    const auto& p = traj.params;
    const Grid1D& g = p.grid;
    MeanCReport rep;
    const double m0 = integrate(g, traj.frames[0].rho);
    const double c0 = integrate(g, traj.frames[0].c);
    double dt_max = 0.0;
    for (const auto& s : traj.steps) dt_max = std::max(dt_max, s.dt);
    const double lam = p.alpha / p.beta;
    const double scale = std::max(std::abs(m0), 1e-300);
    rep.continuum_tolerance = std::abs(c0 - m0) * std::min(1.0, lam * dt_max) / scale + 1e-12;

    bool ok = true;
    auto compare = [&](const SimState& f, double phi) {
        const double num = integrate(g, f.c);
        const double e_disc = std::abs(num - phi) / std::max(std::abs(phi), 1e-300);
        const double exact = mean_c_exact(p, m0, c0, f.time);
        const double e_cont = std::abs(num - exact) / scale;
        rep.max_rel_err_discrete = std::max(rep.max_rel_err_discrete, e_disc);
        rep.max_rel_err_continuum = std::max(rep.max_rel_err_continuum, e_cont);
        if (e_disc > rel_tol || e_cont > rep.continuum_tolerance) ok = false;
        ++rep.frames;
    };
    double phi = c0;
    std::size_t j = 0;
    const double eps = 1e-12 * p.t_end;
    while (j < traj.frames.size() && traj.frames[j].time <= eps) compare(traj.frames[j++], phi);
    for (const auto& s : traj.steps) {
        phi = hydro::mean_c_update(p, phi, s.mass, s.dt);
        while (j < traj.frames.size() && std::abs(traj.frames[j].time - s.t) <= eps)
            compare(traj.frames[j++], phi);
    }
    rep.passed = ok && j == traj.frames.size();
    return rep;
}

// ---------------------------------------------------------------------------
// Relative energy

nlohmann::json RelEnergyReport::to_json() const {
    return {{"kinetic", kinetic},   {"bregman", bregman}, {"coupling", coupling},
            {"gradient", gradient}, {"total", total}};
}

RelEnergyReport relative_energy(const SimState& s, std::span<const double> ref_rho,
                                std::span<const double> ref_u, std::span<const double> ref_c,
                                const SimParams& prm) {
    const Grid1D& g = prm.grid;
    const std::size_t n = s.size();
    if (ref_rho.size() != n || ref_u.size() != n || ref_c.size() != n)
        fail(ErrorCode::invalid_argument, "relative_energy: reference size mismatch");
    for (double r : ref_rho)
        if (!(r > 0.0)) fail(ErrorCode::domain, "relative_energy needs a positive reference density");
    const Field u = hydro::velocity(prm, s.rho, s.mom);
    Field kin(n), breg(n), coup(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double du = u[i] - ref_u[i];
        kin[i] = 0.5 * s.rho[i] * du * du;
        breg[i] = relative_H(prm.model, s.rho[i], ref_rho[i]);
        const double d = (s.rho[i] - ref_rho[i]) - (s.c[i] - ref_c[i]);
        coup[i] = d * d;
    }
    RelEnergyReport r;
    r.kinetic = integrate(g, kin);
    r.bregman = integrate(g, breg);
    r.coupling = 0.5 * prm.alpha * integrate(g, coup);
    r.gradient = 0.5 * prm.kappa * grad_norm_sq(g, difference(s.c, ref_c), kC);
    r.total = r.kinetic + r.bregman + r.coupling + r.gradient;
    return r;
}

nlohmann::json RemainderSeries::to_json() const {
    nlohmann::json terms_j = nlohmann::json::object();
    for (std::size_t i = 0; i < terms.size(); ++i) terms_j[terms[i]] = cumulative[i];
    nlohmann::json parts_j = nlohmann::json::object();
    for (std::size_t i = 0; i < part_names.size(); ++i) parts_j[part_names[i]] = parts[i];
    return {{"name", name},
            {"times", times},
            {"terms", terms_j},
            {"parts", parts_j},
            {"relative_energy", rel_energy},
            {"lhs", lhs},
            {"rhs", rhs},
            {"tolerance", tolerance},
            {"max_excess", max_excess},
            {"passed", passed}};
}

RemainderSeries remainders_prop31(const Trajectory& traj, const Trajectory& ref,
                                  double c_scheme) {
    if (traj.system != System::relaxed || ref.system != System::relaxed)
        fail(ErrorCode::invalid_argument, "relaxed-reference audit needs a relaxed trajectory and a relaxed reference");
    const RefFrames rf = reference_frames(traj, ref);
    const auto& p = traj.params;
    const Grid1D& g = p.grid;
    const auto& model = p.model;
    const double nu = p.nu_eff(), al = p.alpha, ka = p.kappa;
    const std::size_t K = traj.frames.size();
    const std::size_t n = g.n_cells;
    const std::vector<double> t = traj.frame_times();

    std::vector<const Field*> pr, pU, pC;
    for (std::size_t k = 0; k < K; ++k) {
        pr.push_back(&rf.r[k]);
        pU.push_back(&rf.U[k]);
        pC.push_back(&rf.C[k]);
    }

    RemainderSeries s;
    s.name = "relative energy inequality (relaxed reference)";
    s.times = t;
    s.terms = {"R1", "R2", "R3", "R4"};
    s.cumulative.assign(4, std::vector<double>(K, 0.0));
    s.part_names = {"R1.convective"};
    s.parts.assign(1, std::vector<double>(K, 0.0));
    s.lhs.assign(K, 0.0);
    s.tolerance = budget_tolerance(traj, c_scheme);

    struct Sample {
        std::array<double, 4> terms{};
        double conv = 0.0;
        double diss = 0.0;
    };
    auto sample = [&](std::size_t k, const Field& ct) {
        const SimState& st = traj.frames[k];
        const Field& r = rf.r[k];
        const Field& U = rf.U[k];
        const Field& C = rf.C[k];
        const Field u = hydro::velocity(p, st.rho, st.mom);
        const Field r_t = time_derivative(t, pr, k);
        const Field U_t = time_derivative(t, pU, k);
        const Field C_t = time_derivative(t, pC, k);
        const Field u_x = ddx(g, u, kMom);
        const Field U_x = ddx(g, U, kMom);
        const Field r_x = ddx(g, r, kRho);
        const Field c_x = ddx(g, st.c, kC);
        const Field rC_x = ddx(g, difference(r, C), kC);
        const Field c_xx = laplacian(g, st.c, kC);
        const Field C_xx = laplacian(g, C, kC);

        // nu U_x (U_x - u_x) on faces, like the dissipation it pairs with.
        const Field fU = face_gradient(g, U, kMom);
        const Field fu = face_gradient(g, u, kMom);
        Field visc(fU.size());
        for (std::size_t f = 0; f < fU.size(); ++f) visc[f] = nu * fU[f] * (fU[f] - fu[f]);
        const double visc_term = integrate_faces(g, visc, kMom);

        Field i1(n), i2(n), i3(n), i4(n), conv(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double rho = st.rho[i];
            const double dU = U[i] - u[i];
            const double Hpp = model.h.derivative(r[i]) / r[i];  // H''(r) = h'(r)/r
            conv[i] = -rho * dU * U_x[i] * dU;
            i1[i] = rho * (U_t[i] + U[i] * U_x[i]) * dU + conv[i] +
                    model.q.value(rho) * (u_x[i] - U_x[i]) +
                    (model.h.value(r[i]) - model.h.value(rho)) * U_x[i] +
                    (r[i] - rho) * Hpp * r_t[i] + (r[i] * U[i] - rho * u[i]) * Hpp * r_x[i];
            i2[i] = -(0.5 * al * rho * rho * U_x[i] + al * rho * c_x[i] * U[i] +
                      al * rho * rC_x[i] * u[i]);
            i3[i] = al * ((st.c[i] - rho) - (C[i] - r[i])) * r_t[i];
            const double Ac = ka * c_xx[i] - al * (st.c[i] - rho);
            const double AC = ka * C_xx[i] - al * (C[i] - r[i]);
            i4[i] = Ac * C_t[i] - AC * C_t[i] + AC * ct[i];
        }
        Sample out;
        out.terms = {integrate(g, i1) + visc_term, integrate(g, i2),
                                           integrate(g, i3), integrate(g, i4)};
        out.conv = integrate(g, conv);
        out.diss = dissipation_gap(g, p, u, U, ct);
        return out;
    };

    double cum_diss = 0.0;
    const double e_rel0 = relative_energy(traj.frames[0], rf.r[0], rf.U[0], rf.C[0], p).total;
    s.rel_energy.push_back(e_rel0);
    for (std::size_t k = 1; k < K; ++k) {
        const Field ct = interval_rate(traj, k);
        const Sample a = sample(k - 1, ct);
        const Sample b = sample(k, ct);
        for (int j = 0; j < 4; ++j)
            s.cumulative[j][k] = s.cumulative[j][k - 1] + trapezoid_step(t[k - 1], t[k], a.terms[j], b.terms[j]);
        s.parts[0][k] = s.parts[0][k - 1] + trapezoid_step(t[k - 1], t[k], a.conv, b.conv);
        cum_diss += trapezoid_step(t[k - 1], t[k], a.diss, b.diss);
        const double e_rel = relative_energy(traj.frames[k], rf.r[k], rf.U[k], rf.C[k], p).total;
        s.rel_energy.push_back(e_rel);
        s.lhs[k] = (e_rel - e_rel0) + cum_diss;
    }
    finish_audit(s);
    return s;
}

RemainderSeries remainders_prop51(const Trajectory& traj, const Trajectory& nsk_ref,
                                  double c_scheme) {
    if (traj.system != System::relaxed || nsk_ref.system != System::nsk)
        fail(ErrorCode::invalid_argument, "NSK-reference audit needs a relaxed trajectory and an NSK reference");
    const RefFrames rf = reference_frames(traj, nsk_ref);
    const auto& p = traj.params;
    const Grid1D& g = p.grid;
    const auto& model = p.model;
    const double nu = p.nu_eff(), al = p.alpha, ka = p.kappa, be = p.beta;
    const std::size_t K = traj.frames.size();
    const std::size_t n = g.n_cells;
    const std::vector<double> t = traj.frame_times();

    RemainderSeries s;
    s.name = "relative energy inequality (NSK reference, C = r)";
    s.times = t;
    s.terms = {"R_NSE", "J1", "J2", "J3", "J4", "J5", "J6", "J7"};
    s.cumulative.assign(8, std::vector<double>(K, 0.0));
    s.lhs.assign(K, 0.0);
    s.tolerance = budget_tolerance(traj, c_scheme);

    struct Sample {
        std::array<double, 8> terms{};
        double diss = 0.0;
    };
    auto sample = [&](std::size_t k, const Field& ct) {
        const SimState& st = traj.frames[k];
        const Field& r = rf.r[k];
        const Field& U = rf.U[k];
        const Field& c = st.c;
        const Field u = hydro::velocity(p, st.rho, st.mom);
        const Field u_x = ddx(g, u, kMom);
        const Field U_x = ddx(g, U, kMom);
        const Field U_xx = laplacian(g, U, kMom);
        const Field r_x = ddx(g, r, kRho);
        const Field lap_r = laplacian(g, r, kRho);
        const Field glap_r = grad_laplacian(g, r, kRho);
        const Field rc = difference(r, c);
        const Field rc_x = ddx(g, rc, kC);
        const Field rc_xx = laplacian(g, rc, kC);
        const Field cU_x = ddx(g, times_field(c, U), kMom);

        std::array<Field, 8> I;
        for (auto& f : I) f.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double rho = st.rho[i];
            const double dU = U[i] - u[i];
            const double q_r_x = model.q.derivative(r[i]) * r_x[i];
            I[0][i] = (rho / r[i] - 1.0) * (nu * U_xx[i] - q_r_x) * dU - rho * dU * U_x[i] * dU +
                      (model.h.value(r[i]) - model.h.value(rho) -
                       model.h.derivative(r[i]) * (r[i] - rho)) *
                          U_x[i];
            I[1][i] = (model.q.value(rho) - model.q.value(r[i])) * (u_x[i] - U_x[i]);
            I[2][i] = ka * (rc[i] * rc_xx[i] + 0.5 * rc_x[i] * rc_x[i]) * U_x[i];
            I[3][i] = -ka * rc_x[i] * rc_x[i] * U_x[i];
            I[4][i] = -ka * (c[i] - rho) * U[i] * glap_r[i];
            I[5][i] = -0.5 * al * (rho - c[i]) * (rho - c[i]) * U_x[i];
            I[6][i] = -be * ct[i] * cU_x[i];
            I[7][i] = ka * lap_r[i] * ct[i] - ka * rho * u[i] * glap_r[i];
        }
        Sample out;
        for (int j = 0; j < 8; ++j) out.terms[j] = integrate(g, I[j]);
        out.diss = dissipation_gap(g, p, u, U, ct);
        return out;
    };

    double cum_diss = 0.0;
    const double e_rel0 = relative_energy(traj.frames[0], rf.r[0], rf.U[0], rf.r[0], p).total;
    s.rel_energy.push_back(e_rel0);
    for (std::size_t k = 1; k < K; ++k) {
        const Field ct = interval_rate(traj, k);
        const Sample a = sample(k - 1, ct);
        const Sample b = sample(k, ct);
        for (int j = 0; j < 8; ++j)
            s.cumulative[j][k] = s.cumulative[j][k - 1] + trapezoid_step(t[k - 1], t[k], a.terms[j], b.terms[j]);
        cum_diss += trapezoid_step(t[k - 1], t[k], a.diss, b.diss);
        const double e_rel = relative_energy(traj.frames[k], rf.r[k], rf.U[k], rf.r[k], p).total;
        s.rel_energy.push_back(e_rel);
        s.lhs[k] = (e_rel - e_rel0) + cum_diss;
    }
    finish_audit(s);
    return s;
}

// ---------------------------------------------------------------------------
// Poincare gap

double poincare_constant(const Grid1D& g) {
    const double N = static_cast<double>(g.n_cells);
    const double pi = std::numbers::pi;
    return g.periodic() ? g.dx() / (2.0 * std::sin(pi / N)) : g.dx() / (2.0 * std::sin(pi / (2.0 * N)));
}

PoincareGap poincare_gap(const SimState& s, std::span<const double> ref_rho,
                         std::span<const double> dtc, const SimParams& prm, double e_alpha) {
    const Grid1D& g = prm.grid;
    const Field d = difference(ref_rho, s.c);
    PoincareGap out;
    out.lhs = std::sqrt(l2_norm_sq(g, d));
    out.rhs = poincare_constant(g) * std::sqrt(grad_norm_sq(g, d, kC)) +
              prm.beta / prm.alpha * std::sqrt(l2_norm_sq(g, dtc)) +
              std::abs(e_alpha) * std::sqrt(g.length);
    return out;
}

nlohmann::json PoincareReport::to_json() const {
    return {{"frames", frames}, {"violations", violations}, {"min_margin", min_margin}, {"passed", passed}};
}

PoincareReport poincare_check(const Trajectory& traj, const Trajectory* ref) {
    if (traj.system != System::relaxed)
        fail(ErrorCode::invalid_argument, "Poincare check needs a relaxed trajectory");
    const auto& p = traj.params;
    const Grid1D& g = p.grid;
    std::vector<Field> r;
    if (ref) {
        check_same_times(traj, *ref);
        for (const auto& f : ref->frames) r.push_back(onto_grid(g, ref->params.grid, f.rho));
    } else {
        for (const auto& f : traj.frames) r.push_back(f.rho);
    }
    const double e_alpha = mean(g, difference(traj.frames[0].rho, r[0]));
    PoincareReport rep;
    rep.min_margin = std::numeric_limits<double>::infinity();
    // No step precedes frame 0; its c_t is the rate of the continuous equation.
    const SimState& s0 = traj.frames[0];
    const Field lap0 = laplacian(g, s0.c, kC);
    Field rate0(s0.size());
    for (std::size_t i = 0; i < s0.size(); ++i)
        rate0[i] = (p.kappa * lap0[i] - p.alpha * (s0.c[i] - s0.rho[i])) / p.beta;
    for (std::size_t k = 0; k < traj.frames.size(); ++k) {
        const PoincareGap gap =
            poincare_gap(traj.frames[k], r[k], k == 0 ? rate0 : traj.dtc[k], p, e_alpha);
        ++rep.frames;
        // Roundoff slack: the mean part holds with equality for the discrete scheme.
        if (gap.lhs > gap.rhs * (1.0 + 1e-10) + 1e-14) ++rep.violations;
        rep.min_margin = std::min(rep.min_margin, (gap.rhs - gap.lhs) / std::max(gap.rhs, 1e-300));
    }
    rep.passed = rep.violations == 0;
    return rep;
}

nlohmann::json MeanGapReport::to_json() const {
    return {{"times", times}, {"gap", gap}, {"max_abs", max_abs}, {"passed", passed}};
}

MeanGapReport ws_mean_check(const Trajectory& traj, const Trajectory& ref, double tol) {
    if (traj.system != System::relaxed || ref.system != System::relaxed)
        fail(ErrorCode::invalid_argument, "mean check compares two relaxed trajectories");
    const RefFrames rf = reference_frames(traj, ref);
    const Grid1D& g = traj.params.grid;
    MeanGapReport rep;
    for (std::size_t k = 0; k < traj.frames.size(); ++k) {
        rep.times.push_back(traj.frames[k].time);
        const double d = integrate(g, difference(traj.frames[k].c, rf.C[k]));
        rep.gap.push_back(d);
        rep.max_abs = std::max(rep.max_abs, std::abs(d));
    }
    rep.passed = rep.max_abs <= tol;
    return rep;
}

// ---------------------------------------------------------------------------
// Norm bundle

const std::array<const char*, 6>& NormBundle::names() {
    static const std::array<const char*, 6> n = {"kinetic_sup", "density_sup",  "coupling_sup",
                                                 "order_h1_sup", "velocity_h1", "beta_ct"};
    return n;
}

double NormBundle::sum() const {
    double s = 0.0;
    for (double v : values()) s += v;
    return s;
}

nlohmann::json NormBundle::to_json() const {
    nlohmann::json j;
    const auto v = values();
    for (std::size_t i = 0; i < v.size(); ++i) j[names()[i]] = v[i];
    j["sum"] = sum();
    j["e_alpha"] = e_alpha;
    j["energy0"] = energy0;
    j["rate_s"] = rate_s;
    j["alpha"] = alpha;
    j["beta"] = beta;
    return j;
}

double rate_s(double alpha, double beta, double e_alpha, double energy0) {
    return 1.0 / alpha + beta + e_alpha * e_alpha + energy0;
}

NormBundle norm_bundle(const Trajectory& relaxed, const Trajectory& ref) {
    if (relaxed.system != System::relaxed)
        fail(ErrorCode::invalid_argument, "norm bundle needs a relaxed trajectory");
    const RefFrames rf = reference_frames(relaxed, ref);
    const auto& p = relaxed.params;
    const Grid1D& g = p.grid;
    NormBundle nb;
    nb.alpha = p.alpha;
    nb.beta = p.beta;
    double prev_vel = 0.0;
    for (std::size_t k = 0; k < relaxed.frames.size(); ++k) {
        const SimState& st = relaxed.frames[k];
        const Field& r = rf.r[k];
        const Field& U = rf.U[k];
        const Field u = hydro::velocity(p, st.rho, st.mom);
        const Field du = difference(u, U);
        Field kin(du.size());
        for (std::size_t i = 0; i < du.size(); ++i) kin[i] = st.rho[i] * du[i] * du[i];
        nb.kinetic_sup = std::max(nb.kinetic_sup, integrate(g, kin));
        nb.density_sup = std::max(nb.density_sup, l2_norm_sq(g, difference(st.rho, r)));
        nb.coupling_sup = std::max(nb.coupling_sup, p.alpha * l2_norm_sq(g, difference(st.rho, st.c)));
        nb.order_h1_sup = std::max(nb.order_h1_sup, h1_norm_sq(g, difference(st.c, r), kC));
        const double vel = h1_norm_sq(g, du, kMom);
        if (k > 0)
            nb.velocity_h1 += trapezoid_step(relaxed.frames[k - 1].time, st.time, prev_vel, vel);
        prev_vel = vel;
    }
    // Integrated step by step in the solver: frames do not resolve the initial layer of c.
    nb.beta_ct = relaxed.cum_beta.back();
    nb.e_alpha = mean(g, difference(relaxed.frames[0].rho, rf.r[0]));
    nb.energy0 = relative_energy(relaxed.frames[0], rf.r[0], rf.U[0], rf.r[0], p).total;
    nb.rate_s = rate_s(p.alpha, p.beta, nb.e_alpha, nb.energy0);
    return nb;
}

nlohmann::json OrderFit::to_json() const {
    return {{"slope", slope}, {"stderr", stderr_slope}, {"intercept", intercept}, {"points", points}};
}

OrderFit fit_order(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        fail(ErrorCode::invalid_argument, "fit_order needs >= 2 matching points");
    const std::size_t n = xs.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
            fail(ErrorCode::domain, "fit_order needs positive data for the log-log fit");
        lx[i] = std::log(xs[i]);
        ly[i] = std::log(ys[i]);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx == 0.0) fail(ErrorCode::domain, "fit_order: all abscissae coincide");
    OrderFit f;
    f.points = n;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    if (n > 2) {
        double ssr = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = ly[i] - (f.intercept + f.slope * lx[i]);
            ssr += e * e;
        }
        f.stderr_slope = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
    }
    return f;
}

Field onto_grid(const Grid1D& target, const Grid1D& source, std::span<const double> f) {
    if (source.n_cells == target.n_cells) return Field(f.begin(), f.end());
    if (source.n_cells % target.n_cells != 0)
        fail(ErrorCode::invalid_argument, "reference grid is not an integer refinement");
    return restrict_by(f, source.n_cells / target.n_cells);
}

}  // namespace nskr
