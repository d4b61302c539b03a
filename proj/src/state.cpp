#include "state.hpp"

#include <cmath>

#include "error.hpp"

namespace nskr {

System parse_system(const std::string& s) {
    if (s == "relaxed") return System::relaxed;
    if (s == "nsk") return System::nsk;
    fail(ErrorCode::config, "unknown system '" + s + "' (relaxed|nsk)");
}

std::string to_string(System s) { return s == System::relaxed ? "relaxed" : "nsk"; }

CScheme parse_c_scheme(const std::string& s) {
    if (s == "backward_euler") return CScheme::backward_euler;
    if (s == "tr_bdf2") return CScheme::tr_bdf2;
    fail(ErrorCode::config, "unknown c_scheme '" + s + "' (backward_euler|tr_bdf2)");
}

std::string to_string(CScheme s) { return s == CScheme::backward_euler ? "backward_euler" : "tr_bdf2"; }

Field SimState::velocity() const {
    Field u(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) u[i] = mom[i] / rho[i];
    return u;
}

void SimParams::validate(System system) const {
    auto need = [](bool ok, const std::string& what) {
        if (!ok) fail(ErrorCode::invalid_argument, what);
    };
    need(mu > 0.0 && lambda > 0.0, "viscosities mu and lambda must be positive");
    need(nu_eff() > 0.0, "nu_eff must be positive");
    need(kappa > 0.0, "kappa must be positive");
    need(cfl > 0.0 && cfl <= 1.0, "cfl must lie in (0, 1]");
    need(t_end > 0.0, "t_end must be positive");
    need(c_disp > 0.0, "c_disp must be positive");
    need(rho_floor > 0.0, "rho_floor must be positive");
    need(grid.n_cells >= 8 && grid.length > 0.0, "grid needs >= 8 cells and positive length");
    if (system == System::relaxed) {
        need(alpha > 0.0, "alpha must be positive");
        need(beta > 0.0, "beta must be positive for the parabolic relaxation");
    }
    double prev = 0.0;
    for (double t : frame_times) {
        need(t > prev && t <= t_end * (1.0 + 1e-14), "frame_times must increase within (0, t_end]");
        prev = t;
    }
}

nlohmann::json SimParams::to_json() const {
    return {{"mu", mu},
            {"lambda", lambda},
            {"nu_eff", nu_eff()},
            {"kappa", kappa},
            {"alpha", alpha},
            {"beta", beta},
            {"cfl", cfl},
            {"t_end", t_end},
            {"c_disp", c_disp},
            {"snapshot_interval", snapshot_interval},
            {"frame_times", frame_times},
            {"fixed_dt", fixed_dt},
            {"rho_floor", rho_floor},
            {"c_scheme", to_string(c_scheme)},
            {"model", model_to_json(model)},
            {"grid",
             {{"length", grid.length}, {"cells", grid.n_cells}, {"bc", to_string(grid.bc)}}}};
}

SimParams SimParams::from_json(const nlohmann::json& j) {
    try {
        SimParams p;
        p.mu = j.at("mu").get<double>();
        p.lambda = j.at("lambda").get<double>();
        p.kappa = j.at("kappa").get<double>();
        p.alpha = j.at("alpha").get<double>();
        p.beta = j.at("beta").get<double>();
        p.cfl = j.at("cfl").get<double>();
        p.t_end = j.at("t_end").get<double>();
        p.c_disp = j.at("c_disp").get<double>();
        p.snapshot_interval = j.at("snapshot_interval").get<double>();
        p.frame_times = j.value("frame_times", std::vector<double>{});
        p.fixed_dt = j.at("fixed_dt").get<double>();
        p.rho_floor = j.at("rho_floor").get<double>();
        p.c_scheme = parse_c_scheme(j.value("c_scheme", std::string("backward_euler")));
        p.model = model_from_json(j.at("model"));
        const auto& g = j.at("grid");
        p.grid = Grid1D::make(g.at("length").get<double>(), g.at("cells").get<std::size_t>(),
                              parse_bc(g.at("bc").get<std::string>()));
        return p;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::config, std::string("malformed parameter block: ") + e.what());
    }
}

std::vector<double> Trajectory::frame_times() const {
    std::vector<double> t;
    t.reserve(frames.size());
    for (const auto& f : frames) t.push_back(f.time);
    return t;
}

}  // namespace nskr
