#include "nskrelax/nskrelax.h"

#include <cstring>
#include <exception>
#include <string>

#include "error.hpp"
#include "harness.hpp"
#include "io.hpp"

struct nskr_config {
    nskr::ExperimentConfig cfg;
    std::string json;
};

struct nskr_trajectory {
    nskr::Trajectory traj;
};

struct nskr_report {
    nskr::Report report;
    std::string json;
};

namespace {

thread_local std::string g_last_error;

int fail_with(int code, const std::string& msg) {
    g_last_error = msg;
    return code;
}

template <class F>
int guarded(F&& f) {
    try {
        g_last_error.clear();
        f();
        return NSKR_OK;
    } catch (const nskr::Error& e) {
        return fail_with(static_cast<int>(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail_with(NSKR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail_with(NSKR_INTERNAL, e.what());
    } catch (...) {
        return fail_with(NSKR_INTERNAL, "unknown exception");
    }
}

#define NSKR_REQUIRE(cond, what) \
    if (!(cond)) return fail_with(NSKR_INVALID_ARGUMENT, what)

nskr_report* wrap(nskr::Report r) {
    auto* out = new nskr_report{std::move(r), {}};
    out->json = out->report.to_json().dump(2);
    return out;
}

}  // namespace

extern "C" {

const char* nskr_version(void) { return "1.0.0"; }

const char* nskr_status_string(int status) {
    switch (status) {
        case NSKR_OK: return "ok";
        case NSKR_INVALID_ARGUMENT: return "invalid argument";
        case NSKR_DOMAIN: return "domain error";
        case NSKR_NUMERIC: return "numerical failure";
        case NSKR_IO: return "i/o error";
        case NSKR_CONFIG: return "configuration error";
        case NSKR_DIVERGENCE: return "divergence";
        case NSKR_CERTIFICATION: return "certification failure";
        case NSKR_MODEL_SHAPE: return "pressure model shape error";
        case NSKR_STAGNATION: return "time step stagnation";
        case NSKR_INTERNAL: return "internal error";
        default: return "unknown status";
    }
}

const char* nskr_last_error(void) { return g_last_error.c_str(); }

int nskr_config_load(const char* path, nskr_config** out) {
    NSKR_REQUIRE(path && out, "nskr_config_load: null argument");
    *out = nullptr;
    return guarded([&] {
        auto* c = new nskr_config{nskr::load_config(path), {}};
        c->json = c->cfg.to_json().dump(2);
        *out = c;
    });
}

int nskr_config_parse(const char* text, nskr_config** out) {
    NSKR_REQUIRE(text && out, "nskr_config_parse: null argument");
    *out = nullptr;
    return guarded([&] {
        auto* c = new nskr_config{nskr::parse_config(text), {}};
        c->json = c->cfg.to_json().dump(2);
        *out = c;
    });
}

void nskr_config_free(nskr_config* cfg) { delete cfg; }

int nskr_config_set_system(nskr_config* cfg, const char* system) {
    NSKR_REQUIRE(cfg && system, "nskr_config_set_system: null argument");
    return guarded([&] {
        cfg->cfg.system = nskr::parse_system(system);
        cfg->json = cfg->cfg.to_json().dump(2);
    });
}

int nskr_config_set_output_dir(nskr_config* cfg, const char* dir) {
    NSKR_REQUIRE(cfg && dir, "nskr_config_set_output_dir: null argument");
    cfg->cfg.output_dir = dir;
    return NSKR_OK;
}

int nskr_config_output_dir(const nskr_config* cfg, const char** dir) {
    NSKR_REQUIRE(cfg && dir, "nskr_config_output_dir: null argument");
    *dir = cfg->cfg.output_dir.c_str();
    return NSKR_OK;
}

int nskr_config_json(const nskr_config* cfg, const char** json) {
    NSKR_REQUIRE(cfg && json, "nskr_config_json: null argument");
    *json = cfg->json.c_str();
    return NSKR_OK;
}

int nskr_simulate(const nskr_config* cfg, nskr_report** report, nskr_trajectory** traj) {
    NSKR_REQUIRE(cfg && report, "nskr_simulate: null argument");
    *report = nullptr;
    if (traj) *traj = nullptr;
    return guarded([&] {
        nskr::Trajectory t;
        nskr::Report r = nskr::simulate(cfg->cfg, &t);
        *report = wrap(std::move(r));
        if (traj) *traj = new nskr_trajectory{std::move(t)};
    });
}

int nskr_sweep_alpha(const nskr_config* cfg, nskr_report** report) {
    NSKR_REQUIRE(cfg && report, "nskr_sweep_alpha: null argument");
    *report = nullptr;
    return guarded([&] { *report = wrap(nskr::sweep_alpha(cfg->cfg)); });
}

int nskr_weak_strong(const nskr_config* cfg, nskr_report** report) {
    NSKR_REQUIRE(cfg && report, "nskr_weak_strong: null argument");
    *report = nullptr;
    return guarded([&] { *report = wrap(nskr::weak_strong_study(cfg->cfg)); });
}

int nskr_thermo_check(const char* preset, nskr_report** report) {
    NSKR_REQUIRE(preset && report, "nskr_thermo_check: null argument");
    *report = nullptr;
    return guarded([&] { *report = wrap(nskr::thermo_check(nskr::preset_by_name(preset))); });
}

int nskr_energy_audit(const nskr_trajectory* traj, const nskr_trajectory* ref, double c_scheme_constant,
                      nskr_report** report) {
    NSKR_REQUIRE(traj && report, "nskr_energy_audit: null argument");
    *report = nullptr;
    return guarded([&] {
        const double c = c_scheme_constant < 0.0 ? 10.0 : c_scheme_constant;
        *report = wrap(nskr::energy_audit(traj->traj, c, ref ? &ref->traj : nullptr));
    });
}

int nskr_report_passed(const nskr_report* report, int* passed) {
    NSKR_REQUIRE(report && passed, "nskr_report_passed: null argument");
    *passed = report->report.passed() ? 1 : 0;
    return NSKR_OK;
}

int nskr_report_json(const nskr_report* report, const char** json) {
    NSKR_REQUIRE(report && json, "nskr_report_json: null argument");
    *json = report->json.c_str();
    return NSKR_OK;
}

int nskr_report_write(const nskr_report* report, const char* dir) {
    NSKR_REQUIRE(report && dir, "nskr_report_write: null argument");
    return guarded([&] { nskr::emit_reports(report->report, dir); });
}

void nskr_report_free(nskr_report* report) { delete report; }

int nskr_trajectory_load(const char* path, nskr_trajectory** out) {
    NSKR_REQUIRE(path && out, "nskr_trajectory_load: null argument");
    *out = nullptr;
    return guarded([&] { *out = new nskr_trajectory{nskr::io::read_trajectory(path)}; });
}

int nskr_trajectory_save(const nskr_trajectory* traj, const char* path) {
    NSKR_REQUIRE(traj && path, "nskr_trajectory_save: null argument");
    return guarded([&] { nskr::io::write_trajectory(path, traj->traj); });
}

void nskr_trajectory_free(nskr_trajectory* traj) { delete traj; }

int nskr_trajectory_info(const nskr_trajectory* traj, size_t* n_cells, size_t* n_frames, int* is_relaxed) {
    NSKR_REQUIRE(traj, "nskr_trajectory_info: null trajectory");
    if (n_cells) *n_cells = traj->traj.params.grid.n_cells;
    if (n_frames) *n_frames = traj->traj.frames.size();
    if (is_relaxed) *is_relaxed = traj->traj.system == nskr::System::relaxed ? 1 : 0;
    return NSKR_OK;
}

int nskr_trajectory_frame(const nskr_trajectory* traj, size_t k, double* time, double* rho, double* mom,
                          double* c) {
    NSKR_REQUIRE(traj, "nskr_trajectory_frame: null trajectory");
    NSKR_REQUIRE(k < traj->traj.frames.size(), "nskr_trajectory_frame: frame index out of range");
    const auto& f = traj->traj.frames[k];
    NSKR_REQUIRE(!c || !f.c.empty(), "nskr_trajectory_frame: NSK frames carry no order parameter");
    if (time) *time = f.time;
    const std::size_t bytes = f.rho.size() * sizeof(double);
    if (rho) std::memcpy(rho, f.rho.data(), bytes);
    if (mom) std::memcpy(mom, f.mom.data(), bytes);
    if (c) std::memcpy(c, f.c.data(), bytes);
    return NSKR_OK;
}

}  // extern "C"
