// Command-line front end; talks to the library only through the C API.
#include <cstdio>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "nskrelax/nskrelax.h"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitViolation = 2;

int runtime_error(int status) {
    std::fprintf(stderr, "error (%s): %s\n", nskr_status_string(status), nskr_last_error());
    return kExitRuntime;
}

// Prints the criteria, writes the report files, frees the report.
int finish(nskr_report* report, const std::string& outdir) {
    const char* json = nullptr;
    nskr_report_json(report, &json);
    const auto j = nlohmann::json::parse(json);
    for (const auto& w : j.at("warnings")) std::printf("warning: %s\n", w.get<std::string>().c_str());
    for (const auto& c : j.at("criteria")) {
        const auto num = [](const nlohmann::json& v) { return v.is_null() ? std::string("nan") : v.dump(); };
        const std::string rel = c.at("relation").get<std::string>();
        const std::string rhs = rel.rfind("in ", 0) == 0 ? rel : rel + " " + num(c.at("threshold"));
        std::printf("[%s] %s: %s %s\n", c.at("passed").get<bool>() ? "PASS" : "FAIL",
                    c.at("name").get<std::string>().c_str(), num(c.at("value")).c_str(), rhs.c_str());
    }
    int st = NSKR_OK;
    if (!outdir.empty()) {
        st = nskr_report_write(report, outdir.c_str());
        if (st == NSKR_OK) std::printf("reports written to %s\n", outdir.c_str());
    }
    int passed = 0;
    nskr_report_passed(report, &passed);
    nskr_report_free(report);
    if (st != NSKR_OK) return runtime_error(st);
    std::printf("%s\n", passed ? "all criteria passed" : "criteria violated");
    return passed ? kExitPass : kExitViolation;
}

struct ConfigHandle {
    nskr_config* cfg = nullptr;
    ~ConfigHandle() { nskr_config_free(cfg); }
};

std::string resolve_outdir(nskr_config* cfg, const std::string& override_dir) {
    if (!override_dir.empty()) return override_dir;
    const char* d = nullptr;
    nskr_config_output_dir(cfg, &d);
    return d ? d : "";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Relaxation of the Navier-Stokes-Korteweg system: solvers, audits and experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(nskr_version()));

    std::string config, system, outdir, save_traj, preset = "figure1", traj_path, ref_path;
    double c_scheme = -1.0;

    auto* sim = app.add_subcommand("simulate", "run one solver from a TOML config");
    sim->add_option("--config", config, "config file")->required()->check(CLI::ExistingFile);
    sim->add_option("--system", system, "override the system")->check(CLI::IsMember({"relaxed", "nsk"}));
    sim->add_option("--out", outdir, "report directory (default: config output_dir)");
    sim->add_option("--save-trajectory", save_traj, "write the binary trajectory here");

    auto* sweep = app.add_subcommand("sweep-alpha", "relaxation-rate experiment over the alpha list");
    sweep->add_option("--config", config, "config file")->required()->check(CLI::ExistingFile);
    sweep->add_option("--out", outdir, "report directory");

    auto* ws = app.add_subcommand("weak-strong", "perturbation stability study");
    ws->add_option("--config", config, "config file")->required()->check(CLI::ExistingFile);
    ws->add_option("--out", outdir, "report directory");

    auto* th = app.add_subcommand("thermo-check", "pressure identities, spinodal and convexity");
    th->add_option("--preset", preset, "pressure preset")->check(CLI::IsMember({"powerlaw", "figure1"}));
    th->add_option("--out", outdir, "report directory");

    auto* au = app.add_subcommand("energy-audit", "energy, Poincare and mean checks on a saved trajectory");
    au->add_option("--trajectory", traj_path, "trajectory file")->required()->check(CLI::ExistingFile);
    au->add_option("--reference", ref_path, "reference trajectory")->check(CLI::ExistingFile);
    au->add_option("--c-scheme", c_scheme, "C_scheme of the budget tolerance (default 10)");
    au->add_option("--out", outdir, "report directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitRuntime;
    }

    int st = NSKR_OK;
    nskr_report* report = nullptr;

    if (*th) {
        if ((st = nskr_thermo_check(preset.c_str(), &report)) != NSKR_OK) return runtime_error(st);
        return finish(report, outdir);
    }
    if (*au) {
        nskr_trajectory* t = nullptr;
        nskr_trajectory* r = nullptr;
        if ((st = nskr_trajectory_load(traj_path.c_str(), &t)) != NSKR_OK) return runtime_error(st);
        if (!ref_path.empty() && (st = nskr_trajectory_load(ref_path.c_str(), &r)) != NSKR_OK) {
            nskr_trajectory_free(t);
            return runtime_error(st);
        }
        st = nskr_energy_audit(t, r, c_scheme, &report);
        nskr_trajectory_free(t);
        nskr_trajectory_free(r);
        if (st != NSKR_OK) return runtime_error(st);
        return finish(report, outdir);
    }

    ConfigHandle h;
    if ((st = nskr_config_load(config.c_str(), &h.cfg)) != NSKR_OK) return runtime_error(st);
    const std::string dir = resolve_outdir(h.cfg, outdir);
    if (*sim) {
        if (!system.empty() && (st = nskr_config_set_system(h.cfg, system.c_str())) != NSKR_OK)
            return runtime_error(st);
        nskr_trajectory* t = nullptr;
        if ((st = nskr_simulate(h.cfg, &report, &t)) != NSKR_OK) return runtime_error(st);
        if (!save_traj.empty()) {
            st = nskr_trajectory_save(t, save_traj.c_str());
            if (st != NSKR_OK) {
                nskr_trajectory_free(t);
                nskr_report_free(report);
                return runtime_error(st);
            }
            std::printf("trajectory written to %s\n", save_traj.c_str());
        }
        nskr_trajectory_free(t);
    } else if (*sweep) {
        if ((st = nskr_sweep_alpha(h.cfg, &report)) != NSKR_OK) return runtime_error(st);
    } else if (*ws) {
        if ((st = nskr_weak_strong(h.cfg, &report)) != NSKR_OK) return runtime_error(st);
    }
    return finish(report, dir);
}
