#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "nskrelax/nskrelax.h"

namespace fs = std::filesystem;

namespace {

const char* kSmall = R"(
[experiment]
kind = "simulate"
output_dir = "capi_out"
[grid]
cells = 64
[time]
t_end = 0.02
snapshot_interval = 0.01
[initial]
profile = "bump"
velocity = 0.1
)";

nskr_config* parse_or_fail(const char* text) {
    nskr_config* cfg = nullptr;
    REQUIRE(nskr_config_parse(text, &cfg) == NSKR_OK);
    REQUIRE(cfg != nullptr);
    return cfg;
}

}  // namespace

TEST_CASE("status strings and the error slot") {
    CHECK(std::string(nskr_status_string(NSKR_OK)).size() > 0);
    CHECK(std::string(nskr_status_string(NSKR_CONFIG)) == "configuration error");
    CHECK(std::string(nskr_status_string(12345)) == "unknown status");
    CHECK(std::string(nskr_version()).size() > 0);

    nskr_config* cfg = nullptr;
    CHECK(nskr_config_parse("[physics]\nalpah = 1\n", &cfg) == NSKR_CONFIG);
    CHECK(cfg == nullptr);
    CHECK(std::string(nskr_last_error()).find("alpah") != std::string::npos);
    CHECK(nskr_config_parse(nullptr, &cfg) == NSKR_INVALID_ARGUMENT);
    CHECK(nskr_config_parse("", nullptr) == NSKR_INVALID_ARGUMENT);
    CHECK(nskr_config_load("/nonexistent/file.toml", &cfg) == NSKR_IO);

    cfg = parse_or_fail("");
    CHECK(std::string(nskr_last_error()).empty());
    CHECK(nskr_config_set_system(cfg, "euler") == NSKR_CONFIG);
    CHECK(nskr_config_set_system(cfg, "nsk") == NSKR_OK);
    const char* json = nullptr;
    REQUIRE(nskr_config_json(cfg, &json) == NSKR_OK);
    CHECK(nlohmann::json::parse(json).at("system") == "nsk");
    nskr_config_free(cfg);
    nskr_config_free(nullptr);
    nskr_report_free(nullptr);
    nskr_trajectory_free(nullptr);
}

TEST_CASE("simulate, save, load and read frames") {
    nskr_config* cfg = parse_or_fail(kSmall);
    const char* dir = nullptr;
    REQUIRE(nskr_config_output_dir(cfg, &dir) == NSKR_OK);
    CHECK(std::string(dir) == "capi_out");
    REQUIRE(nskr_config_set_output_dir(cfg, "elsewhere") == NSKR_OK);
    nskr_config_output_dir(cfg, &dir);
    CHECK(std::string(dir) == "elsewhere");

    nskr_report* rep = nullptr;
    nskr_trajectory* traj = nullptr;
    REQUIRE(nskr_simulate(cfg, &rep, &traj) == NSKR_OK);
    int passed = 0;
    REQUIRE(nskr_report_passed(rep, &passed) == NSKR_OK);
    CHECK(passed == 1);
    const char* rj = nullptr;
    REQUIRE(nskr_report_json(rep, &rj) == NSKR_OK);
    CHECK(nlohmann::json::parse(rj).at("kind") == "simulate");

    size_t n = 0, frames = 0;
    int relaxed = -1;
    REQUIRE(nskr_trajectory_info(traj, &n, &frames, &relaxed) == NSKR_OK);
    CHECK(n == 64);
    CHECK(frames == 3);
    CHECK(relaxed == 1);

    const fs::path file = fs::current_path() / "capi_traj.bin";
    REQUIRE(nskr_trajectory_save(traj, file.c_str()) == NSKR_OK);
    nskr_trajectory* back = nullptr;
    REQUIRE(nskr_trajectory_load(file.c_str(), &back) == NSKR_OK);
    std::vector<double> r1(n), m1(n), c1(n), r2(n), m2(n), c2(n);
    for (size_t k = 0; k < frames; ++k) {
        double t1 = -1, t2 = -2;
        REQUIRE(nskr_trajectory_frame(traj, k, &t1, r1.data(), m1.data(), c1.data()) == NSKR_OK);
        REQUIRE(nskr_trajectory_frame(back, k, &t2, r2.data(), m2.data(), c2.data()) == NSKR_OK);
        CHECK(t1 == t2);
        CHECK(r1 == r2);
        CHECK(m1 == m2);
        CHECK(c1 == c2);
    }
    CHECK(nskr_trajectory_frame(traj, frames, nullptr, nullptr, nullptr, nullptr) == NSKR_INVALID_ARGUMENT);
    CHECK(nskr_trajectory_frame(traj, 0, nullptr, r1.data(), nullptr, nullptr) == NSKR_OK);

    nskr_report* audit = nullptr;
    REQUIRE(nskr_energy_audit(back, nullptr, -1.0, &audit) == NSKR_OK);
    nskr_report_passed(audit, &passed);
    CHECK(passed == 1);
    REQUIRE(nskr_report_write(audit, "capi_audit") == NSKR_OK);
    CHECK(fs::exists("capi_audit/report.json"));
    CHECK(nskr_energy_audit(nullptr, nullptr, -1.0, &audit) == NSKR_INVALID_ARGUMENT);
    nskr_report_free(audit);

    // NSK run: c buffer must be absent
    REQUIRE(nskr_config_set_system(cfg, "nsk") == NSKR_OK);
    nskr_report* rep2 = nullptr;
    nskr_trajectory* nsk = nullptr;
    REQUIRE(nskr_simulate(cfg, &rep2, &nsk) == NSKR_OK);
    nskr_trajectory_info(nsk, &n, &frames, &relaxed);
    CHECK(relaxed == 0);
    CHECK(nskr_trajectory_frame(nsk, 0, nullptr, r1.data(), m1.data(), c1.data()) == NSKR_INVALID_ARGUMENT);
    CHECK(nskr_trajectory_frame(nsk, 0, nullptr, r1.data(), m1.data(), nullptr) == NSKR_OK);
    // the relaxed run audited against the NSK run as reference
    REQUIRE(nskr_energy_audit(traj, nsk, 10.0, &audit) == NSKR_OK);
    nskr_report_free(audit);

    nskr_report_free(rep2);
    nskr_trajectory_free(nsk);
    nskr_trajectory_free(back);
    nskr_trajectory_free(traj);
    nskr_report_free(rep);
    nskr_config_free(cfg);

    std::FILE* f = std::fopen("capi_garbage.bin", "wb");
    std::fputs("not a trajectory", f);
    std::fclose(f);
    CHECK(nskr_trajectory_load("capi_garbage.bin", &back) == NSKR_IO);
    CHECK(std::string(nskr_last_error()).size() > 0);
}

TEST_CASE("simulate without keeping the trajectory") {
    nskr_config* cfg = parse_or_fail(kSmall);
    nskr_report* rep = nullptr;
    CHECK(nskr_simulate(cfg, &rep, nullptr) == NSKR_OK);
    nskr_report_free(rep);
    CHECK(nskr_simulate(cfg, nullptr, nullptr) == NSKR_INVALID_ARGUMENT);
    nskr_config_free(cfg);
}

TEST_CASE("thermo check through the C API") {
    nskr_report* rep = nullptr;
    REQUIRE(nskr_thermo_check("figure1", &rep) == NSKR_OK);
    int passed = 0;
    nskr_report_passed(rep, &passed);
    CHECK(passed == 1);
    nskr_report_free(rep);
    CHECK(nskr_thermo_check("vdw", &rep) == NSKR_CONFIG);
}

TEST_CASE("small sweep and weak-strong through the C API") {
    nskr_config* cfg = parse_or_fail(R"(
[grid]
cells = 64
[time]
t_end = 0.02
snapshot_interval = 0.01
[sweep]
alphas = [10.0, 100.0]
[weak_strong]
epsilons = [0.0, 1e-3]
)");
    nskr_report* rep = nullptr;
    REQUIRE(nskr_sweep_alpha(cfg, &rep) == NSKR_OK);
    const char* j1 = nullptr;
    nskr_report_json(rep, &j1);
    const std::string first = j1;
    nskr_report_free(rep);
    REQUIRE(nskr_sweep_alpha(cfg, &rep) == NSKR_OK);
    nskr_report_json(rep, &j1);
    CHECK(first == j1);
    nskr_report_free(rep);

    REQUIRE(nskr_weak_strong(cfg, &rep) == NSKR_OK);
    nskr_report_json(rep, &j1);
    CHECK(nlohmann::json::parse(j1).at("summary").at("runs").size() == 2);
    nskr_report_free(rep);
    nskr_config_free(cfg);
}
