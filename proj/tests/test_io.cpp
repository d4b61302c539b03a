#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <cstring>
#include <random>

#include <unistd.h>

#include "io.hpp"
#include "nsk_solver.hpp"
#include "relaxed_solver.hpp"
#include "test_util.hpp"

using namespace nskr;
using std::numbers::pi;
using testutil::error_of;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("nskr_test_io_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d / name;
}

Trajectory sample_run(System sys, BcMode bc) {
    SimParams p;
    p.grid = Grid1D::make(1.0, 32, bc);
    p.model = figure1_preset();
    p.t_end = 0.01;
    p.snapshot_interval = 0.0025;
    p.frame_times = {};
    SimState s;
    s.rho = sample(p.grid, [](double x) { return 2.0 + 0.3 * std::cos(pi * x); });
    s.mom = sample(p.grid, [](double x) { return 0.1 * std::sin(pi * x); });
    if (sys == System::relaxed) {
        s.c = s.rho;
        return run_relaxed(p, s);
    }
    return run_nsk(p, s);
}

}  // namespace

TEST_CASE("trajectory container round trip is bit-exact") {
    for (auto sys : {System::relaxed, System::nsk}) {
        for (auto bc : {BcMode::periodic, BcMode::wall}) {
            const auto tr = sample_run(sys, bc);
            const auto path = scratch("rt.bin");
            io::write_trajectory(path, tr);
            const auto back = io::read_trajectory(path);
            CHECK(back.system == tr.system);
            CHECK(back.params.to_json() == tr.params.to_json());
            REQUIRE(back.frames.size() == tr.frames.size());
            for (std::size_t k = 0; k < tr.frames.size(); ++k) {
                CHECK(back.frames[k].time == tr.frames[k].time);
                CHECK(back.frames[k].rho == tr.frames[k].rho);
                CHECK(back.frames[k].mom == tr.frames[k].mom);
                CHECK(back.frames[k].c == tr.frames[k].c);
            }
            REQUIRE(back.steps.size() == tr.steps.size());
            for (std::size_t k = 0; k < tr.steps.size(); ++k) {
                CHECK(back.steps[k].dt == tr.steps[k].dt);
                CHECK(back.steps[k].energy == tr.steps[k].energy);
                CHECK(back.steps[k].dissipation == tr.steps[k].dissipation);
            }
            CHECK(back.cum_viscous == tr.cum_viscous);
            CHECK(back.cum_beta == tr.cum_beta);
            CHECK(back.dtc == tr.dtc);
            CHECK(back.floor_events == tr.floor_events);
            // re-serialising gives identical bytes
            const auto path2 = scratch("rt2.bin");
            io::write_trajectory(path2, back);
            CHECK(io::read_text(path) == io::read_text(path2));
        }
    }
}

TEST_CASE("container header layout") {
    const auto tr = sample_run(System::relaxed, BcMode::wall);
    const auto path = scratch("hdr.bin");
    io::write_trajectory(path, tr);
    const std::string bytes = io::read_text(path);
    REQUIRE(bytes.size() > 36);
    CHECK(bytes.substr(0, 8) == "NSKTRAJ1");
    std::uint32_t version, sys, bc;
    std::uint64_t n;
    double len;
    std::memcpy(&version, bytes.data() + 8, 4);
    std::memcpy(&sys, bytes.data() + 12, 4);
    std::memcpy(&bc, bytes.data() + 16, 4);
    std::memcpy(&n, bytes.data() + 20, 8);
    std::memcpy(&len, bytes.data() + 28, 8);
    CHECK(version == io::kTrajectoryVersion);
    CHECK(sys == 0);
    CHECK(bc == 1);
    CHECK(n == 32);
    CHECK(len == 1.0);
}

TEST_CASE("corrupt containers are rejected") {
    const auto tr = sample_run(System::relaxed, BcMode::periodic);
    const auto path = scratch("bad.bin");
    io::write_trajectory(path, tr);
    const std::string good = io::read_text(path);

    std::string bad = good;
    bad[0] = 'X';
    io::write_text(path, bad);
    CHECK(error_of([&] { io::read_trajectory(path); }) == ErrorCode::io);

    io::write_text(path, good.substr(0, good.size() / 2));
    CHECK(error_of([&] { io::read_trajectory(path); }) == ErrorCode::io);

    bad = good;
    bad[8] = 9;
    io::write_text(path, bad);
    CHECK(error_of([&] { io::read_trajectory(path); }) == ErrorCode::io);

    CHECK(error_of([&] { io::read_trajectory(scratch("missing.bin")); }) == ErrorCode::io);
}

TEST_CASE("csv tables") {
    io::CsvTable t{"t", {"a", "b"}, {{1.0, 0.1, 1e-300, NAN}, {-2.5, INFINITY, 3.0}}};
    const std::string s = io::to_csv(t);
    CHECK(s.substr(0, 4) == "a,b\n");
    const auto back = io::parse_csv(s, "t");
    REQUIRE(back.columns.size() == 2);
    REQUIRE(back.columns[0].size() == 4);
    CHECK(back.columns[0][1] == 0.1);
    CHECK(back.columns[0][2] == 1e-300);
    CHECK(std::isnan(back.columns[0][3]));
    REQUIRE(back.columns[1].size() == 3);
    CHECK(std::isinf(back.columns[1][1]));
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> U(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = U(gen) * std::pow(10.0, static_cast<int>(gen() % 40) - 20);
        CHECK(std::strtod(io::format_double(v).c_str(), nullptr) == v);
    }
    io::CsvTable empty{"e", {"x"}, {{}}};
    CHECK(io::to_csv(empty) == "x\n");
    io::CsvTable mism{"m", {"x", "y"}, {{1.0}}};
    CHECK(error_of([&] { io::to_csv(mism); }) == ErrorCode::invalid_argument);
}

TEST_CASE("svg plots are well-formed") {
    io::SvgPlot p{"p", "norms <vs> alpha & more", "alpha", "norm", true, true, {}, "slope -1.0 \"fit\""};
    p.series.push_back({"a&b", {10, 100, 1000}, {1, 0.1, 0.01}});
    p.series.push_back({"with zero", {10, 100, 1000}, {0.0, 0.1, NAN}});
    const std::string svg = io::to_svg(p);
    CHECK(testutil::well_formed_xml(svg));
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(svg.find("&amp;") != std::string::npos);
    io::SvgPlot empty{"e", "empty", "x", "y", false, false, {}, ""};
    CHECK(testutil::well_formed_xml(io::to_svg(empty)));
    CHECK_FALSE(testutil::well_formed_xml("<svg><g></svg>"));
    CHECK_FALSE(testutil::well_formed_xml("<a>&bogus;</a>"));
}

TEST_CASE("text and json helpers") {
    const auto path = scratch("sub/dir/x.json");
    io::write_json(path, nlohmann::json{{"k", 1.5}});
    CHECK(nlohmann::json::parse(io::read_text(path)).at("k") == 1.5);
    CHECK(io::format_double(0.1) == "0.1");
    CHECK(io::format_double(NAN) == "nan");
}
