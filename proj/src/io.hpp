#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "state.hpp"

namespace nskr::io {

// Binary trajectory container, little-endian:
//   "NSKTRAJ1" | u32 version | u32 system | u32 bc | u64 n_cells | f64 length
//   | u64 meta_len | meta (params JSON) | u64 n_frames
//   | per frame: f64 t, n f64 rho, n f64 mom, n f64 c (relaxed only)
//   | u64 trailer_len | trailer JSON (steps, cumulative dissipation, dtc, floor events)
inline constexpr std::uint32_t kTrajectoryVersion = 1;

void write_trajectory(const std::filesystem::path& path, const Trajectory& traj);
Trajectory read_trajectory(const std::filesystem::path& path);

struct CsvTable {
    std::string name;  // file stem
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;
};

std::string to_csv(const CsvTable& t);
CsvTable parse_csv(const std::string& text, std::string name = "");

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct SvgPlot {
    std::string name;  // file stem
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    std::vector<PlotSeries> series;
    std::string annotation;
};

std::string to_svg(const SvgPlot& plot);

/// Shortest round-trip representation; non-finite values become null in JSON
/// and "nan"/"inf" in CSV.
std::string format_double(double v);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace nskr::io
