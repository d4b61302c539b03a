#include "io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace nskr::io {
namespace {

static_assert(std::endian::native == std::endian::little, "container writer assumes little endian");

constexpr char kMagic[8] = {'N', 'S', 'K', 'T', 'R', 'A', 'J', '1'};

class Writer {
public:
    explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary) {
        if (!out_) fail(ErrorCode::io, "cannot open " + path.string() + " for writing");
    }
    template <class T>
    void put(T v) {
        out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
    }
    void put_bytes(const std::string& s) {
        put<std::uint64_t>(s.size());
        out_.write(s.data(), static_cast<std::streamsize>(s.size()));
    }
    void put_field(const Field& f) {
        out_.write(reinterpret_cast<const char*>(f.data()), static_cast<std::streamsize>(f.size() * 8));
    }
    void finish(const std::filesystem::path& path) {
        out_.flush();
        if (!out_) fail(ErrorCode::io, "write failed on " + path.string());
    }

private:
    std::ofstream out_;
};

class Reader {
public:
    explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary), path_(path) {
        if (!in_) fail(ErrorCode::io, "cannot open " + path.string());
    }
    template <class T>
    T get() {
        T v{};
        in_.read(reinterpret_cast<char*>(&v), sizeof(T));
        check();
        return v;
    }
    std::string get_bytes(std::uint64_t limit) {
        const auto n = get<std::uint64_t>();
        if (n > limit) fail(ErrorCode::io, path_.string() + ": corrupt length field");
        std::string s(n, '\0');
        in_.read(s.data(), static_cast<std::streamsize>(n));
        check();
        return s;
    }
    Field get_field(std::size_t n) {
        Field f(n);
        in_.read(reinterpret_cast<char*>(f.data()), static_cast<std::streamsize>(n * 8));
        check();
        return f;
    }
    void read_raw(char* dst, std::size_t n) {
        in_.read(dst, static_cast<std::streamsize>(n));
        check();
    }

private:
    void check() {
        if (!in_) fail(ErrorCode::io, path_.string() + ": truncated trajectory file");
    }
    std::ifstream in_;
    std::filesystem::path path_;
};

nlohmann::json trailer_json(const Trajectory& t) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : t.steps)
        steps.push_back({s.t, s.dt, s.mass, s.energy, s.dissipation, s.dtc_norm});
    return {{"steps", steps},
            {"cum_viscous", t.cum_viscous},
            {"cum_beta", t.cum_beta},
            {"dtc", t.dtc},
            {"floor_events", t.floor_events}};
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

}  // namespace

void write_trajectory(const std::filesystem::path& path, const Trajectory& traj) {
    const std::size_t n = traj.params.grid.n_cells;
    const bool relaxed = traj.system == System::relaxed;
    for (const auto& f : traj.frames)
        if (f.rho.size() != n || f.mom.size() != n || (relaxed && f.c.size() != n))
            fail(ErrorCode::invalid_argument, "trajectory frame size does not match the grid");
    Writer w(path);
    for (char ch : kMagic) w.put(ch);
    w.put<std::uint32_t>(kTrajectoryVersion);
    w.put<std::uint32_t>(relaxed ? 0 : 1);
    w.put<std::uint32_t>(traj.params.grid.periodic() ? 0 : 1);
    w.put<std::uint64_t>(n);
    w.put<double>(traj.params.grid.length);
    w.put_bytes(traj.params.to_json().dump());
    w.put<std::uint64_t>(traj.frames.size());
    for (const auto& f : traj.frames) {
        w.put<double>(f.time);
        w.put_field(f.rho);
        w.put_field(f.mom);
        if (relaxed) w.put_field(f.c);
    }
    w.put_bytes(trailer_json(traj).dump());
    w.finish(path);
}

Trajectory read_trajectory(const std::filesystem::path& path) {
    Reader r(path);
    char magic[8];
    r.read_raw(magic, 8);
    if (std::memcmp(magic, kMagic, 8) != 0) fail(ErrorCode::io, path.string() + ": not a trajectory file");
    const auto version = r.get<std::uint32_t>();
    if (version != kTrajectoryVersion)
        fail(ErrorCode::io, path.string() + ": unsupported container version " + std::to_string(version));
    const auto sys = r.get<std::uint32_t>();
    const auto bc = r.get<std::uint32_t>();
    const auto n = r.get<std::uint64_t>();
    const auto length = r.get<double>();
    if (sys > 1 || bc > 1 || n == 0 || n > (1ull << 32)) fail(ErrorCode::io, path.string() + ": corrupt header");

    Trajectory t;
    t.system = sys == 0 ? System::relaxed : System::nsk;
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(r.get_bytes(1ull << 30));
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::io, path.string() + ": bad metadata: " + e.what());
    }
    t.params = SimParams::from_json(meta);
    if (t.params.grid.n_cells != n || t.params.grid.length != length ||
        t.params.grid.periodic() != (bc == 0))
        fail(ErrorCode::io, path.string() + ": header and metadata disagree");

    const auto frames = r.get<std::uint64_t>();
    if (frames > (1ull << 32)) fail(ErrorCode::io, path.string() + ": corrupt frame count");
    t.frames.reserve(frames);
    for (std::uint64_t k = 0; k < frames; ++k) {
        SimState s;
        s.time = r.get<double>();
        s.rho = r.get_field(n);
        s.mom = r.get_field(n);
        if (t.system == System::relaxed) s.c = r.get_field(n);
        t.frames.push_back(std::move(s));
    }
    try {
        const auto tr = nlohmann::json::parse(r.get_bytes(1ull << 34));
        for (const auto& s : tr.at("steps")) {
            StepRecord rec;
            // non-finite step scalars were written as null
            auto num = [&](std::size_t i) {
                return s.at(i).is_null() ? std::nan("") : s.at(i).get<double>();
            };
            rec.t = num(0);
            rec.dt = num(1);
            rec.mass = num(2);
            rec.energy = num(3);
            rec.dissipation = num(4);
            rec.dtc_norm = num(5);
            t.steps.push_back(rec);
        }
        t.cum_viscous = tr.at("cum_viscous").get<std::vector<double>>();
        t.cum_beta = tr.at("cum_beta").get<std::vector<double>>();
        t.dtc = tr.at("dtc").get<std::vector<Field>>();
        t.floor_events = tr.at("floor_events").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::io, path.string() + ": bad trailer: " + e.what());
    }
    return t;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string to_csv(const CsvTable& t) {
    std::size_t rows = 0;
    for (const auto& c : t.columns) rows = std::max(rows, c.size());
    if (t.columns.size() != t.header.size())
        fail(ErrorCode::invalid_argument, "csv table '" + t.name + "': header/column count mismatch");
    std::ostringstream os;
    for (std::size_t j = 0; j < t.header.size(); ++j) os << (j ? "," : "") << t.header[j];
    os << '\n';
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < t.columns.size(); ++j) {
            if (j) os << ',';
            if (i < t.columns[j].size()) os << format_double(t.columns[j][i]);
        }
        os << '\n';
    }
    return os.str();
}

CsvTable parse_csv(const std::string& text, std::string name) {
    CsvTable t;
    t.name = std::move(name);
    std::istringstream is(text);
    std::string line;
    auto split = [](const std::string& l) {
        std::vector<std::string> out;
        std::string cell;
        std::istringstream ls(l);
        while (std::getline(ls, cell, ',')) out.push_back(cell);
        if (!l.empty() && l.back() == ',') out.emplace_back();
        return out;
    };
    if (!std::getline(is, line)) return t;
    t.header = split(line);
    t.columns.resize(t.header.size());
    while (std::getline(is, line)) {
        const auto cells = split(line);
        for (std::size_t j = 0; j < cells.size() && j < t.columns.size(); ++j) {
            if (cells[j].empty()) continue;
            t.columns[j].push_back(std::strtod(cells[j].c_str(), nullptr));
        }
    }
    return t;
}

std::string to_svg(const SvgPlot& plot) {
    constexpr double W = 640, H = 420, L = 80, R = 20, T = 40, B = 60;
    auto tx = [&](double v) { return plot.log_x ? std::log10(v) : v; };
    auto ty = [&](double v) { return plot.log_y ? std::log10(v) : v; };
    auto usable = [&](double x, double y) {
        return std::isfinite(tx(x)) && std::isfinite(ty(y)) && (!plot.log_x || x > 0) &&
               (!plot.log_y || y > 0);
    };
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& s : plot.series)
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            x0 = std::min(x0, tx(s.x[i]));
            x1 = std::max(x1, tx(s.x[i]));
            y0 = std::min(y0, ty(s.y[i]));
            y1 = std::max(y1, ty(s.y[i]));
        }
    if (!(x0 <= x1)) x0 = 0, x1 = 1;
    if (!(y0 <= y1)) y0 = 0, y1 = 1;
    if (x1 - x0 < 1e-300) x0 -= 0.5, x1 += 0.5;
    if (y1 - y0 < 1e-300) y0 -= 0.5, y1 += 0.5;
    auto px = [&](double v) { return L + (tx(v) - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double v) { return H - B - (ty(v) - y0) / (y1 - y0) * (H - T - B); };
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return std::string(buf);
    };
    auto tick = [](double v, bool log) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3g", log ? std::pow(10.0, v) : v);
        return std::string(buf);
    };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
       << xml_escape(plot.title) << "</text>\n"
       << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\""
       << H - T - B << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double fx = x0 + (x1 - x0) * k / 4.0, fy = y0 + (y1 - y0) * k / 4.0;
        const double sx = L + (W - L - R) * k / 4.0, sy = H - B - (H - T - B) * k / 4.0;
        os << "<text x=\"" << num(sx) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\" font-size=\"11\">"
           << tick(fx, plot.log_x) << "</text>\n"
           << "<text x=\"" << L - 6 << "\" y=\"" << num(sy + 4) << "\" text-anchor=\"end\" font-size=\"11\">"
           << tick(fy, plot.log_y) << "</text>\n";
    }
    os << "<text x=\"" << W / 2 << "\" y=\"" << H - 18 << "\" text-anchor=\"middle\" font-size=\"13\">"
       << xml_escape(plot.x_label) << "</text>\n"
       << "<text x=\"18\" y=\"" << H / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
       << H / 2 << ")\">" << xml_escape(plot.y_label) << "</text>\n";
    for (std::size_t s = 0; s < plot.series.size(); ++s) {
        const auto& ser = plot.series[s];
        const char* col = colors[s % 7];
        std::string pts;
        for (std::size_t i = 0; i < std::min(ser.x.size(), ser.y.size()); ++i) {
            if (!usable(ser.x[i], ser.y[i])) continue;
            pts += num(px(ser.x[i])) + "," + num(py(ser.y[i])) + " ";
        }
        if (!pts.empty()) pts.pop_back();
        os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"" << pts << "\"/>\n";
        os << "<text x=\"" << W - R - 8 << "\" y=\"" << T + 16 + 15 * s << "\" text-anchor=\"end\" font-size=\"11\" fill=\""
           << col << "\">" << xml_escape(ser.label) << "</text>\n";
    }
    if (!plot.annotation.empty())
        os << "<text x=\"" << L + 8 << "\" y=\"" << T + 16 << "\" font-size=\"12\">"
           << xml_escape(plot.annotation) << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::io, "cannot open " + path.string() + " for writing");
    out << text;
    if (!out) fail(ErrorCode::io, "write failed on " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io, "cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    write_text(path, j.dump(2) + "\n");
}

}  // namespace nskr::io
