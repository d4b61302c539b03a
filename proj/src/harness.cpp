#include "harness.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <random>
#include <set>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "error.hpp"
#include "hydro.hpp"

namespace nskr {

ExperimentKind parse_kind(const std::string& s) {
    if (s == "simulate") return ExperimentKind::simulate;
    if (s == "sweep-alpha") return ExperimentKind::sweep_alpha;
    if (s == "weak-strong") return ExperimentKind::weak_strong;
    if (s == "thermo-check") return ExperimentKind::thermo_check;
    if (s == "energy-audit") return ExperimentKind::energy_audit;
    fail(ErrorCode::config,
         "unknown experiment kind '" + s + "' (simulate|sweep-alpha|weak-strong|thermo-check|energy-audit)");
}

std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::simulate: return "simulate";
        case ExperimentKind::sweep_alpha: return "sweep-alpha";
        case ExperimentKind::weak_strong: return "weak-strong";
        case ExperimentKind::thermo_check: return "thermo-check";
        case ExperimentKind::energy_audit: return "energy-audit";
    }
    return "?";
}

nlohmann::json InitSpec::to_json() const {
    return {{"profile", profile}, {"mean", mean},        {"amplitude", amplitude}, {"mode", mode},
            {"width", width},     {"velocity", velocity}, {"c_init", c_init}};
}

double BetaRule::operator()(double alpha) const {
    if (!(alpha > 0.0)) fail(ErrorCode::invalid_argument, "beta rule needs alpha > 0");
    if (name == "inverse") return constant / alpha;
    if (name == "inverse_sqrt") return constant / std::sqrt(alpha);
    if (name == "constant") return constant;
    fail(ErrorCode::config, "unknown beta rule '" + name + "' (inverse|inverse_sqrt|constant)");
}

void ExperimentConfig::validate() const {
    params.validate(system);
    if (sweep.alphas.empty()) fail(ErrorCode::config, "sweep.alphas is empty");
    for (std::size_t i = 0; i < sweep.alphas.size(); ++i) {
        if (!(sweep.alphas[i] > 0.0)) fail(ErrorCode::config, "sweep.alphas must be positive");
        if (i && !(sweep.alphas[i] > sweep.alphas[i - 1]))
            fail(ErrorCode::config, "sweep.alphas must be strictly increasing");
    }
    if (!(sweep.beta_rule.constant > 0.0)) fail(ErrorCode::config, "beta rule constant must be positive");
    (void)sweep.beta_rule(1.0);
    if (sweep.refine_levels < 3) fail(ErrorCode::config, "sweep.refine_levels must be >= 3");
    if (!(sweep.gate_fraction > 0.0)) fail(ErrorCode::config, "sweep.gate_fraction must be positive");
    if (weak_strong.modes < 1) fail(ErrorCode::config, "weak_strong.modes must be >= 1");
    for (double e : weak_strong.epsilons)
        if (!(e >= 0.0)) fail(ErrorCode::config, "weak_strong.epsilons must be >= 0");
    if (!(c_scheme_constant >= 0.0)) fail(ErrorCode::config, "audit.c_scheme must be >= 0");
    if (init.c_init != "rho" && init.c_init != "elliptic")
        fail(ErrorCode::config, "initial.c_init must be 'rho' or 'elliptic'");
}

nlohmann::json ExperimentConfig::to_json() const {
    return {{"kind", to_string(kind)},
            {"system", to_string(system)},
            {"params", params.to_json()},
            {"initial", init.to_json()},
            {"sweep",
             {{"alphas", sweep.alphas},
              {"beta_rule", sweep.beta_rule.name},
              {"beta_constant", sweep.beta_rule.constant},
              {"refine_levels", sweep.refine_levels},
              {"gate_fraction", sweep.gate_fraction},
              {"slope_range", {sweep.slope_min, sweep.slope_max}}}},
            {"weak_strong",
             {{"epsilons", weak_strong.epsilons},
              {"modes", weak_strong.modes},
              {"ratio_limit", weak_strong.ratio_limit},
              {"slope_range", {weak_strong.slope_min, weak_strong.slope_max}}}},
            {"c_scheme_constant", c_scheme_constant},
            {"seed", seed}};
}

// ---------------------------------------------------------------------------
// TOML ingestion

namespace {

class Section {
public:
    Section(const toml::table& root, std::string name, std::string origin)
        : name_(std::move(name)), origin_(std::move(origin)) {
        if (const auto* node = root.get(name_)) {
            tbl_ = node->as_table();
            if (!tbl_) bad("", "must be a table");
        }
    }

    bool has(const std::string& key) const { return tbl_ && tbl_->contains(key); }

    double num(const std::string& key, double def) {
        const toml::node* n = take(key);
        if (!n) return def;
        if (auto v = n->value<double>()) return *v;
        bad(key, "must be a number");
    }
    std::int64_t integer(const std::string& key, std::int64_t def) {
        const toml::node* n = take(key);
        if (!n) return def;
        if (n->is_integer()) return *n->value<std::int64_t>();
        bad(key, "must be an integer");
    }
    std::string str(const std::string& key, std::string def) {
        const toml::node* n = take(key);
        if (!n) return def;
        if (auto v = n->value<std::string>()) return *v;
        bad(key, "must be a string");
    }
    bool boolean(const std::string& key, bool def) {
        const toml::node* n = take(key);
        if (!n) return def;
        if (auto v = n->value<bool>()) return *v;
        bad(key, "must be a boolean");
    }
    std::vector<double> nums(const std::string& key, std::vector<double> def) {
        const toml::node* n = take(key);
        if (!n) return def;
        const auto* arr = n->as_array();
        if (!arr) bad(key, "must be an array of numbers");
        std::vector<double> out;
        for (const auto& e : *arr) {
            auto v = e.value<double>();
            if (!v) bad(key, "must be an array of numbers");
            out.push_back(*v);
        }
        return out;
    }
    void finish() const {
        if (!tbl_) return;
        for (const auto& [k, v] : *tbl_)
            if (!used_.count(std::string(k.str())))
                fail(ErrorCode::config, origin_ + ": unknown key [" + name_ + "]." + std::string(k.str()));
    }

private:
    const toml::node* take(const std::string& key) {
        used_.insert(key);
        return tbl_ ? tbl_->get(key) : nullptr;
    }
    [[noreturn]] void bad(const std::string& key, const std::string& what) const {
        fail(ErrorCode::config, origin_ + ": [" + name_ + "]" + (key.empty() ? "" : "." + key) + " " + what);
    }

    const toml::table* tbl_ = nullptr;
    std::string name_;
    std::string origin_;
    std::set<std::string> used_;
};

std::size_t to_size(std::int64_t v, const std::string& what) {
    if (v <= 0) fail(ErrorCode::config, what + " must be positive");
    return static_cast<std::size_t>(v);
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
    toml::table root;
    try {
        root = toml::parse(text, origin);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << origin << ":" << e.source().begin.line << ":" << e.source().begin.column << ": "
           << e.description();
        fail(ErrorCode::config, os.str());
    }
    static const std::set<std::string> known = {"experiment", "physics", "pressure", "grid",  "time",
                                                "initial",    "sweep",   "weak_strong", "audit"};
    for (const auto& [k, v] : root)
        if (!known.count(std::string(k.str())))
            fail(ErrorCode::config, origin + ": unknown section [" + std::string(k.str()) + "]");

    ExperimentConfig cfg;
    SimParams& p = cfg.params;

    Section ex(root, "experiment", origin);
    cfg.kind = parse_kind(ex.str("kind", "simulate"));
    cfg.system = parse_system(ex.str("system", "relaxed"));
    cfg.output_dir = ex.str("output_dir", cfg.output_dir);
    cfg.seed = static_cast<std::uint64_t>(ex.integer("seed", static_cast<std::int64_t>(cfg.seed)));
    ex.finish();

    Section ph(root, "physics", origin);
    p.mu = ph.num("mu", p.mu);
    p.lambda = ph.num("lambda", p.lambda);
    p.kappa = ph.num("kappa", p.kappa);
    p.alpha = ph.num("alpha", p.alpha);
    p.beta = ph.num("beta", p.beta);
    p.c_scheme = parse_c_scheme(ph.str("c_scheme", to_string(p.c_scheme)));
    ph.finish();

    Section pr(root, "pressure", origin);
    const std::string preset = pr.str("preset", "powerlaw");
    if (preset == "polynomial") {
        const auto h = pr.nums("h", {});
        const auto q = pr.nums("q", {});
        const double cont = pr.num("q_continuation", std::numeric_limits<double>::infinity());
        p.model = polynomial_model(h, q, cont, pr.str("name", "polynomial"));
    } else {
        p.model = preset_by_name(preset, pr.num("gamma", 2.0));
    }
    pr.finish();
    validate_model(p.model);

    Section gr(root, "grid", origin);
    const double length = gr.num("length", 1.0);
    const auto cells = to_size(gr.integer("cells", 512), "grid.cells");
    p.grid = Grid1D::make(length, cells, parse_bc(gr.str("bc", "periodic")));
    gr.finish();

    Section ti(root, "time", origin);
    p.t_end = ti.num("t_end", p.t_end);
    p.cfl = ti.num("cfl", p.cfl);
    p.c_disp = ti.num("c_disp", p.c_disp);
    p.snapshot_interval = ti.num("snapshot_interval", p.snapshot_interval);
    p.frame_times = ti.nums("frame_times", {});
    p.fixed_dt = ti.num("fixed_dt", p.fixed_dt);
    p.max_steps = to_size(ti.integer("max_steps", static_cast<std::int64_t>(p.max_steps)), "time.max_steps");
    p.rho_floor = ti.num("rho_floor", p.rho_floor);
    ti.finish();

    Section in(root, "initial", origin);
    InitSpec& is = cfg.init;
    is.profile = in.str("profile", is.profile);
    is.mean = in.num("mean", is.mean);
    is.amplitude = in.num("amplitude", is.amplitude);
    is.mode = static_cast<int>(in.integer("mode", is.mode));
    is.width = in.num("width", is.width);
    is.velocity = in.num("velocity", is.velocity);
    is.c_init = in.str("c_init", is.c_init);
    in.finish();

    Section sw(root, "sweep", origin);
    SweepSpec& ss = cfg.sweep;
    ss.alphas = sw.nums("alphas", ss.alphas);
    ss.beta_rule.name = sw.str("beta_rule", ss.beta_rule.name);
    ss.beta_rule.constant = sw.num("beta_constant", ss.beta_rule.constant);
    ss.refine_levels = static_cast<int>(sw.integer("refine_levels", ss.refine_levels));
    ss.gate_fraction = sw.num("gate_fraction", ss.gate_fraction);
    if (sw.has("slope_range")) {
        const auto r = sw.nums("slope_range", {});
        if (r.size() != 2 || !(r[0] < r[1])) fail(ErrorCode::config, origin + ": sweep.slope_range needs [lo, hi]");
        ss.slope_min = r[0];
        ss.slope_max = r[1];
    }
    ss.parallel = sw.boolean("parallel", ss.parallel);
    sw.finish();

    Section ws(root, "weak_strong", origin);
    WeakStrongSpec& wss = cfg.weak_strong;
    wss.epsilons = ws.nums("epsilons", wss.epsilons);
    wss.modes = static_cast<int>(ws.integer("modes", wss.modes));
    wss.ratio_limit = ws.num("ratio_limit", wss.ratio_limit);
    if (ws.has("slope_range")) {
        const auto r = ws.nums("slope_range", {});
        if (r.size() != 2 || !(r[0] < r[1]))
            fail(ErrorCode::config, origin + ": weak_strong.slope_range needs [lo, hi]");
        wss.slope_min = r[0];
        wss.slope_max = r[1];
    }
    ws.finish();

    Section au(root, "audit", origin);
    cfg.c_scheme_constant = au.num("c_scheme", cfg.c_scheme_constant);
    au.finish();

    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    return parse_config(io::read_text(path), path.string());
}

// ---------------------------------------------------------------------------
// Initial data

SimState make_initial_state(const InitSpec& spec, const SimParams& prm, System system) {
    const Grid1D& g = prm.grid;
    const double L = g.length;
    const double pi = std::numbers::pi;
    const bool walls = !g.periodic();
    const double k = (walls ? pi : 2.0 * pi) * spec.mode / L;
    std::function<double(double)> rho;
    if (spec.profile == "sine") {
        rho = [&](double x) { return spec.mean + spec.amplitude * (walls ? std::cos(k * x) : std::sin(k * x)); };
    } else if (spec.profile == "constant") {
        rho = [&](double) { return spec.mean; };
    } else if (spec.profile == "bump") {
        rho = [&](double x) {
            const double z = (x - 0.5 * L) / spec.width;
            return spec.mean + spec.amplitude * std::exp(-z * z);
        };
    } else if (spec.profile == "tanh") {
        rho = [&](double x) {
            const double s = std::tanh((x - 0.25 * L) / spec.width) - std::tanh((x - 0.75 * L) / spec.width) - 1.0;
            return spec.mean + spec.amplitude * s;
        };
    } else if (spec.profile == "step") {
        rho = [&](double x) {
            return spec.mean + spec.amplitude * ((x > 0.25 * L && x < 0.75 * L) ? 1.0 : -1.0);
        };
    } else {
        fail(ErrorCode::config, "unknown initial profile '" + spec.profile + "' (sine|constant|bump|tanh|step)");
    }
    SimState s;
    s.rho = sample(g, rho);
    for (double r : s.rho)
        if (!(r > 0.0)) fail(ErrorCode::domain, "initial density is not positive");
    const double kv = (walls ? pi : 2.0 * pi) * spec.mode / L;
    const Field u = sample(g, [&](double x) { return spec.velocity * std::sin(kv * x); });
    s.mom.resize(s.rho.size());
    for (std::size_t i = 0; i < s.rho.size(); ++i) s.mom[i] = s.rho[i] * u[i];
    if (system == System::relaxed) {
        if (spec.c_init == "elliptic")
            s.c = hydro::c_backward_euler(prm, s.rho, s.rho, std::numeric_limits<double>::infinity());
        else
            s.c = s.rho;
    }
    return s;
}

SimState well_prepared_init(const Trajectory& ref) {
    if (ref.frames.empty()) fail(ErrorCode::invalid_argument, "reference trajectory has no frames");
    SimState s = ref.frames.front();
    s.time = 0.0;
    s.c = s.rho;
    return s;
}

Field fourier_noise(const Grid1D& g, int modes, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> amp(-1.0, 1.0), phase(0.0, 2.0 * std::numbers::pi);
    std::vector<double> a(modes), ph(modes);
    for (int m = 0; m < modes; ++m) {
        a[m] = amp(gen);
        ph[m] = phase(gen);
    }
    const double base = (g.periodic() ? 2.0 : 1.0) * std::numbers::pi / g.length;
    Field f = sample(g, [&](double x) {
        double v = 0.0;
        for (int m = 0; m < modes; ++m) {
            const double kx = base * (m + 1) * x;
            // walls: cosines keep the mirrored continuation smooth
            v += a[m] * (g.periodic() ? std::sin(kx + ph[m]) : std::cos(kx) * std::cos(ph[m]));
        }
        return v;
    });
    double mx = 0.0;
    for (double v : f) mx = std::max(mx, std::abs(v));
    if (!(mx > 0.0)) fail(ErrorCode::numeric, "degenerate perturbation");
    for (double& v : f) v /= mx;
    return f;
}

// ---------------------------------------------------------------------------
// Reports

bool Report::passed() const {
    return std::all_of(criteria.begin(), criteria.end(), [](const Criterion& c) { return c.passed; });
}

nlohmann::json Report::to_json() const {
    nlohmann::json crit = nlohmann::json::array();
    for (const auto& c : criteria)
        crit.push_back({{"name", c.name},
                        {"value", c.value},
                        {"threshold", c.threshold},
                        {"relation", c.relation},
                        {"passed", c.passed}});
    return {{"kind", kind}, {"passed", passed()}, {"criteria", crit}, {"warnings", warnings}, {"summary", summary}};
}

namespace {

Criterion at_most(std::string name, double value, double limit) {
    return {std::move(name), value, limit, "<=", value <= limit};
}

Criterion within(std::string name, double value, double lo, double hi) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "in [%g, %g]", lo, hi);
    return {std::move(name), value, hi, buf, value >= lo && value <= hi};
}

Criterion holds(std::string name, bool ok) { return {std::move(name), ok ? 1.0 : 0.0, 1.0, "==", ok}; }

Trajectory run_system(System sys, const SimParams& prm, const SimState& init) {
    return sys == System::relaxed ? run_relaxed(prm, init) : run_nsk(prm, init);
}

io::CsvTable step_table(const Trajectory& t, const std::string& name) {
    io::CsvTable tab{name, {"t", "dt", "mass", "energy", "cumulative_dissipation", "dtc_norm"}, {}};
    tab.columns.assign(6, {});
    double cum = 0.0;
    for (const auto& s : t.steps) {
        cum += s.dissipation;
        tab.columns[0].push_back(s.t);
        tab.columns[1].push_back(s.dt);
        tab.columns[2].push_back(s.mass);
        tab.columns[3].push_back(s.energy);
        tab.columns[4].push_back(cum);
        tab.columns[5].push_back(s.dtc_norm);
    }
    return tab;
}

// Energy at every frame, for plotting.
io::PlotSeries frame_energy(const Trajectory& t, const std::string& label) {
    io::PlotSeries s{label, {}, {}};
    for (const auto& f : t.frames) {
        s.x.push_back(f.time);
        s.y.push_back(total_energy(f, t.params, t.system).total);
    }
    return s;
}

nlohmann::json fit_json(const OrderFit& f) { return f.to_json(); }

}  // namespace

double relative_mass_drift(const Trajectory& traj) {
    const double m0 = integrate(traj.params.grid, traj.frames.front().rho);
    const double scale = std::max(std::abs(m0), 1e-300);
    double d = 0.0;
    for (const auto& s : traj.steps) d = std::max(d, std::abs(s.mass - m0) / scale);
    for (const auto& f : traj.frames) d = std::max(d, std::abs(integrate(traj.params.grid, f.rho) - m0) / scale);
    return d;
}

Report energy_audit(const Trajectory& traj, double c_scheme_constant, const Trajectory* ref) {
    Report rep;
    rep.kind = "energy-audit";
    if (traj.frames.empty()) fail(ErrorCode::invalid_argument, "trajectory has no frames");
    const BudgetReport b = energy_budget_check(traj, c_scheme_constant);
    rep.summary["budget"] = b.to_json();
    rep.criteria.push_back(at_most("energy budget violation", b.max_violation, b.tolerance));
    const double drift = relative_mass_drift(traj);
    rep.summary["mass_drift"] = drift;
    rep.criteria.push_back(at_most("relative mass drift", drift, 1e-12));
    if (traj.system == System::relaxed) {
        const PoincareReport pc = poincare_check(traj, ref);
        rep.summary["poincare"] = pc.to_json();
        rep.criteria.push_back(at_most("poincare violations", static_cast<double>(pc.violations), 0.0));
        const MeanCReport mc = mean_c_check(traj);
        rep.summary["mean_c"] = mc.to_json();
        rep.criteria.push_back(at_most("mean of c vs discrete recursion", mc.max_rel_err_discrete, 1e-6));
        rep.criteria.push_back(
            at_most("mean of c vs closed form", mc.max_rel_err_continuum, mc.continuum_tolerance));
        if (ref && ref->system == System::relaxed) {
            const MeanGapReport mg = ws_mean_check(traj, *ref);
            rep.summary["mean_gap"] = mg.to_json();
            rep.criteria.push_back(at_most("mean of c - C", mg.max_abs, 1e-10));
        }
    }
    rep.summary["system"] = to_string(traj.system);
    rep.summary["frames"] = traj.frames.size();
    rep.summary["steps"] = traj.steps.size();
    rep.summary["floor_events"] = traj.floor_events;
    rep.tables.push_back(step_table(traj, "steps"));
    rep.plots.push_back({"energy", "energy vs time", "t", "E", false, false, {frame_energy(traj, "E(t)")}, ""});
    return rep;
}

Report simulate(const ExperimentConfig& cfg, Trajectory* out) {
    cfg.validate();
    const SimState init = make_initial_state(cfg.init, cfg.params, cfg.system);
    Trajectory traj = run_system(cfg.system, cfg.params, init);
    Report rep = energy_audit(traj, cfg.c_scheme_constant);
    rep.kind = "simulate";
    rep.summary["config"] = cfg.to_json();
    const SimState& last = traj.frames.back();
    rep.summary["final"] = total_energy(last, traj.params, traj.system).to_json();
    double rho_min = INFINITY, rho_max = -INFINITY;
    for (double r : last.rho) rho_min = std::min(rho_min, r), rho_max = std::max(rho_max, r);
    rep.summary["final_rho_range"] = {rho_min, rho_max};
    if (traj.system == System::relaxed) {
        double gap = 0.0;
        for (std::size_t i = 0; i < last.rho.size(); ++i) gap = std::max(gap, std::abs(last.rho[i] - last.c[i]));
        rep.summary["final_max_rho_minus_c"] = gap;
    }
    io::CsvTable fin{"final_state", {"x", "rho", "u"}, {{}, {}, {}}};
    const Field u = last.velocity();
    for (std::size_t i = 0; i < last.size(); ++i) {
        fin.columns[0].push_back(traj.params.grid.x(i));
        fin.columns[1].push_back(last.rho[i]);
        fin.columns[2].push_back(u[i]);
    }
    if (traj.system == System::relaxed) {
        fin.header.push_back("c");
        fin.columns.push_back(last.c);
    }
    rep.tables.push_back(std::move(fin));
    if (out) *out = std::move(traj);
    return rep;
}

Report sweep_alpha(const ExperimentConfig& cfg) {
    cfg.validate();
    const SweepSpec& sw = cfg.sweep;
    Report rep;
    rep.kind = "sweep-alpha";
    rep.summary["config"] = cfg.to_json();
    if (!sw.beta_rule.vanishes_as_alpha_grows())
        rep.warnings.push_back("beta rule does not vanish as alpha grows: outside the hypotheses of the rate estimate");

    SimParams base = cfg.params;
    const InitSpec spec = cfg.init;
    const InitFn init = [spec, base](const Grid1D& g) {
        SimParams p = base;
        p.grid = g;
        return make_initial_state(spec, p, System::nsk);
    };
    const Reference ref = make_reference(base, init, sw.refine_levels);
    rep.summary["reference"] = ref.to_json();

    struct Member {
        NormBundle bundle;
        std::size_t steps = 0;
        double budget_violation = 0.0, budget_tol = 0.0;
        io::PlotSeries energy;
    };
    auto run_member = [&](double a) {
        SimParams q = base;
        q.alpha = a;
        q.beta = sw.beta_rule(a);
        const Trajectory t = run_relaxed(q, well_prepared_init(ref.trajectory));
        Member m;
        m.bundle = norm_bundle(t, ref.trajectory);
        m.steps = t.steps.size();
        const BudgetReport b = energy_budget_check(t, cfg.c_scheme_constant);
        m.budget_violation = b.max_violation;
        m.budget_tol = b.tolerance;
        char label[32];
        std::snprintf(label, sizeof label, "alpha=%g", a);
        m.energy = frame_energy(t, label);
        return m;
    };
    std::vector<Member> members;
    if (sw.parallel) {
        std::vector<std::future<Member>> jobs;
        for (double a : sw.alphas) jobs.push_back(std::async(std::launch::async, run_member, a));
        for (auto& j : jobs) members.push_back(j.get());
    } else {
        for (double a : sw.alphas) members.push_back(run_member(a));
    }

    const auto& names = NormBundle::names();
    nlohmann::json mj = nlohmann::json::array();
    io::CsvTable tab{"norms", {"alpha", "beta"}, {}};
    for (const char* n : names) tab.header.push_back(n);
    for (const char* extra : {"sum", "rate_s", "steps"}) tab.header.push_back(extra);
    tab.columns.assign(tab.header.size(), {});
    double min_sum = INFINITY, k_fit = 0.0;
    std::vector<double> sums;
    for (std::size_t i = 0; i < members.size(); ++i) {
        const Member& m = members[i];
        nlohmann::json j = m.bundle.to_json();
        j["steps"] = m.steps;
        j["budget_violation"] = m.budget_violation;
        j["budget_tolerance"] = m.budget_tol;
        mj.push_back(j);
        const auto v = m.bundle.values();
        std::size_t c = 0;
        tab.columns[c++].push_back(m.bundle.alpha);
        tab.columns[c++].push_back(m.bundle.beta);
        for (double x : v) tab.columns[c++].push_back(x);
        tab.columns[c++].push_back(m.bundle.sum());
        tab.columns[c++].push_back(m.bundle.rate_s);
        tab.columns[c++].push_back(static_cast<double>(m.steps));
        sums.push_back(m.bundle.sum());
        min_sum = std::min(min_sum, m.bundle.sum());
        k_fit = std::max(k_fit, m.bundle.sum() / m.bundle.rate_s);
    }
    rep.summary["members"] = mj;
    rep.summary["K_fit"] = k_fit;
    rep.tables.push_back(tab);

    // the gate compares like with like: an L2 error against the square root
    // of the smallest summed squared gap
    const double gap_norm = std::sqrt(min_sum);
    const bool limited = !(ref.error_estimate <= sw.gate_fraction * gap_norm);
    rep.summary["reference_limited"] = limited;
    rep.summary["smallest_gap_norm"] = gap_norm;
    rep.criteria.push_back(at_most("reference error / smallest gap", ref.error_estimate / gap_norm, sw.gate_fraction));
    for (std::size_t i = 0; i < members.size(); ++i)
        rep.criteria.push_back(holds("norm bundle below K_fit s(alpha) at alpha=" + io::format_double(sw.alphas[i]),
                                     members[i].bundle.sum() <= k_fit * members[i].bundle.rate_s * (1 + 1e-12)));

    io::SvgPlot plot{"norms_vs_alpha", "squared norms vs alpha", "alpha", "norm", true, true, {}, ""};
    if (members.size() >= 2) {
        const OrderFit f = fit_order(sw.alphas, sums);
        rep.summary["fit_sum"] = fit_json(f);
        nlohmann::json per = nlohmann::json::object();
        for (std::size_t k = 0; k < names.size(); ++k) {
            std::vector<double> xs, ys;
            for (std::size_t i = 0; i < members.size(); ++i) {
                const double v = members[i].bundle.values()[k];
                if (v > 0.0) xs.push_back(sw.alphas[i]), ys.push_back(v);
            }
            per[names[k]] = xs.size() >= 2 ? fit_json(fit_order(xs, ys)) : nlohmann::json(nullptr);
        }
        rep.summary["fit_per_norm"] = per;
        rep.criteria.push_back(within("slope of summed norms vs alpha", f.slope, sw.slope_min, sw.slope_max));
        char ann[96];
        std::snprintf(ann, sizeof ann, "slope of sum = %.3f +/- %.3f", f.slope, f.stderr_slope);
        plot.annotation = ann;
    } else {
        rep.summary["fit_sum"] = nullptr;
        rep.warnings.push_back("single alpha: no slope fit");
    }
    plot.series.push_back({"sum", sw.alphas, sums});
    for (std::size_t k = 0; k < names.size(); ++k) {
        io::PlotSeries s{names[k], {}, {}};
        for (std::size_t i = 0; i < members.size(); ++i) {
            s.x.push_back(sw.alphas[i]);
            s.y.push_back(members[i].bundle.values()[k]);
        }
        plot.series.push_back(std::move(s));
    }
    rep.plots.push_back(std::move(plot));
    io::SvgPlot ep{"energy", "relaxed energy vs time", "t", "E", false, false, {}, ""};
    for (const auto& m : members) ep.series.push_back(m.energy);
    rep.plots.push_back(std::move(ep));
    return rep;
}

Report weak_strong_study(const ExperimentConfig& cfg) {
    cfg.validate();
    const WeakStrongSpec& ws = cfg.weak_strong;
    const SimParams& p = cfg.params;
    Report rep;
    rep.kind = "weak-strong";
    rep.summary["config"] = cfg.to_json();

    const SimState base = make_initial_state(cfg.init, p, System::relaxed);
    const Trajectory ref = run_relaxed(p, base);
    const Field noise = fourier_noise(p.grid, ws.modes, cfg.seed);

    struct Run {
        double eps = 0.0;
        std::vector<double> e_rel;
        double sup = 0.0, initial = 0.0;
        bool audit_passed = false;
        double audit_excess = 0.0;
    };
    auto run_one = [&](double eps) {
        SimState s = base;
        const Field u0 = base.velocity();
        for (std::size_t i = 0; i < s.rho.size(); ++i) {
            s.rho[i] = base.rho[i] * (1.0 + eps * noise[i]);
            s.mom[i] = s.rho[i] * u0[i];
        }
        InitSpec spec = cfg.init;
        s.c = spec.c_init == "elliptic"
                  ? hydro::c_backward_euler(p, s.rho, s.rho, std::numeric_limits<double>::infinity())
                  : s.rho;
        const Trajectory t = run_relaxed(p, s);
        if (t.frames.size() != ref.frames.size()) fail(ErrorCode::numeric, "perturbed run has a different frame set");
        Run r;
        r.eps = eps;
        for (std::size_t k = 0; k < t.frames.size(); ++k) {
            const SimState& R = ref.frames[k];
            const double e = relative_energy(t.frames[k], R.rho, R.velocity(), R.c, p).total;
            r.e_rel.push_back(e);
            r.sup = std::max(r.sup, e);
        }
        r.initial = r.e_rel.front();
        const RemainderSeries audit = remainders_prop31(t, ref, cfg.c_scheme_constant);
        r.audit_passed = audit.passed;
        r.audit_excess = audit.max_excess;
        return r;
    };
    std::vector<std::future<Run>> jobs;
    for (double e : ws.epsilons) jobs.push_back(std::async(std::launch::async, run_one, e));
    std::vector<Run> runs;
    for (auto& j : jobs) runs.push_back(j.get());

    nlohmann::json rj = nlohmann::json::array();
    io::CsvTable tab{"perturbations", {"epsilon", "initial_rel_energy", "sup_rel_energy", "ratio"}, {{}, {}, {}, {}}};
    io::CsvTable series{"rel_energy_series", {"t"}, {ref.frame_times()}};
    io::SvgPlot tplot{"rel_energy_vs_t", "relative energy vs time", "t", "E_rel", false, true, {}, ""};
    std::vector<double> xs, sups, ratios;
    for (const auto& r : runs) {
        const double ratio = r.initial > 0.0 ? r.sup / r.initial : std::numeric_limits<double>::quiet_NaN();
        rj.push_back({{"epsilon", r.eps},
                      {"initial", r.initial},
                      {"sup", r.sup},
                      {"ratio", std::isfinite(ratio) ? nlohmann::json(ratio) : nlohmann::json(nullptr)},
                      {"relative_energy_audit_passed", r.audit_passed},
                      {"relative_energy_audit_excess", r.audit_excess}});
        tab.columns[0].push_back(r.eps);
        tab.columns[1].push_back(r.initial);
        tab.columns[2].push_back(r.sup);
        tab.columns[3].push_back(ratio);
        series.header.push_back("eps=" + io::format_double(r.eps));
        series.columns.push_back(r.e_rel);
        tplot.series.push_back({"eps=" + io::format_double(r.eps), ref.frame_times(), r.e_rel});
        if (r.eps == 0.0) {
            rep.criteria.push_back(at_most("relative energy at eps=0", r.sup, 0.0));
            continue;
        }
        xs.push_back(r.eps);
        sups.push_back(r.sup);
        ratios.push_back(ratio);
        rep.criteria.push_back(holds("relative-energy inequality at eps=" + io::format_double(r.eps), r.audit_passed));
    }
    rep.summary["runs"] = rj;
    rep.tables.push_back(tab);
    rep.tables.push_back(series);
    rep.plots.push_back(tplot);

    if (!ratios.empty()) {
        const auto [mn, mx] = std::minmax_element(ratios.begin(), ratios.end());
        const double spread = (*mn > 0.0 && std::isfinite(*mx)) ? *mx / *mn : std::numeric_limits<double>::infinity();
        rep.summary["ratio_spread"] = std::isfinite(spread) ? nlohmann::json(spread) : nlohmann::json(nullptr);
        rep.summary["gronwall_violation"] = !(spread <= ws.ratio_limit);
        rep.criteria.push_back(at_most("max/min of sup/initial relative energy", spread, ws.ratio_limit));
    }
    io::SvgPlot eplot{"sup_vs_eps", "sup relative energy vs epsilon", "epsilon", "sup E_rel", true, true,
                      {{"sup E_rel", xs, sups}}, ""};
    if (xs.size() >= 2) {
        const OrderFit f = fit_order(xs, sups);
        rep.summary["fit"] = f.to_json();
        rep.criteria.push_back(within("slope of sup relative energy vs epsilon", f.slope, ws.slope_min, ws.slope_max));
        char ann[96];
        std::snprintf(ann, sizeof ann, "slope = %.3f +/- %.3f", f.slope, f.stderr_slope);
        eplot.annotation = ann;
    }
    rep.plots.push_back(std::move(eplot));
    return rep;
}

Report thermo_check(const PressureModel& model) {
    Report rep;
    rep.kind = "thermo-check";
    validate_model(model);
    rep.summary["model"] = model_to_json(model);
    const auto samples = logspace(0.1, 10.0, 200);
    const IdentityReport id = verify_identities(model, samples);
    rep.summary["identities"] = id.to_json();
    for (const auto& e : id.residuals)
        rep.criteria.push_back(at_most("residual " + e.name, e.max_residual,
                                       e.name.rfind("W = H + Q", 0) == 0 ? 1e-9 : id.tolerance));
    rep.criteria.push_back(holds("growth bounds", id.growth_bounds_hold));

    const auto sp = spinodal_interval(model);
    if (sp) {
        rep.summary["spinodal"] = {{"r1", sp->r1}, {"r2", sp->r2}};
    } else {
        rep.summary["spinodal"] = nullptr;
    }
    const ConvexityCertificate cc = convexity_constants(model, 0.5, 1.0, 4.5, 8.0, 1000);
    rep.summary["convexity"] = {{"window", {0.5, 1.0, 4.5, 8.0}},
                                {"k_h", cc.k_h},
                                {"K_h", cc.K_h},
                                {"pairs_checked", cc.pairs_checked},
                                {"violations", cc.violations}};
    rep.criteria.push_back(holds("convexity k_h > 0 and K_h finite", cc.k_h > 0.0 && std::isfinite(cc.K_h)));
    rep.criteria.push_back(at_most("convexity violations", static_cast<double>(cc.violations), 0.0));

    io::CsvTable tab{"pressure", {"rho", "p", "dp", "W", "H", "Q"}, {}};
    tab.columns.assign(6, {});
    io::SvgPlot plot{"pressure", "pressure " + model.name, "rho", "p", false, false, {{"p", {}, {}}}, ""};
    for (double r : logspace(0.1, 10.0, 200)) {
        tab.columns[0].push_back(r);
        tab.columns[1].push_back(eval_pressure(model, r));
        tab.columns[2].push_back(eval_pressure_derivative(model, r));
        tab.columns[3].push_back(potential(model, Potential::W, r));
        tab.columns[4].push_back(potential(model, Potential::H, r));
        tab.columns[5].push_back(potential(model, Potential::Q, r));
        plot.series[0].x.push_back(r);
        plot.series[0].y.push_back(eval_pressure(model, r));
    }
    if (sp) {
        char ann[96];
        std::snprintf(ann, sizeof ann, "spinodal (%.4f, %.4f)", sp->r1, sp->r2);
        plot.annotation = ann;
    }
    rep.tables.push_back(std::move(tab));
    rep.plots.push_back(std::move(plot));
    return rep;
}

Report run_experiment(const ExperimentConfig& cfg) {
    switch (cfg.kind) {
        case ExperimentKind::simulate: return simulate(cfg);
        case ExperimentKind::sweep_alpha: return sweep_alpha(cfg);
        case ExperimentKind::weak_strong: return weak_strong_study(cfg);
        case ExperimentKind::thermo_check: return thermo_check(cfg.params.model);
        case ExperimentKind::energy_audit:
            fail(ErrorCode::config, "energy-audit runs on a saved trajectory, not on a config");
    }
    fail(ErrorCode::config, "unknown experiment kind");
}

void emit_reports(const Report& report, const std::filesystem::path& outdir) {
    std::filesystem::create_directories(outdir);
    nlohmann::json j = report.to_json();
    nlohmann::json files = nlohmann::json::array();
    for (const auto& t : report.tables) {
        io::write_text(outdir / (t.name + ".csv"), io::to_csv(t));
        files.push_back(t.name + ".csv");
    }
    for (const auto& p : report.plots) {
        io::write_text(outdir / (p.name + ".svg"), io::to_svg(p));
        files.push_back(p.name + ".svg");
    }
    j["files"] = files;
    io::write_json(outdir / "report.json", j);
}

}  // namespace nskr
