#include "thermo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "error.hpp"
#include "quadrature.hpp"

namespace nskr {
namespace {

constexpr double kFdStep = 1e-6;

double horner(const std::vector<double>& c, double r) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * r + *it;
    return acc;
}

double horner_derivative(const std::vector<double>& c, double r) {
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) acc = acc * r + static_cast<double>(k) * c[k];
    return acc;
}

// int_1^r z^{k-2} dz for k >= 1
double monomial_primitive(std::size_t k, double r) {
    if (k == 1) return std::log(r);
    const double e = static_cast<double>(k) - 1.0;
    return (std::pow(r, e) - 1.0) / e;
}

double central_difference(const std::function<double(double)>& f, double r) {
    const double step = std::min(kFdStep, 0.5 * r);
    if (step <= 0.0) return (f(kFdStep) - f(0.0)) / kFdStep;
    return (f(r + step) - f(r - step)) / (2.0 * step);
}

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(10);
    s << v;
    return s.str();
}

void require_nonnegative(double rho, const char* what) {
    if (!(rho >= 0.0)) fail(ErrorCode::domain, std::string(what) + ": negative density " + fmt(rho));
}

}  // namespace

PressurePart::PressurePart(Spec spec) : spec_(std::move(spec)) {
    if (auto* poly = std::get_if<PolynomialPart>(&spec_)) {
        if (!poly->coeffs.empty() && poly->coeffs[0] != 0.0)
            fail(ErrorCode::invalid_argument, "polynomial pressure part must vanish at 0");
        if (poly->continuation < 1.0)
            fail(ErrorCode::invalid_argument, "linear continuation point must be >= 1");
    }
}

double PressurePart::value(double r) const {
    return std::visit(
        [r](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ZeroPart>) {
                return 0.0;
            } else if constexpr (std::is_same_v<T, PowerLawPart>) {
                return s.coeff * std::pow(r, s.exponent);
            } else if constexpr (std::is_same_v<T, PolynomialPart>) {
                if (r <= s.continuation) return horner(s.coeffs, r);
                const double R = s.continuation;
                return horner(s.coeffs, R) + horner_derivative(s.coeffs, R) * (r - R);
            } else {
                return s.f(r);
            }
        },
        spec_);
}

double PressurePart::derivative(double r) const {
    return std::visit(
        [r](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ZeroPart>) {
                return 0.0;
            } else if constexpr (std::is_same_v<T, PowerLawPart>) {
                if (r == 0.0) return s.exponent == 1.0 ? s.coeff : 0.0;
                return s.coeff * s.exponent * std::pow(r, s.exponent - 1.0);
            } else if constexpr (std::is_same_v<T, PolynomialPart>) {
                return horner_derivative(s.coeffs, std::min(r, s.continuation));
            } else {
                return central_difference(s.f, r);
            }
        },
        spec_);
}

double PressurePart::primitive(double r) const {
    return std::visit(
        [r](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ZeroPart>) {
                return 0.0;
            } else if constexpr (std::is_same_v<T, PowerLawPart>) {
                if (s.exponent == 1.0) return s.coeff * std::log(r);
                return s.coeff * (std::pow(r, s.exponent - 1.0) - 1.0) / (s.exponent - 1.0);
            } else if constexpr (std::is_same_v<T, PolynomialPart>) {
                const double x = std::min(r, s.continuation);
                double acc = 0.0;
                for (std::size_t k = 1; k < s.coeffs.size(); ++k)
                    if (s.coeffs[k] != 0.0) acc += s.coeffs[k] * monomial_primitive(k, x);
                if (r > s.continuation) {
                    const double R = s.continuation;
                    const double fR = horner(s.coeffs, R);
                    const double dR = horner_derivative(s.coeffs, R);
                    acc += (fR - dR * R) * (1.0 / R - 1.0 / r) + dR * std::log(r / R);
                }
                return acc;
            } else {
                const auto& f = s.f;
                return integrate_adaptive([&f](double z) { return f(z) / (z * z); }, 1.0, r,
                                          1e-10)
                    .value;
            }
        },
        spec_);
}

double PressurePart::potential(double r) const {
    if (r == 0.0 || is_zero()) return 0.0;
    return r * primitive(r);
}

double PressurePart::potential_derivative(double r) const {
    if (!(r > 0.0)) fail(ErrorCode::domain, "potential derivative needs r > 0, got " + fmt(r));
    return primitive(r) + value(r) / r;
}

PressurePart PressurePart::scaled(double factor) const {
    return std::visit(
        [factor](const auto& s) -> PressurePart {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ZeroPart>) {
                return PressurePart{};
            } else if constexpr (std::is_same_v<T, PowerLawPart>) {
                return PressurePart{PowerLawPart{s.coeff * factor, s.exponent}};
            } else if constexpr (std::is_same_v<T, PolynomialPart>) {
                PolynomialPart p = s;
                for (double& c : p.coeffs) c *= factor;
                return PressurePart{p};
            } else {
                auto f = s.f;
                return PressurePart{CustomPart{[f, factor](double r) { return factor * f(r); },
                                               s.label + "*" + fmt(factor)}};
            }
        },
        spec_);
}

nlohmann::json PressurePart::to_json() const {
    return std::visit(
        [](const auto& s) -> nlohmann::json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ZeroPart>) {
                return {{"kind", "zero"}};
            } else if constexpr (std::is_same_v<T, PowerLawPart>) {
                return {{"kind", "powerlaw"}, {"coeff", s.coeff}, {"exponent", s.exponent}};
            } else if constexpr (std::is_same_v<T, PolynomialPart>) {
                nlohmann::json j = {{"kind", "polynomial"}, {"coeffs", s.coeffs}};
                if (std::isfinite(s.continuation)) j["continuation"] = s.continuation;
                return j;
            } else {
                return {{"kind", "custom"}, {"label", s.label}};
            }
        },
        spec_);
}

// --------------------------------------------------------------------------
// Presets

PressureModel powerlaw_preset(double gamma) {
    if (!(gamma > 1.0)) fail(ErrorCode::invalid_argument, "powerlaw preset needs gamma > 1");
    PressureModel m;
    m.name = "powerlaw";
    m.h = PressurePart{PowerLawPart{1.0, gamma}};
    m.q = PressurePart{ZeroPart{}};
    m.gamma = gamma;
    m.h_inf = gamma;
    m.q_lipschitz = 0.0;
    return m;
}

PressureModel figure1_preset() {
    PressureModel m;
    m.name = "figure1";
    m.h = PressurePart{PowerLawPart{0.1728, 3.0}};
    constexpr double kContinuation = 8.0;
    m.q = PressurePart{PolynomialPart{{0.0, 3.36, -1.44}, kContinuation}};
    m.gamma = 3.0;
    m.h_inf = 3.0 * 0.1728;
    // |q'| = |3.36 - 2.88 r| is maximal at the continuation point.
    m.q_lipschitz = std::abs(3.36 - 2.88 * kContinuation);
    return m;
}

PressureModel preset_by_name(const std::string& name, double gamma) {
    if (name == "powerlaw") return powerlaw_preset(gamma);
    if (name == "figure1") return figure1_preset();
    fail(ErrorCode::config, "unknown pressure preset '" + name + "'");
}

PressureModel polynomial_model(std::vector<double> h_coeffs, std::vector<double> q_coeffs,
                               double q_continuation, std::string name) {
    while (!h_coeffs.empty() && h_coeffs.back() == 0.0) h_coeffs.pop_back();
    while (!q_coeffs.empty() && q_coeffs.back() == 0.0) q_coeffs.pop_back();
    if (h_coeffs.size() < 3)
        fail(ErrorCode::invalid_argument, "h must be a polynomial of degree >= 2 (gamma > 1)");
    if (q_coeffs.size() > 2 && !std::isfinite(q_continuation))
        fail(ErrorCode::invalid_argument,
             "nonlinear q needs a finite linear-continuation point to be globally Lipschitz");
    PressureModel m;
    m.name = std::move(name);
    const auto degree = static_cast<double>(h_coeffs.size() - 1);
    m.gamma = degree;
    m.h_inf = degree * h_coeffs.back();
    m.h = PressurePart{PolynomialPart{std::move(h_coeffs)}};
    if (q_coeffs.empty()) {
        m.q = PressurePart{ZeroPart{}};
    } else {
        const double R = std::isfinite(q_continuation) ? q_continuation : 1.0;
        PolynomialPart qp{q_coeffs, std::isfinite(q_continuation)
                                        ? q_continuation
                                        : std::numeric_limits<double>::infinity()};
        m.q = PressurePart{qp};
        double lip = 0.0;
        constexpr int kSamples = 20000;
        for (int i = 0; i <= kSamples; ++i)
            lip = std::max(lip, std::abs(horner_derivative(q_coeffs, R * i / kSamples)));
        m.q_lipschitz = lip;
    }
    validate_model(m);
    return m;
}

void validate_model(const PressureModel& model) {
    if (!(model.gamma > 1.0)) fail(ErrorCode::invalid_argument, "gamma must exceed 1");
    if (!(model.h_inf > 0.0)) fail(ErrorCode::invalid_argument, "h_inf must be positive");
    if (std::abs(model.h.value(0.0)) > 1e-14 || std::abs(model.q.value(0.0)) > 1e-14)
        fail(ErrorCode::invalid_argument, "pressure parts must vanish at zero density");
    for (int i = 1; i <= 2000; ++i) {
        const double r = 10.0 * i / 2000.0;
        if (!(model.h.derivative(r) > 0.0))
            fail(ErrorCode::invalid_argument, "h' must be positive, fails at r = " + fmt(r));
    }
    for (double r : {1e3, 1e4}) {
        const double ratio = model.h.derivative(r) / std::pow(r, model.gamma - 1.0);
        if (std::abs(ratio - model.h_inf) > 0.01 * model.h_inf)
            fail(ErrorCode::invalid_argument,
                 "h'(r)/r^(gamma-1) not within 1% of h_inf at r = " + fmt(r));
    }
    const double L = model.q_lipschitz;
    for (int i = 0; i < 400; ++i) {
        const double r1 = 0.05 * i;
        const double r2 = r1 + 0.0173 + 0.011 * (i % 7);
        const double dq = std::abs(model.q.value(r1) - model.q.value(r2));
        if (dq > L * std::abs(r1 - r2) * (1.0 + 1e-9) + 1e-14)
            fail(ErrorCode::invalid_argument, "q violates Lipschitz bound near r = " + fmt(r1));
    }
}

nlohmann::json model_to_json(const PressureModel& model) {
    return {{"name", model.name},         {"h", model.h.to_json()},
            {"q", model.q.to_json()},     {"gamma", model.gamma},
            {"h_inf", model.h_inf},       {"q_lipschitz", model.q_lipschitz}};
}

namespace {

PressurePart part_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "zero") return PressurePart{ZeroPart{}};
    if (kind == "powerlaw")
        return PressurePart{PowerLawPart{j.at("coeff").get<double>(), j.at("exponent").get<double>()}};
    if (kind == "polynomial") {
        PolynomialPart pp{j.at("coeffs").get<std::vector<double>>()};
        if (j.contains("continuation")) pp.continuation = j.at("continuation").get<double>();
        return PressurePart{pp};
    }
    fail(ErrorCode::config, "pressure part of kind '" + kind + "' cannot be restored");
}

}  // namespace

PressureModel model_from_json(const nlohmann::json& j) {
    try {
        PressureModel m;
        m.name = j.at("name").get<std::string>();
        m.h = part_from_json(j.at("h"));
        m.q = part_from_json(j.at("q"));
        m.gamma = j.at("gamma").get<double>();
        m.h_inf = j.at("h_inf").get<double>();
        m.q_lipschitz = j.at("q_lipschitz").get<double>();
        return m;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::config, std::string("malformed pressure model: ") + e.what());
    }
}

// --------------------------------------------------------------------------
// Evaluation

double eval_pressure(const PressureModel& model, double rho) {
    require_nonnegative(rho, "eval_pressure");
    return model.h.value(rho) + model.q.value(rho);
}

double eval_pressure_derivative(const PressureModel& model, double rho) {
    require_nonnegative(rho, "eval_pressure_derivative");
    return model.h.derivative(rho) + model.q.derivative(rho);
}

double potential(const PressureModel& model, Potential which, double rho) {
    require_nonnegative(rho, "potential");
    switch (which) {
        case Potential::H: return model.h.potential(rho);
        case Potential::Q: return model.q.potential(rho);
        case Potential::W: return model.h.potential(rho) + model.q.potential(rho);
    }
    return 0.0;
}

double potential_derivative(const PressureModel& model, Potential which, double rho) {
    switch (which) {
        case Potential::H: return model.h.potential_derivative(rho);
        case Potential::Q: return model.q.potential_derivative(rho);
        case Potential::W:
            return model.h.potential_derivative(rho) + model.q.potential_derivative(rho);
    }
    return 0.0;
}

double artificial_pressure(const PressureModel& model, double alpha, double rho) {
    if (!(alpha > 0.0)) fail(ErrorCode::domain, "artificial pressure needs alpha > 0");
    return eval_pressure(model, rho) + 0.5 * alpha * rho * rho;
}

double artificial_pressure_derivative(const PressureModel& model, double alpha, double rho) {
    return eval_pressure_derivative(model, rho) + alpha * rho;
}

double relative_H(const PressureModel& model, double rho, double r_ref) {
    require_nonnegative(rho, "relative_H");
    if (!(r_ref > 0.0)) fail(ErrorCode::domain, "relative_H needs r_ref > 0, got " + fmt(r_ref));
    if (rho == r_ref) return 0.0;
    return model.h.potential(rho) - model.h.potential(r_ref) -
           model.h.potential_derivative(r_ref) * (rho - r_ref);
}

// --------------------------------------------------------------------------
// Spinodal interval

std::optional<SpinodalInterval> spinodal_interval(const PressureModel& model, double r_max,
                                                  int scan_points) {
    auto dp = [&](double r) { return eval_pressure_derivative(model, r); };
    std::vector<double> roots;
    // p'(0) may vanish (h = r^gamma), so the scan starts one sample in.
    double prev_r = r_max / scan_points;
    double prev = dp(prev_r);
    const double first = prev;
    for (int i = 2; i <= scan_points; ++i) {
        const double r = r_max * i / scan_points;
        const double cur = dp(r);
        if ((prev > 0.0) != (cur > 0.0)) {
            double lo = prev_r, hi = r;
            const bool rising = cur > 0.0;
            for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
                const double mid = 0.5 * (lo + hi);
                ((dp(mid) > 0.0) == rising ? hi : lo) = mid;
            }
            roots.push_back(0.5 * (lo + hi));
        }
        prev_r = r;
        prev = cur;
    }
    if (roots.empty()) {
        if (!(first > 0.0) && !(dp(r_max) > 0.0))
            fail(ErrorCode::model_shape, "p' is nonpositive on the whole scan range");
        return std::nullopt;
    }
    if (roots.size() != 2 || !(first > 0.0)) {
        fail(ErrorCode::model_shape, "p' has " + std::to_string(roots.size()) +
                                         " sign changes on [0, " + fmt(r_max) +
                                         "]; not of Van-der-Waals type");
    }
    return SpinodalInterval{roots[0], roots[1]};
}

// --------------------------------------------------------------------------
// Convexity certification

ConvexityCertificate convexity_constants(const PressureModel& model, double r1, double a,
                                         double b, double r2, int points_per_axis,
                                         double rho_max) {
    if (!(0.0 < r1 && r1 < a && a < b && b < r2))
        fail(ErrorCode::invalid_argument, "convexity window needs 0 < r1 < a < b < r2");
    if (points_per_axis < 2) fail(ErrorCode::invalid_argument, "need >= 2 points per axis");
    if (rho_max <= 0.0) rho_max = 2.0 * r2;
    const int n = points_per_axis;
    const double gamma = model.gamma;

    struct RefPoint {
        double r, H, dH, h, dh;
    };
    auto ref_point = [&](double r) {
        return RefPoint{r, model.h.potential(r), model.h.potential_derivative(r), model.h.value(r),
                        model.h.derivative(r)};
    };
    auto lower_weight = [&](double rho, double r) {
        return (rho >= r1 && rho <= r2) ? (rho - r) * (rho - r) : 1.0 + std::pow(rho, gamma);
    };

    // Pass 1: certify on the node-aligned grid.
    double k_min = std::numeric_limits<double>::infinity();
    double K_max = 0.0;
    double bad_rho = 0.0, bad_r = 0.0;
    std::vector<double> rho_nodes(n), H_rho(n), h_rho(n);
    for (int i = 0; i < n; ++i) {
        rho_nodes[i] = rho_max * i / (n - 1);
        H_rho[i] = model.h.potential(rho_nodes[i]);
        h_rho[i] = model.h.value(rho_nodes[i]);
    }
    for (int j = 0; j < n; ++j) {
        const RefPoint rp = ref_point(a + (b - a) * j / (n - 1));
        for (int i = 0; i < n; ++i) {
            const double rho = rho_nodes[i];
            const double d = rho - rp.r;
            if (std::abs(d) < 1e-12) continue;
            const double gapH = H_rho[i] - rp.H - rp.dH * d;
            const double ratio = gapH / lower_weight(rho, rp.r);
            if (ratio < k_min) {
                k_min = ratio;
                bad_rho = rho;
                bad_r = rp.r;
            }
            if (gapH > 0.0) K_max = std::max(K_max, std::abs(h_rho[i] - rp.h - rp.dh * d) / gapH);
        }
    }
    if (!(k_min > 0.0)) {
        fail(ErrorCode::certification, "H is not uniformly convex on the window: Bregman ratio " +
                                           fmt(k_min) + " at (rho, r) = (" + fmt(bad_rho) +
                                           ", " + fmt(bad_r) + ")");
    }

    ConvexityCertificate cert;
    cert.k_h = 0.5 * k_min;
    cert.K_h = std::max(2.0 * K_max, 1e-12);

    // Pass 2: verify both inequalities on a staggered grid.
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        rho_nodes[i] = rho_max * (i + 0.5) / n;
        H_rho[i] = model.h.potential(rho_nodes[i]);
        h_rho[i] = model.h.value(rho_nodes[i]);
    }
    for (int j = 0; j < n; ++j) {
        const RefPoint rp = ref_point(a + (b - a) * (j + 0.5) / n);
        for (int i = 0; i < n; ++i) {
            const double rho = rho_nodes[i];
            const double d = rho - rp.r;
            const double gapH = H_rho[i] - rp.H - rp.dH * d;
            const double gaph = std::abs(h_rho[i] - rp.h - rp.dh * d);
            ++cert.pairs_checked;
            const double slack1 = gapH - cert.k_h * lower_weight(rho, rp.r);
            const double slack2 = cert.K_h * gapH - gaph;
            const double tol = 1e-13 * (1.0 + std::abs(H_rho[i]));
            if (slack1 < -tol || slack2 < -tol) ++cert.violations;
            const double s = std::min(slack1, slack2);
            if (s < worst) {
                worst = s;
                cert.worst_rho = rho;
                cert.worst_r = rp.r;
            }
        }
    }
    return cert;
}

// --------------------------------------------------------------------------
// Identities

nlohmann::json IdentityReport::to_json() const {
    nlohmann::json res = nlohmann::json::array();
    for (const auto& e : residuals)
        res.push_back({{"identity", e.name}, {"max_residual", e.max_residual}, {"at", e.at}});
    return {{"residuals", res},
            {"tolerance", tolerance},
            {"samples", samples},
            {"growth_constants", {{"c1", c1}, {"c2", c2}, {"c3", c3}}},
            {"growth_bounds_hold", growth_bounds_hold},
            {"passed", passed}};
}

IdentityReport verify_identities(const PressureModel& model, std::span<const double> samples,
                                 double tolerance) {
    IdentityReport rep;
    rep.tolerance = tolerance;
    rep.samples = samples.size();
    if (samples.empty()) fail(ErrorCode::invalid_argument, "verify_identities: no samples");
    for (double r : samples)
        if (!(r > 0.0)) fail(ErrorCode::domain, "verify_identities samples must be positive");

    struct Route {
        const char* f_name;
        const char* d_name;
        std::function<double(double)> f, df, F;
    };
    const std::vector<Route> routes = {
        {"p = W'r - W", "p' = r W''", [&](double r) { return eval_pressure(model, r); },
         [&](double r) { return eval_pressure_derivative(model, r); },
         [&](double r) { return potential(model, Potential::W, r); }},
        {"h = H'r - H", "h' = r H''", [&](double r) { return model.h.value(r); },
         [&](double r) { return model.h.derivative(r); },
         [&](double r) { return model.h.potential(r); }},
        {"q = Q'r - Q", "q' = r Q''", [&](double r) { return model.q.value(r); },
         [&](double r) { return model.q.derivative(r); },
         [&](double r) { return model.q.potential(r); }},
    };

    auto track = [](IdentityReport::Entry& e, double residual, double r) {
        if (residual > e.max_residual || !std::isfinite(residual)) {
            e.max_residual = residual;
            e.at = r;
        }
    };

    for (const auto& route : routes) {
        IdentityReport::Entry first{route.f_name}, second{route.d_name};
        for (double r : samples) {
            // F' by central differences with the fixed step.
            const double s1 = std::min(kFdStep, 0.5 * r);
            const double dF = (route.F(r + s1) - route.F(r - s1)) / (2.0 * s1);
            const double f = route.f(r);
            track(first, std::abs(dF * r - route.F(r) - f) / std::max(1.0, std::abs(f)), r);
            // F'' by the five-point stencil; a 1e-6 step is roundoff-dominated here.
            const double s2 = 1e-3 * std::min(1.0, 0.25 * r);
            const double d2F = (-route.F(r + 2 * s2) + 16 * route.F(r + s2) - 30 * route.F(r) +
                                16 * route.F(r - s2) - route.F(r - 2 * s2)) /
                               (12.0 * s2 * s2);
            const double df = route.df(r);
            track(second, std::abs(r * d2F - df) / std::max(1.0, std::abs(df)), r);
        }
        rep.residuals.push_back(first);
        rep.residuals.push_back(second);
    }

    // W by direct quadrature of p(z)/z^2, independent of the per-part closed forms.
    IdentityReport::Entry split{"W = H + Q"};
    for (double r : samples) {
        const double W_direct =
            r * integrate_adaptive(
                    [&](double z) { return eval_pressure(model, z) / (z * z); }, 1.0, r, 1e-12)
                    .value;
        const double W_split =
            potential(model, Potential::H, r) + potential(model, Potential::Q, r);
        track(split, std::abs(W_direct - W_split), r);
    }
    rep.residuals.push_back(split);

    // Growth constants r^gamma <= c1 + c2 W(r), W(r) <= c3 (1 + r^gamma).
    const double gamma = model.gamma;
    double r_top = 0.0;
    for (double r : samples) r_top = std::max(r_top, r);
    const double W_top = potential(model, Potential::W, r_top);
    rep.c2 = W_top > 0.0 ? 2.0 * std::pow(r_top, gamma) / W_top : 2.0 * (gamma - 1.0) / model.h_inf;
    double c1 = 0.0, c3 = 0.0;
    for (double r : samples) {
        const double W = potential(model, Potential::W, r);
        const double g = std::pow(r, gamma);
        c1 = std::max(c1, g - rep.c2 * W);
        c3 = std::max(c3, W / (1.0 + g));
    }
    rep.c1 = 1.01 * c1 + 1e-12;
    rep.c3 = 1.01 * c3 + 1e-12;
    rep.growth_bounds_hold = true;
    for (double r : samples) {
        const double W = potential(model, Potential::W, r);
        const double g = std::pow(r, gamma);
        if (g > rep.c1 + rep.c2 * W || W > rep.c3 * (1.0 + g)) rep.growth_bounds_hold = false;
    }

    rep.passed = rep.growth_bounds_hold;
    for (const auto& e : rep.residuals) {
        const double tol = e.name == "W = H + Q" ? 1e-9 : tolerance;
        if (!(e.max_residual <= tol)) rep.passed = false;
    }
    return rep;
}

std::vector<double> logspace(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    const double a = std::log(lo), b = std::log(hi);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    out.back() = hi;
    return out;
}

}  // namespace nskr
