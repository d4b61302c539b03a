#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace nskr {

// ---------------------------------------------------------------------------
// Pressure parts. A pressure model is p = h + q with h monotone (power-law
// growth) and q globally Lipschitz; each part knows its value, derivative and
// its potential  F(r) = r * int_1^r f(z) / z^2 dz.
// ---------------------------------------------------------------------------

struct ZeroPart {};

/// coeff * r^exponent
struct PowerLawPart {
    double coeff = 1.0;
    double exponent = 2.0;
};

/// sum_k coeffs[k] r^k on [0, continuation], continued linearly with slope
/// f'(continuation) beyond it. coeffs[0] must be zero.
struct PolynomialPart {
    std::vector<double> coeffs;
    double continuation = std::numeric_limits<double>::infinity();
};

/// Arbitrary callable; derivative by central differences, potential by
/// adaptive quadrature.
struct CustomPart {
    std::function<double(double)> f;
    std::string label = "custom";
};

class PressurePart {
public:
    using Spec = std::variant<ZeroPart, PowerLawPart, PolynomialPart, CustomPart>;

    PressurePart() = default;
    PressurePart(Spec spec);  // NOLINT(google-explicit-constructor)

    double value(double r) const;
    double derivative(double r) const;
    /// r * int_1^r f(z)/z^2 dz
    double potential(double r) const;
    /// d/dr of potential(r); needs r > 0.
    double potential_derivative(double r) const;

    bool is_zero() const { return std::holds_alternative<ZeroPart>(spec_); }
    bool has_closed_form() const { return !std::holds_alternative<CustomPart>(spec_); }
    const Spec& spec() const { return spec_; }

    nlohmann::json to_json() const;

    /// Same part with every value multiplied by `factor`.
    PressurePart scaled(double factor) const;

private:
    double primitive(double r) const;  // int_1^r f(z)/z^2 dz

    Spec spec_ = ZeroPart{};
};

struct PressureModel {
    std::string name;
    PressurePart h;
    PressurePart q;
    double gamma = 2.0;
    double h_inf = 2.0;
    double q_lipschitz = 0.0;
};

enum class Potential { W, H, Q };

/// h = r^gamma, q = 0.
PressureModel powerlaw_preset(double gamma = 2.0);
/// p = 0.1728 r^3 - 1.44 r^2 + 3.36 r, split as h = 0.1728 r^3 and
/// q = -1.44 r^2 + 3.36 r continued linearly beyond r = 8.
PressureModel figure1_preset();
/// Preset by name ("powerlaw" | "figure1"); throws config error otherwise.
PressureModel preset_by_name(const std::string& name, double gamma = 2.0);
/// h and q from polynomial coefficient lists (index = power). gamma is the
/// highest power of h with a nonzero coefficient; h_inf = gamma * leading coeff.
PressureModel polynomial_model(std::vector<double> h_coeffs, std::vector<double> q_coeffs,
                               double q_continuation = std::numeric_limits<double>::infinity(),
                               std::string name = "polynomial");

/// Checks the invariants of a model (h(0) = q(0) = 0, h' > 0, asymptotic
/// slope, Lipschitz bound) on sample grids; throws on violation.
void validate_model(const PressureModel& model);

nlohmann::json model_to_json(const PressureModel& model);
/// Inverse of model_to_json; custom parts cannot be restored (config error).
PressureModel model_from_json(const nlohmann::json& j);

double eval_pressure(const PressureModel& model, double rho);
double eval_pressure_derivative(const PressureModel& model, double rho);
double potential(const PressureModel& model, Potential which, double rho);
double potential_derivative(const PressureModel& model, Potential which, double rho);

/// p(rho) + alpha/2 rho^2
double artificial_pressure(const PressureModel& model, double alpha, double rho);
double artificial_pressure_derivative(const PressureModel& model, double alpha, double rho);

/// Bregman gap H(rho) - H(r) - H'(r)(rho - r).
double relative_H(const PressureModel& model, double rho, double r_ref);

struct SpinodalInterval {
    double r1 = 0.0;
    double r2 = 0.0;
};

/// Roots of p' on [0, r_max] by sign-change scan and bisection; nullopt when
/// p' stays positive. More than two sign changes (or one) is a model-shape
/// error.
std::optional<SpinodalInterval> spinodal_interval(const PressureModel& model,
                                                  double r_max = 10.0,
                                                  int scan_points = 20000);

struct ConvexityCertificate {
    double k_h = 0.0;
    double K_h = 0.0;
    long long pairs_checked = 0;
    long long violations = 0;
    /// Worst pair found by the verification pass (rho, r).
    double worst_rho = 0.0;
    double worst_r = 0.0;
};

/// Grid-search certification of the two convexity estimates for H on the
/// window r1 < a < b < r2: k_h is certified on one grid (with a factor-two
/// safety margin), then both inequalities are re-verified on a staggered grid
/// of the same granularity. rho ranges over [0, rho_max] (default 2 r2).
ConvexityCertificate convexity_constants(const PressureModel& model, double r1, double a,
                                         double b, double r2, int points_per_axis = 1000,
                                         double rho_max = 0.0);

struct IdentityReport {
    struct Entry {
        std::string name;
        double max_residual = 0.0;
        double at = 0.0;
    };
    std::vector<Entry> residuals;
    double tolerance = 1e-6;
    double c1 = 0.0, c2 = 0.0, c3 = 0.0;
    bool growth_bounds_hold = false;
    bool passed = false;
    std::size_t samples = 0;

    nlohmann::json to_json() const;
};

/// Checks the potential identities on `samples` (all > 0): the three
/// "f = F' r - F" relations, the three "f' = r F''" relations, W = H + Q with W
/// computed independently by quadrature of p(z)/z^2, and exhibits constants
/// for r^gamma <= c1 + c2 W and W <= c3 (1 + r^gamma).
IdentityReport verify_identities(const PressureModel& model, std::span<const double> samples,
                                 double tolerance = 1e-6);

/// n points log-uniformly spaced in [lo, hi].
std::vector<double> logspace(double lo, double hi, std::size_t n);

}  // namespace nskr
