#include "quadrature.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "error.hpp"

namespace nskr {
namespace {

// 10-point Gauss-Legendre nodes/weights on [-1, 1] (symmetric half).
constexpr std::array<double, 5> kNodes = {
    0.1488743389816312108848260, 0.4333953941292471907992659, 0.6794095682990244062343274,
    0.8650633666889845107320967, 0.9739065285171717200779640};
constexpr std::array<double, 5> kWeights = {
    0.2955242247147528701738930, 0.2692667193099963550912269, 0.2190863625159820439955349,
    0.1494513491505805931457763, 0.0666713443086881375935688};

double gauss10(const std::function<double(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t k = 0; k < kNodes.size(); ++k) {
        const double dx = half * kNodes[k];
        sum += kWeights[k] * (f(mid - dx) + f(mid + dx));
    }
    return sum * half;
}

struct Adaptive {
    const std::function<double(double)>& f;
    int max_depth;
    int intervals = 0;
    double error = 0.0;

    double panel(double a, double b, double whole, double tol, int depth) {
        const double mid = 0.5 * (a + b);
        const double left = gauss10(f, a, mid);
        const double right = gauss10(f, mid, b);
        const double diff = std::abs(left + right - whole);
        if (diff <= tol || diff <= 1e-15 * std::abs(left + right)) {
            ++intervals;
            error += diff;
            return left + right;
        }
        if (depth >= max_depth || !std::isfinite(diff)) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "adaptive quadrature did not converge on [" << a << ", " << b
                << "], local error " << diff << " > " << tol;
            fail(ErrorCode::numeric, msg.str());
        }
        return panel(a, mid, left, 0.5 * tol, depth + 1) +
               panel(mid, b, right, 0.5 * tol, depth + 1);
    }
};

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a,
                                    double b, double abs_tol, int max_depth) {
    if (a == b) return {};
    const double sign = b > a ? 1.0 : -1.0;
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    Adaptive state{f, max_depth};
    const double value = state.panel(lo, hi, gauss10(f, lo, hi), abs_tol, 0);
    return {sign * value, state.error, state.intervals};
}

}  // namespace nskr
