#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "grid.hpp"
#include "quadrature.hpp"
#include "test_util.hpp"
#include "tridiagonal.hpp"

using namespace nskr;
using std::numbers::pi;
using testutil::error_of;

namespace {

double max_abs_diff(const Field& a, const Field& b, std::size_t skip = 0) {
    double m = 0.0;
    for (std::size_t i = skip; i + skip < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// Dense Gaussian elimination with partial pivoting.
std::vector<double> dense_solve(std::vector<std::vector<double>> A, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(A[i][k]) > std::abs(A[p][k])) p = i;
        std::swap(A[k], A[p]);
        std::swap(b[k], b[p]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = A[i][k] / A[k][k];
            for (std::size_t j = k; j < n; ++j) A[i][j] -= f * A[k][j];
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t k = n; k-- > 0;) {
        double s = b[k];
        for (std::size_t j = k + 1; j < n; ++j) s -= A[k][j] * x[j];
        x[k] = s / A[k][k];
    }
    return x;
}

Tridiagonal random_dominant(std::size_t n, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Tridiagonal m;
    m.a.resize(n);
    m.b.resize(n);
    m.c.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        m.a[i] = U(gen);
        m.c[i] = U(gen);
        m.b[i] = std::abs(m.a[i]) + std::abs(m.c[i]) + 0.5 + std::abs(U(gen));
    }
    return m;
}

}  // namespace

TEST_CASE("grid construction") {
    const auto g = Grid1D::make(2.0, 16, BcMode::wall);
    CHECK(g.dx() == 0.125);
    CHECK(g.x(0) == 0.0625);
    CHECK(g.refined(2).n_cells == 32);
    CHECK(error_of([] { Grid1D::make(1.0, 4, BcMode::periodic); }) == ErrorCode::invalid_argument);
    CHECK(error_of([] { Grid1D::make(0.0, 16, BcMode::periodic); }) == ErrorCode::invalid_argument);
    CHECK(parse_bc("periodic") == BcMode::periodic);
    CHECK(parse_bc("wall") == BcMode::wall);
    CHECK(error_of([] { parse_bc("open"); }) == ErrorCode::config);
}

TEST_CASE("stencils annihilate constants") {
    for (auto bc : {BcMode::periodic, BcMode::wall}) {
        const auto g = Grid1D::make(1.0, 32, bc);
        const Field f(32, 3.25);
        for (auto par : {Parity::none, Parity::even}) {
            for (double v : ddx(g, f, par)) CHECK(v == 0.0);
            for (double v : laplacian(g, f, par)) CHECK(v == 0.0);
            for (double v : grad_laplacian(g, f, par)) CHECK(v == 0.0);
        }
    }
}

TEST_CASE("exactness on polynomials") {
    const auto g = Grid1D::make(1.0, 40, BcMode::wall);
    const Field lin = sample(g, [](double x) { return 3.0 * x - 1.0; });
    const Field d = ddx(g, lin, Parity::none);
    for (double v : d) CHECK(v == doctest::Approx(3.0).epsilon(1e-11));
    const Field quad = sample(g, [](double x) { return x * x; });
    const Field l = laplacian(g, quad, Parity::none);
    for (std::size_t i = 1; i + 1 < l.size(); ++i) CHECK(l[i] == doctest::Approx(2.0).epsilon(1e-9));
    const Field cub = sample(g, [](double x) { return x * x * x; });
    const Field gl = grad_laplacian(g, cub, Parity::none);
    for (std::size_t i = 2; i + 2 < gl.size(); ++i) CHECK(gl[i] == doctest::Approx(6.0).epsilon(1e-6));
}

TEST_CASE("periodic stencils converge at second order") {
    const double L = 2.0, k = 2 * pi / L;
    std::vector<double> e1, e2, e3;
    for (std::size_t n : {32u, 64u, 128u, 256u}) {
        const auto g = Grid1D::make(L, n, BcMode::periodic);
        const Field f = sample(g, [&](double x) { return std::sin(k * x); });
        e1.push_back(max_abs_diff(ddx(g, f), sample(g, [&](double x) { return k * std::cos(k * x); })));
        e2.push_back(max_abs_diff(laplacian(g, f),
                                  sample(g, [&](double x) { return -k * k * std::sin(k * x); })));
        e3.push_back(max_abs_diff(grad_laplacian(g, f),
                                  sample(g, [&](double x) { return -k * k * k * std::cos(k * x); })));
    }
    for (std::size_t i = 0; i + 1 < e1.size(); ++i) {
        CHECK(std::abs(testutil::observed_order(e1[i], e1[i + 1]) - 2.0) <= 0.1);
        CHECK(std::abs(testutil::observed_order(e2[i], e2[i + 1]) - 2.0) <= 0.1);
        CHECK(testutil::observed_order(e3[i], e3[i + 1]) >= 1.9);
    }
}

TEST_CASE("wall stencils: interior order two, boundary order at least one") {
    // cos(pi x) satisfies the even wall continuation exactly.
    std::vector<double> ei, eb;
    for (std::size_t n : {32u, 64u, 128u, 256u}) {
        const auto g = Grid1D::make(1.0, n, BcMode::wall);
        const Field f = sample(g, [](double x) { return std::cos(pi * x); });
        const Field ex = sample(g, [](double x) { return pi * pi * pi * std::sin(pi * x); });
        const Field gl = grad_laplacian(g, f, Parity::even);
        ei.push_back(max_abs_diff(gl, ex, n / 8));
        eb.push_back(max_abs_diff(gl, ex));
        const Field lx = laplacian(g, f, Parity::even);
        CHECK(max_abs_diff(lx, sample(g, [](double x) { return -pi * pi * std::cos(pi * x); })) <
              20.0 / double(n * n));
    }
    for (std::size_t i = 0; i + 1 < ei.size(); ++i) {
        CHECK(testutil::observed_order(ei[i], ei[i + 1]) >= 1.9);
        CHECK(testutil::observed_order(eb[i], eb[i + 1]) >= 0.9);
    }
}

TEST_CASE("integration") {
    const auto g2 = Grid1D::make(2.0, 64, BcMode::periodic);
    CHECK(integrate(g2, Field(64, 1.0)) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(std::abs(integrate(g2, sample(g2, [](double x) { return std::sin(pi * x); }))) < 1e-14);
    const auto g = Grid1D::make(1.0, 512, BcMode::wall);
    CHECK(std::abs(integrate(g, sample(g, [](double x) { return x; })) - 0.5) < 1e-6);
    CHECK(mean(g2, Field(64, 4.0)) == doctest::Approx(4.0));
}

TEST_CASE("telescoping and discrete integration by parts") {
    std::mt19937_64 gen(3);
    std::normal_distribution<double> N01;
    const auto g = Grid1D::make(1.0, 128, BcMode::periodic);
    for (int trial = 0; trial < 20; ++trial) {
        Field f(128), h(128);
        for (auto& v : f) v = N01(gen);
        for (auto& v : h) v = N01(gen);
        double nf = std::sqrt(l2_norm_sq(g, f));
        CHECK(std::abs(integrate(g, ddx(g, f))) <= 1e-13 * nf);
        Field s(128);
        const Field dh = ddx(g, h), df = ddx(g, f);
        for (std::size_t i = 0; i < 128; ++i) s[i] = f[i] * dh[i] + h[i] * df[i];
        CHECK(std::abs(integrate(g, s)) <= 1e-12);
        // sum f lap f dx = - sum over faces |grad f|^2 dx
        const Field lf = laplacian(g, f);
        Field p(128);
        for (std::size_t i = 0; i < 128; ++i) p[i] = f[i] * lf[i];
        CHECK(integrate(g, p) == doctest::Approx(-grad_norm_sq(g, f, Parity::none)).epsilon(1e-12));
    }
    const auto w = Grid1D::make(1.0, 64, BcMode::wall);
    Field f(64);
    for (auto& v : f) v = N01(gen);
    for (auto par : {Parity::even, Parity::odd}) {
        const Field lf = laplacian(w, f, par);
        Field p(64);
        for (std::size_t i = 0; i < 64; ++i) p[i] = f[i] * lf[i];
        CHECK(integrate(w, p) == doctest::Approx(-grad_norm_sq(w, f, par)).epsilon(1e-12));
    }
}

TEST_CASE("restriction and norms") {
    const Field fine{1, 3, 5, 7, 2, 2, 0, 4};
    const Field r = restrict_half(fine);
    CHECK(r == Field{2, 6, 2, 2});
    CHECK(restrict_by(fine, 4) == Field{4, 2});
    const auto g = Grid1D::make(1.0, 256, BcMode::periodic);
    const Field s = sample(g, [](double x) { return std::sin(2 * pi * x); });
    CHECK(l2_norm_sq(g, s) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(h1_norm_sq(g, s, Parity::none) == doctest::Approx(0.5 + 2 * pi * pi).epsilon(1e-3));
    CHECK(difference(Field{3, 4}, Field{1, 1}) == Field{2, 3});
    CHECK(error_of([] { require_finite(Field{1.0, NAN}, "x"); }) == ErrorCode::divergence);
    CHECK(error_of([] { restrict_half(Field{1, 2, 3}); }) == ErrorCode::invalid_argument);
}

TEST_CASE("Thomas and cyclic solvers agree with dense elimination") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (std::size_t n : {3u, 8u, 50u}) {
        const auto m = random_dominant(n, gen);
        std::vector<double> d(n);
        for (auto& v : d) v = U(gen);
        CHECK(m.dominance_margin(false) > 0.0);
        std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0)), C = A;
        for (std::size_t i = 0; i < n; ++i) {
            A[i][i] = m.b[i];
            if (i > 0) A[i][i - 1] = m.a[i];
            if (i + 1 < n) A[i][i + 1] = m.c[i];
        }
        C = A;
        C[0][n - 1] += m.a[0];
        C[n - 1][0] += m.c[n - 1];
        const auto x = solve_thomas(m, d), xd = dense_solve(A, d);
        const auto y = solve_cyclic(m, d), yd = dense_solve(C, d);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(x[i] == doctest::Approx(xd[i]).epsilon(1e-12));
            CHECK(y[i] == doctest::Approx(yd[i]).epsilon(1e-12));
        }
    }
    Tridiagonal z{{0, 1}, {0, 1}, {1, 0}};
    CHECK(error_of([&] { solve_thomas(z, std::vector<double>{1, 1}); }) == ErrorCode::numeric);
}

TEST_CASE("adaptive quadrature") {
    const auto r = integrate_adaptive([](double x) { return std::exp(x); }, 0.0, 1.0);
    CHECK(r.value == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));
    const auto s = integrate_adaptive([](double x) { return 1.0 / x; }, 2.0, 1.0);
    CHECK(s.value == doctest::Approx(-std::log(2.0)).epsilon(1e-13));
    CHECK(error_of([] { integrate_adaptive([](double x) { return 1.0 / x; }, 0.0, 1.0, 1e-10, 12); }) ==
          ErrorCode::numeric);
}
