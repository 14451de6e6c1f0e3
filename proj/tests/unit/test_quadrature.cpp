#include <catch_amalgamated.hpp>

#include <polcascade/quadrature.hpp>

#include <cmath>
#include <complex>
#include <numbers>

using namespace polcascade;
using Catch::Approx;
using C = std::complex<double>;

TEST_CASE("Gauss-Legendre rules are exact to degree 2n-1", "[quadrature]")
{
    for (int n : {8, 16, 33, 64}) {
        const auto r = gauss_legendre(n);
        double wsum = 0;
        for (double w : r.weights) wsum += w;
        CHECK(wsum == Approx(2.0).epsilon(1e-14));
        for (int deg : {2, 2 * n - 2}) {
            double s = 0;
            for (int i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.nodes[i], deg);
            CHECK(s == Approx(2.0 / (deg + 1)).epsilon(1e-12));
        }
        for (int i = 1; i < n; ++i) CHECK(r.nodes[i] > r.nodes[i - 1]);
    }
}

TEST_CASE("adaptive integration of a narrow Lorentzian", "[quadrature]")
{
    const double g = 1e-3;
    auto f = [&](double x) -> C { return 1.0 / (x * x + g * g); };
    const std::vector<double> bp{-1.0, 0.0, 1.0};
    const auto r = integrate_adaptive(f, bp, QuadratureSpec{});
    CHECK(r.value.real() == Approx(2 * std::atan(1.0 / g) / g).epsilon(1e-9));
    CHECK(r.value.imag() == 0.0);
    CHECK(r.evaluations > 0);
}

TEST_CASE("adaptive integration reports non-convergence", "[quadrature]")
{
    auto f = [](double x) -> C { return 1.0 / (x * x + 1e-12); };
    QuadratureSpec q;
    q.max_refinements = 2;
    const std::vector<double> bp{-1.0, 1.0};
    try {
        integrate_adaptive(f, bp, q);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(std::isfinite(e.previous().real()));
        CHECK(std::isfinite(e.last().real()));
        CHECK(e.previous() != e.last());
    }
}

TEST_CASE("quadrature settings validation", "[quadrature]")
{
    QuadratureSpec q;
    q.base_nodes = 4;
    CHECK_THROWS_AS(validate(q), ValidationError);
    q.base_nodes = 16;
    q.rel_tol = 0;
    CHECK_THROWS_AS(validate(q), ValidationError);
    q.rel_tol = 1e-9;
    q.max_refinements = 0;
    CHECK_THROWS_AS(validate(q), ValidationError);
    const std::vector<double> one{1.0};
    CHECK_THROWS_AS(integrate_adaptive([](double) -> C { return 1.0; }, one, QuadratureSpec{}), ValidationError);
}

TEST_CASE("pole pair integral on a finite interval", "[quadrature]")
{
    const C a(0.3, 0.02), b(-0.1, -0.05);
    auto f = [&](double x) -> C { return 1.0 / ((x - a) * (x - b)); };
    QuadratureSpec q;
    q.rel_tol = 1e-12;
    for (auto [lo, hi] : {std::pair{-1.0, 1.0}, std::pair{0.25, 0.35}, std::pair{-3.0, -2.0}}) {
        const std::vector<double> bp{lo, std::clamp(-0.1, lo, hi), std::clamp(0.3, lo, hi), hi};
        const C num = integrate_adaptive(f, bp, q).value;
        const C ana = pole_pair_integral(a, b, lo, hi);
        CHECK(std::abs(ana - num) < 1e-10 * std::abs(num));
    }
    CHECK(pole_pair_integral(a, b, 0.5, 0.5) == C{});
    CHECK_THROWS_AS(pole_pair_integral(a, b, 1.0, 0.0), ValidationError);
    CHECK_THROWS_AS(pole_pair_integral(C(1, 0), b, 0.0, 1.0), ValidationError);
}

TEST_CASE("pole pair integral with infinite limits", "[quadrature]")
{
    const double inf = INFINITY;
    // poles on opposite sides: residue at the upper pole
    const C a(1.0, 2.0), b(-0.5, -1.0);
    const C full = pole_pair_integral(a, b, -inf, inf);
    const C residue = C(0, 2 * std::numbers::pi) / (a - b);
    CHECK(std::abs(full - residue) < 1e-14);
    // both poles above: the contour closes below with no residue
    CHECK(std::abs(pole_pair_integral(a, C(0.2, 0.5), -inf, inf)) < 1e-15);
    // split at a finite point
    const C left = pole_pair_integral(a, b, -inf, 0.7), right = pole_pair_integral(a, b, 0.7, inf);
    CHECK(std::abs(left + right - full) < 1e-14);

    // semi-infinite against numerical integration in x = 0.7 + tan(t)
    auto g = [&](double t) -> C {
        const double x = 0.7 + std::tan(t), ct = std::cos(t);
        return 1.0 / ((x - a) * (x - b)) / (ct * ct);
    };
    QuadratureSpec q;
    q.rel_tol = 1e-12;
    const std::vector<double> bp{0.0, std::numbers::pi / 2};
    CHECK(std::abs(integrate_adaptive(g, bp, q).value - right) < 1e-10);
}

TEST_CASE("pole pair integral with a double pole", "[quadrature]")
{
    const C a(0.2, 0.1);
    // antiderivative -1/(x - a)
    const C expect = -1.0 / (C(1.0) - a) + 1.0 / (C(-1.0) - a);
    CHECK(std::abs(pole_pair_integral(a, a, -1.0, 1.0) - expect) < 1e-15);
    CHECK(std::abs(pole_pair_integral(a, a, -INFINITY, INFINITY)) == 0.0);
}
