#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace polcascade {

struct QuadratureSpec
{
    int base_nodes = 16;  ///< Gauss-Legendre nodes per panel
    double rel_tol = 1e-9;
    int max_refinements = 60;
};

inline void validate(const QuadratureSpec& q)
{
    if (q.base_nodes < 8) throw ValidationError("quadrature base_nodes must be >= 8");
    if (q.base_nodes > 256) throw ValidationError("quadrature base_nodes must be <= 256");
    if (!(q.rel_tol > 0) || !std::isfinite(q.rel_tol))
        throw ValidationError("quadrature rel_tol must be > 0");
    if (q.max_refinements < 1) throw ValidationError("quadrature max_refinements must be >= 1");
}

struct GaussLegendreRule
{
    std::vector<double> nodes;  ///< on [-1, 1], ascending
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule by Newton iteration on P_n.
inline GaussLegendreRule gauss_legendre(int n)
{
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            // n == 1 leaves p1 = x, p0 = 1
            dp = n * (x * p1 - p0) / (x * x - 1);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

struct QuadratureResult
{
    std::complex<double> value;
    int refinements = 0;
    std::size_t panels = 0;
    std::size_t evaluations = 0;
};

/// Adaptive composite Gauss-Legendre over [breakpoints.front(), breakpoints.back()].
///
/// Each panel is compared with the sum over its two halves. Panels whose
/// difference exceeds their share of the tolerance are split; the loop stops
/// once the total difference between the coarse and the refined level drops
/// below rel_tol times the integral. Integrand: double -> complex<double>.
template <typename F>
QuadratureResult integrate_adaptive(F&& f, std::span<const double> breakpoints,
                                    const QuadratureSpec& q)
{
    validate(q);
    std::vector<double> bp(breakpoints.begin(), breakpoints.end());
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    if (bp.size() < 2) throw ValidationError("integration interval is empty");

    const GaussLegendreRule rule = gauss_legendre(q.base_nodes);
    QuadratureResult out;

    auto panel_value = [&](double a, double b) {
        const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
        std::complex<double> s{};
        for (int i = 0; i < q.base_nodes; ++i)
            s += rule.weights[i] * f(mid + half * rule.nodes[i]);
        out.evaluations += q.base_nodes;
        return s * half;
    };

    struct Panel
    {
        double a, b;
        std::complex<double> coarse;
        std::complex<double> left, right;
        double err;
        bool evaluated;  // halves and err are current
    };

    std::vector<Panel> panels;
    for (std::size_t i = 0; i + 1 < bp.size(); ++i)
        panels.push_back({bp[i], bp[i + 1], panel_value(bp[i], bp[i + 1]), {}, {}, 0.0, false});

    std::complex<double> previous = std::numeric_limits<double>::quiet_NaN();
    for (int round = 0;; ++round) {
        std::complex<double> total{}, coarse_total{};
        double l1 = 0.0, err_sum = 0.0;
        for (auto& p : panels) {
            if (!p.evaluated) {
                const double m = 0.5 * (p.a + p.b);
                p.left = panel_value(p.a, m);
                p.right = panel_value(m, p.b);
                p.err = std::abs(p.left + p.right - p.coarse);
                p.evaluated = true;
            }
            total += p.left + p.right;
            coarse_total += p.coarse;
            l1 += std::abs(p.left) + std::abs(p.right);
            err_sum += p.err;
        }
        out.value = total;
        out.refinements = round;
        out.panels = panels.size();

        const double scale = std::max(std::abs(total), 1e-6 * l1);
        const double tol = q.rel_tol * scale;
        if (err_sum <= tol) return out;
        if (round >= q.max_refinements)
            throw ConvergenceError("adaptive Gauss-Legendre did not converge after " +
                                       std::to_string(round) + " refinements",
                                   std::isnan(previous.real()) ? coarse_total : previous, total);
        previous = total;

        const double share = tol / static_cast<double>(panels.size());
        std::vector<Panel> next;
        next.reserve(panels.size() * 2);
        for (auto& p : panels) {
            const double m = 0.5 * (p.a + p.b);
            const bool splittable = m > p.a && m < p.b;
            if (p.err > share && splittable) {
                next.push_back({p.a, m, p.left, {}, {}, 0.0, false});
                next.push_back({m, p.b, p.right, {}, {}, 0.0, false});
            } else {
                next.push_back(p);
            }
        }
        panels.swap(next);
    }
}

namespace detail {

// Regularized antiderivative difference of 1/(x - z) over [lo, hi] on the real
// axis. Infinite ends drop a log|x| term that is common to every pole and
// cancels in pole_pair_integral.
inline std::complex<double> log_span(std::complex<double> z, double lo, double hi)
{
    using C = std::complex<double>;
    const bool lo_inf = std::isinf(lo), hi_inf = std::isinf(hi);
    // arg(x - z) as x -> -inf
    const double theta_minus = z.imag() < 0 ? std::numbers::pi : -std::numbers::pi;
    if (!lo_inf && !hi_inf) return std::log((C(hi) - z) / (C(lo) - z));
    if (lo_inf && hi_inf) return C(0.0, -theta_minus);
    if (hi_inf) return -std::log(C(lo) - z);
    return std::log(C(hi) - z) - C(0.0, theta_minus);
}

}  // namespace detail

/// Closed form of  integral_lo^hi dx / ((x - a)(x - b))  for real x and poles
/// a, b off the real axis. lo may be -inf and hi +inf.
inline std::complex<double> pole_pair_integral(std::complex<double> a, std::complex<double> b,
                                               double lo, double hi)
{
    if (a.imag() == 0.0 || b.imag() == 0.0)
        throw ValidationError("pole_pair_integral: poles must lie off the real axis");
    if (!(lo <= hi)) throw ValidationError("pole_pair_integral: lo > hi");
    if (lo == hi) return {};
    if (a == b) {
        auto inv = [](double x, std::complex<double> z) {
            return std::isinf(x) ? std::complex<double>{} : 1.0 / (std::complex<double>(x) - z);
        };
        return inv(lo, a) - inv(hi, a);
    }
    return (detail::log_span(a, lo, hi) - detail::log_span(b, lo, hi)) / (a - b);
}

}  // namespace polcascade
