#pragma once

// Exciton-photon coupled oscillators, one per linear polarization. The two
// subspaces do not mix, so each is a 2x2 Hermitian problem
//   [[E_exc, rabi/2], [rabi/2, E_cav]]
// with eigenvalues (E_exc + E_cav)/2 -+ sqrt((E_exc - E_cav)^2 + rabi^2)/2.

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "model.hpp"
#include "parallel.hpp"

namespace polcascade {

struct StateLabel
{
    Polarization pol;
    Branch branch;

    friend bool operator==(const StateLabel&, const StateLabel&) = default;
};

/// Storage order used for every four-state array: H-LP, H-UP, V-LP, V-UP.
constexpr std::size_t state_index(StateLabel s)
{
    return (s.pol == Polarization::H ? 0 : 2) + (s.branch == Branch::LP ? 0 : 1);
}

constexpr std::array<StateLabel, 4> kAllStates{{{Polarization::H, Branch::LP},
                                                {Polarization::H, Branch::UP},
                                                {Polarization::V, Branch::LP},
                                                {Polarization::V, Branch::UP}}};

struct PolaritonState
{
    Polarization pol = Polarization::H;
    Branch branch = Branch::LP;
    double energy = 0.0;  ///< absolute, meV
    double x_ex = 0.0;    ///< Hopfield exciton coefficient (real, >= 0)
    double x_ph = 0.0;    ///< Hopfield photon coefficient (real, >= 0)
    double x_ex2 = 0.0;
    double x_ph2 = 0.0;
    double linewidth = 0.0;  ///< half width, meV

    StateLabel label() const { return {pol, branch}; }
};

/// E_pol - E_C^pol, formed from the mean/split parameters so that no
/// absolute energies (~1300 meV) cancel
inline double exciton_cavity_detuning(const SystemParams& p, Polarization pol)
{
    const double split = (p.delta_x - p.delta_c) / 2;
    return (p.ex_mean - p.cav_mean) + (pol == Polarization::H ? split : -split);
}

namespace detail {

struct HopfieldPair
{
    double lp_ex2;
    double lp_ph2;
};

// x_ex^2(LP) = (R - D)/(2R), x_ph^2(LP) = (R + D)/(2R), with D = E_exc - E_cav.
// The branch that cancels is rewritten through (R - D)(R + D) = rabi^2.
inline HopfieldPair hopfield(double d, double rabi, double r)
{
    HopfieldPair h{};
    if (d <= 0) {
        h.lp_ex2 = (r - d) / (2 * r);
        h.lp_ph2 = rabi * rabi / (2 * r * (r - d));
    } else {
        h.lp_ex2 = rabi * rabi / (2 * r * (r + d));
        h.lp_ph2 = (r + d) / (2 * r);
    }
    return h;
}

inline PolaritonState make_state(const SystemParams& p, Polarization pol, Branch b,
                                 double energy, double ex2, double ph2)
{
    PolaritonState s;
    s.pol = pol;
    s.branch = b;
    s.energy = energy;
    s.x_ex2 = ex2;
    s.x_ph2 = ph2;
    s.x_ex = std::sqrt(ex2);
    s.x_ph = std::sqrt(ph2);
    s.linewidth = ph2 * linewidth_from_lifetime(p.tau_c) + ex2 * p.exciton_width;
    return s;
}

}  // namespace detail

/// LP and UP of one polarization.
inline std::array<PolaritonState, 2> solve_polarization(const SystemParams& p, Polarization pol)
{
    const double d = exciton_cavity_detuning(p, pol);
    const double r = std::hypot(d, p.rabi);
    const double shift = (p.delta_x + p.delta_c) / 4;
    const double mean = (p.ex_mean + p.cav_mean) / 2 + (pol == Polarization::H ? shift : -shift);
    const auto h = detail::hopfield(d, p.rabi, r);
    return {detail::make_state(p, pol, Branch::LP, mean - r / 2, h.lp_ex2, h.lp_ph2),
            detail::make_state(p, pol, Branch::UP, mean + r / 2, h.lp_ph2, h.lp_ex2)};
}

/// The four polariton eigenstates in kAllStates order.
inline std::array<PolaritonState, 4> solve_polaritons(const SystemParams& p)
{
    const auto h = solve_polarization(p, Polarization::H);
    const auto v = solve_polarization(p, Polarization::V);
    return {h[0], h[1], v[0], v[1]};
}

inline PolaritonState solve_polariton(const SystemParams& p, StateLabel s)
{
    return solve_polarization(p, s.pol)[s.branch == Branch::LP ? 0 : 1];
}

/// E_A - E_B at detuning delta_cx (cavity mean moved, exciton mean fixed).
inline double level_gap(const SystemParams& tmpl, StateLabel a, StateLabel b, double delta_cx)
{
    const SystemParams p = tmpl.with_detuning(delta_cx);
    return solve_polariton(p, a).energy - solve_polariton(p, b).energy;
}

struct CrossingScan
{
    std::vector<double> detunings;       ///< sorted ascending
    bool identically_degenerate = false; ///< |gap| < tol over the whole scan
};

inline constexpr int kMinScanPoints = 400;
inline constexpr double kDefaultLevelTol = 1e-9;

namespace detail {

inline void check_scan_args(double lo, double hi, double tol, int points)
{
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
        throw ValidationError("detuning range must satisfy lo < hi");
    if (!(tol > 0)) throw ValidationError("tolerance must be > 0");
    if (points < kMinScanPoints)
        throw ValidationError("scan needs at least 400 points");
}

inline double scan_point(double lo, double hi, int i, int n)
{
    return i == n - 1 ? hi : lo + (hi - lo) * i / (n - 1);
}

}  // namespace detail

/// Detunings in [lo, hi] where energy_A = energy_B. Dense scan for sign
/// changes, then bisection until |gap| < tol. Same-polarization pairs never
/// cross (gap >= rabi) and are rejected.
inline CrossingScan find_crossings(const SystemParams& tmpl, StateLabel a, StateLabel b,
                                   double lo, double hi, double tol = kDefaultLevelTol,
                                   int scan_points = kMinScanPoints)
{
    detail::check_scan_args(lo, hi, tol, scan_points);
    if (a.pol == b.pol)
        throw ValidationError("find_crossings: same-polarization branches never cross");
    validate(tmpl);

    auto gap = [&](double d) { return level_gap(tmpl, a, b, d); };

    std::vector<double> xs(scan_points), gs(scan_points);
    double max_abs = 0.0;
    for (int i = 0; i < scan_points; ++i) {
        xs[i] = detail::scan_point(lo, hi, i, scan_points);
        gs[i] = gap(xs[i]);
        max_abs = std::max(max_abs, std::abs(gs[i]));
    }

    CrossingScan out;
    if (max_abs < tol) {
        out.identically_degenerate = true;
        return out;
    }

    for (int i = 0; i < scan_points; ++i) {
        if (gs[i] == 0.0) {
            out.detunings.push_back(xs[i]);
            continue;
        }
        if (i + 1 < scan_points && gs[i + 1] != 0.0 && std::signbit(gs[i]) != std::signbit(gs[i + 1])) {
            double x0 = xs[i], x1 = xs[i + 1], g0 = gs[i];
            double mid = 0.5 * (x0 + x1);
            for (int it = 0; it < 200; ++it) {
                mid = 0.5 * (x0 + x1);
                const double gm = gap(mid);
                if (std::abs(gm) < tol || mid <= x0 || mid >= x1) break;
                if (std::signbit(gm) == std::signbit(g0)) {
                    x0 = mid;
                    g0 = gm;
                } else {
                    x1 = mid;
                }
            }
            out.detunings.push_back(mid);
        }
    }
    return out;
}

struct GapMinimum
{
    double detuning;
    double gap;  ///< |E_A - E_B| at detuning
};

/// Detuning in [lo, hi] minimizing |E_A - E_B|: scan minimum refined by
/// golden-section search to `tol` in detuning.
inline GapMinimum min_gap(const SystemParams& tmpl, StateLabel a, StateLabel b, double lo,
                          double hi, double tol = kDefaultLevelTol, int scan_points = kMinScanPoints)
{
    detail::check_scan_args(lo, hi, tol, scan_points);
    if (a == b) throw ValidationError("min_gap: the two states must differ");
    validate(tmpl);

    auto f = [&](double d) { return std::abs(level_gap(tmpl, a, b, d)); };

    int best = 0;
    double best_val = f(lo);
    for (int i = 1; i < scan_points; ++i) {
        const double v = f(detail::scan_point(lo, hi, i, scan_points));
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    double x0 = detail::scan_point(lo, hi, std::max(best - 1, 0), scan_points);
    double x3 = detail::scan_point(lo, hi, std::min(best + 1, scan_points - 1), scan_points);

    constexpr double kInvPhi = 0.6180339887498949;
    double x1 = x3 - kInvPhi * (x3 - x0);
    double x2 = x0 + kInvPhi * (x3 - x0);
    double f1 = f(x1), f2 = f(x2);
    while (x3 - x0 > tol) {
        if (f1 <= f2) {
            x3 = x2;
            x2 = x1;
            f2 = f1;
            x1 = x3 - kInvPhi * (x3 - x0);
            f1 = f(x1);
        } else {
            x0 = x1;
            x1 = x2;
            f1 = f2;
            x2 = x0 + kInvPhi * (x3 - x0);
            f2 = f(x2);
        }
    }
    GapMinimum m{0.5 * (x0 + x3), 0.0};
    m.gap = f(m.detuning);
    if (best_val < m.gap) {
        m.detuning = detail::scan_point(lo, hi, best, scan_points);
        m.gap = best_val;
    }
    return m;
}

struct AnticrossingRow
{
    double detuning;
    std::array<double, 4> energy;    ///< kAllStates order, absolute
    std::array<double, 4> x_ex2;
    std::array<double, 4> linewidth;
};

/// One row per grid point, evaluated concurrently, returned in grid order.
inline std::vector<AnticrossingRow> anticrossing_sweep(const SystemParams& tmpl,
                                                       std::span<const double> grid,
                                                       unsigned workers = 1)
{
    if (grid.empty()) throw ValidationError("detuning grid is empty");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw ValidationError("detuning grid must be strictly increasing");
    validate(tmpl);

    std::vector<AnticrossingRow> rows(grid.size());
    parallel_for(grid.size(), workers, [&](std::size_t i) {
        const auto states = solve_polaritons(tmpl.with_detuning(grid[i]));
        AnticrossingRow& r = rows[i];
        r.detuning = grid[i];
        for (std::size_t k = 0; k < 4; ++k) {
            r.energy[k] = states[k].energy;
            r.x_ex2[k] = states[k].x_ex2;
            r.linewidth[k] = states[k].linewidth;
        }
    });
    return rows;
}

}  // namespace polcascade
