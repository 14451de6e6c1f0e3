#pragma once

// Figure reproductions: anticrossing sweeps, PL spectra, |gamma'| versus
// detuning for the three level schemes and a detuning optimizer.

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cascade.hpp"
#include "io.hpp"
#include "model.hpp"
#include "pairstate.hpp"
#include "parallel.hpp"
#include "polariton.hpp"

namespace polcascade {

/// Pairing correlated in each scheme: LP-LP for 1 and 3, H-LP with V-UP for 2.
inline Pairing scheme_pairing(Scheme s) { return s == Scheme::Scheme2 ? Pairing::LpUp : Pairing::LpLp; }

inline std::string scheme_tag(Scheme s) { return "scheme" + std::to_string(to_int(s)); }

/// How detector windows follow the lines along a sweep.
struct WindowPolicy
{
    double width = 0.2;          ///< full width, meV
    double center_offset = 0.0;  ///< added to both centers (mis-centering studies)
};

inline DetectorWindow policy_window(const SystemParams& p, Pairing pairing, const WindowPolicy& wp)
{
    DetectorWindow w = standard_window(p, pairing, wp.width);
    w.center1 += wp.center_offset;
    w.center2 += wp.center_offset;
    return w;
}

/// Overrides of the physical fields applied on top of a scheme preset.
struct ParamOverrides
{
    std::optional<double> ex_mean, delta_x, cav_mean, delta_c, rabi, tau_c, tau_xx, binding, exciton_width;
    std::optional<XxWidthMode> xx_width_mode;

    /// Level splittings are copied only when `structure` is set; figure
    /// presets keep their own.
    SystemParams apply(SystemParams p, bool structure = true) const
    {
        const double old_ex = p.ex_mean;
        if (ex_mean) {
            p.ex_mean = *ex_mean;
            p.cav_mean += *ex_mean - old_ex;  // keep the preset detuning
        }
        if (structure) {
            if (delta_x) p.delta_x = *delta_x;
            if (cav_mean) p.cav_mean = *cav_mean;
            if (delta_c) p.delta_c = *delta_c;
        }
        if (rabi) p.rabi = *rabi;
        if (tau_c) p.tau_c = *tau_c;
        if (tau_xx) p.tau_xx = *tau_xx;
        if (binding) p.binding = *binding;
        if (exciton_width) p.exciton_width = *exciton_width;
        if (xx_width_mode) p.xx_width_mode = *xx_width_mode;
        return p;
    }
};

struct SweepRow
{
    double detuning = 0.0;
    std::complex<double> gamma;
    double abs_gamma = 0.0;
    DetectorWindow window;
    Pairing pairing = Pairing::LpLp;
};

struct SweepCurve
{
    Scheme scheme = Scheme::Scheme1;
    std::vector<SweepRow> rows;

    const SweepRow& max_row() const
    {
        return *std::max_element(rows.begin(), rows.end(),
                                 [](const SweepRow& a, const SweepRow& b) { return a.abs_gamma < b.abs_gamma; });
    }
};

inline std::vector<double> linear_grid(double lo, double hi, int n)
{
    if (n < 2 || !(lo < hi)) throw ValidationError("grid needs n >= 2 and lo < hi");
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = i == n - 1 ? hi : lo + (hi - lo) * i / (n - 1);
    return g;
}

inline constexpr double kSweepLo = -0.4;
inline constexpr double kSweepHi = 0.4;
inline constexpr int kSweepPoints = 161;

inline std::vector<double> default_sweep_grid() { return linear_grid(kSweepLo, kSweepHi, kSweepPoints); }

inline void validate_grid(std::span<const double> grid)
{
    if (grid.empty()) throw ValidationError("detuning grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i])) throw ValidationError("detuning grid contains a non-finite value");
        if (i && !(grid[i] > grid[i - 1])) throw ValidationError("detuning grid must be strictly increasing");
    }
}

/// |gamma'| along the detuning grid. The scheme preset fixes the splittings
/// (Scheme1 keeps delta_c = -delta_x); only cav_mean moves.
inline SweepCurve fig4_sweep(Scheme scheme, std::span<const double> grid, const WindowPolicy& wp,
                             const QuadratureSpec& q, unsigned workers = 1,
                             const ParamOverrides& ov = {})
{
    validate_grid(grid);
    validate(q);
    const SystemParams base = ov.apply(scheme_preset(scheme), false);
    validate(base);
    const Pairing pairing = scheme_pairing(scheme);

    SweepCurve c;
    c.scheme = scheme;
    c.rows.resize(grid.size());
    parallel_for(grid.size(), workers, [&](std::size_t i) {
        const SystemParams p = base.with_detuning(grid[i]);
        const DetectorWindow w = policy_window(p, pairing, wp);
        const PairCoherence pc = gamma_prime(p, pairing, w, q);
        c.rows[i] = {grid[i], pc.gamma, std::abs(pc.gamma), w, pairing};
    });
    return c;
}

/// Detuning where the two states of `pairing` are degenerate: 0 when they
/// coincide everywhere, otherwise the crossing in [-1, 1] meV nearest to
/// zero (the positive one of a symmetric pair).
inline double degeneracy_detuning(const SystemParams& p, Pairing pairing)
{
    const auto labels = pairing_states(pairing);
    const auto scan = find_crossings(p, labels[0], labels[1], -1.0, 1.0, 1e-12, 2001);
    if (scan.identically_degenerate) return 0.0;
    if (scan.detunings.empty()) throw ValidationError("the correlated pair has no degeneracy in [-1, 1] meV");
    double best = scan.detunings.front();
    for (double d : scan.detunings)
        if (std::abs(d) < std::abs(best) - 1e-9 || (std::abs(std::abs(d) - std::abs(best)) <= 1e-9 && d > best))
            best = d;
    return best;
}

/// Scheme1: 0. Scheme2: the positive H-LP / V-UP crossing. Scheme3: the
/// H-LP / V-LP crossing.
inline double figure_detuning(Scheme s, const ParamOverrides& ov = {})
{
    return degeneracy_detuning(ov.apply(scheme_preset(s), false), scheme_pairing(s));
}

struct OptimumResult
{
    double detuning = 0.0;
    double abs_gamma = 0.0;
    std::complex<double> gamma;
    int evaluations = 0;
};

inline constexpr int kOptimizeScanPoints = 50;
inline constexpr double kOptimizeTol = 1e-4;

/// Maximize |gamma'| over cav_mean - ex_mean in [lo, hi]: 50-point scan, then
/// golden section around the best point down to 1e-4 meV. A window that
/// misses the emission contributes |gamma'| = 0; an objective that is flat
/// over the scan is an error.
inline OptimumResult optimize_detuning(Scheme scheme, double lo, double hi, const QuadratureSpec& q,
                                       const WindowPolicy& wp = {}, unsigned workers = 1,
                                       const ParamOverrides& ov = {})
{
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
        throw ValidationError("optimize range must satisfy lo < hi");
    validate(q);
    const SystemParams base = ov.apply(scheme_preset(scheme), false);
    validate(base);
    const Pairing pairing = scheme_pairing(scheme);

    auto objective = [&](double d) -> std::complex<double> {
        const SystemParams p = base.with_detuning(d);
        try {
            return gamma_prime(p, pairing, policy_window(p, pairing, wp), q).gamma;
        } catch (const EmptyWindowError&) {
            return 0.0;
        }
    };

    const auto grid = linear_grid(lo, hi, kOptimizeScanPoints);
    std::vector<std::complex<double>> vals(grid.size());
    parallel_for(grid.size(), workers, [&](std::size_t i) { vals[i] = objective(grid[i]); });

    OptimumResult r;
    r.evaluations = kOptimizeScanPoints;
    std::size_t best = 0;
    double vmin = INFINITY, vmax = -INFINITY;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        const double a = std::abs(vals[i]);
        vmin = std::min(vmin, a);
        vmax = std::max(vmax, a);
        if (a > std::abs(vals[best])) best = i;
    }
    if (!(vmax - vmin > 1e-12))
        throw FlatObjectiveError("|gamma'| is flat over the detuning range (windows capture no correlated emission)");

    double x0 = grid[best > 0 ? best - 1 : 0];
    double x3 = grid[std::min(best + 1, grid.size() - 1)];
    constexpr double kInvPhi = 0.6180339887498949;
    double x1 = x3 - kInvPhi * (x3 - x0), x2 = x0 + kInvPhi * (x3 - x0);
    double f1 = std::abs(objective(x1)), f2 = std::abs(objective(x2));
    r.evaluations += 2;
    while (x3 - x0 > kOptimizeTol) {
        if (f1 >= f2) {
            x3 = x2;
            x2 = x1;
            f2 = f1;
            x1 = x3 - kInvPhi * (x3 - x0);
            f1 = std::abs(objective(x1));
        } else {
            x0 = x1;
            x1 = x2;
            f1 = f2;
            x2 = x0 + kInvPhi * (x3 - x0);
            f2 = std::abs(objective(x2));
        }
        ++r.evaluations;
    }
    r.detuning = 0.5 * (x0 + x3);
    r.gamma = objective(r.detuning);
    r.abs_gamma = std::abs(r.gamma);
    if (std::abs(vals[best]) > r.abs_gamma) {
        r.detuning = grid[best];
        r.gamma = vals[best];
        r.abs_gamma = std::abs(vals[best]);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Figure files

enum class Figure { Fig2a, Fig3a, Fig1c, Fig2c, Fig3c, Fig4 };

inline constexpr std::array<Figure, 6> kAllFigures{Figure::Fig2a, Figure::Fig3a, Figure::Fig1c,
                                                   Figure::Fig2c, Figure::Fig3c, Figure::Fig4};

inline std::string_view to_string(Figure f)
{
    switch (f) {
    case Figure::Fig2a: return "2a";
    case Figure::Fig3a: return "3a";
    case Figure::Fig1c: return "1c";
    case Figure::Fig2c: return "2c";
    case Figure::Fig3c: return "3c";
    case Figure::Fig4: return "4";
    }
    return "?";
}

inline Figure parse_figure(std::string_view s)
{
    if (s.starts_with("fig")) s.remove_prefix(3);
    for (Figure f : kAllFigures)
        if (to_string(f) == s) return f;
    throw ValidationError("unknown figure '" + std::string(s) + "' (expected 2a, 3a, 1c, 2c, 3c or 4)");
}

struct FigureOptions
{
    std::filesystem::path out_dir = "out";
    QuadratureSpec quadrature;
    WindowPolicy window;
    unsigned workers = 1;
    bool svg = false;
    ParamOverrides overrides;
    std::vector<double> sweep_grid = default_sweep_grid();   ///< fig4 and anticrossing detunings
    double spectrum_lo = -4.0;                               ///< relative to ex_mean
    double spectrum_hi = 1.0;
    int spectrum_points = 10001;
};

inline Provenance figure_provenance(std::string_view figure, const FigureOptions& o)
{
    Provenance pv;
    pv.add("figure", std::string(figure));
    add_conventions(pv);
    add_quadrature(pv, o.quadrature);
    pv.add("window_width_mev", o.window.width).add("window_center_offset_mev", o.window.center_offset);
    return pv;
}

namespace detail {

inline std::vector<std::filesystem::path> write_anticrossing(Figure f, Scheme s, const FigureOptions& o)
{
    const SystemParams base = o.overrides.apply(scheme_preset(s), false);
    const auto rows = anticrossing_sweep(base, o.sweep_grid, o.workers);

    Provenance pv = figure_provenance(to_string(f), o);
    add_params(pv, base, "preset_");
    pv.add("energies", "relative to ex_mean");
    pv.add("sweep", "cav_mean = ex_mean + delta_cx_mev");

    CsvTable t({"delta_cx_mev", "E_H_LP", "E_H_UP", "E_V_LP", "E_V_UP", "xex2_H_LP", "xex2_H_UP",
                "xex2_V_LP", "xex2_V_UP"});
    std::vector<SvgSeries> series{{"H LP", {}}, {"H UP", {}}, {"V LP", {}}, {"V UP", {}}};
    for (const auto& r : rows) {
        std::vector<std::string> cells{format_number(r.detuning)};
        for (std::size_t k = 0; k < 4; ++k) {
            cells.push_back(format_number(r.energy[k] - base.ex_mean));
            series[k].y.push_back(r.energy[k] - base.ex_mean);
        }
        for (std::size_t k = 0; k < 4; ++k) cells.push_back(format_number(r.x_ex2[k]));
        t.add_row(std::move(cells));
    }
    const std::string stem = "fig" + std::string(to_string(f));
    std::vector<std::filesystem::path> out{o.out_dir / (stem + ".csv")};
    write_text_file(out.back(), t.str(pv));
    if (o.svg) {
        out.push_back(o.out_dir / (stem + ".svg"));
        write_text_file(out.back(), svg_line_plot("Polariton energies, " + scheme_tag(s), "delta_C-X (meV)",
                                                  "E - ex_mean (meV)", o.sweep_grid, series));
    }
    return out;
}

inline std::vector<std::filesystem::path> write_spectrum(Figure f, Scheme s, const FigureOptions& o)
{
    const double d = figure_detuning(s, o.overrides);
    const SystemParams p = o.overrides.apply(scheme_preset(s), false).with_detuning(d);
    const auto grid = linear_grid(o.spectrum_lo, o.spectrum_hi, o.spectrum_points);
    const Spectrum sp = pl_spectrum(p, grid, SpectrumReference::RelativeToExMean);

    Provenance pv = figure_provenance(to_string(f), o);
    add_params(pv, p);
    pv.add("delta_cx_mev", d);
    pv.add("energies", "relative to ex_mean");
    pv.add("line_shape", "unit-area Lorentzians weighted by branch weight");

    const std::string stem = "fig" + std::string(to_string(f));
    std::vector<std::filesystem::path> out{o.out_dir / (stem + ".csv")};
    write_text_file(out.back(), spectrum_csv(sp, pv));
    if (o.svg) {
        out.push_back(o.out_dir / (stem + ".svg"));
        write_text_file(out.back(),
                        svg_line_plot("PL spectrum, " + scheme_tag(s), "E - ex_mean (meV)", "intensity (arb.)",
                                      sp.energy_grid, {{"H", sp.intensity_H}, {"V", sp.intensity_V}}));
    }
    return out;
}

inline std::string sweep_csv(const SweepCurve& c, const SystemParams& base, const FigureOptions& o)
{
    Provenance pv = figure_provenance("4", o);
    pv.add("curve", scheme_tag(c.scheme));
    add_params(pv, base, "preset_");
    pv.add("window_centers_reference", "relative to ex_mean");
    CsvTable t({"delta_cx_mev", "abs_gamma_prime", "re_gamma", "im_gamma", "center1", "center2", "width", "pairing"});
    for (const auto& r : c.rows)
        t.add_row({format_number(r.detuning), format_number(r.abs_gamma), format_number(r.gamma.real()),
                   format_number(r.gamma.imag()), format_number(r.window.center1 - base.ex_mean),
                   format_number(r.window.center2 - base.ex_mean), format_number(r.window.width),
                   std::string(to_string(r.pairing))});
    return t.str(pv);
}

inline std::vector<std::filesystem::path> write_fig4(const FigureOptions& o)
{
    std::vector<std::filesystem::path> out;
    std::vector<SvgSeries> series;
    for (Scheme s : {Scheme::Scheme1, Scheme::Scheme2, Scheme::Scheme3}) {
        const SystemParams base = o.overrides.apply(scheme_preset(s), false);
        const SweepCurve c = fig4_sweep(s, o.sweep_grid, o.window, o.quadrature, o.workers, o.overrides);
        out.push_back(o.out_dir / ("fig4_" + scheme_tag(s) + ".csv"));
        write_text_file(out.back(), sweep_csv(c, base, o));
        SvgSeries ser{scheme_tag(s), {}};
        for (const auto& r : c.rows) ser.y.push_back(r.abs_gamma);
        series.push_back(std::move(ser));
    }
    if (o.svg) {
        out.push_back(o.out_dir / "fig4.svg");
        write_text_file(out.back(), svg_line_plot("|gamma'| versus detuning", "delta_C-X (meV)", "|gamma'|",
                                                  o.sweep_grid, series));
    }
    return out;
}

}  // namespace detail

/// Writes the CSV (and optionally SVG) files of one figure; returns the paths.
inline std::vector<std::filesystem::path> reproduce_figure(Figure f, const FigureOptions& o)
{
    validate(o.quadrature);
    validate_grid(o.sweep_grid);
    switch (f) {
    case Figure::Fig2a: return detail::write_anticrossing(f, Scheme::Scheme2, o);
    case Figure::Fig3a: return detail::write_anticrossing(f, Scheme::Scheme3, o);
    case Figure::Fig1c: return detail::write_spectrum(f, Scheme::Scheme1, o);
    case Figure::Fig2c: return detail::write_spectrum(f, Scheme::Scheme2, o);
    case Figure::Fig3c: return detail::write_spectrum(f, Scheme::Scheme3, o);
    case Figure::Fig4: return detail::write_fig4(o);
    }
    throw ValidationError("unknown figure");
}

}  // namespace polcascade
