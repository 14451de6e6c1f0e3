#pragma once

// Run configuration: defaults, a flat `key = value` file and command-line
// flags, in increasing priority. POLCASCADE_WORKERS replaces the worker count
// from the defaults or the file; an explicit --workers flag still wins.

#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "entanglement.hpp"
#include "errors.hpp"
#include "experiments.hpp"
#include "io.hpp"
#include "model.hpp"
#include "parallel.hpp"

namespace polcascade {

struct RunConfig
{
    Scheme scheme = Scheme::Scheme1;
    ParamOverrides params;
    std::optional<double> detuning;  ///< cav_mean - ex_mean; unset = degeneracy of the scheme pairing
    std::optional<Pairing> pairing;  ///< unset = scheme pairing
    WindowPolicy window;
    QuadratureSpec quadrature;

    std::uint64_t seed = 1;
    std::uint64_t samples = 100000;
    double angle_a = 0.0;  ///< degrees from H
    double angle_b = 0.0;

    unsigned workers = default_workers();
    std::string out_dir = "out";
    bool svg = false;

    double sweep_lo = kSweepLo, sweep_hi = kSweepHi;
    int sweep_points = kSweepPoints;
    double spectrum_lo = -4.0, spectrum_hi = 1.0;
    int spectrum_points = 10001;
    double opt_lo = kSweepLo, opt_hi = kSweepHi;
};

namespace detail {

inline std::string trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

inline double to_real(std::string_view v)
{
    double d = 0;
    if (!parse_number(v, d) || !std::isfinite(d)) throw ValidationError("expected a finite number, got '" + std::string(v) + "'");
    return d;
}

template <typename T>
T to_integer(std::string_view v)
{
    T x{};
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc{} || r.ptr != v.data() + v.size())
        throw ValidationError("expected a non-negative integer, got '" + std::string(v) + "'");
    return x;
}

inline bool to_bool(std::string_view v)
{
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ValidationError("expected true or false, got '" + std::string(v) + "'");
}

inline std::string opt(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

}  // namespace detail

/// One configuration key. `get` returns "" for an unset optional.
struct ConfigKey
{
    std::string name;
    std::string help;
    std::function<void(RunConfig&, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

inline const std::vector<ConfigKey>& config_keys()
{
    using detail::opt;
    using detail::to_real;
    static const std::vector<ConfigKey> keys = [] {
        std::vector<ConfigKey> k;
        auto real_opt = [&](std::string name, std::string help, std::optional<double> ParamOverrides::*m) {
            k.push_back({std::move(name), std::move(help),
                         [m](RunConfig& c, std::string_view v) { c.params.*m = to_real(v); },
                         [m](const RunConfig& c) { return opt(c.params.*m); }});
        };
        auto real = [&](std::string name, std::string help, double RunConfig::*m) {
            k.push_back({std::move(name), std::move(help),
                         [m](RunConfig& c, std::string_view v) { c.*m = to_real(v); },
                         [m](const RunConfig& c) { return format_number(c.*m); }});
        };
        auto integer = [&](std::string name, std::string help, int RunConfig::*m) {
            k.push_back({std::move(name), std::move(help),
                         [m](RunConfig& c, std::string_view v) { c.*m = detail::to_integer<int>(v); },
                         [m](const RunConfig& c) { return std::to_string(c.*m); }});
        };

        k.push_back({"scheme", "level scheme preset: 1, 2 or 3",
                     [](RunConfig& c, std::string_view v) {
                         if (v == "1") c.scheme = Scheme::Scheme1;
                         else if (v == "2") c.scheme = Scheme::Scheme2;
                         else if (v == "3") c.scheme = Scheme::Scheme3;
                         else throw ValidationError("scheme must be 1, 2 or 3, got '" + std::string(v) + "'");
                     },
                     [](const RunConfig& c) { return std::to_string(to_int(c.scheme)); }});
        real_opt("ex_mean", "mean exciton energy (meV)", &ParamOverrides::ex_mean);
        real_opt("delta_x", "exciton splitting E_H - E_V (meV)", &ParamOverrides::delta_x);
        real_opt("cav_mean", "mean cavity energy (meV), absolute", &ParamOverrides::cav_mean);
        real_opt("delta_c", "cavity splitting E_C^H - E_C^V (meV)", &ParamOverrides::delta_c);
        real_opt("rabi", "full Rabi splitting (meV)", &ParamOverrides::rabi);
        real_opt("tau_c", "cavity photon lifetime (ps)", &ParamOverrides::tau_c);
        real_opt("tau_xx", "biexciton radiative lifetime (ps)", &ParamOverrides::tau_xx);
        real_opt("binding", "biexciton binding energy (meV)", &ParamOverrides::binding);
        real_opt("exciton_width", "extra excitonic half width (meV), default 0", &ParamOverrides::exciton_width);
        k.push_back({"xx_width_mode", "biexciton width in the pair amplitude: total or per_channel",
                     [](RunConfig& c, std::string_view v) {
                         if (v == "total") c.params.xx_width_mode = XxWidthMode::Total;
                         else if (v == "per_channel") c.params.xx_width_mode = XxWidthMode::PerChannel;
                         else throw ValidationError("xx_width_mode must be total or per_channel");
                     },
                     [](const RunConfig& c) {
                         return c.params.xx_width_mode ? std::string(to_string(*c.params.xx_width_mode)) : "";
                     }});
        k.push_back({"detuning", "cav_mean - ex_mean (meV); default: degeneracy of the correlated pair",
                     [](RunConfig& c, std::string_view v) { c.detuning = to_real(v); },
                     [](const RunConfig& c) { return opt(c.detuning); }});
        k.push_back({"pairing", "correlated branches: LP-LP, UP-UP or LP-UP; default by scheme",
                     [](RunConfig& c, std::string_view v) {
                         for (Pairing p : {Pairing::LpLp, Pairing::UpUp, Pairing::LpUp})
                             if (to_string(p) == v) {
                                 c.pairing = p;
                                 return;
                             }
                         throw ValidationError("pairing must be LP-LP, UP-UP or LP-UP");
                     },
                     [](const RunConfig& c) { return c.pairing ? std::string(to_string(*c.pairing)) : ""; }});
        k.push_back({"width", "detector window full width (meV)",
                     [](RunConfig& c, std::string_view v) { c.window.width = to_real(v); },
                     [](const RunConfig& c) { return format_number(c.window.width); }});
        k.push_back({"center_offset", "shift added to both window centers (meV)",
                     [](RunConfig& c, std::string_view v) { c.window.center_offset = to_real(v); },
                     [](const RunConfig& c) { return format_number(c.window.center_offset); }});
        k.push_back({"base_nodes", "Gauss-Legendre nodes per panel (8..256)",
                     [](RunConfig& c, std::string_view v) { c.quadrature.base_nodes = detail::to_integer<int>(v); },
                     [](const RunConfig& c) { return std::to_string(c.quadrature.base_nodes); }});
        k.push_back({"rel_tol", "quadrature relative tolerance",
                     [](RunConfig& c, std::string_view v) { c.quadrature.rel_tol = to_real(v); },
                     [](const RunConfig& c) { return format_number(c.quadrature.rel_tol); }});
        k.push_back({"max_refinements", "quadrature refinement rounds before giving up",
                     [](RunConfig& c, std::string_view v) { c.quadrature.max_refinements = detail::to_integer<int>(v); },
                     [](const RunConfig& c) { return std::to_string(c.quadrature.max_refinements); }});
        k.push_back({"seed", "sampler seed",
                     [](RunConfig& c, std::string_view v) { c.seed = detail::to_integer<std::uint64_t>(v); },
                     [](const RunConfig& c) { return std::to_string(c.seed); }});
        k.push_back({"n", "number of sampled photon pairs",
                     [](RunConfig& c, std::string_view v) { c.samples = detail::to_integer<std::uint64_t>(v); },
                     [](const RunConfig& c) { return std::to_string(c.samples); }});
        real("angle_a", "first analyzer angle (degrees from H)", &RunConfig::angle_a);
        real("angle_b", "second analyzer angle (degrees from H)", &RunConfig::angle_b);
        k.push_back({"workers", "worker threads for sweeps",
                     [](RunConfig& c, std::string_view v) { c.workers = detail::to_integer<unsigned>(v); },
                     [](const RunConfig& c) { return std::to_string(c.workers); }});
        k.push_back({"out_dir", "output directory",
                     [](RunConfig& c, std::string_view v) { c.out_dir = std::string(v); },
                     [](const RunConfig& c) { return c.out_dir; }});
        k.push_back({"svg", "also write SVG plots (true/false)",
                     [](RunConfig& c, std::string_view v) { c.svg = detail::to_bool(v); },
                     [](const RunConfig& c) { return std::string(c.svg ? "true" : "false"); }});
        real("sweep_lo", "sweep start detuning (meV)", &RunConfig::sweep_lo);
        real("sweep_hi", "sweep end detuning (meV)", &RunConfig::sweep_hi);
        integer("sweep_points", "sweep grid points", &RunConfig::sweep_points);
        real("spectrum_lo", "spectrum start, relative to ex_mean (meV)", &RunConfig::spectrum_lo);
        real("spectrum_hi", "spectrum end, relative to ex_mean (meV)", &RunConfig::spectrum_hi);
        integer("spectrum_points", "spectrum grid points", &RunConfig::spectrum_points);
        real("opt_lo", "optimizer range start (meV)", &RunConfig::opt_lo);
        real("opt_hi", "optimizer range end (meV)", &RunConfig::opt_hi);
        return k;
    }();
    return keys;
}

inline const ConfigKey* find_key(std::string_view name)
{
    for (const auto& k : config_keys())
        if (k.name == name) return &k;
    return nullptr;
}

/// Sets one key; `context` prefixes error messages (file:line or --flag).
inline void set_key(RunConfig& c, std::string_view name, std::string_view value, std::string_view context)
{
    const ConfigKey* k = find_key(name);
    if (!k) throw ValidationError(std::string(context) + ": unknown key '" + std::string(name) + "'");
    try {
        k->set(c, value);
    } catch (const ValidationError& e) {
        throw ValidationError(std::string(context) + ": " + std::string(name) + ": " + e.what());
    }
}

/// Parses `key = value` lines. '#' starts a comment; blank lines are skipped.
inline void apply_config_text(RunConfig& c, std::string_view text, std::string_view source)
{
    std::istringstream in{std::string(text)};
    std::string line;
    for (int no = 1; std::getline(in, line); ++no) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = detail::trim(line);
        if (t.empty()) continue;
        const std::string ctx = std::string(source) + ":" + std::to_string(no);
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ValidationError(ctx + ": expected 'key = value'");
        const std::string key = detail::trim(std::string_view(t).substr(0, eq));
        const std::string value = detail::trim(std::string_view(t).substr(eq + 1));
        if (value.empty()) throw ValidationError(ctx + ": empty value for '" + key + "'");
        set_key(c, key, value, ctx);
    }
}

inline void apply_config_file(RunConfig& c, const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    apply_config_text(c, ss.str(), path);
}

/// Applies POLCASCADE_WORKERS if it is set.
inline void apply_worker_env(RunConfig& c)
{
    if (const char* env = std::getenv("POLCASCADE_WORKERS"); env && *env) {
        try {
            c.workers = detail::to_integer<unsigned>(env);
        } catch (const ValidationError& e) {
            throw ValidationError(std::string("POLCASCADE_WORKERS: ") + e.what());
        }
    }
}

/// Effective configuration as a config file; parsing it back reproduces `c`.
/// Unset optional keys are written as comments.
inline std::string config_echo(const RunConfig& c)
{
    std::string s;
    for (const auto& k : config_keys()) {
        const std::string v = k.get(c);
        if (v.empty()) s += "# " + k.name + " = (default)\n";
        else s += k.name + " = " + v + "\n";
    }
    return s;
}

/// Checks cross-field constraints the individual setters cannot see.
inline void validate(const RunConfig& c)
{
    validate(c.quadrature);
    if (!(c.window.width > 0)) throw ValidationError("width must be > 0");
    if (c.workers < 1) throw ValidationError("workers must be >= 1");
    if (c.samples < 1) throw ValidationError("n must be >= 1");
    if (c.sweep_points < 2 || !(c.sweep_lo < c.sweep_hi)) throw ValidationError("sweep needs sweep_lo < sweep_hi and >= 2 points");
    if (c.spectrum_points < 2 || !(c.spectrum_lo < c.spectrum_hi))
        throw ValidationError("spectrum needs spectrum_lo < spectrum_hi and >= 2 points");
    if (!(c.opt_lo < c.opt_hi)) throw ValidationError("opt_lo must be < opt_hi");
}

inline Pairing effective_pairing(const RunConfig& c) { return c.pairing.value_or(scheme_pairing(c.scheme)); }

/// Physical parameters of the run: scheme preset, overrides, then detuning.
inline SystemParams effective_params(const RunConfig& c)
{
    SystemParams p = c.params.apply(scheme_preset(c.scheme), true);
    validate(p);
    if (c.detuning) p = p.with_detuning(*c.detuning);
    else if (!c.params.cav_mean) p = p.with_detuning(degeneracy_detuning(p, effective_pairing(c)));
    validate(p);
    return p;
}

inline FigureOptions figure_options(const RunConfig& c)
{
    FigureOptions o;
    o.out_dir = c.out_dir;
    o.quadrature = c.quadrature;
    o.window = c.window;
    o.workers = c.workers;
    o.svg = c.svg;
    o.overrides = c.params;
    o.sweep_grid = linear_grid(c.sweep_lo, c.sweep_hi, c.sweep_points);
    o.spectrum_lo = c.spectrum_lo;
    o.spectrum_hi = c.spectrum_hi;
    o.spectrum_points = c.spectrum_points;
    return o;
}

}  // namespace polcascade
