#pragma once

// Units: energies in meV, times in ps, linewidths (half widths) in meV.
// The ground state sits at E_G = 0 and the biexciton at 2*ex_mean - binding
// on the same absolute scale.

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace polcascade {

/// Reduced Planck constant in meV*ps (CODATA 2018).
inline constexpr double kHbarMeVps = 0.6582119569;

constexpr double hbar_mev_ps() noexcept { return kHbarMeVps; }

/// Half width Gamma = hbar/tau of a level with lifetime tau (ps).
/// An infinite lifetime gives a zero width.
inline double linewidth_from_lifetime(double tau_ps)
{
    if (std::isinf(tau_ps)) return 0.0;
    return kHbarMeVps / tau_ps;
}

enum class Polarization { H, V };
enum class Branch { LP, UP };
enum class Scheme { Scheme1 = 1, Scheme2 = 2, Scheme3 = 3 };

/// Which biexciton width enters the first denominator of the pair amplitude.
enum class XxWidthMode { Total, PerChannel };

inline std::string_view to_string(Polarization p) { return p == Polarization::H ? "H" : "V"; }
inline std::string_view to_string(Branch b) { return b == Branch::LP ? "LP" : "UP"; }
inline std::string_view to_string(XxWidthMode m)
{
    return m == XxWidthMode::Total ? "total" : "per_channel";
}
inline int to_int(Scheme s) { return static_cast<int>(s); }

/// center - i*halfwidth
struct ComplexEnergy
{
    double center = 0.0;
    double halfwidth = 0.0;

    std::complex<double> value() const { return {center, -halfwidth}; }
};

struct SystemParams
{
    double ex_mean = 1300.0;  ///< (E_H + E_V)/2
    double delta_x = 0.0;     ///< E_H - E_V
    double cav_mean = 1300.0; ///< (E_C^H + E_C^V)/2
    double delta_c = 0.0;     ///< E_C^H - E_C^V
    double rabi = 0.22;       ///< full splitting 2*hbar*Omega_R at resonance
    double tau_c = 15.0;      ///< cavity photon lifetime (ps)
    double tau_xx = 500.0;    ///< bare biexciton radiative lifetime (ps)
    double binding = 3.0;     ///< biexciton binding energy B

    /// Optional excitonic half width added as x_ex^2 * exciton_width. Off by default.
    double exciton_width = 0.0;
    XxWidthMode xx_width_mode = XxWidthMode::Total;

    double exciton_energy(Polarization p) const
    {
        return p == Polarization::H ? ex_mean + delta_x / 2 : ex_mean - delta_x / 2;
    }
    double cavity_energy(Polarization p) const
    {
        return p == Polarization::H ? cav_mean + delta_c / 2 : cav_mean - delta_c / 2;
    }
    /// delta_{C-X} = cav_mean - ex_mean
    double detuning() const { return cav_mean - ex_mean; }
    double biexciton_energy() const { return 2 * ex_mean - binding; }
    double ground_energy() const { return 0.0; }

    SystemParams with_detuning(double delta_cx) const
    {
        SystemParams p = *this;
        p.cav_mean = ex_mean + delta_cx;
        return p;
    }
};

/// Build from the four bare level energies, other fields from `base`.
inline SystemParams from_levels(double e_h, double e_v, double e_ch, double e_cv,
                                const SystemParams& base = SystemParams{})
{
    SystemParams p = base;
    p.ex_mean = (e_h + e_v) / 2;
    p.delta_x = e_h - e_v;
    p.cav_mean = (e_ch + e_cv) / 2;
    p.delta_c = e_ch - e_cv;
    return p;
}

/// Throws ValidationError on hard violations; returns soft warnings.
inline std::vector<std::string> validate(const SystemParams& p)
{
    auto finite = [](double v, const char* name) {
        if (!std::isfinite(v))
            throw ValidationError(std::string(name) + " must be finite");
    };
    finite(p.ex_mean, "ex_mean");
    finite(p.delta_x, "delta_x");
    finite(p.cav_mean, "cav_mean");
    finite(p.delta_c, "delta_c");
    finite(p.rabi, "rabi");
    finite(p.binding, "binding");
    finite(p.exciton_width, "exciton_width");
    if (std::isnan(p.tau_c) || std::isnan(p.tau_xx))
        throw ValidationError("lifetimes must not be NaN");
    if (!(p.rabi > 0)) throw ValidationError("rabi must be > 0");
    if (!(p.tau_c > 0)) throw ValidationError("tau_c must be > 0");
    if (!(p.tau_xx > 0)) throw ValidationError("tau_xx must be > 0");
    if (!(p.binding > 0)) throw ValidationError("binding must be > 0");
    if (p.exciton_width < 0) throw ValidationError("exciton_width must be >= 0");

    std::vector<std::string> warnings;
    if (p.binding < 10 * (p.rabi / 2))
        warnings.emplace_back("binding energy is below 10*hbar*Omega_R; the biexciton line "
                              "may interact with the cavity modes");
    return warnings;
}

/// Canonical parameter sets of the three level schemes.
///
/// Scheme1: mirrored cavity, E_C^H = E_V and E_C^V = E_H.
/// Scheme2: exciton and cavity splittings of the same sign, H-LP nearly
///          degenerate with V-UP around zero detuning.
/// Scheme3: splittings of opposite sign, LP-LP and UP-UP crossings at
///          finite detuning.
inline SystemParams scheme_preset(Scheme id)
{
    SystemParams p;
    p.rabi = 0.22;
    switch (id) {
    case Scheme::Scheme1:
        p.delta_x = 0.1;
        p.delta_c = -0.1;
        break;
    case Scheme::Scheme2:
        p.delta_x = 0.1;
        p.delta_c = 0.5;
        break;
    case Scheme::Scheme3:
        p.delta_x = -0.1;
        p.delta_c = 0.5;
        break;
    }
    p.cav_mean = p.ex_mean;
    return p;
}

}  // namespace polcascade
