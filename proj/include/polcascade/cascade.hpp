#pragma once

// Biexciton -> polariton -> ground cascade: the four decay channels, their
// branch weights and the polarization-resolved photoluminescence spectrum.

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "model.hpp"
#include "polariton.hpp"

namespace polcascade {

struct CascadeChannel
{
    Polarization pol = Polarization::H;
    PolaritonState intermediate;
    double photon1 = 0.0;  ///< E_XX - E_pol
    double photon2 = 0.0;  ///< E_pol - E_G
    double amp = 0.0;      ///< normalized branch amplitude, real >= 0

    double biexciton_energy = 0.0;
    double xx_channel_width = 0.0;  ///< x_ex^2 * hbar/tau_xx
    double xx_total_width = 0.0;    ///< sum of the four channel widths
    double xx_pole_width = 0.0;     ///< width in the biexciton denominator (XxWidthMode)

    double weight() const { return amp * amp; }

    /// Unnormalized norm of the two-photon packet, x_ex^2 x_ph^2 / 4.
    double raw_norm() const { return intermediate.x_ex2 * intermediate.x_ph2 / 4; }

    StateLabel label() const { return intermediate.label(); }
};

/// Four channels in kAllStates order. Branch weight^2 is proportional to
/// x_ex^2 x_ph^2 (the packet norm), normalized so the weights sum to one.
inline std::array<CascadeChannel, 4> enumerate_channels(const SystemParams& p)
{
    validate(p);
    const auto states = solve_polaritons(p);
    const double gxx_unit = linewidth_from_lifetime(p.tau_xx);
    const double e_xx = p.biexciton_energy();

    std::array<CascadeChannel, 4> ch;
    double xx_total = 0.0;
    double norm_total = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        CascadeChannel& c = ch[i];
        c.pol = states[i].pol;
        c.intermediate = states[i];
        c.biexciton_energy = e_xx;
        c.photon2 = states[i].energy - p.ground_energy();
        c.photon1 = e_xx - states[i].energy;
        c.xx_channel_width = states[i].x_ex2 * gxx_unit;
        xx_total += c.xx_channel_width;
        norm_total += c.raw_norm();
    }
    for (auto& c : ch) {
        c.xx_total_width = xx_total;
        c.xx_pole_width = p.xx_width_mode == XxWidthMode::Total ? xx_total : c.xx_channel_width;
        c.amp = std::sqrt(c.raw_norm() / norm_total);
    }
    return ch;
}

inline const CascadeChannel& channel_for(const std::array<CascadeChannel, 4>& ch, StateLabel s)
{
    return ch[state_index(s)];
}

/// Unit-area Lorentzian with half width gamma.
inline double lorentzian(double e, double e0, double gamma)
{
    const double d = e - e0;
    return (gamma / std::numbers::pi) / (d * d + gamma * gamma);
}

enum class SpectrumReference { Absolute, RelativeToExMean };

struct Spectrum
{
    SpectrumReference reference = SpectrumReference::Absolute;
    double offset = 0.0;  ///< absolute energy = grid value + offset
    std::vector<double> energy_grid;
    std::vector<double> intensity_H;
    std::vector<double> intensity_V;

    const std::vector<double>& intensity(Polarization p) const
    {
        return p == Polarization::H ? intensity_H : intensity_V;
    }
};

/// Emission of one polarization at absolute energy e. Each channel gives
/// two lines of area amp^2: the biexciton line at photon1 with half width
/// Gamma_XX + Gamma_pol and the polariton line at photon2 with Gamma_pol.
inline double pl_intensity(const std::array<CascadeChannel, 4>& ch, Polarization pol, double e)
{
    double s = 0.0;
    for (const auto& c : ch) {
        if (c.pol != pol) continue;
        const double g = c.intermediate.linewidth;
        s += c.weight() * (lorentzian(e, c.photon1, c.xx_total_width + g) + lorentzian(e, c.photon2, g));
    }
    return s;
}

inline constexpr double kMinGridSpacing = 1e-12;

inline void validate_energy_grid(std::span<const double> grid)
{
    if (grid.empty()) throw ValidationError("energy grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i])) throw ValidationError("energy grid contains a non-finite value");
        if (i > 0 && !(grid[i] - grid[i - 1] >= kMinGridSpacing))
            throw ValidationError("energy grid must be strictly increasing with spacing >= 1e-12 meV");
    }
}

inline Spectrum pl_spectrum(const SystemParams& p, std::span<const double> grid,
                            SpectrumReference reference = SpectrumReference::Absolute)
{
    validate_energy_grid(grid);
    const auto ch = enumerate_channels(p);

    Spectrum s;
    s.reference = reference;
    s.offset = reference == SpectrumReference::Absolute ? 0.0 : p.ex_mean;
    s.energy_grid.assign(grid.begin(), grid.end());
    s.intensity_H.resize(grid.size());
    s.intensity_V.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double e = grid[i] + s.offset;
        s.intensity_H[i] = pl_intensity(ch, Polarization::H, e);
        s.intensity_V[i] = pl_intensity(ch, Polarization::V, e);
    }
    return s;
}

/// Strict local maxima of one polarization, refined by a parabola through the
/// three neighbouring samples. Positions are in the spectrum's reference.
inline std::vector<double> spectrum_peaks(const Spectrum& s, Polarization pol)
{
    const auto& y = s.intensity(pol);
    const auto& x = s.energy_grid;
    std::vector<double> peaks;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        if (!(y[i] > y[i - 1] && y[i] > y[i + 1])) continue;
        const double x0 = x[i - 1], x1 = x[i], x2 = x[i + 1];
        const double y0 = y[i - 1], y1 = y[i], y2 = y[i + 1];
        const double num = (x1 - x0) * (x1 - x0) * (y1 - y2) - (x1 - x2) * (x1 - x2) * (y1 - y0);
        const double den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
        peaks.push_back(den != 0.0 ? x1 - 0.5 * num / den : x1);
    }
    return peaks;
}

struct ChannelRow
{
    StateLabel label;
    double intermediate_energy;
    double photon1;
    double photon2;
    double weight;  ///< amp^2
    double x_ex2;
    double x_ph2;
    double polariton_width;
    double xx_channel_width;
};

struct ChannelReport
{
    double ex_mean;
    double biexciton_energy;
    double xx_total_width;  ///< hbar/tau_xx * sum of x_ex^2
    std::array<ChannelRow, 4> rows;
};

inline ChannelReport channel_table(const SystemParams& p)
{
    const auto ch = enumerate_channels(p);
    ChannelReport r{};
    r.ex_mean = p.ex_mean;
    r.biexciton_energy = p.biexciton_energy();
    r.xx_total_width = ch[0].xx_total_width;
    for (std::size_t i = 0; i < 4; ++i) {
        const auto& c = ch[i];
        r.rows[i] = {c.label(),          c.intermediate.energy, c.photon1,
                     c.photon2,          c.weight(),            c.intermediate.x_ex2,
                     c.intermediate.x_ph2, c.intermediate.linewidth, c.xx_channel_width};
    }
    return r;
}

}  // namespace polcascade
