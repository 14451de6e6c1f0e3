#pragma once

// Two-photon wave packet of the cascade and its coherence integrals.
//
// The packet of a channel is the double-Lorentzian
//   A(k1, k2) = C / ((k1 + k2 - eps_xx)(k2 - eps_pol)),
//   C = x_ex sqrt(Gamma_xx) x_ph sqrt(Gamma_pol) / (2 pi),
// with eps = E - i*Gamma. In u = k1 + k2, v = k2 the product conj(A_a) A_b
// separates into a u-factor 1/((u - conj(eps_xx,a))(u - eps_xx,b)) and a
// v-factor of the same shape. For a rectangular window the u-range of each
// v-slice is an interval, integrated in closed form by partial fractions,
// which removes the narrow biexciton ridge from the numerical part. The
// remaining one-dimensional v-integral is adaptive Gauss-Legendre.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string_view>
#include <vector>

#include "cascade.hpp"
#include "errors.hpp"
#include "model.hpp"
#include "quadrature.hpp"

namespace polcascade {

/// Two rectangular acceptance windows, closed intervals center +- width/2.
struct DetectorWindow
{
    double center1 = 0.0;  ///< first photon (biexciton -> polariton)
    double center2 = 0.0;  ///< second photon (polariton -> ground)
    double width = 0.2;    ///< FULL width, meV
};

inline void validate(const DetectorWindow& w)
{
    if (!std::isfinite(w.center1) || !std::isfinite(w.center2) || !std::isfinite(w.width))
        throw ValidationError("detector window must be finite");
    if (!(w.width > 0)) throw ValidationError("detector window width must be > 0");
    if (!(w.center1 - w.width / 2 > 0) || !(w.center2 - w.width / 2 > 0))
        throw ValidationError("detector windows must lie at positive photon energy");
}

inline int window_value(const DetectorWindow& w, double k1, double k2)
{
    return std::abs(k1 - w.center1) <= w.width / 2 && std::abs(k2 - w.center2) <= w.width / 2 ? 1 : 0;
}

/// Which branch of each polarization is correlated.
enum class Pairing { LpLp, UpUp, LpUp };

inline std::string_view to_string(Pairing p)
{
    switch (p) {
    case Pairing::LpLp: return "LP-LP";
    case Pairing::UpUp: return "UP-UP";
    case Pairing::LpUp: return "LP-UP";
    }
    return "?";
}

/// (H side, V side). LP-UP correlates the H lower branch with the V upper branch.
inline std::array<StateLabel, 2> pairing_states(Pairing p)
{
    switch (p) {
    case Pairing::LpLp: return {{{Polarization::H, Branch::LP}, {Polarization::V, Branch::LP}}};
    case Pairing::UpUp: return {{{Polarization::H, Branch::UP}, {Polarization::V, Branch::UP}}};
    case Pairing::LpUp: return {{{Polarization::H, Branch::LP}, {Polarization::V, Branch::UP}}};
    }
    throw ValidationError("unknown pairing");
}

/// C = x_ex sqrt(Gamma_xx,total) x_ph sqrt(Gamma_pol) / (2 pi)
inline double amplitude_prefactor(const CascadeChannel& c)
{
    return c.intermediate.x_ex * std::sqrt(c.xx_total_width) * c.intermediate.x_ph *
           std::sqrt(c.intermediate.linewidth) / (2 * std::numbers::pi);
}

namespace detail {

inline void require_widths(const CascadeChannel& c)
{
    if (!(c.intermediate.linewidth > 0) || !(c.xx_pole_width > 0) || !(c.xx_total_width > 0))
        throw ValidationError("pair amplitudes need finite lifetimes (non-zero linewidths)");
}

}  // namespace detail

/// Two-photon amplitude at photon energies k1 (first) and k2 (second).
inline std::complex<double> amplitude(const CascadeChannel& c, double k1, double k2)
{
    if (!(k1 > 0) || !(k2 > 0)) throw ValidationError("photon energies must be positive");
    detail::require_widths(c);
    const std::complex<double> d_xx(k1 + k2 - c.biexciton_energy, c.xx_pole_width);
    const std::complex<double> d_pol(k2 - c.intermediate.energy, c.intermediate.linewidth);
    return amplitude_prefactor(c) / (d_xx * d_pol);
}

namespace detail {

// v-factor of conj(A_a) A_b at k2 = ref + s.
struct VFactor
{
    std::complex<double> pa;  // pole of conj(1/(k2 - eps_a)): E_a + i Gamma_a
    std::complex<double> pb;  // pole of 1/(k2 - eps_b):       E_b - i Gamma_b

    std::complex<double> operator()(double s) const { return 1.0 / ((s - pa) * (s - pb)); }
};

inline VFactor v_factor(const CascadeChannel& a, const CascadeChannel& b, double ref)
{
    return {{a.intermediate.energy - ref, a.intermediate.linewidth},
            {b.intermediate.energy - ref, -b.intermediate.linewidth}};
}

inline void add_graded(std::vector<double>& pts, double x, double scale, double lo, double hi)
{
    for (double m : {0.0, 1.0, 4.0, 16.0, 64.0}) {
        for (double sgn : {-1.0, 1.0}) {
            const double p = x + sgn * m * scale;
            if (p > lo && p < hi) pts.push_back(p);
            if (m == 0.0) break;
        }
    }
}

}  // namespace detail

/// Integral over the window rectangle of conj(A_a) A_b dk1 dk2 (raw units).
inline std::complex<double> windowed_overlap(const CascadeChannel& a, const CascadeChannel& b,
                                             const DetectorWindow& w, const QuadratureSpec& q)
{
    validate(w);
    validate(q);
    detail::require_widths(a);
    detail::require_widths(b);

    const double half = w.width / 2;
    const auto vf = detail::v_factor(a, b, w.center2);
    // u - E_xx on the slice k2 = center2 + s spans s + e0 -+ half
    const double e0 = (w.center1 + w.center2) - a.biexciton_energy;
    const std::complex<double> ua(0.0, a.xx_pole_width);
    const std::complex<double> ub(b.biexciton_energy - a.biexciton_energy, -b.xx_pole_width);

    auto integrand = [&](double s) {
        return vf(s) * pole_pair_integral(ua, ub, s + e0 - half, s + e0 + half);
    };

    std::vector<double> pts{-half, half};
    const double gx = std::max(a.xx_pole_width, b.xx_pole_width);
    detail::add_graded(pts, half - e0, gx, -half, half);
    detail::add_graded(pts, -half - e0, gx, -half, half);
    detail::add_graded(pts, vf.pa.real(), a.intermediate.linewidth, -half, half);
    detail::add_graded(pts, vf.pb.real(), b.intermediate.linewidth, -half, half);

    const auto r = integrate_adaptive(integrand, pts, q);
    return amplitude_prefactor(a) * amplitude_prefactor(b) * r.value;
}

/// Truncation of the all-space v-integral, in combined half widths.
inline constexpr double kFullSpaceHalfWidths = 200.0;

/// Integral of conj(A_a) A_b over all (k1, k2). The u-integral is closed
/// form; the v-integral is numerical on +-200 combined half widths around
/// the two lines, with the two semi-infinite tails added in closed form.
inline std::complex<double> full_overlap(const CascadeChannel& a, const CascadeChannel& b,
                                         const QuadratureSpec& q)
{
    validate(q);
    detail::require_widths(a);
    detail::require_widths(b);

    const double ref = 0.5 * (a.intermediate.energy + b.intermediate.energy);
    const auto vf = detail::v_factor(a, b, ref);
    const double ga = a.intermediate.linewidth, gb = b.intermediate.linewidth;
    const double reach = kFullSpaceHalfWidths * (ga + gb) +
                         0.5 * std::abs(a.intermediate.energy - b.intermediate.energy);

    std::vector<double> pts{-reach, reach};
    detail::add_graded(pts, vf.pa.real(), ga, -reach, reach);
    detail::add_graded(pts, vf.pb.real(), gb, -reach, reach);
    const auto core = integrate_adaptive(vf, pts, q).value;
    const auto tails = pole_pair_integral(vf.pa, vf.pb, -std::numeric_limits<double>::infinity(), -reach) +
                       pole_pair_integral(vf.pa, vf.pb, reach, std::numeric_limits<double>::infinity());

    const std::complex<double> u_all = pole_pair_integral(
        {0.0, a.xx_pole_width}, {b.biexciton_energy - a.biexciton_energy, -b.xx_pole_width},
        -std::numeric_limits<double>::infinity(),
        std::numeric_limits<double>::infinity());
    return amplitude_prefactor(a) * amplitude_prefactor(b) * u_all * (core + tails);
}

struct PairCoherence
{
    std::complex<double> gamma;        ///< gamma' (cross over the sum of selfs)
    std::array<double, 2> channel_norms{};  ///< windowed selfs / total packet norm (H side, V side)
    Pairing pairing = Pairing::LpLp;
    DetectorWindow window;
    std::complex<double> cross_raw;
    std::array<double, 2> self_raw{};
};

/// Windows capturing less than this fraction of the emitted pair norm are empty.
inline constexpr double kEmptyWindowFraction = 1e-15;

/// gamma' for two given channels. `total_norm` is the sum of the raw packet
/// norms of all channels of the cascade (used for channel_norms only).
inline PairCoherence gamma_prime(const CascadeChannel& h_side, const CascadeChannel& v_side,
                                 const DetectorWindow& w, const QuadratureSpec& q,
                                 double total_norm, Pairing pairing = Pairing::LpLp)
{
    const double self_h = windowed_overlap(h_side, h_side, w, q).real();
    const double self_v = windowed_overlap(v_side, v_side, w, q).real();
    const double captured = self_h + self_v;
    if (!(captured >= kEmptyWindowFraction * (h_side.raw_norm() + v_side.raw_norm())))
        throw EmptyWindowError("spectral windows capture no emission of the selected channels");
    const auto cross = windowed_overlap(h_side, v_side, w, q);

    PairCoherence pc;
    pc.gamma = cross / captured;
    pc.channel_norms = {self_h / total_norm, self_v / total_norm};
    pc.pairing = pairing;
    pc.window = w;
    pc.cross_raw = cross;
    pc.self_raw = {self_h, self_v};
    return pc;
}

inline double total_raw_norm(const std::array<CascadeChannel, 4>& ch)
{
    double s = 0.0;
    for (const auto& c : ch) s += c.raw_norm();
    return s;
}

inline PairCoherence gamma_prime(const SystemParams& p, Pairing pairing, const DetectorWindow& w,
                                 const QuadratureSpec& q)
{
    const auto ch = enumerate_channels(p);
    const auto labels = pairing_states(pairing);
    return gamma_prime(channel_for(ch, labels[0]), channel_for(ch, labels[1]), w, q,
                       total_raw_norm(ch), pairing);
}

/// Windows centered on the mean energy of the two paired intermediate states,
/// first-photon window at E_XX minus that.
inline DetectorWindow standard_window(const SystemParams& p, Pairing pairing, double width = 0.2)
{
    const auto labels = pairing_states(pairing);
    const double e2 = 0.5 * (solve_polariton(p, labels[0]).energy + solve_polariton(p, labels[1]).energy);
    return {p.biexciton_energy() - e2, e2, width};
}

/// gamma of the unprojected state: sum over branches of the all-space cross
/// overlaps, normalized by the total of the four all-space self overlaps.
inline std::complex<double> gamma_unprojected(const SystemParams& p, const QuadratureSpec& q)
{
    const auto ch = enumerate_channels(p);
    double norm = 0.0;
    for (const auto& c : ch) norm += full_overlap(c, c, q).real();
    std::complex<double> g{};
    for (Branch b : {Branch::LP, Branch::UP})
        g += full_overlap(channel_for(ch, {Polarization::H, b}), channel_for(ch, {Polarization::V, b}), q);
    return g / norm;
}

}  // namespace polcascade
