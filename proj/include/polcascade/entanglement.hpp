#pragma once

// Two-qubit polarization states of the photon pair, basis order HH, HV, VH, VV
// (first photon, second photon). H is the +1 eigenstate of sigma_z.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

#include "errors.hpp"
#include "pairstate.hpp"

namespace polcascade {

using Matrix4c = Eigen::Matrix4cd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;

/// Ascending eigenvalues of a Hermitian 4x4 matrix (iterative solver).
inline std::array<double, 4> hermitian_eigenvalues(const Matrix4c& m)
{
    Eigen::SelfAdjointEigenSolver<Matrix4c> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw ConvergenceError("Hermitian eigensolver failed", {}, {});
    const auto& ev = es.eigenvalues();
    return {ev(0), ev(1), ev(2), ev(3)};
}

/// True when every entry off the diagonal and anti-diagonal vanishes.
inline bool is_x_form(const Matrix4c& m, double tol = 1e-15)
{
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (i != j && i + j != 3 && std::abs(m(i, j)) > tol) return false;
    return true;
}

/// Ascending eigenvalues of a Hermitian X-form matrix from its two 2x2 blocks.
inline std::array<double, 4> x_form_eigenvalues(const Matrix4c& m)
{
    auto block = [&](int i, int j, std::array<double, 4>& out, int k) {
        const double a = m(i, i).real(), d = m(j, j).real();
        const double r = std::hypot((a - d) / 2, std::abs(m(i, j)));
        out[k] = (a + d) / 2 - r;
        out[k + 1] = (a + d) / 2 + r;
    };
    std::array<double, 4> ev{};
    block(0, 3, ev, 0);
    block(1, 2, ev, 2);
    std::sort(ev.begin(), ev.end());
    return ev;
}

class TwoQubitDensityMatrix
{
public:
    /// Validates Hermiticity, unit trace and positivity.
    explicit TwoQubitDensityMatrix(const Matrix4c& m) : m_rho(m)
    {
        if (!m.allFinite()) throw ValidationError("density matrix has non-finite entries");
        if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol)
            throw ValidationError("density matrix is not Hermitian");
        if (std::abs(m.trace() - 1.0) > kTraceTol)
            throw ValidationError("density matrix trace differs from 1");
        const auto ev = is_x_form(m) ? x_form_eigenvalues(m) : hermitian_eigenvalues(m);
        if (ev[0] < -kPsdTol) throw ValidationError("density matrix has a negative eigenvalue");
    }

    const Matrix4c& matrix() const { return m_rho; }
    std::complex<double> operator()(int i, int j) const { return m_rho(i, j); }

private:
    Matrix4c m_rho;
};

/// Density matrix with populations pHH, pVV and coherence gamma = rho(HH, VV).
inline TwoQubitDensityMatrix x_state(double p_hh, double p_vv, std::complex<double> gamma)
{
    if (!(p_hh >= 0) || !(p_vv >= 0)) throw ValidationError("populations must be >= 0");
    if (std::abs(p_hh + p_vv - 1.0) > kTraceTol) throw ValidationError("populations must sum to 1");
    if (std::norm(gamma) > p_hh * p_vv + kHermitianTol)
        throw ValidationError("|gamma|^2 exceeds pHH*pVV: the matrix would not be positive");
    Matrix4c m = Matrix4c::Zero();
    m(0, 0) = p_hh;
    m(3, 3) = p_vv;
    m(0, 3) = gamma;
    m(3, 0) = std::conj(gamma);
    return TwoQubitDensityMatrix(m);
}

/// Transpose over the second qubit: <a b|rho|a' b'> -> <a b'|rho|a' b>.
inline Matrix4c partial_transpose(const Matrix4c& m)
{
    Matrix4c out;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int a2 = 0; a2 < 2; ++a2)
                for (int b2 = 0; b2 < 2; ++b2)
                    out(2 * a + b, 2 * a2 + b2) = m(2 * a + b2, 2 * a2 + b);
    return out;
}

/// Eigenvalues of the partial transpose, exact for X-form input.
inline std::array<double, 4> pt_eigenvalues(const TwoQubitDensityMatrix& rho)
{
    const Matrix4c pt = partial_transpose(rho.matrix());
    return is_x_form(pt) ? x_form_eigenvalues(pt) : hermitian_eigenvalues(pt);
}

/// T_ij = Tr(rho sigma_i (x) sigma_j), i, j in {x, y, z}.
inline Eigen::Matrix3d correlation_matrix(const TwoQubitDensityMatrix& rho)
{
    using C = std::complex<double>;
    const std::array<Eigen::Matrix2cd, 3> sigma = [] {
        std::array<Eigen::Matrix2cd, 3> s;
        s[0] << 0, 1, 1, 0;
        s[1] << 0, C(0, -1), C(0, 1), 0;
        s[2] << 1, 0, 0, -1;
        return s;
    }();
    Eigen::Matrix3d t;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            Matrix4c op;
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c) op(r, c) = sigma[i](r / 2, c / 2) * sigma[j](r % 2, c % 2);
            t(i, j) = (rho.matrix() * op).trace().real();
        }
    return t;
}

/// Maximal CHSH value over all local qubit observables: 2 sqrt(m1 + m2),
/// m1, m2 the two largest eigenvalues of T^T T.
inline double horodecki_chsh(const TwoQubitDensityMatrix& rho)
{
    const Eigen::Matrix3d t = correlation_matrix(rho);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(t.transpose() * t, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return 2 * std::sqrt(std::max(0.0, ev(1) + ev(2)));
}

struct EntanglementReport
{
    double min_pt_eigenvalue = 0.0;
    double negativity = 0.0;
    bool entangled = false;
    double chsh_max = 0.0;
    double gamma_magnitude = 0.0;
};

/// Peres partial-transpose test. For two qubits a negative eigenvalue of the
/// partial transpose is necessary and sufficient for entanglement.
inline EntanglementReport peres_test(const TwoQubitDensityMatrix& rho)
{
    const auto ev = pt_eigenvalues(rho);
    EntanglementReport r;
    r.min_pt_eigenvalue = ev[0];
    for (double e : ev)
        if (e < -kPsdTol) r.negativity += -e;
    r.entangled = ev[0] < -kPsdTol;
    r.chsh_max = horodecki_chsh(rho);
    r.gamma_magnitude = std::abs(rho(0, 3));
    return r;
}

/// Photon-pair state after spectral projection onto the detector windows.
inline TwoQubitDensityMatrix projected_state(const PairCoherence& pc)
{
    const double s = pc.self_raw[0] + pc.self_raw[1];
    return x_state(pc.self_raw[0] / s, pc.self_raw[1] / s, pc.gamma);
}

inline TwoQubitDensityMatrix projected_state(const SystemParams& p, Pairing pairing,
                                             const DetectorWindow& w, const QuadratureSpec& q)
{
    return projected_state(gamma_prime(p, pairing, w, q));
}

// ---------------------------------------------------------------------------
// Linear-polarizer measurements

/// Joint outcome probabilities for analyzers at angles a (first photon) and
/// b (second photon), radians from H. Index 0 = transmitted, 1 = reflected.
using OutcomeTable = std::array<std::array<double, 2>, 2>;

inline OutcomeTable born_probabilities(const TwoQubitDensityMatrix& rho, double a, double b)
{
    auto basis = [](double t, int k) {
        Eigen::Vector2cd v;
        if (k == 0) v << std::cos(t), std::sin(t);
        else v << -std::sin(t), std::cos(t);
        return v;
    };
    OutcomeTable p{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const Eigen::Vector2cd va = basis(a, i), vb = basis(b, j);
            Eigen::Vector4cd psi;
            for (int r = 0; r < 4; ++r) psi(r) = va(r / 2) * vb(r % 2);
            p[i][j] = std::max(0.0, (psi.adjoint() * rho.matrix() * psi)(0, 0).real());
        }
    return p;
}

/// E(a, b) = P(same) - P(different)
inline double correlation(const OutcomeTable& p) { return p[0][0] + p[1][1] - p[0][1] - p[1][0]; }

struct ChshAngles
{
    double a, a2, b, b2;  ///< radians
};

/// S = E(a,b) - E(a,b') + E(a',b) + E(a',b')
inline double chsh_value(const TwoQubitDensityMatrix& rho, const ChshAngles& ang)
{
    auto e = [&](double x, double y) { return correlation(born_probabilities(rho, x, y)); };
    return e(ang.a, ang.b) - e(ang.a, ang.b2) + e(ang.a2, ang.b) + e(ang.a2, ang.b2);
}

/// Analyzer angles maximizing S for linear polarizers. A polarizer at angle t
/// measures cos(2t) sigma_z + sin(2t) sigma_x, so only the (z, x) block of
/// the correlation matrix is reachable; its singular vectors give the optimum.
inline ChshAngles optimal_linear_chsh_angles(const TwoQubitDensityMatrix& rho)
{
    const Eigen::Matrix3d t = correlation_matrix(rho);
    Eigen::Matrix2d tp;
    tp << t(2, 2), t(2, 0), t(0, 2), t(0, 0);  // rows/cols ordered (z, x)
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(tp, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::Vector2d s = svd.singularValues();
    const double phi = std::atan2(s(1), s(0));
    const Eigen::Vector2d u1 = svd.matrixU().col(0), u2 = svd.matrixU().col(1);
    const Eigen::Vector2d v1 = svd.matrixV().col(0), v2 = svd.matrixV().col(1);
    const Eigen::Vector2d nb = std::cos(phi) * v1 + std::sin(phi) * v2;
    const Eigen::Vector2d nb2 = std::cos(phi) * v1 - std::sin(phi) * v2;
    auto angle = [](const Eigen::Vector2d& n) { return 0.5 * std::atan2(n(1), n(0)); };
    // S = a.T(b - b') + a'.T(b + b'): b - b' lies along v2, so a = u2
    return {angle(u2), angle(u1), angle(nb), angle(nb2)};
}

using CountTable = std::array<std::array<std::uint64_t, 2>, 2>;

/// Seeded sampler of polarizer coincidences. One instance is not thread-safe;
/// separate instances are independent.
class CoincidenceSampler
{
public:
    explicit CoincidenceSampler(std::uint64_t seed) : m_rng(seed) {}

    CountTable sample(const TwoQubitDensityMatrix& rho, double a, double b, std::uint64_t n)
    {
        if (n < 1) throw ValidationError("sample count must be >= 1");
        const OutcomeTable p = born_probabilities(rho, a, b);
        std::discrete_distribution<int> dist({p[0][0], p[0][1], p[1][0], p[1][1]});
        CountTable counts{};
        for (std::uint64_t k = 0; k < n; ++k) {
            const int o = dist(m_rng);
            ++counts[o / 2][o % 2];
        }
        return counts;
    }

private:
    std::mt19937_64 m_rng;
};

inline CountTable sample_coincidences(const TwoQubitDensityMatrix& rho, double a, double b,
                                      std::uint64_t n, std::uint64_t seed)
{
    return CoincidenceSampler(seed).sample(rho, a, b, n);
}

}  // namespace polcascade
