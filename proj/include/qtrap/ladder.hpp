#ifndef QTRAP_LADDER_HPP
#define QTRAP_LADDER_HPP

// Coefficient algebra of the time-dependent ladder operators
// A(t) = mu a + nu a-dagger, their quadratures, and the Bogoliubov squeeze
// decomposition used to relate the two operator representations.

#include <cmath>
#include <complex>
#include <numbers>

#include "qtrap/errors.hpp"
#include "qtrap/mode.hpp"

namespace qtrap {

inline double wrap_angle(double x) {
    // Normalize to (-pi, pi].
    const double twopi = 2.0 * std::numbers::pi;
    x = std::fmod(x, twopi);
    if (x <= -std::numbers::pi)
        x += twopi;
    else if (x > std::numbers::pi)
        x -= twopi;
    return x;
}

struct LadderCoeffs {
    cplx mu;    // coefficient of a in A(t)
    cplx nu;    // coefficient of a-dagger in A(t)
    cplx rho;   // coefficient of A in a
    cplx sigma; // coefficient of A-dagger in a
    double t = 0.0;

    double canonical_defect() const {
        return std::abs(std::norm(mu) - std::norm(nu) - 1.0);
    }
};

inline void require_canonical(const LadderCoeffs& lc, double tol = 1e-8) {
    if (lc.canonical_defect() > tol)
        throw NonCanonical("|mu|^2 - |nu|^2 deviates from 1 by " +
                           std::to_string(lc.canonical_defect()));
}

inline LadderCoeffs make_ladder_coeffs(cplx eps, cplx deps, double t = 0.0) {
    const cplx i{0.0, 1.0};
    LadderCoeffs lc;
    lc.mu = (eps - i * deps) / 2.0;
    lc.nu = (-eps - i * deps) / 2.0;
    // Inverting A = mu a + nu a-dagger together with its conjugate gives
    // a = mu* A - nu A-dagger.
    lc.rho = std::conj(lc.mu);
    lc.sigma = -lc.nu;
    lc.t = t;
    return lc;
}

inline LadderCoeffs ladder_coeffs(const ModeSolution& sol, double t) {
    auto [e, de] = sol.eval(t);
    return make_ladder_coeffs(e, de, t);
}

/// Linear forms of the moving quadratures Z(t), P(t) over both bases.
/// Over (z, p) the coefficients are real; over (a, a-dagger) they come in
/// conjugate pairs so that Z and P stay Hermitian.
struct QuadratureCoeffs {
    // Z = z_on_z * z + z_on_p * p;  P = p_on_z * z + p_on_p * p
    double z_on_z, z_on_p, p_on_z, p_on_p;
    // Z = z_on_a * a + z_on_adag * a-dagger, and likewise for P
    cplx z_on_a, z_on_adag, p_on_a, p_on_adag;

    /// [Z, P] evaluated from the (z,p) coefficients and [z,p] = i.
    cplx commutator() const {
        return cplx{0.0, 1.0} * (z_on_z * p_on_p - z_on_p * p_on_z);
    }
};

inline QuadratureCoeffs quadrature_coeffs(const ModeSolution& sol, double t) {
    auto [e, de] = sol.eval(t);
    QuadratureCoeffs qc;
    qc.z_on_z = de.imag();
    qc.z_on_p = -e.imag();
    qc.p_on_z = -de.real();
    qc.p_on_p = e.real();
    const double rt2 = std::numbers::sqrt2;
    // Substitute z = (a + a-dagger)/sqrt2, p = -i (a - a-dagger)/sqrt2.
    qc.z_on_a = cplx{qc.z_on_z, -qc.z_on_p} / rt2;
    qc.z_on_adag = std::conj(qc.z_on_a);
    qc.p_on_a = cplx{qc.p_on_z, -qc.p_on_p} / rt2;
    qc.p_on_adag = std::conj(qc.p_on_a);
    return qc;
}

/// Polar data of a canonical (mu, nu) pair: cosh r = |mu|, sinh r = |nu|.
/// theta is fixed so that the squeeze S(r e^{i theta}) maps A to a pure
/// phase times a (the u = 0 convention); phase_offset carries arg mu so the
/// four real parameters of (mu, nu) stay recoverable.
struct SqueezeParams {
    double r = 0.0;
    double theta = 0.0;
    double phase_offset = 0.0;
};

inline SqueezeParams bogoliubov_decompose(const LadderCoeffs& lc) {
    require_canonical(lc);
    SqueezeParams sp;
    sp.r = std::asinh(std::abs(lc.nu));
    sp.phase_offset = wrap_angle(std::arg(lc.mu));
    sp.theta = sp.r == 0.0 ? 0.0 : wrap_angle(std::arg(lc.nu) - std::arg(lc.mu));
    return sp;
}

inline std::pair<cplx, cplx> bogoliubov_reconstruct(const SqueezeParams& sp) {
    const cplx mu = std::polar(std::cosh(sp.r), sp.phase_offset);
    const cplx nu = std::polar(std::sinh(sp.r), sp.theta + sp.phase_offset);
    return {mu, nu};
}

struct BchGamma {
    cplx gamma_plus;
    double gamma_3;
    cplx gamma_minus;
};

/// Disentangling coefficients of the squeeze exponential.
inline BchGamma bch_gamma(double r, double theta) {
    if (r < 0.0)
        throw ConfigError("squeeze magnitude r must be nonnegative");
    const double th = std::tanh(r);
    return {std::polar(th, theta), std::log(std::cosh(r)), -std::polar(th, -theta)};
}

/// Coefficients of the conjugated operator S A S^{-1} = v a + u a-dagger.
inline std::pair<cplx, cplx> transform_uv(const SqueezeParams& sp, const LadderCoeffs& lc) {
    require_canonical(lc);
    const double ch = std::cosh(sp.r);
    const double sh = std::sinh(sp.r);
    const cplx eith = std::polar(1.0, sp.theta);
    const cplx u = lc.nu * ch - lc.mu * eith * sh;
    const cplx v = lc.mu * ch - lc.nu * std::conj(eith) * sh;
    return {u, v};
}

/// Displacement parameter transported through the squeeze conjugation:
/// S D_A(alpha) S^{-1} = D_a(beta).
inline cplx displacement_map(cplx alpha, cplx u, cplx v) {
    if (std::abs(std::norm(v) - std::norm(u) - 1.0) > 1e-8)
        throw NonCanonical("(u, v) violate |v|^2 - |u|^2 = 1");
    return alpha * std::conj(v) - std::conj(alpha) * u;
}

} // namespace qtrap

#endif
