#ifndef QTRAP_GAUSSIAN_HPP
#define QTRAP_GAUSSIAN_HPP

// Gaussian wave packets riding the classical trajectory, their moments and
// uncertainty products, and the complex squeeze factor B that tells apart
// "coherent in the moving quadratures" from "coherent in (z, p)".

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "qtrap/ladder.hpp"
#include "qtrap/mode.hpp"

namespace qtrap {

struct GaussianState {
    double z_cl = 0.0;
    double p_cl = 0.0;
    cplx width{1.0, 0.0}; // w(t) = -i eps'/eps
    double phi = 1.0;     // |eps|^2
    double phi_dot = 0.0;
    double t = 0.0;
    // Mode values kept alongside so quadrature-frame products can be formed
    // without re-querying the solution.
    cplx eps{1.0, 0.0};
    cplx deps{0.0, 1.0};
};

inline GaussianState coherent_state(const ModeSolution& sol, double t, double z0, double p0) {
    auto [e, de] = sol.eval(t);
    if (std::abs(e) < kEpsZeroGuard)
        throw ZeroCrossing("|eps| below guard; width undefined");
    GaussianState st;
    st.t = t;
    st.eps = e;
    st.deps = de;
    st.phi = std::norm(e);
    st.phi_dot = 2.0 * (de * std::conj(e)).real();
    st.width = cplx{0.0, -1.0} * de / e;
    auto [zc, pc] = classical_trajectory(sol, z0, p0, t);
    st.z_cl = zc;
    st.p_cl = pc;
    return st;
}

struct MomentSet {
    double mean_z = 0.0;
    double mean_p = 0.0;
    double var_z = 0.0;
    double var_p = 0.0;
    double cov_zp = 0.0; // symmetrized (1/2)<{z,p}> minus <z><p>
};

inline MomentSet moments(const GaussianState& st) {
    MomentSet m;
    m.mean_z = st.z_cl;
    m.mean_p = st.p_cl;
    m.var_z = st.phi / 2.0;
    m.var_p = (1.0 + st.phi_dot * st.phi_dot / 4.0) / (2.0 * st.phi);
    m.cov_zp = st.phi_dot / 4.0;
    return m;
}

struct UncertaintyProducts {
    double heisenberg_zp = 0.0;   // var_z * var_p
    double schrodinger_lhs = 0.0; // var_z * var_p - cov^2
    double schrodinger_rhs = 0.0; // (1/4)(1 + phi_dot^2/4)
    double heisenberg_ZP = 0.0;   // product in the moving quadratures
};

inline UncertaintyProducts uncertainty_products(const GaussianState& st) {
    const MomentSet m = moments(st);
    UncertaintyProducts up;
    up.heisenberg_zp = m.var_z * m.var_p;
    up.schrodinger_lhs = m.var_z * m.var_p - m.cov_zp * m.cov_zp;
    up.schrodinger_rhs = 0.25 * (1.0 + 0.25 * st.phi_dot * st.phi_dot);
    // Contract the quadrature forms Z = zz*z + zp*p, P = pz*z + pp*p with the
    // (z, p) covariance matrix rather than asserting the saturated value.
    const double zz = st.deps.imag(), zp = -st.eps.imag();
    const double pz = -st.deps.real(), pp = st.eps.real();
    const double varZ = zz * zz * m.var_z + zp * zp * m.var_p + 2.0 * zz * zp * m.cov_zp;
    const double varP = pz * pz * m.var_z + pp * pp * m.var_p + 2.0 * pz * pp * m.cov_zp;
    up.heisenberg_ZP = varZ * varP;
    return up;
}

/// Complex squeeze factor B = i var_z / <z p>. For these Gaussians
/// <z p> = cov + i/2, so the ratio is always well defined.
inline cplx squeeze_factor(const GaussianState&, const MomentSet& m) {
    const cplx zp_expect{m.cov_zp, 0.5};
    if (std::abs(zp_expect) < 1e-14)
        throw DegenerateMoments("<z p> too small to form B");
    return cplx{0.0, 1.0} * m.var_z / zp_expect;
}

inline cplx squeeze_factor(const GaussianState& st) { return squeeze_factor(st, moments(st)); }

struct Grid {
    double z0 = 0.0; // leftmost sample
    double dz = 0.0;
    std::size_t n = 0;

    double z(std::size_t i) const { return z0 + dz * static_cast<double>(i); }
    double z_end() const { return z(n == 0 ? 0 : n - 1); }
};

/// Uniform grid centered on the packet: half_span_sigmas on each side of
/// z_cl, points_per_sigma samples per standard deviation.
inline Grid default_grid(const GaussianState& st, std::size_t points_per_sigma = 32,
                         double half_span_sigmas = 8.0) {
    const double sigma = std::sqrt(moments(st).var_z);
    Grid g;
    g.dz = sigma / static_cast<double>(points_per_sigma);
    const std::size_t half = static_cast<std::size_t>(
        std::ceil(half_span_sigmas * static_cast<double>(points_per_sigma)));
    g.n = 2 * half + 1;
    g.z0 = st.z_cl - g.dz * static_cast<double>(half);
    return g;
}

/// Sample the normalized packet on the grid. The analytic normalization
/// (Re w / pi)^{1/4} is real and positive, which also pins the global phase:
/// arg Psi(z_cl) = z_cl * p_cl.
inline std::vector<cplx> evaluate_wavefunction(const GaussianState& st, const Grid& grid) {
    const double sigma = std::sqrt(moments(st).var_z);
    if (grid.n < 2 || grid.dz <= 0.0)
        throw GridTooCoarse("empty or degenerate grid");
    if (grid.dz > sigma / 16.0 + 1e-15)
        throw GridTooCoarse("need at least 16 points per standard deviation");
    if (st.z_cl - grid.z0 < 4.0 * sigma - 1e-12 || grid.z_end() - st.z_cl < 4.0 * sigma - 1e-12)
        throw GridTooCoarse("grid must span at least 8 standard deviations around the center");

    const double norm = std::pow(st.width.real() / std::numbers::pi, 0.25);
    std::vector<cplx> psi(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double dzc = grid.z(i) - st.z_cl;
        const cplx arg = -0.5 * st.width * dzc * dzc + cplx{0.0, 1.0} * grid.z(i) * st.p_cl;
        psi[i] = norm * std::exp(arg);
    }
    return psi;
}

namespace detail {

// Sixth-order central first derivative of complex samples; valid for
// indices 3..n-4.
inline cplx fd6(const std::vector<cplx>& f, std::size_t j, double dz) {
    return (-f[j - 3] / 60.0 + 3.0 * f[j - 2] / 20.0 - 3.0 * f[j - 1] / 4.0 +
            3.0 * f[j + 1] / 4.0 - 3.0 * f[j + 2] / 20.0 + f[j + 3] / 60.0) /
           dz;
}

inline double muss_residual_on_grid(const GaussianState& st, cplx B,
                                    std::size_t points_per_sigma) {
    const Grid g = default_grid(st, points_per_sigma);
    const std::vector<cplx> psi = evaluate_wavefunction(st, g);
    const cplx C = st.z_cl + cplx{0.0, 1.0} * B * st.p_cl;
    double num = 0.0, den = 0.0;
    for (std::size_t j = 3; j + 3 < g.n; ++j) {
        const cplx pv = cplx{0.0, -1.0} * fd6(psi, j, g.dz); // momentum action
        const cplx rj = g.z(j) * psi[j] + cplx{0.0, 1.0} * B * pv - C * psi[j];
        num += std::norm(rj);
        den += std::norm(psi[j]);
    }
    return std::sqrt(num / den);
}

} // namespace detail

/// Normalized residual of the defining eigenvalue equation
/// [z + i B p] Psi = C Psi with C = <z> + i B <p>, evaluated on a grid with
/// the momentum action taken by finite differences. Zero exactly when the
/// packet is a minimum-uncertainty state of (z, p) at that B.
inline double muss_residual(const GaussianState& st, cplx B, std::size_t points_per_sigma = 32) {
    if (points_per_sigma < 16)
        throw GridTooCoarse("need at least 16 points per standard deviation");
    const double res = detail::muss_residual_on_grid(st, B, points_per_sigma);
    // A halved step that collapses the residual means the value above was
    // mostly finite-difference error, not state mismatch.
    const double res_fine = detail::muss_residual_on_grid(st, B, 2 * points_per_sigma);
    if (res > 1e-9 && res_fine < res / 8.0)
        throw GridTooCoarse("residual dominated by finite-difference error; raise "
                            "points_per_sigma");
    return res;
}

/// Moments measured directly from grid samples (the independent check on the
/// closed forms): position moments from |Psi|^2, momentum moments through
/// finite-difference derivatives.
inline MomentSet grid_moments(const GaussianState& st, std::size_t points_per_sigma = 32,
                              double half_span_sigmas = 10.0) {
    const Grid g = default_grid(st, points_per_sigma, half_span_sigmas);
    const std::vector<cplx> psi = evaluate_wavefunction(st, g);

    double nrm = 0.0, mz = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) {
        nrm += std::norm(psi[j]) * g.dz;
        mz += g.z(j) * std::norm(psi[j]) * g.dz;
    }
    mz /= nrm;

    double vz = 0.0, mp = 0.0, p2 = 0.0, zp = 0.0;
    for (std::size_t j = 3; j + 3 < g.n; ++j) {
        const cplx dpsi = detail::fd6(psi, j, g.dz);
        const cplx pv = cplx{0.0, -1.0} * dpsi;
        const double dzc = g.z(j) - mz;
        vz += dzc * dzc * std::norm(psi[j]) * g.dz;
        mp += (std::conj(psi[j]) * pv).real() * g.dz;
        p2 += std::norm(dpsi) * g.dz; // <p^2> = integral |Psi'|^2
        zp += (std::conj(psi[j]) * cplx{g.z(j), 0.0} * pv).real() * g.dz;
    }

    MomentSet m;
    m.mean_z = mz;
    m.mean_p = mp / nrm;
    m.var_z = vz / nrm;
    m.var_p = p2 / nrm - m.mean_p * m.mean_p;
    m.cov_zp = zp / nrm - m.mean_z * m.mean_p;
    return m;
}

} // namespace qtrap

#endif
