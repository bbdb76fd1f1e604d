#ifndef QTRAP_MODE_HPP
#define QTRAP_MODE_HPP

// Complex mode pair eps(t), eps'(t) solving eps'' + Omega(t) eps = 0 with the
// canonical Wronskian eps eps'* - eps' eps* = -2i. Everything downstream
// (ladder coefficients, Gaussian widths, classical trajectories) is built
// from this pair.

#include <cmath>
#include <complex>
#include <functional>
#include <utility>

#include "qtrap/ode.hpp"

namespace qtrap {

using cplx = std::complex<double>;

constexpr double kEpsZeroGuard = 1e-8;
constexpr cplx kCanonicalWronskian{0.0, -2.0};

inline cplx pair_wronskian(cplx eps, cplx deps) {
    return eps * std::conj(deps) - deps * std::conj(eps);
}

class ModeSolution {
public:
    ModeSolution(double t0, double t1, cplx eps0, cplx deps0, double tol, DenseOutput<4> dense)
        : t0_(t0), t1_(t1), eps0_(eps0), deps0_(deps0), tol_(tol), dense_(std::move(dense)) {}

    double t0() const { return t0_; }
    double t1() const { return t1_; }
    double tol() const { return tol_; }
    cplx eps0() const { return eps0_; }
    cplx deps0() const { return deps0_; }
    const DenseOutput<4>& dense() const { return dense_; }

    cplx eps(double t) const {
        const StateVec<4> y = dense_.eval(t);
        return {y[0], y[1]};
    }

    cplx deps(double t) const {
        const StateVec<4> y = dense_.eval(t);
        return {y[2], y[3]};
    }

    std::pair<cplx, cplx> eval(double t) const {
        const StateVec<4> y = dense_.eval(t);
        return {cplx{y[0], y[1]}, cplx{y[2], y[3]}};
    }

private:
    double t0_, t1_;
    cplx eps0_, deps0_;
    double tol_;
    DenseOutput<4> dense_;
};

/// Integrate the mode equation with a user-supplied frequency profile.
/// Initial values must be Wronskian-canonical (the default pair 1, i is).
/// Throws ZeroCrossing if |eps| dips below the guard threshold, which with
/// canonical initial values only happens after strong unstable growth.
inline ModeSolution integrate_epsilon(const std::function<double(double)>& profile, double t0,
                                      double t1, cplx eps0 = {1.0, 0.0}, cplx deps0 = {0.0, 1.0},
                                      double tol = 1e-10) {
    if (!(tol > 0.0))
        throw ConfigError("mode integration tolerance must be positive");
    const cplx w0 = pair_wronskian(eps0, deps0);
    if (std::abs(w0 - kCanonicalWronskian) > 1e-12)
        throw NonCanonicalInitialConditions(
            "initial (eps, eps') must have Wronskian -2i; got (" +
            std::to_string(w0.real()) + ", " + std::to_string(w0.imag()) + "i)");

    // Real 4-vector [Re eps, Im eps, Re eps', Im eps'].
    auto rhs = [&profile](double t, const StateVec<4>& y) -> StateVec<4> {
        const double om = profile(t);
        return {y[2], y[3], -om * y[0], -om * y[1]};
    };
    auto guard = [](double t, const StateVec<4>& y) {
        if (std::hypot(y[0], y[1]) < kEpsZeroGuard)
            throw ZeroCrossing("|eps| fell below " + std::to_string(kEpsZeroGuard) + " at t=" +
                               std::to_string(t));
    };

    StateVec<4> y0{eps0.real(), eps0.imag(), deps0.real(), deps0.imag()};
    OdeResult<4> r = integrate_dopri5<4>(rhs, t0, t1, y0, tol, tol * 1e-2, guard);
    return ModeSolution(t0, t1, eps0, deps0, tol, std::move(r.dense));
}

inline cplx wronskian(const ModeSolution& sol, double t) {
    auto [e, de] = sol.eval(t);
    return pair_wronskian(e, de);
}

/// Classical phase-space point transported from (z0, p0) at t0 to time t.
/// The bracket combinations are real for real inputs; a significant imaginary
/// residue means the stored solution is corrupted.
inline std::pair<double, double> classical_trajectory(const ModeSolution& sol, double z0,
                                                      double p0, double t) {
    const cplx e0 = sol.eps0();
    const cplx de0 = sol.deps0();
    auto [e, de] = sol.eval(t);
    const cplx ihalf{0.0, 0.5};

    const cplx zc = ihalf * ((std::conj(e) * e0 - e * std::conj(e0)) * p0 +
                             (e * std::conj(de0) - std::conj(e) * de0) * z0);
    const cplx pc = ihalf * ((std::conj(de) * e0 - de * std::conj(e0)) * p0 +
                             (de * std::conj(de0) - std::conj(de) * de0) * z0);

    auto check_real = [](cplx v, const char* what) {
        if (std::abs(v.imag()) > 1e-9 * (1.0 + std::abs(v.real())))
            throw ComplexLeak(std::string(what) + " acquired imaginary part " +
                              std::to_string(v.imag()));
        return v.real();
    };
    return {check_real(zc, "z_cl"), check_real(pc, "p_cl")};
}

} // namespace qtrap

#endif
