#ifndef QTRAP_FLOQUET_HPP
#define QTRAP_FLOQUET_HPP

// Floquet classification of y'' + (omega^2/4)(a - 2 q cos omega t) y = 0.
// The one-period transfer (monodromy) matrix of two fundamental solutions
// decides boundedness: |trace| < 2 means oscillatory, |trace| > 2 means
// exponential growth with rate acosh(|trace|/2) per period.

#include <algorithm>
#include <cmath>

#include "qtrap/ode.hpp"

namespace qtrap {

struct StabilityVerdict {
    double a_param = 0.0;
    double q_param = 0.0;
    double monodromy_trace = 0.0;
    bool stable = false;
    double growth_exponent = 0.0; // per drive period, 0 when bounded
};

// |trace| within this band of 2 is treated as exactly marginal rather than
// decided by rounding noise. Boundedness there depends on the matrix
// structure: M = ±I (pure-harmonic resonances, e.g. a=1 q=0) is bounded,
// while the generic tongue boundary carries a Jordan block and grows
// linearly, so it is classified unstable-marginal with growth 0.
constexpr double kMarginalBand = 1e-9;
constexpr double kResonantIdentityTol = 1e-6;

/// Classify one (a, q) point by integrating the two fundamental columns of
/// the canonical form over one drive period.
inline StabilityVerdict floquet_stability(double a_param, double q_param, double omega,
                                          double tol = 1e-12) {
    if (!(omega > 0.0))
        throw ConfigError("floquet omega must be positive");

    const double w24 = omega * omega / 4.0;
    auto rhs = [&](double t, const StateVec<4>& y) -> StateVec<4> {
        const double om = w24 * (a_param - 2.0 * q_param * std::cos(omega * t));
        // Columns (y1, y1') and (y2, y2') advanced together.
        return {y[1], -om * y[0], y[3], -om * y[2]};
    };

    const double period = 2.0 * M_PI / omega;
    StateVec<4> y0{1.0, 0.0, 0.0, 1.0};
    OdeResult<4> r = integrate_dopri5<4>(rhs, 0.0, period, y0, tol, tol);

    StabilityVerdict v;
    v.a_param = a_param;
    v.q_param = q_param;
    // Monodromy M = [[y1, y2], [y1', y2']] evaluated at one period.
    v.monodromy_trace = r.y[0] + r.y[3];

    const double at = std::abs(v.monodromy_trace);
    if (std::abs(at - 2.0) <= kMarginalBand) {
        const double sgn = v.monodromy_trace >= 0.0 ? 1.0 : -1.0;
        const double defect = std::max(
            std::max(std::abs(r.y[0] - sgn), std::abs(r.y[3] - sgn)),
            std::max(std::abs(r.y[1]), std::abs(r.y[2])));
        v.stable = defect <= kResonantIdentityTol;
        v.growth_exponent = 0.0;
    } else if (at < 2.0) {
        v.stable = true;
        v.growth_exponent = 0.0;
    } else {
        v.stable = false;
        v.growth_exponent = std::acosh(at / 2.0);
    }
    return v;
}

/// Determinant of the monodromy matrix for the same point; equals 1 for this
/// damping-free equation (Liouville). Exposed for invariant testing.
inline double monodromy_determinant(double a_param, double q_param, double omega,
                                    double tol = 1e-12) {
    const double w24 = omega * omega / 4.0;
    auto rhs = [&](double t, const StateVec<4>& y) -> StateVec<4> {
        const double om = w24 * (a_param - 2.0 * q_param * std::cos(omega * t));
        return {y[1], -om * y[0], y[3], -om * y[2]};
    };
    const double period = 2.0 * M_PI / omega;
    StateVec<4> y0{1.0, 0.0, 0.0, 1.0};
    OdeResult<4> r = integrate_dopri5<4>(rhs, 0.0, period, y0, tol, tol);
    return r.y[0] * r.y[3] - r.y[2] * r.y[1];
}

/// Bisect the stable/unstable transition in q at fixed a. Endpoints must
/// bracket a flip; returns the midpoint of the final bracket.
inline double find_boundary_q(double a_param, double q_lo, double q_hi, double omega,
                              double floquet_tol = 1e-12, double q_tol = 1e-10) {
    bool lo_stable = floquet_stability(a_param, q_lo, omega, floquet_tol).stable;
    bool hi_stable = floquet_stability(a_param, q_hi, omega, floquet_tol).stable;
    if (lo_stable == hi_stable)
        throw ConfigError("bisection endpoints do not bracket a stability flip");
    while (q_hi - q_lo > q_tol) {
        const double mid = 0.5 * (q_lo + q_hi);
        const bool ms = floquet_stability(a_param, mid, omega, floquet_tol).stable;
        if (ms == lo_stable)
            q_lo = mid;
        else
            q_hi = mid;
    }
    return 0.5 * (q_lo + q_hi);
}

} // namespace qtrap

#endif
