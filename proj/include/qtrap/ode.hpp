#ifndef QTRAP_ODE_HPP
#define QTRAP_ODE_HPP

// Adaptive Dormand-Prince 5(4) integrator with continuous (dense) output.
//
// The pair is the classic DOPRI5 tableau: a fifth-order solution advanced
// with an embedded fourth-order error estimate, first-same-as-last (FSAL)
// evaluation reuse, and the standard quartic interpolant stored per accepted
// step. State dimension is a compile-time constant since every system in this
// library is 2 or 4 dimensional.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "qtrap/errors.hpp"

namespace qtrap {

template <std::size_t N>
using StateVec = std::array<double, N>;

/// Piecewise-polynomial continuous extension of an integration run.
/// Each accepted step contributes one segment; evaluation is O(log segments).
template <std::size_t N>
class DenseOutput {
public:
    struct Segment {
        double t_left;
        double h;
        std::array<StateVec<N>, 5> rcont; // interpolation coefficients
    };

    void reserve(std::size_t n) { segs_.reserve(n); }

    void push(const Segment& s) { segs_.push_back(s); }

    void set_range(double t0, double t1) {
        t_begin_ = t0;
        t_end_ = t1;
    }

    double t_begin() const { return t_begin_; }
    double t_end() const { return t_end_; }
    std::size_t steps() const { return segs_.size(); }
    double step_left(std::size_t i) const { return segs_[i].t_left; }

    StateVec<N> eval(double t) const {
        const double lo = std::min(t_begin_, t_end_);
        const double hi = std::max(t_begin_, t_end_);
        const double slack = 1e-12 * (1.0 + std::max(std::abs(lo), std::abs(hi)));
        if (t < lo - slack || t > hi + slack)
            throw OutOfInterval("time outside integrated interval");
        t = std::clamp(t, lo, hi);

        // Locate the segment whose [t_left, t_left+h] range covers t. Steps
        // are stored in integration order, which is monotone in either
        // direction of time.
        const bool forward = t_end_ >= t_begin_;
        std::size_t idx = locate(t, forward);
        const Segment& s = segs_[idx];

        const double theta = s.h != 0.0 ? (t - s.t_left) / s.h : 0.0;
        const double theta1 = 1.0 - theta;
        StateVec<N> y;
        for (std::size_t i = 0; i < N; ++i) {
            y[i] = s.rcont[0][i] +
                   theta * (s.rcont[1][i] +
                            theta1 * (s.rcont[2][i] +
                                      theta * (s.rcont[3][i] + theta1 * s.rcont[4][i])));
        }
        return y;
    }

private:
    std::size_t locate(double t, bool forward) const {
        std::size_t lo = 0, hi = segs_.size();
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            const bool left = forward ? (segs_[mid].t_left <= t) : (segs_[mid].t_left >= t);
            if (left)
                lo = mid;
            else
                hi = mid;
        }
        return lo;
    }

    std::vector<Segment> segs_;
    double t_begin_ = 0.0;
    double t_end_ = 0.0;
};

template <std::size_t N>
struct OdeResult {
    StateVec<N> y;
    DenseOutput<N> dense;
    std::size_t n_accepted = 0;
    std::size_t n_rejected = 0;
};

/// Integrate y' = f(t, y) from t0 to t1 (either direction).
/// `observer`, when set, is called after every accepted step with (t, y) and
/// may throw to abort (used for the zero-crossing guard).
template <std::size_t N, class RHS>
OdeResult<N> integrate_dopri5(RHS&& f, double t0, double t1, StateVec<N> y0, double rtol,
                              double atol,
                              const std::function<void(double, const StateVec<N>&)>& observer = {}) {
    if (!(rtol > 0.0) || !(atol > 0.0))
        throw ConfigError("integration tolerances must be positive");

    // Butcher tableau of the Dormand-Prince 5(4) pair.
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                     b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // Difference between the 5th-order weights and the embedded 4th-order ones.
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    // Weights of the quartic interpolant's top coefficient.
    constexpr double d1 = -12715105075.0 / 11282082432.0;
    constexpr double d3 = 87487479700.0 / 32700410799.0;
    constexpr double d4 = -10690763975.0 / 1880347072.0;
    constexpr double d5 = 701980252875.0 / 199316789632.0;
    constexpr double d6 = -1453857185.0 / 822651844.0;
    constexpr double d7 = 69997945.0 / 29380423.0;

    OdeResult<N> out;
    out.dense.set_range(t0, t1);
    if (t1 == t0) {
        out.y = y0;
        return out;
    }

    const double dir = t1 > t0 ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);

    auto err_norm = [&](const StateVec<N>& err, const StateVec<N>& y, const StateVec<N>& ynew) {
        double s = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            const double q = err[i] / sc;
            s += q * q;
        }
        return std::sqrt(s / static_cast<double>(N));
    };

    double t = t0;
    StateVec<N> y = y0;
    StateVec<N> k1 = f(t, y);

    // Initial step heuristic: balance |y|/|y'| against a trial Euler step.
    double h;
    {
        double dn0 = 0.0, dn1 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sc = atol + rtol * std::abs(y[i]);
            dn0 += (y[i] / sc) * (y[i] / sc);
            dn1 += (k1[i] / sc) * (k1[i] / sc);
        }
        double h0 = (dn0 < 1e-10 || dn1 < 1e-10) ? 1e-6 : 0.01 * std::sqrt(dn0 / dn1);
        h0 = std::min(h0, span);
        StateVec<N> ytrial;
        for (std::size_t i = 0; i < N; ++i)
            ytrial[i] = y[i] + dir * h0 * k1[i];
        StateVec<N> k2 = f(t + dir * h0, ytrial);
        double d2 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sc = atol + rtol * std::abs(y[i]);
            const double q = (k2[i] - k1[i]) / sc;
            d2 += q * q;
        }
        d2 = std::sqrt(d2) / h0;
        const double dmax = std::max(std::sqrt(dn1), d2);
        const double h1 = dmax > 1e-15 ? std::pow(0.01 / dmax, 0.2) : std::max(1e-6, h0 * 1e-3);
        h = std::min({100.0 * h0, h1, span});
    }

    constexpr double safety = 0.9, fac_min = 0.2, fac_max = 10.0;
    const std::size_t max_steps = 20'000'000;
    bool last_rejected = false;

    for (std::size_t step = 0;; ++step) {
        if (step >= max_steps)
            throw StepFailure("step limit exceeded");
        const double hmin = 1e-14 * std::max(1.0, std::abs(t));
        if (h < hmin)
            throw StepFailure("step size underflow at t=" + std::to_string(t));
        if (h > std::abs(t1 - t))
            h = std::abs(t1 - t);
        const double hd = dir * h;

        StateVec<N> k2, k3, k4, k5, k6, k7, ytmp, ynew, err;
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + hd * a21 * k1[i];
        k2 = f(t + c2 * hd, ytmp);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + hd * (a31 * k1[i] + a32 * k2[i]);
        k3 = f(t + c3 * hd, ytmp);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + hd * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        k4 = f(t + c4 * hd, ytmp);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + hd * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        k5 = f(t + c5 * hd, ytmp);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + hd * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                   a65 * k5[i]);
        k6 = f(t + hd, ytmp);
        for (std::size_t i = 0; i < N; ++i)
            ynew[i] = y[i] + hd * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        k7 = f(t + hd, ynew); // FSAL: becomes k1 of the next step
        for (std::size_t i = 0; i < N; ++i)
            err[i] = hd * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                           e7 * k7[i]);

        const double en = err_norm(err, y, ynew);
        if (en <= 1.0) {
            // Accept: store the interpolant, advance, notify.
            typename DenseOutput<N>::Segment seg;
            seg.t_left = t;
            seg.h = hd;
            for (std::size_t i = 0; i < N; ++i) {
                const double ydiff = ynew[i] - y[i];
                const double bspl = hd * k1[i] - ydiff;
                seg.rcont[0][i] = y[i];
                seg.rcont[1][i] = ydiff;
                seg.rcont[2][i] = bspl;
                seg.rcont[3][i] = ydiff - hd * k7[i] - bspl;
                seg.rcont[4][i] = hd * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                        d6 * k6[i] + d7 * k7[i]);
            }
            out.dense.push(seg);
            ++out.n_accepted;

            t += hd;
            y = ynew;
            k1 = k7;
            if (observer)
                observer(t, y);
            if (std::abs(t1 - t) <= 1e-14 * std::max(1.0, std::abs(t1))) {
                out.y = y;
                return out;
            }
            double fac = safety * std::pow(en > 1e-300 ? en : 1e-300, -0.2);
            fac = std::clamp(fac, fac_min, last_rejected ? 1.0 : fac_max);
            h *= fac;
            last_rejected = false;
        } else {
            ++out.n_rejected;
            const double fac = std::clamp(safety * std::pow(en, -0.2), fac_min, 1.0);
            h *= fac;
            last_rejected = true;
        }
    }
}

} // namespace qtrap

#endif
