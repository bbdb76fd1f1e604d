#ifndef QTRAP_TRAP_HPP
#define QTRAP_TRAP_HPP

#include <cmath>
#include <string>

#include "qtrap/errors.hpp"

namespace qtrap {

enum class Axis { X, Y, Z };

inline const char* axis_name(Axis a) {
    switch (a) {
        case Axis::X: return "x";
        case Axis::Y: return "y";
        default: return "z";
    }
}

/// Dimensionless quadrupole drive. The geometric charge/size prefactor is
/// absorbed into v_dc and v_ac; hbar = m = 1 throughout.
struct TrapConfig {
    double v_dc = 0.0;
    double v_ac = 0.0;
    double omega = 1.0;
    double t0 = 0.0;
    Axis axis = Axis::Z;

    void validate() const {
        if (!(omega > 0.0))
            throw ConfigError("trap omega must be positive");
        if (!std::isfinite(v_dc) || !std::isfinite(v_ac) || !std::isfinite(t0))
            throw ConfigError("trap parameters must be finite");
    }

    double period() const { return 2.0 * M_PI / omega; }
};

/// Frequency-squared coefficient of the axis equation eps'' + Omega(t) eps = 0.
/// The axial coefficient is -2x the transverse one at every instant, so the
/// three axes sum to zero (Laplace condition for a quadrupole).
inline double omega_profile(const TrapConfig& cfg, double t) {
    const double drive = cfg.v_dc - cfg.v_ac * std::cos(cfg.omega * (t - cfg.t0));
    return cfg.axis == Axis::Z ? -2.0 * drive : drive;
}

struct MathieuParams {
    double a = 0.0;
    double q = 0.0;
};

/// Reduction of Omega(t) to the canonical form
/// (omega^2/4) (a - 2 q cos omega (t - t0)).
/// Sign conventions vary across references; these are fixed by the reduction
/// above and documented in the CLI help.
inline MathieuParams mathieu_params(const TrapConfig& cfg) {
    cfg.validate();
    const double w2 = cfg.omega * cfg.omega;
    if (cfg.axis == Axis::Z)
        return {-8.0 * cfg.v_dc / w2, -4.0 * cfg.v_ac / w2};
    return {4.0 * cfg.v_dc / w2, 2.0 * cfg.v_ac / w2};
}

/// Inverse of mathieu_params for the given axis.
inline TrapConfig trap_from_mathieu(double a, double q, double omega, double t0 = 0.0,
                                    Axis axis = Axis::Z) {
    if (!(omega > 0.0))
        throw ConfigError("trap omega must be positive");
    TrapConfig cfg;
    cfg.omega = omega;
    cfg.t0 = t0;
    cfg.axis = axis;
    const double w2 = omega * omega;
    if (axis == Axis::Z) {
        cfg.v_dc = -a * w2 / 8.0;
        cfg.v_ac = -q * w2 / 4.0;
    } else {
        cfg.v_dc = a * w2 / 4.0;
        cfg.v_ac = q * w2 / 2.0;
    }
    return cfg;
}

} // namespace qtrap

#endif
