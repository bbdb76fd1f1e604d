#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "qtrap/trap.hpp"

using namespace qtrap;

TEST_CASE("omega_profile evaluates the quadrupole drive") {
    SECTION("zero drive is a free particle on every axis") {
        TrapConfig cfg;
        for (Axis ax : {Axis::X, Axis::Y, Axis::Z}) {
            cfg.axis = ax;
            for (double t : {0.0, 0.3, 7.9, -2.0})
                REQUIRE(omega_profile(cfg, t) == 0.0);
        }
    }

    SECTION("static axial well takes negative dc amplitude") {
        TrapConfig cfg;
        cfg.v_dc = -0.5;
        for (double t : {0.0, 1.0, 2.5, 100.0})
            REQUIRE(omega_profile(cfg, t) == Catch::Approx(1.0).margin(1e-15));
    }

    SECTION("axial value at the phase reference") {
        TrapConfig cfg;
        cfg.v_dc = 1.0;
        cfg.v_ac = 2.0;
        cfg.omega = 2.0;
        cfg.t0 = 0.7;
        REQUIRE(omega_profile(cfg, cfg.t0) == Catch::Approx(2.0).margin(1e-15));
    }

    SECTION("axial coefficient is -2x the transverse one; axes sum to zero") {
        TrapConfig cfg;
        cfg.v_dc = 0.7;
        cfg.v_ac = -1.3;
        cfg.omega = 3.1;
        cfg.t0 = 0.2;
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> ts(-5.0, 5.0);
        for (int k = 0; k < 100; ++k) {
            const double t = ts(rng);
            cfg.axis = Axis::X;
            const double ox = omega_profile(cfg, t);
            cfg.axis = Axis::Y;
            const double oy = omega_profile(cfg, t);
            cfg.axis = Axis::Z;
            const double oz = omega_profile(cfg, t);
            REQUIRE(ox == oy);
            REQUIRE(oz == Catch::Approx(-2.0 * ox).margin(1e-14));
            REQUIRE(std::abs(ox + oy + oz) < 1e-14);
        }
    }
}

TEST_CASE("TrapConfig validation and period") {
    TrapConfig cfg;
    cfg.omega = 0.0;
    REQUIRE_THROWS_AS(cfg.validate(), ConfigError);
    cfg.omega = -1.0;
    REQUIRE_THROWS_AS(cfg.validate(), ConfigError);
    cfg.omega = 2.0;
    REQUIRE_NOTHROW(cfg.validate());
    REQUIRE(cfg.period() == Catch::Approx(M_PI));
    cfg.v_ac = std::numeric_limits<double>::quiet_NaN();
    REQUIRE_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("mathieu_params reduces the drive to canonical form") {
    SECTION("zero drive maps to (0, 0)") {
        TrapConfig cfg;
        const MathieuParams mp = mathieu_params(cfg);
        REQUIRE(mp.a == 0.0);
        REQUIRE(mp.q == 0.0);
    }

    SECTION("static axial well maps to a = 1") {
        TrapConfig cfg;
        cfg.omega = 2.0;
        cfg.v_dc = -cfg.omega * cfg.omega / 8.0;
        const MathieuParams mp = mathieu_params(cfg);
        REQUIRE(mp.a == Catch::Approx(1.0).margin(1e-15));
        REQUIRE(mp.q == 0.0);
    }

    SECTION("profile rebuilt from (a, q) matches the original drive") {
        std::mt19937 rng(11);
        std::uniform_real_distribution<double> par(-2.0, 2.0);
        std::uniform_real_distribution<double> ts(-10.0, 10.0);
        for (Axis ax : {Axis::X, Axis::Y, Axis::Z}) {
            TrapConfig cfg;
            cfg.v_dc = par(rng);
            cfg.v_ac = par(rng);
            cfg.omega = 1.5 + std::abs(par(rng));
            cfg.t0 = par(rng);
            cfg.axis = ax;
            const MathieuParams mp = mathieu_params(cfg);
            for (int k = 0; k < 100; ++k) {
                const double t = ts(rng);
                const double rebuilt =
                    (cfg.omega * cfg.omega / 4.0) *
                    (mp.a - 2.0 * mp.q * std::cos(cfg.omega * (t - cfg.t0)));
                REQUIRE(std::abs(rebuilt - omega_profile(cfg, t)) < 1e-12);
            }
        }
    }
}

TEST_CASE("trap_from_mathieu inverts mathieu_params") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> par(-3.0, 3.0);
    for (Axis ax : {Axis::X, Axis::Y, Axis::Z}) {
        for (int k = 0; k < 20; ++k) {
            const double a = par(rng);
            const double q = par(rng);
            const double omega = 0.5 + std::abs(par(rng));
            const double t0 = par(rng);
            const TrapConfig cfg = trap_from_mathieu(a, q, omega, t0, ax);
            REQUIRE(cfg.axis == ax);
            REQUIRE(cfg.omega == omega);
            REQUIRE(cfg.t0 == t0);
            const MathieuParams mp = mathieu_params(cfg);
            REQUIRE(mp.a == Catch::Approx(a).margin(1e-12));
            REQUIRE(mp.q == Catch::Approx(q).margin(1e-12));
        }
    }

    REQUIRE_THROWS_AS(trap_from_mathieu(1.0, 0.0, 0.0), ConfigError);
    REQUIRE_THROWS_AS(trap_from_mathieu(1.0, 0.0, -2.0), ConfigError);
}
