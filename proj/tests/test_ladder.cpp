#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "qtrap/ladder.hpp"
#include "qtrap/trap.hpp"

using namespace qtrap;

namespace {

ModeSolution mathieu_solution(double a, double q, double t1) {
    const TrapConfig cfg = trap_from_mathieu(a, q, 2.0);
    return integrate_epsilon([cfg](double t) { return omega_profile(cfg, t); }, 0.0, t1);
}

} // namespace

TEST_CASE("wrap_angle normalizes to (-pi, pi]") {
    const double pi = std::numbers::pi;
    REQUIRE(wrap_angle(0.0) == 0.0);
    REQUIRE(wrap_angle(pi) == Catch::Approx(pi));
    REQUIRE(wrap_angle(-pi) == Catch::Approx(pi));
    REQUIRE(wrap_angle(3.0 * pi) == Catch::Approx(pi));
    REQUIRE(wrap_angle(2.0 * pi) == Catch::Approx(0.0).margin(1e-15));
    REQUIRE(wrap_angle(-0.25) == Catch::Approx(-0.25));
    REQUIRE(wrap_angle(7.5) == Catch::Approx(7.5 - 2.0 * pi));
}

TEST_CASE("ladder coefficients from the mode pair") {
    SECTION("static oscillator: pure phase rotation, no mixing") {
        const auto sol = integrate_epsilon([](double) { return 1.0; }, 0.0, 10.0);
        for (double t : {0.0, 0.9, 4.2, 10.0}) {
            const LadderCoeffs lc = ladder_coeffs(sol, t);
            REQUIRE(std::abs(lc.mu - std::exp(cplx{0.0, t})) < 1e-9);
            REQUIRE(std::abs(lc.nu) < 1e-9);
            REQUIRE(lc.canonical_defect() < 1e-9);
        }
    }

    SECTION("free particle at t=2") {
        const auto sol = integrate_epsilon([](double) { return 0.0; }, 0.0, 3.0);
        const LadderCoeffs lc = ladder_coeffs(sol, 2.0);
        REQUIRE(std::abs(lc.mu - cplx{1.0, 1.0}) < 1e-10);
        REQUIRE(std::abs(lc.nu - cplx{0.0, -1.0}) < 1e-10);
        REQUIRE(std::norm(lc.mu) - std::norm(lc.nu) == Catch::Approx(1.0).margin(1e-10));
    }

    SECTION("canonicality from an integrated Mathieu drive") {
        const auto sol = mathieu_solution(0.0, 0.4, 3.0 * M_PI);
        const LadderCoeffs lc = ladder_coeffs(sol, 3.0 * M_PI);
        REQUIRE(lc.canonical_defect() < 1e-9);
    }

    SECTION("inverse pair composes back to the identity map") {
        const auto sol = mathieu_solution(0.0, 0.4, 2.0);
        const LadderCoeffs lc = ladder_coeffs(sol, 2.0);
        // a = rho A + sigma A-dagger with A = mu a + nu a-dagger: the
        // coefficient of a must be 1, of a-dagger 0.
        const cplx on_a = lc.rho * lc.mu + lc.sigma * std::conj(lc.nu);
        const cplx on_adag = lc.rho * lc.nu + lc.sigma * std::conj(lc.mu);
        REQUIRE(std::abs(on_a - 1.0) < 1e-10);
        REQUIRE(std::abs(on_adag) < 1e-10);
        // Same normalization condition as (mu, nu), conjugated roles.
        REQUIRE(std::norm(lc.sigma) - std::norm(lc.rho) == Catch::Approx(-1.0).margin(1e-10));
    }
}

TEST_CASE("require_canonical rejects scaled pairs") {
    LadderCoeffs lc = make_ladder_coeffs({2.0, 0.0}, {0.0, 1.0});
    REQUIRE(lc.canonical_defect() > 1e-2);
    REQUIRE_THROWS_AS(require_canonical(lc), NonCanonical);
    REQUIRE_THROWS_AS(bogoliubov_decompose(lc), NonCanonical);
}

TEST_CASE("quadrature coefficients") {
    SECTION("static case at t=0 is the identity frame") {
        const auto sol = integrate_epsilon([](double) { return 1.0; }, 0.0, 1.0);
        const QuadratureCoeffs qc = quadrature_coeffs(sol, 0.0);
        REQUIRE(qc.z_on_z == Catch::Approx(1.0).margin(1e-12));
        REQUIRE(qc.z_on_p == Catch::Approx(0.0).margin(1e-12));
        REQUIRE(qc.p_on_z == Catch::Approx(0.0).margin(1e-12));
        REQUIRE(qc.p_on_p == Catch::Approx(1.0).margin(1e-12));
        const double rt2 = std::numbers::sqrt2;
        REQUIRE(std::abs(qc.z_on_a - cplx{1.0 / rt2, 0.0}) < 1e-12);
    }

    SECTION("free particle t=1, coefficients from eps = 1+i") {
        const auto sol = integrate_epsilon([](double) { return 0.0; }, 0.0, 2.0);
        const QuadratureCoeffs qc = quadrature_coeffs(sol, 1.0);
        REQUIRE(qc.z_on_z == Catch::Approx(1.0).margin(1e-11));
        REQUIRE(qc.z_on_p == Catch::Approx(-1.0).margin(1e-11));
        REQUIRE(qc.p_on_z == Catch::Approx(0.0).margin(1e-11));
        REQUIRE(qc.p_on_p == Catch::Approx(1.0).margin(1e-11));
        REQUIRE(std::abs(qc.commutator() - cplx{0.0, 1.0}) < 1e-12);
    }

    SECTION("commutator is i and forms are Hermitian at random times") {
        const auto sol = mathieu_solution(0.0, 0.4, 4.0 * M_PI);
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> ts(0.0, 4.0 * M_PI);
        for (int k = 0; k < 50; ++k) {
            const QuadratureCoeffs qc = quadrature_coeffs(sol, ts(rng));
            REQUIRE(std::abs(qc.commutator() - cplx{0.0, 1.0}) < 1e-10);
            REQUIRE(std::abs(qc.z_on_adag - std::conj(qc.z_on_a)) < 1e-14);
            REQUIRE(std::abs(qc.p_on_adag - std::conj(qc.p_on_a)) < 1e-14);
        }
    }
}

TEST_CASE("bogoliubov decomposition") {
    SECTION("static oscillator: r = 0, phase carried by mu") {
        const auto sol = integrate_epsilon([](double) { return 1.0; }, 0.0, 10.0);
        for (double t : {0.5, 2.0, 8.0}) {
            const SqueezeParams sp = bogoliubov_decompose(ladder_coeffs(sol, t));
            REQUIRE(sp.r < 1e-9);
            REQUIRE(sp.phase_offset == Catch::Approx(wrap_angle(t)).margin(1e-8));
        }
    }

    SECTION("free particle t=2: r = arcsinh 1") {
        const auto sol = integrate_epsilon([](double) { return 0.0; }, 0.0, 3.0);
        const SqueezeParams sp = bogoliubov_decompose(ladder_coeffs(sol, 2.0));
        REQUIRE(sp.r == Catch::Approx(std::asinh(1.0)).margin(1e-9));
        REQUIRE(sp.r == Catch::Approx(0.881374).margin(1e-6));
    }

    SECTION("decompose/reconstruct round-trip on random canonical pairs") {
        std::mt19937 rng(41);
        std::uniform_real_distribution<double> rs(0.0, 2.0);
        std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
        for (int k = 0; k < 1000; ++k) {
            const double r = rs(rng);
            const double ph = angle(rng);
            const double th = angle(rng);
            LadderCoeffs lc;
            lc.mu = std::polar(std::cosh(r), ph);
            lc.nu = std::polar(std::sinh(r), th + ph);
            const SqueezeParams sp = bogoliubov_decompose(lc);
            const auto [mu2, nu2] = bogoliubov_reconstruct(sp);
            REQUIRE(std::abs(mu2 - lc.mu) < 1e-10);
            REQUIRE(std::abs(nu2 - lc.nu) < 1e-10);
        }
    }

    SECTION("r = 0 sets theta to zero by convention") {
        LadderCoeffs lc;
        lc.mu = std::polar(1.0, 0.7);
        lc.nu = 0.0;
        const SqueezeParams sp = bogoliubov_decompose(lc);
        REQUIRE(sp.r == 0.0);
        REQUIRE(sp.theta == 0.0);
        REQUIRE(sp.phase_offset == Catch::Approx(0.7));
    }
}

TEST_CASE("bch_gamma closed forms") {
    SECTION("identity squeeze") {
        const BchGamma g = bch_gamma(0.0, 1.234);
        REQUIRE(std::abs(g.gamma_plus) == 0.0);
        REQUIRE(g.gamma_3 == 0.0);
        REQUIRE(std::abs(g.gamma_minus) == 0.0);
    }

    SECTION("r=1, theta=0") {
        const BchGamma g = bch_gamma(1.0, 0.0);
        REQUIRE(g.gamma_plus.real() == Catch::Approx(std::tanh(1.0)).margin(1e-15));
        REQUIRE(g.gamma_plus.imag() == 0.0);
        REQUIRE(g.gamma_3 == Catch::Approx(std::log(std::cosh(1.0))).margin(1e-15));
        REQUIRE(g.gamma_minus.real() == Catch::Approx(-std::tanh(1.0)).margin(1e-15));
        REQUIRE(g.gamma_plus.real() == Catch::Approx(0.761594).margin(1e-6));
        REQUIRE(g.gamma_3 == Catch::Approx(0.433781).margin(1e-6));
    }

    SECTION("r=0.5, theta=pi/2: both coefficients rotate to +i") {
        const BchGamma g = bch_gamma(0.5, std::numbers::pi / 2.0);
        REQUIRE(std::abs(g.gamma_plus - cplx{0.0, std::tanh(0.5)}) < 1e-15);
        REQUIRE(std::abs(g.gamma_minus - cplx{0.0, std::tanh(0.5)}) < 1e-15);
    }

    REQUIRE_THROWS_AS(bch_gamma(-0.1, 0.0), ConfigError);
}

TEST_CASE("transform_uv conjugation coefficients") {
    SECTION("r = 0 passes (nu, mu) through") {
        const auto sol = integrate_epsilon([](double) { return 0.0; }, 0.0, 3.0);
        const LadderCoeffs lc = ladder_coeffs(sol, 2.0);
        const auto [u, v] = transform_uv(SqueezeParams{}, lc);
        REQUIRE(std::abs(u - lc.nu) < 1e-12);
        REQUIRE(std::abs(v - lc.mu) < 1e-12);
    }

    SECTION("the decomposition's own squeeze diagonalizes A") {
        std::mt19937 rng(59);
        std::uniform_real_distribution<double> rs(0.0, 1.5);
        std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
        for (int k = 0; k < 100; ++k) {
            LadderCoeffs lc;
            const double r = rs(rng), ph = angle(rng), th = angle(rng);
            lc.mu = std::polar(std::cosh(r), ph);
            lc.nu = std::polar(std::sinh(r), th + ph);
            const SqueezeParams sp = bogoliubov_decompose(lc);
            const auto [u, v] = transform_uv(sp, lc);
            REQUIRE(std::abs(u) < 1e-10);
            REQUIRE(std::abs(v) == Catch::Approx(1.0).margin(1e-10));
            REQUIRE(std::norm(v) - std::norm(u) == Catch::Approx(1.0).margin(1e-10));
        }
    }

    SECTION("free particle t=2 diagonalizes to v = e^{i pi/4}") {
        const auto sol = integrate_epsilon([](double) { return 0.0; }, 0.0, 3.0);
        const LadderCoeffs lc = ladder_coeffs(sol, 2.0);
        const SqueezeParams sp = bogoliubov_decompose(lc);
        const auto [u, v] = transform_uv(sp, lc);
        REQUIRE(std::abs(u) < 1e-12);
        REQUIRE(std::abs(v - std::polar(1.0, std::numbers::pi / 4.0)) < 1e-12);
    }

    SECTION("generic squeeze keeps the normalization") {
        const auto sol = integrate_epsilon([](double) { return 0.0; }, 0.0, 3.0);
        const LadderCoeffs lc = ladder_coeffs(sol, 2.0);
        SqueezeParams sp;
        sp.r = 0.3;
        sp.theta = 1.0;
        const auto [u, v] = transform_uv(sp, lc);
        REQUIRE(std::norm(v) - std::norm(u) == Catch::Approx(1.0).margin(1e-10));
    }
}

TEST_CASE("displacement_map transports the coherent amplitude") {
    REQUIRE(displacement_map({1.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}) == cplx{1.0, 0.0});

    const cplx v = std::polar(1.0, 0.9);
    REQUIRE(std::abs(displacement_map({1.0, 0.0}, {0.0, 0.0}, v) -
                     std::polar(1.0, -0.9)) < 1e-15);

    const cplx alpha{2.0, 1.0};
    const cplx u{0.0, -std::sinh(0.5)};
    const cplx vv{std::cosh(0.5), 0.0};
    const cplx expect = alpha * std::cosh(0.5) -
                        std::conj(alpha) * cplx{0.0, -std::sinh(0.5)};
    REQUIRE(std::abs(displacement_map(alpha, u, vv) - expect) < 1e-15);

    REQUIRE_THROWS_AS(displacement_map({1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}), NonCanonical);
}
