// qtrap: stability maps, mode-function evolution, uncertainty traces, and
// the coherent/squeezed duality checks, driven by a JSON config.
//
// Exit codes: 0 all checks passed, 1 numerical check failed, 2 configuration
// invalid (including truncation refusals), 3 integration failure.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "qtrap/errors.hpp"
#include "qtrap/floquet.hpp"
#include "qtrap/fock.hpp"
#include "qtrap/gaussian.hpp"
#include "qtrap/io.hpp"
#include "qtrap/ladder.hpp"
#include "qtrap/mode.hpp"
#include "qtrap/trap.hpp"

namespace {

using qtrap::cplx;
namespace io = qtrap::io;

struct CliOptions {
    std::string config;
    int threads = 0; // 0 = hardware concurrency
    std::string out;
    std::optional<double> tol;
    std::optional<int> samples;
    std::optional<int> oracle_n;
    std::optional<double> oracle_tolerance;
    std::optional<std::uint64_t> seed;
    std::optional<double> perturb_gamma3;
    std::optional<double> bch_r; // appends a user BCH case to the verify suite
    double bch_theta = 0.0;
};

void apply_overrides(io::RunConfig& cfg, const CliOptions& o) {
    if (!o.out.empty())
        cfg.output.path = o.out;
    if (o.tol) {
        if (*o.tol <= 0.0)
            throw qtrap::ConfigError("--tol must be positive");
        cfg.integration.tol = *o.tol;
        cfg.sweep.tol = *o.tol;
    }
    if (o.samples) {
        if (*o.samples < 2)
            throw qtrap::ConfigError("--samples must be at least 2");
        cfg.integration.samples = *o.samples;
    }
    if (o.oracle_n) {
        if (*o.oracle_n < 4)
            throw qtrap::ConfigError("--oracle-n must be at least 4");
        cfg.oracle.N = *o.oracle_n;
    }
    if (o.oracle_tolerance) {
        if (*o.oracle_tolerance <= 0.0)
            throw qtrap::ConfigError("--oracle-tolerance must be positive");
        cfg.oracle.tolerance = *o.oracle_tolerance;
    }
    if (o.seed)
        cfg.oracle.seed = *o.seed;
    if (o.perturb_gamma3)
        cfg.oracle.gamma3_perturbation = *o.perturb_gamma3;
}

int thread_count(const CliOptions& o) {
    if (o.threads > 0)
        return o.threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Index-addressed worker pool. Results land in caller-owned slots keyed by
/// job index, so output order never depends on scheduling.
template <class Fn>
void parallel_for(int n_jobs, int threads, Fn&& fn) {
    threads = std::clamp(threads, 1, std::max(1, n_jobs));
    if (threads == 1 || n_jobs <= 1) {
        for (int i = 0; i < n_jobs; ++i)
            fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            while (true) {
                const int i = next.fetch_add(1);
                if (i >= n_jobs)
                    return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error)
                        first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool)
        th.join();
    if (first_error)
        std::rethrow_exception(first_error);
}

void emit(const std::string& path, const std::vector<std::string>& lines) {
    if (path.empty()) {
        for (const auto& line : lines)
            std::printf("%s\n", line.c_str());
        return;
    }
    io::write_lines(path, lines);
}

void require_output_format(const io::RunConfig& cfg, const char* native) {
    if (!cfg.output.format.empty() && cfg.output.format != native)
        throw qtrap::ConfigError(std::string("this command emits ") + native +
                                 "; output.format requests " + cfg.output.format);
}

std::vector<double> sample_times(double t0, double t_end, int samples) {
    std::vector<double> ts(static_cast<std::size_t>(samples));
    for (int j = 0; j < samples; ++j)
        ts[static_cast<std::size_t>(j)] = t0 + t_end * (static_cast<double>(j) / (samples - 1));
    return ts;
}

// ---------------------------------------------------------------------------
// stability

int cmd_stability(const io::RunConfig& cfg, const CliOptions& o) {
    if (!cfg.sweep.present)
        throw qtrap::ConfigError("stability needs a 'sweep' section");
    require_output_format(cfg, "csv");
    const auto& sw = cfg.sweep;
    const double omega = cfg.trap_present ? cfg.trap.omega : 1.0;

    struct Point {
        double a = 0.0, q = 0.0;
        qtrap::StabilityVerdict verdict;
        bool failed = false;
    };
    const int total = sw.a_steps * sw.q_steps;
    std::vector<Point> points(static_cast<std::size_t>(total));

    parallel_for(total, thread_count(o), [&](int idx) {
        const int i = idx / sw.q_steps; // a index (row-major raster)
        const int j = idx % sw.q_steps;
        Point& pt = points[static_cast<std::size_t>(idx)];
        pt.a = sw.a_min + (sw.a_max - sw.a_min) * (static_cast<double>(i) / (sw.a_steps - 1));
        pt.q = sw.q_min + (sw.q_max - sw.q_min) * (static_cast<double>(j) / (sw.q_steps - 1));
        try {
            pt.verdict = qtrap::floquet_stability(pt.a, pt.q, omega, sw.tol);
        } catch (const qtrap::IntegrationError&) {
            pt.failed = true;
        }
    });

    std::vector<std::string> lines;
    lines.reserve(points.size() + 1);
    lines.push_back("a,q,stable,monodromy_trace,growth_exponent");
    bool any_failed = false;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const Point& pt : points) {
        any_failed = any_failed || pt.failed;
        lines.push_back(io::join_csv(
            {io::fmt(pt.a), io::fmt(pt.q),
             pt.failed ? "failed" : io::fmt(pt.verdict.stable),
             io::fmt(pt.failed ? nan : pt.verdict.monodromy_trace),
             io::fmt(pt.failed ? nan : pt.verdict.growth_exponent)}));
    }
    emit(cfg.output.path, lines);
    if (any_failed) {
        std::fprintf(stderr, "stability: integration failed at one or more grid points "
                             "(rows marked 'failed')\n");
        return 3;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// evolve

qtrap::ModeSolution integrate_from(const io::RunConfig& cfg) {
    const double t0 = cfg.trap.t0;
    return qtrap::integrate_epsilon(
        [&](double t) { return qtrap::omega_profile(cfg.trap, t); }, t0,
        t0 + cfg.integration.t_end, {1.0, 0.0}, {0.0, 1.0}, cfg.integration.tol);
}

int cmd_evolve(const io::RunConfig& cfg, const CliOptions&) {
    if (!cfg.trap_present || !cfg.integration.present)
        throw qtrap::ConfigError("evolve needs 'trap' and 'integration' sections");
    require_output_format(cfg, "csv");

    const qtrap::ModeSolution sol = integrate_from(cfg);
    const auto ts = sample_times(cfg.trap.t0, cfg.integration.t_end, cfg.integration.samples);

    std::vector<std::string> lines;
    lines.reserve(ts.size() + 1);
    lines.push_back("t,z_cl,p_cl,re_eps,im_eps,phi,phi_dot,wronskian_err");
    for (const double t : ts) {
        const auto [e, de] = sol.eval(t);
        const auto [z, p] = qtrap::classical_trajectory(sol, cfg.state.z0, cfg.state.p0, t);
        const double phi = std::norm(e);
        const double phi_dot = 2.0 * (de * std::conj(e)).real();
        const double werr = std::abs(qtrap::wronskian(sol, t) - qtrap::kCanonicalWronskian);
        lines.push_back(io::join_csv({io::fmt(t), io::fmt(z), io::fmt(p), io::fmt(e.real()),
                                      io::fmt(e.imag()), io::fmt(phi), io::fmt(phi_dot),
                                      io::fmt(werr)}));
    }
    emit(cfg.output.path, lines);
    return 0;
}

// ---------------------------------------------------------------------------
// uncertainty

int cmd_uncertainty(const io::RunConfig& cfg, const CliOptions&) {
    if (!cfg.trap_present || !cfg.integration.present)
        throw qtrap::ConfigError("uncertainty needs 'trap' and 'integration' sections");
    require_output_format(cfg, "csv");

    const qtrap::ModeSolution sol = integrate_from(cfg);
    const auto ts = sample_times(cfg.trap.t0, cfg.integration.t_end, cfg.integration.samples);
    const auto pps = static_cast<std::size_t>(cfg.grid.points_per_sigma);

    std::vector<std::string> lines;
    lines.reserve(ts.size() + 1);
    lines.push_back("t,var_z,var_p,cov_zp,heisenberg_zp,schrodinger_rhs,heisenberg_ZP,"
                    "B_re,B_im,muss_residual");
    for (const double t : ts) {
        const auto st = qtrap::coherent_state(sol, t, cfg.state.z0, cfg.state.p0);
        const auto m = qtrap::moments(st);
        const auto up = qtrap::uncertainty_products(st);
        const cplx B = qtrap::squeeze_factor(st, m);
        const double muss = qtrap::muss_residual(st, B, pps);
        lines.push_back(io::join_csv({io::fmt(t), io::fmt(m.var_z), io::fmt(m.var_p),
                                      io::fmt(m.cov_zp), io::fmt(up.heisenberg_zp),
                                      io::fmt(up.schrodinger_rhs), io::fmt(up.heisenberg_ZP),
                                      io::fmt(B.real()), io::fmt(B.imag()), io::fmt(muss)}));
    }
    emit(cfg.output.path, lines);
    return 0;
}

// ---------------------------------------------------------------------------
// duality

io::ordered_json complex_json(cplx z) { return io::ordered_json::array({z.real(), z.imag()}); }

bool converged(double res, double res10) { return res10 <= 10.0 * res + 1e-12; }

int cmd_duality(const io::RunConfig& cfg, const CliOptions&) {
    if (!cfg.trap_present || !cfg.integration.present || !cfg.oracle.present)
        throw qtrap::ConfigError("duality needs 'trap', 'integration', 'state' and 'oracle' sections");
    if (!cfg.state.present || !cfg.state.alpha)
        throw qtrap::ConfigError("duality needs 'state.alpha'");
    require_output_format(cfg, "json");

    const cplx alpha = *cfg.state.alpha;
    const int N = cfg.oracle.N;
    const double tol = cfg.oracle.tolerance;

    const qtrap::ModeSolution sol = integrate_from(cfg);
    const double t1 = cfg.trap.t0 + cfg.integration.t_end;
    const qtrap::LadderCoeffs lc = qtrap::ladder_coeffs(sol, t1);

    const auto rep = qtrap::verify_coherent_to_squeezed(alpha, lc, N);
    const auto rep10 = qtrap::verify_coherent_to_squeezed(alpha, lc, N + 10);

    const auto st = qtrap::coherent_state(sol, t1, cfg.state.z0, cfg.state.p0);
    const auto m = qtrap::moments(st);
    const cplx B = qtrap::squeeze_factor(st, m);
    const double ratio_defect = std::norm(B) - m.var_z / m.var_p;

    io::ordered_json report = io::make_report("duality");
    report["params"] = {{"alpha", complex_json(alpha)},
                        {"t", t1},
                        {"mu", complex_json(lc.mu)},
                        {"nu", complex_json(lc.nu)}};
    report["squeeze"] = {{"r", rep.sp.r},
                         {"theta", rep.sp.theta},
                         {"phase_offset", rep.sp.phase_offset}};
    report["transform"] = {{"u", complex_json(rep.u)},
                           {"v", complex_json(rep.v)},
                           {"beta", complex_json(rep.beta)},
                           {"c", complex_json(rep.c)},
                           {"beta_alt", complex_json(rep.beta_alt)}};
    report["B"] = complex_json(B);
    report["bsq_minus_variance_ratio"] = ratio_defect;
    report["working_dim"] = rep.working_dim;

    struct Item {
        const char* identity;
        double res, res10;
    };
    const Item items[] = {
        {"operator_transform", rep.res_operator, rep10.res_operator},
        {"displacement_transform", rep.res_displacement, rep10.res_displacement},
        {"eigenvector", rep.res_eigenvector, rep10.res_eigenvector},
    };
    bool all_pass = true;
    report["checks"] = io::ordered_json::array();
    for (const Item& it : items) {
        const bool pass = it.res <= tol && converged(it.res, it.res10);
        all_pass = all_pass && pass;
        io::ordered_json params = {{"alpha", complex_json(alpha)},
                                   {"r", rep.sp.r},
                                   {"theta", rep.sp.theta}};
        if (std::string(it.identity) == "eigenvector")
            params["res_ordering"] = rep.res_ordering;
        report["checks"].push_back(
            io::make_check_entry(it.identity, std::move(params), N, it.res, it.res10, pass));
    }
    report["pass"] = all_pass;
    io::emit_json(report, cfg.output.path);
    if (!all_pass)
        std::fprintf(stderr, "duality: residuals exceed tolerance %.3e\n", tol);
    return all_pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// verify

int cmd_verify(const io::RunConfig& cfg, const CliOptions& o) {
    if (!cfg.oracle.present)
        throw qtrap::ConfigError("verify needs an 'oracle' section");
    require_output_format(cfg, "json");

    const int N = cfg.oracle.N;
    const double tol = cfg.oracle.tolerance;
    const double perturb = cfg.oracle.gamma3_perturbation;

    // Draw the randomized cases up front so the sample is fixed by the seed,
    // not by scheduling.
    std::mt19937_64 rng(cfg.oracle.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double r_cap = std::min(1.0, 0.5 * std::log(N / 6.0));
    auto draw_r = [&] { return 0.02 + (r_cap - 0.02) * unit(rng); };
    auto draw_theta = [&] { return -std::numbers::pi + 2.0 * std::numbers::pi * unit(rng); };

    struct RT {
        double r, theta;
    };
    std::vector<RT> bch_draws, sas_draws;
    for (int i = 0; i < 5; ++i)
        bch_draws.push_back({draw_r(), draw_theta()});
    for (int i = 0; i < 5; ++i)
        sas_draws.push_back({draw_r(), draw_theta()});

    using Entries = std::vector<io::ordered_json>;
    std::vector<std::function<Entries()>> jobs;

    auto scalar_job = [&](std::string identity, io::ordered_json params,
                          std::function<double(int)> residual_at) {
        jobs.push_back([=]() -> Entries {
            const auto conv = qtrap::check_convergence(residual_at, N);
            const bool pass = conv.residual <= tol && conv.converged;
            return {io::make_check_entry(identity, params, N, conv.residual,
                                         conv.residual_at_N_plus_10, pass)};
        });
    };

    auto add_bch = [&](std::string tag, double r, double theta) {
        scalar_job("bch" + tag, {{"r", r}, {"theta", theta}, {"gamma3_perturbation", perturb}},
                   [=](int n) { return qtrap::verify_bch(r, theta, n, perturb); });
    };
    add_bch("[r=0]", 0.0, 0.0);
    add_bch("[r=1]", 1.0, 0.0);
    add_bch("[r=0.5,theta=2]", 0.5, 2.0);
    for (std::size_t i = 0; i < bch_draws.size(); ++i)
        add_bch("[draw " + std::to_string(i) + "]", bch_draws[i].r, bch_draws[i].theta);
    if (o.bch_r)
        add_bch("[user]", *o.bch_r, o.bch_theta);

    auto add_sas = [&](std::string tag, double r, double theta) {
        scalar_job("sas" + tag, {{"r", r}, {"theta", theta}},
                   [=](int n) { return qtrap::verify_sas(r, theta, n).max_residual(); });
    };
    add_sas("[r=0.8,theta=1.3]", 0.8, 1.3);
    add_sas("[r=0.5,theta=0]", 0.5, 0.0);
    for (std::size_t i = 0; i < sas_draws.size(); ++i)
        add_sas("[draw " + std::to_string(i) + "]", sas_draws[i].r, sas_draws[i].theta);

    scalar_job("similarity[rotation]", {{"t", 0.7}}, [](int n) {
        auto [a, adag] = qtrap::build_ladder(n);
        qtrap::FockMatrix X{n, cplx{0.0, 0.7} * (adag.entries * a.entries), "i t n"};
        return qtrap::verify_similarity(X, a);
    });
    scalar_job("similarity[squeeze_generator]", {{"r", 0.5}}, [](int n) {
        auto [a, adag] = qtrap::build_ladder(n);
        const Eigen::MatrixXcd a2 = a.entries * a.entries;
        qtrap::FockMatrix X{n, 0.25 * (a2.adjoint() - a2), "squeeze gen"};
        return qtrap::verify_similarity(X, a);
    });

    const cplx beta0{1.0, 0.5};
    scalar_job("displacement_unitarity", {{"beta", complex_json(beta0)}}, [=](int n) {
        return qtrap::unitarity_defect(qtrap::displacement(beta0, n), n / 2);
    });
    scalar_job("squeeze_unitarity", {{"r", 0.5}, {"theta", 1.0}}, [](int n) {
        return qtrap::unitarity_defect(qtrap::squeeze(0.5, 1.0, n), n / 2);
    });
    const auto inverse_defect = [](const Eigen::MatrixXcd& prod, int b) {
        return (prod.topLeftCorner(b, b) - Eigen::MatrixXcd::Identity(b, b))
            .cwiseAbs()
            .maxCoeff();
    };
    scalar_job("displacement_inverse", {{"beta", complex_json(cplx{1.0, 0.0})}}, [=](int n) {
        const auto D = qtrap::displacement({1.0, 0.0}, n);
        const auto Dm = qtrap::displacement({-1.0, 0.0}, n);
        return inverse_defect(D.entries * Dm.entries, n / 2);
    });
    const double r_inv = std::min(1.0, 0.5 * std::log(N / 9.0) * 0.999999);
    scalar_job("squeeze_inverse", {{"r", r_inv}, {"theta", 0.7}}, [=](int n) {
        const auto S = qtrap::squeeze(r_inv, 0.7, n);
        const auto Sm = qtrap::squeeze(r_inv, 0.7 + std::numbers::pi, n);
        return inverse_defect(S.entries * Sm.entries, n / 2);
    });

    // Full duality chain at two pinned ladder-coefficient sets, plus the
    // reverse direction (static coherent state conjugated into an A
    // eigenstate).
    auto add_chain = [&](std::string tag, qtrap::LadderCoeffs lc, cplx alpha) {
        jobs.push_back([=]() -> Entries {
            const auto rep = qtrap::verify_coherent_to_squeezed(alpha, lc, N);
            const auto rep10 = qtrap::verify_coherent_to_squeezed(alpha, lc, N + 10);
            const io::ordered_json params = {{"alpha", complex_json(alpha)},
                                             {"mu", complex_json(lc.mu)},
                                             {"nu", complex_json(lc.nu)},
                                             {"r", rep.sp.r},
                                             {"theta", rep.sp.theta}};
            Entries out;
            const struct {
                const char* name;
                double res, res10;
            } items[] = {
                {"operator_transform", rep.res_operator, rep10.res_operator},
                {"displacement_transform", rep.res_displacement, rep10.res_displacement},
                {"eigenvector", rep.res_eigenvector, rep10.res_eigenvector},
            };
            for (const auto& it : items) {
                const bool pass = it.res <= tol && converged(it.res, it.res10);
                out.push_back(io::make_check_entry("chain" + tag + "/" + it.name, params, N,
                                                   it.res, it.res10, pass));
            }
            return out;
        });
    };
    add_chain("[static]", qtrap::make_ladder_coeffs({1.0, 0.0}, {0.0, 1.0}, 0.0), {1.0, 0.0});
    add_chain("[free t=2]", qtrap::make_ladder_coeffs({1.0, 2.0}, {0.0, 1.0}, 2.0), {1.0, 0.0});

    scalar_job("reverse[free t=2]", {{"eta", complex_json(cplx{1.0, 0.0})}}, [](int n) {
        return qtrap::verify_reverse({1.0, 0.0},
                                     qtrap::make_ladder_coeffs({1.0, 2.0}, {0.0, 1.0}, 2.0), n);
    });

    std::vector<Entries> results(jobs.size());
    parallel_for(static_cast<int>(jobs.size()), thread_count(o),
                 [&](int i) { results[static_cast<std::size_t>(i)] = jobs[static_cast<std::size_t>(i)](); });

    io::ordered_json report = io::make_report("verify");
    report["N"] = N;
    report["tolerance"] = tol;
    report["seed"] = cfg.oracle.seed;
    report["gamma3_perturbation"] = perturb;
    report["checks"] = io::ordered_json::array();
    bool all_pass = true;
    std::vector<std::string> failed;
    for (const Entries& es : results) {
        for (const auto& e : es) {
            if (!e.at("pass").get<bool>()) {
                all_pass = false;
                failed.push_back(e.at("identity").get<std::string>());
            }
            report["checks"].push_back(e);
        }
    }
    report["pass"] = all_pass;
    io::emit_json(report, cfg.output.path);
    for (const auto& name : failed)
        std::fprintf(stderr, "verify: FAILED %s\n", name.c_str());
    return all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"time-dependent oscillator engine: stability, evolution, uncertainty, "
                 "and coherent/squeezed duality checks"};
    app.require_subcommand(1);

    CliOptions o;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "JSON run configuration")->required();
        sub->add_option("--threads", o.threads, "worker threads (default: hardware)");
        sub->add_option("--out", o.out, "output path (overrides output.path)");
        sub->add_option("--tol", o.tol, "override integration/sweep tolerance");
        sub->add_option("--samples", o.samples, "override integration.samples");
        sub->add_option("--oracle-n", o.oracle_n, "override oracle.N");
        sub->add_option("--oracle-tolerance", o.oracle_tolerance, "override oracle.tolerance");
        sub->add_option("--seed", o.seed, "override oracle.seed");
    };

    CLI::App* s_stability = app.add_subcommand("stability", "Floquet stability raster (CSV)");
    CLI::App* s_evolve = app.add_subcommand("evolve", "mode-function trace (CSV)");
    CLI::App* s_uncertainty = app.add_subcommand("uncertainty", "uncertainty trace (CSV)");
    CLI::App* s_duality = app.add_subcommand("duality", "coherent-to-squeezed chain (JSON)");
    CLI::App* s_verify = app.add_subcommand("verify", "operator-identity suite (JSON)");
    for (CLI::App* sub : {s_stability, s_evolve, s_uncertainty, s_duality, s_verify})
        add_common(sub);
    s_verify->add_option("--perturb-gamma3", o.perturb_gamma3,
                         "tamper with the middle BCH coefficient (sensitivity canary)");
    s_verify->add_option("--bch-r", o.bch_r, "append a user BCH case with this magnitude");
    s_verify->add_option("--bch-theta", o.bch_theta, "phase for --bch-r");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        io::RunConfig cfg = io::load_run_config(o.config);
        apply_overrides(cfg, o);
        if (s_stability->parsed())
            return cmd_stability(cfg, o);
        if (s_evolve->parsed())
            return cmd_evolve(cfg, o);
        if (s_uncertainty->parsed())
            return cmd_uncertainty(cfg, o);
        if (s_duality->parsed())
            return cmd_duality(cfg, o);
        return cmd_verify(cfg, o);
    } catch (const qtrap::TruncationTooSmall& e) {
        std::fprintf(stderr, "error: %s (increase oracle.N)\n", e.what());
        return 2;
    } catch (const qtrap::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const qtrap::IntegrationError& e) {
        std::fprintf(stderr, "integration error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
