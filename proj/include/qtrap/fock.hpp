#ifndef QTRAP_FOCK_HPP
#define QTRAP_FOCK_HPP

// Brute-force matrix backend: number-basis truncations of a, a†, D(β), S(r,θ)
// and the residual drivers that check the operator identities by direct
// arithmetic.
//
// Truncating at dimension N corrupts the rows near the truncation edge, so
// every residual is measured on the leading N/2 block only, and the matrices
// entering a residual are built in a larger working basis sized so that the
// corruption cannot reach the measured block (see detail::working_dim). The
// analytic sides of each comparison (banded operators, the triangular
// factorization product, displacement matrix elements) are exact at any
// dimension and need no padding.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qtrap/errors.hpp"
#include "qtrap/ladder.hpp"

namespace qtrap {

struct FockMatrix {
    int dim = 0;
    Eigen::MatrixXcd entries;
    std::string label;
};

/// Annihilation/creation pair: entries sqrt(n) on the first superdiagonal and
/// its conjugate transpose. [a, a†] = I exactly on the leading (N-1) block;
/// the (N-1, N-1) corner carries the truncation artifact -(N-1)... i.e. the
/// commutator there is -(N-1) instead of 1.
inline std::pair<FockMatrix, FockMatrix> build_ladder(int N) {
    if (N < 2)
        throw ConfigError("ladder truncation must be at least 2");
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(N, N);
    for (int n = 1; n < N; ++n)
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    FockMatrix lower{N, a, "a"};
    FockMatrix raise{N, a.adjoint(), "adag"};
    return {std::move(lower), std::move(raise)};
}

/// Scaling-and-squaring matrix exponential with the degree-13 Pade
/// approximant. The approximant is applied at norm <= theta13, where its
/// backward error is below the unit roundoff, so the result meets any tol
/// down to machine precision.
inline Eigen::MatrixXcd matrix_exp(const Eigen::MatrixXcd& M, double tol = 1e-13) {
    if (tol <= 0.0)
        throw ConfigError("matrix_exp tolerance must be positive");
    if (M.rows() != M.cols())
        throw ConfigError("matrix_exp requires a square matrix");
    if (M.size() == 0)
        return M;
    if (!M.allFinite())
        throw Overflow("matrix_exp input has non-finite entries");

    constexpr double theta13 = 5.371920351148152;
    const double nrm = M.cwiseAbs().colwise().sum().maxCoeff();
    int s = 0;
    if (nrm > theta13)
        s = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
    if (s > 40)
        throw Overflow("matrix norm too large for a trustworthy exponential");

    static constexpr double b[14] = {
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
        1187353796428800.0,  129060195264000.0,   10559470521600.0,
        670442572800.0,      33522128640.0,       1323241920.0,
        40840800.0,          960960.0,            16380.0,
        182.0,               1.0};

    const Eigen::Index n = M.rows();
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
    const Eigen::MatrixXcd A = M / std::ldexp(1.0, s);
    const Eigen::MatrixXcd A2 = A * A;
    const Eigen::MatrixXcd A4 = A2 * A2;
    const Eigen::MatrixXcd A6 = A2 * A4;

    const Eigen::MatrixXcd U =
        A * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 +
             b[3] * A2 + b[1] * I);
    const Eigen::MatrixXcd V =
        A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 + b[2] * A2 +
        b[0] * I;

    Eigen::MatrixXcd F = (V - U).partialPivLu().solve(V + U);
    for (int k = 0; k < s; ++k)
        F = F * F;
    return F;
}

inline FockMatrix matrix_exp(const FockMatrix& M, double tol = 1e-13) {
    return {M.dim, matrix_exp(M.entries, tol), "exp(" + M.label + ")"};
}

namespace detail {

inline Eigen::MatrixXcd ladder_dense(int W) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(W, W);
    for (int n = 1; n < W; ++n)
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

inline Eigen::MatrixXcd displacement_generator(cplx beta, int W) {
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(W, W);
    for (int n = 1; n < W; ++n) {
        const double s = std::sqrt(static_cast<double>(n));
        g(n, n - 1) = beta * s;
        g(n - 1, n) = -std::conj(beta) * s;
    }
    return g;
}

inline Eigen::MatrixXcd squeeze_generator(double r, double theta, int W) {
    const cplx lambda = std::polar(r, theta);
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(W, W);
    for (int n = 2; n < W; ++n) {
        const double s = std::sqrt(static_cast<double>(n) * (n - 1));
        g(n, n - 2) = 0.5 * lambda * s;
        g(n - 2, n) = -0.5 * std::conj(lambda) * s;
    }
    return g;
}

// a * M and a† * M through row shifts (a is banded; no dense product needed).
inline Eigen::MatrixXcd mul_a_left(const Eigen::MatrixXcd& M) {
    const Eigen::Index W = M.rows();
    Eigen::MatrixXcd R = Eigen::MatrixXcd::Zero(W, M.cols());
    for (Eigen::Index m = 0; m + 1 < W; ++m)
        R.row(m) = std::sqrt(static_cast<double>(m + 1)) * M.row(m + 1);
    return R;
}

inline Eigen::MatrixXcd mul_adag_left(const Eigen::MatrixXcd& M) {
    const Eigen::Index W = M.rows();
    Eigen::MatrixXcd R = Eigen::MatrixXcd::Zero(W, M.cols());
    for (Eigen::Index m = 1; m < W; ++m)
        R.row(m) = std::sqrt(static_cast<double>(m)) * M.row(m - 1);
    return R;
}

inline Eigen::VectorXcd apply_a(const Eigen::VectorXcd& v) {
    const Eigen::Index W = v.size();
    Eigen::VectorXcd r = Eigen::VectorXcd::Zero(W);
    for (Eigen::Index m = 0; m + 1 < W; ++m)
        r(m) = std::sqrt(static_cast<double>(m + 1)) * v(m + 1);
    return r;
}

inline Eigen::VectorXcd apply_adag(const Eigen::VectorXcd& v) {
    const Eigen::Index W = v.size();
    Eigen::VectorXcd r = Eigen::VectorXcd::Zero(W);
    for (Eigen::Index m = 1; m < W; ++m)
        r(m) = std::sqrt(static_cast<double>(m)) * v(m - 1);
    return r;
}

/// Working dimension for a residual read off the leading N/2 block. Sized
/// from the Fock-tail extent of squeezed (factor e^{2r}) and displaced
/// (occupation ~ d^2 plus spread) states so that edge corruption stays many
/// orders below the asserted tolerances; calibrated against the pinned
/// residual cases.
inline int working_dim(int N, double r, double d) {
    const double w =
        std::ceil(std::exp(2.0 * r) * (N / 2.0 + d * d + 6.0 * d + 24.0)) + 16.0;
    if (w > 4096.0)
        throw TruncationTooSmall(
            "parameters need a working basis beyond the supported envelope");
    return std::max(N, static_cast<int>(w));
}

/// Coherent-state column: e^{-|eta|^2/2} eta^m / sqrt(m!).
inline Eigen::VectorXcd coherent_column(cplx eta, int W) {
    Eigen::VectorXcd v(W);
    v(0) = std::exp(-0.5 * std::norm(eta));
    for (int m = 1; m < W; ++m)
        v(m) = v(m - 1) * eta / std::sqrt(static_cast<double>(m));
    return v;
}

/// Exact displacement matrix elements on a b x b block,
///   <m|D(beta)|n> = sqrt(n!/m!) beta^{m-n} e^{-x/2} L_n^{(m-n)}(x),  m >= n,
/// with x = |beta|^2 and the m < n entries from the (-beta*) mirror.
inline Eigen::MatrixXcd displacement_block(cplx beta, int b) {
    const double x = std::norm(beta);
    // Associated Laguerre table L[n][s] = L_n^{(s)}(x) by the three-term
    // recurrence in n.
    std::vector<std::vector<double>> L(static_cast<std::size_t>(b),
                                       std::vector<double>(static_cast<std::size_t>(b)));
    for (int s = 0; s < b; ++s) {
        L[0][static_cast<std::size_t>(s)] = 1.0;
        if (b > 1)
            L[1][static_cast<std::size_t>(s)] = 1.0 + s - x;
        for (int k = 1; k + 1 < b; ++k)
            L[static_cast<std::size_t>(k + 1)][static_cast<std::size_t>(s)] =
                ((2.0 * k + 1.0 + s - x) * L[static_cast<std::size_t>(k)][static_cast<std::size_t>(s)] -
                 (k + s) * L[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(s)]) /
                (k + 1.0);
    }
    Eigen::MatrixXcd D(b, b);
    for (int m = 0; m < b; ++m) {
        for (int n = 0; n < b; ++n) {
            const int lo = std::min(m, n), hi = std::max(m, n);
            cplx pref = std::exp(cplx{-0.5 * x, 0.0});
            const cplx step = (m >= n) ? beta : -std::conj(beta);
            for (int j = lo + 1; j <= hi; ++j)
                pref *= step / std::sqrt(static_cast<double>(j));
            D(m, n) = pref * L[static_cast<std::size_t>(lo)][static_cast<std::size_t>(hi - lo)];
        }
    }
    return D;
}

/// Read block of exp[γ+ a†²/2] exp[-γ3 (a†a + 1/2)] exp[γ- a²/2] from the
/// analytic entries of the triangular factors. Every sum index stays at or
/// below min(m, n), so the block is exact at any surrounding dimension.
/// Accumulated in long double: the factor entries grow combinatorially
/// before the middle exponential damps them back down.
inline Eigen::MatrixXcd factored_squeeze_block(double r, double theta, int b,
                                               double gamma3_scale = 1.0) {
    using cld = std::complex<long double>;
    const long double th = static_cast<long double>(theta);
    const long double tr = std::tanh(static_cast<long double>(r));
    const cld gp = (tr / 2.0L) * cld{std::cos(th), std::sin(th)};
    const cld gm = (-tr / 2.0L) * cld{std::cos(th), -std::sin(th)};
    const long double g3 =
        std::log(std::cosh(static_cast<long double>(r))) * static_cast<long double>(gamma3_scale);

    std::vector<long double> logfact(static_cast<std::size_t>(b) + 1, 0.0L);
    for (int i = 1; i <= b; ++i)
        logfact[static_cast<std::size_t>(i)] =
            logfact[static_cast<std::size_t>(i - 1)] + std::log(static_cast<long double>(i));

    // tplus(m, j) for m = j + 2k; tminus(j, n) is its transpose pattern with gm.
    auto tri = [&](const cld& g, int row, int col) -> cld {
        const int k = (row - col) / 2;
        cld p{1.0L, 0.0L};
        long double kfact = 0.0L;
        for (int i = 1; i <= k; ++i) {
            p *= g;
            kfact += std::log(static_cast<long double>(i));
        }
        const long double scale =
            std::exp(0.5L * (logfact[static_cast<std::size_t>(row)] -
                             logfact[static_cast<std::size_t>(col)]) -
                     kfact);
        return p * scale;
    };

    Eigen::MatrixXcd R = Eigen::MatrixXcd::Zero(b, b);
    for (int m = 0; m < b; ++m) {
        for (int n = 0; n < b; ++n) {
            if ((m - n) % 2 != 0)
                continue;
            cld acc{0.0L, 0.0L};
            for (int j = std::min(m, n) % 2; j <= std::min(m, n); j += 2) {
                if ((m - j) % 2 != 0)
                    continue;
                const cld mid{std::exp(-g3 * (j + 0.5L)), 0.0L};
                acc += tri(gp, m, j) * mid * tri(gm, n, j);
            }
            R(m, n) = cplx{static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
        }
    }
    return R;
}

inline double max_block_diff(const Eigen::MatrixXcd& X, const Eigen::MatrixXcd& Y) {
    return (X - Y).cwiseAbs().maxCoeff();
}

} // namespace detail

/// Displacement operator D(beta) = exp[beta a† - beta* a] at truncation N.
inline FockMatrix displacement(cplx beta, int N) {
    if (N < 2)
        throw ConfigError("displacement truncation must be at least 2");
    if (std::norm(beta) > N / 9.0)
        throw TruncationTooSmall("displacement amplitude too large for truncation: need |beta|^2 <= N/9");
    return {N, matrix_exp(detail::displacement_generator(beta, N)), "D"};
}

/// Squeeze operator S(r,θ) = exp[λ a†²/2 - λ* a²/2], λ = r e^{iθ}, at
/// truncation N.
inline FockMatrix squeeze(double r, double theta, int N) {
    if (N < 2)
        throw ConfigError("squeeze truncation must be at least 2");
    if (r < 0.0)
        throw ConfigError("squeeze magnitude must be non-negative; fold signs into theta");
    if (std::exp(2.0 * r) > N / 9.0)
        throw TruncationTooSmall("squeeze magnitude too large for truncation: need e^{2r} <= N/9");
    return {N, matrix_exp(detail::squeeze_generator(r, theta, N)), "S"};
}

/// Max-entry deviation of U†U from the identity on the leading block.
inline double unitarity_defect(const Eigen::MatrixXcd& U, int block) {
    const auto cols = U.leftCols(block);
    const Eigen::MatrixXcd G = cols.adjoint() * cols;
    return detail::max_block_diff(G, Eigen::MatrixXcd::Identity(block, block));
}

inline double unitarity_defect(const FockMatrix& U, int block) {
    return unitarity_defect(U.entries, block);
}

// Residual drivers. Guards: the factor e^{2r} <= N/6 (squeeze tails) and
// d^2 <= N/4 (displacement occupancy) keep the leading N/2 block meaningful;
// beyond them the reported residual would measure truncation, not algebra.

namespace detail {

inline void check_verify_guards(int N, double r, double d) {
    if (N < 4)
        throw ConfigError("verification truncation must be at least 4");
    if (r < 0.0)
        throw ConfigError("squeeze magnitude must be non-negative");
    if (std::exp(2.0 * r) > N / 6.0)
        throw TruncationTooSmall("squeeze magnitude too large for truncation: need e^{2r} <= N/6");
    if (d * d > N / 4.0)
        throw TruncationTooSmall("displacement too large for truncation: need d^2 <= N/4");
}

} // namespace detail

/// Max-entry difference, on the leading N/2 block, between the squeeze
/// exponential and its three-factor normal-ordered form. gamma3_perturbation
/// rescales the middle-factor coefficient by (1 + perturbation), a tamper
/// knob for checking that the residual actually responds.
inline double verify_bch(double r, double theta, int N, double gamma3_perturbation = 0.0) {
    detail::check_verify_guards(N, r, 0.0);
    const int W = detail::working_dim(N, r, 0.0);
    const int b = N / 2;
    const Eigen::MatrixXcd lhs =
        matrix_exp(detail::squeeze_generator(r, theta, W)).topLeftCorner(b, b);
    const Eigen::MatrixXcd rhs =
        detail::factored_squeeze_block(r, theta, b, 1.0 + gamma3_perturbation);
    return detail::max_block_diff(lhs, rhs);
}

/// Residual of exp[X] exp[Y] exp[-X] = exp[e^X Y e^{-X}] on the leading
/// half block, at the operand dimension (the identity is exact for finite
/// matrices; no padding involved).
inline double verify_similarity(const FockMatrix& X, const FockMatrix& Y, double tol = 1e-13) {
    if (X.dim != Y.dim)
        throw ConfigError("similarity check needs matching dimensions");
    const int b = X.dim / 2;
    const Eigen::MatrixXcd E = matrix_exp(X.entries, tol);
    const Eigen::MatrixXcd Einv = matrix_exp((-X.entries).eval(), tol);
    const Eigen::MatrixXcd lhs = E * matrix_exp(Y.entries, tol) * Einv;
    const Eigen::MatrixXcd rhs = matrix_exp((E * Y.entries * Einv).eval(), tol);
    return detail::max_block_diff(lhs.topLeftCorner(b, b), rhs.topLeftCorner(b, b));
}

struct SasResiduals {
    double res_a = 0.0;
    double res_z = 0.0;

    double max_residual() const { return std::max(res_a, res_z); }
};

/// Conjugation identities S⁻¹ a S = cosh r a + e^{iθ} sinh r a† and the
/// z = (a+a†)/√2 counterpart, as block residuals against the exact banded
/// right-hand sides.
inline SasResiduals verify_sas(double r, double theta, int N) {
    detail::check_verify_guards(N, r, 0.0);
    const int W = detail::working_dim(N, r, 0.0);
    const int b = N / 2;

    const Eigen::MatrixXcd S = matrix_exp(detail::squeeze_generator(r, theta, W));
    const Eigen::MatrixXcd aS = detail::mul_a_left(S);
    const Eigen::MatrixXcd adagS = detail::mul_adag_left(S);
    const auto sandwich = [&](const Eigen::MatrixXcd& inner) {
        return Eigen::MatrixXcd(S.leftCols(b).adjoint() * inner.leftCols(b));
    };

    const Eigen::MatrixXcd ab = detail::ladder_dense(b);
    const cplx ch{std::cosh(r), 0.0};
    const cplx sh_p = std::polar(std::sinh(r), theta);
    const cplx sh_m = std::polar(std::sinh(r), -theta);

    SasResiduals out;
    out.res_a = detail::max_block_diff(sandwich(aS),
                                       ch * ab + sh_p * Eigen::MatrixXcd(ab.adjoint()));
    const Eigen::MatrixXcd zS = (aS + adagS) / std::numbers::sqrt2;
    const Eigen::MatrixXcd rhs_z =
        ((ch + sh_m) * ab + (ch + sh_p) * Eigen::MatrixXcd(ab.adjoint())) / std::numbers::sqrt2;
    out.res_z = detail::max_block_diff(sandwich(zS), rhs_z);
    return out;
}

struct ChainReport {
    SqueezeParams sp;
    cplx u{0.0, 0.0};
    cplx v{1.0, 0.0};
    cplx beta{0.0, 0.0};     // displacement carried by the D·S ordering
    cplx c{0.0, 0.0};        // D_A(α) = D_a(c)
    cplx beta_alt{0.0, 0.0}; // displacement carried by the S·D ordering
    int working_dim = 0;
    double res_operator = 0.0;     // S A S⁻¹ vs v a + u a†
    double res_displacement = 0.0; // S D_A(α) S⁻¹ vs D_a(β)
    double res_eigenvector = 0.0;  // (v a + u a†) ψ = α ψ
    double res_ordering = 0.0;     // D(β)·S vs S·D(β_alt) on the state

    double max_residual() const {
        return std::max({res_operator, res_displacement, res_eigenvector});
    }
};

/// The full duality chain in matrices: decompose A = μa + νa†, build the
/// squeeze that diagonalizes it, and check (i) the operator transform,
/// (ii) the displacement transform, (iii) that the chained state is an
/// α-eigenvector of the transformed ladder. The eigenvector is assembled as
/// D(β)·S·(S⁻¹|0⟩): the rightmost factor is the extremal state of A written
/// in the static basis, not the static vacuum; displacing the static vacuum
/// instead leaves an O(|ν|) residual.
inline ChainReport verify_coherent_to_squeezed(cplx alpha, const LadderCoeffs& lc, int N) {
    require_canonical(lc, 1e-8);

    ChainReport rep;
    rep.sp = bogoliubov_decompose(lc);
    const auto [u, v] = transform_uv(rep.sp, lc);
    rep.u = u;
    rep.v = v;
    rep.beta = displacement_map(alpha, rep.u, rep.v);
    rep.c = alpha * std::conj(lc.mu) - std::conj(alpha) * lc.nu;
    const double r = rep.sp.r, theta = rep.sp.theta;
    rep.beta_alt = rep.beta * std::cosh(r) - std::conj(rep.beta) * std::polar(std::sinh(r), theta);

    const double d = std::max({std::abs(rep.beta), std::abs(rep.c), std::abs(rep.beta_alt)});
    detail::check_verify_guards(N, r, d);
    const int W = detail::working_dim(N, r, d);
    rep.working_dim = W;
    const int b = N / 2;

    const Eigen::MatrixXcd S = matrix_exp(detail::squeeze_generator(r, theta, W));
    const Eigen::MatrixXcd Sinv = S.adjoint();

    // (i) operator transform on the read block
    const Eigen::MatrixXcd ASinv =
        lc.mu * detail::mul_a_left(Sinv) + lc.nu * detail::mul_adag_left(Sinv);
    const Eigen::MatrixXcd block1 = S.topRows(b) * ASinv.leftCols(b);
    const Eigen::MatrixXcd ab = detail::ladder_dense(b);
    rep.res_operator = detail::max_block_diff(
        block1, rep.v * ab + rep.u * Eigen::MatrixXcd(ab.adjoint()));

    // (ii) displacement transform: D_A(α) is exp[c a† - c* a] by the scalar
    // identity, so the left side is S D(c) S⁻¹
    const Eigen::MatrixXcd Dc = matrix_exp(detail::displacement_generator(rep.c, W));
    const Eigen::MatrixXcd inner2 = Dc * Sinv.leftCols(b);
    const Eigen::MatrixXcd block2 = S.topRows(b) * inner2;
    rep.res_displacement =
        detail::max_block_diff(block2, detail::displacement_block(rep.beta, b));

    // (iii) eigenvector through the chain
    const Eigen::MatrixXcd Db = matrix_exp(detail::displacement_generator(rep.beta, W));
    const Eigen::VectorXcd extremal = Sinv.col(0); // S⁻¹|0⟩
    const Eigen::VectorXcd psi = Db * (S * extremal);
    const Eigen::VectorXcd Mpsi =
        rep.v * detail::apply_a(psi) + rep.u * detail::apply_adag(psi);
    rep.res_eigenvector =
        (Mpsi - alpha * psi).head(b).norm() / psi.head(b).norm();

    // Both orderings of the displaced squeezed state agree: D(β) S = S D(β_alt).
    const Eigen::MatrixXcd Dg = matrix_exp(detail::displacement_generator(rep.beta_alt, W));
    const Eigen::VectorXcd psi_alt = S * (Dg * extremal);
    rep.res_ordering = (psi - psi_alt).head(b).norm() / psi.head(b).norm();

    return rep;
}

/// Reverse direction: a coherent state of (a, a†) conjugated with the
/// inverse squeeze is an eigenstate of A(t), eigenvalue v·η. Returns the
/// relative eigen-residual on the leading half block.
inline double verify_reverse(cplx eta, const LadderCoeffs& lc, int N) {
    require_canonical(lc, 1e-8);
    const SqueezeParams sp = bogoliubov_decompose(lc);
    const auto [u, v] = transform_uv(sp, lc);
    detail::check_verify_guards(N, sp.r, std::abs(eta));
    const int W = detail::working_dim(N, sp.r, std::abs(eta));
    const int b = N / 2;

    const Eigen::MatrixXcd S = matrix_exp(detail::squeeze_generator(sp.r, sp.theta, W));
    const Eigen::VectorXcd psi = S.adjoint() * detail::coherent_column(eta, W);
    const Eigen::VectorXcd Apsi =
        lc.mu * detail::apply_a(psi) + lc.nu * detail::apply_adag(psi);
    return (Apsi - (v * eta) * psi).head(b).norm() / psi.head(b).norm();
}

struct ConvergenceResult {
    double residual = 0.0;
    double residual_at_N_plus_10 = 0.0;
    bool converged = false;
};

/// Truncation-convergence acceptance: re-run the residual at N+10 and refuse
/// to trust a value that grows by more than a factor of 10 (with a noise
/// floor so that roundoff-level residuals never flap).
template <class F>
ConvergenceResult check_convergence(F&& residual_at, int N) {
    ConvergenceResult out;
    out.residual = residual_at(N);
    out.residual_at_N_plus_10 = residual_at(N + 10);
    out.converged = out.residual_at_N_plus_10 <= 10.0 * out.residual + 1e-12;
    return out;
}

} // namespace qtrap

#endif
