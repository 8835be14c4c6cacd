#pragma once

// Noncommutative torus with V U = e^{2 pi i theta} U V on the Fourier box |m|,|n| <= N,
// and the circle model D = diag(-N..N).

#include "perturb.hpp"
#include "sweep.hpp"

#include <array>
#include <numbers>

namespace kkp {

struct TorusBasis {
    int N = 8;
    double theta = std::numbers::phi - 1.0;  // (sqrt 5 - 1)/2

    TorusBasis() = default;
    TorusBasis(int n, double th) : N(n), theta(th) { validate(); }

    void validate() const {
        if (N < 1) throw ParameterError(detail::cat("torus truncation N must be >= 1, got ", N));
        if (!(theta >= 0.0 && theta < 1.0)) throw ParameterError(detail::cat("theta must lie in [0,1), got ", theta));
    }
    Index side() const { return 2 * N + 1; }
    Index dim() const { return side() * side(); }
    // e_{m,n} = U^m V^n; n-major so each n-sector is a contiguous block.
    Index index(int m, int n) const { return static_cast<Index>(n + N) * side() + (m + N); }
    bool contains(int m, int n) const { return std::abs(m) <= N && std::abs(n) <= N; }
    // lambda^k with lambda = e^{2 pi i theta}
    cplx phase(long k) const { return std::polar(1.0, 2.0 * std::numbers::pi * theta * static_cast<double>(k)); }
};

enum class TorusGen { U, V, U_adj, V_adj };

inline const char* to_string(TorusGen g) {
    switch (g) {
        case TorusGen::U: return "U";
        case TorusGen::V: return "V";
        case TorusGen::U_adj: return "U*";
        case TorusGen::V_adj: return "V*";
    }
    return "?";
}

namespace detail {
// Matrix of e_{m,n} -> coeff(m,n) e_{m+dm, n+dn}, dropping images outside the box.
template <class Coeff>
Mat torus_shift(const TorusBasis& b, int dm, int dn, Coeff coeff) {
    Mat out = Mat::Zero(b.dim(), b.dim());
    for (int n = -b.N; n <= b.N; ++n)
        for (int m = -b.N; m <= b.N; ++m)
            if (b.contains(m + dm, n + dn)) out(b.index(m + dm, n + dn), b.index(m, n)) = coeff(m, n);
    return out;
}
}  // namespace detail

// Left multiplication: U e_{m,n} = e_{m+1,n}, V e_{m,n} = lambda^m e_{m,n+1}.
inline Mat torus_left_mult(TorusGen g, const TorusBasis& b) {
    switch (g) {
        case TorusGen::U: return detail::torus_shift(b, 1, 0, [](int, int) { return cplx(1.0); });
        case TorusGen::V: return detail::torus_shift(b, 0, 1, [&](int m, int) { return b.phase(m); });
        case TorusGen::U_adj: return torus_left_mult(TorusGen::U, b).adjoint();
        case TorusGen::V_adj: return torus_left_mult(TorusGen::V, b).adjoint();
    }
    throw ParameterError("unknown torus generator");
}

// Right multiplication: e_{m,n} U = lambda^n e_{m+1,n}, e_{m,n} V = e_{m,n+1}.
inline Mat torus_right_mult(TorusGen g, const TorusBasis& b) {
    switch (g) {
        case TorusGen::U: return detail::torus_shift(b, 1, 0, [&](int, int n) { return b.phase(n); });
        case TorusGen::V: return detail::torus_shift(b, 0, 1, [](int, int) { return cplx(1.0); });
        case TorusGen::U_adj: return torus_right_mult(TorusGen::U, b).adjoint();
        case TorusGen::V_adj: return torus_right_mult(TorusGen::V, b).adjoint();
    }
    throw ParameterError("unknown torus generator");
}

// Basis indices with |m|,|n| <= N - word_length.
inline std::vector<Index> torus_interior(const TorusBasis& b, int word_length) {
    std::vector<Index> out;
    int r = b.N - word_length;
    for (int n = -r; n <= r; ++n)
        for (int m = -r; m <= r; ++m) out.push_back(b.index(m, n));
    return out;
}

// Same mask lifted to C^2 (x) box, top copy first.
inline std::vector<Index> spinor_lift(const std::vector<Index>& mask, Index dim) {
    std::vector<Index> out(mask);
    for (Index k : mask) out.push_back(k + dim);
    return out;
}

inline Mat spinor_diag(const Mat& a) {
    const Index n = a.rows();
    Mat out = Mat::Zero(2 * n, 2 * n);
    out.topLeftCorner(n, n) = a;
    out.bottomRightCorner(n, n) = a;
    return out;
}

inline Mat offdiag(const Mat& upper_right, const Mat& lower_left) {
    const Index n = upper_right.rows();
    Mat out = Mat::Zero(2 * n, 2 * n);
    out.topRightCorner(n, n) = upper_right;
    out.bottomLeftCorner(n, n) = lower_left;
    return out;
}

inline void check_tau(cplx tau) {
    if (!(tau.imag() > 0.0)) throw ParameterError(detail::cat("tau must have positive imaginary part, got ", tau));
}

// delta_1 + tau delta_2 on the box.
inline Mat torus_holomorphic_derivative(const TorusBasis& b, cplx tau) {
    Mat out = Mat::Zero(b.dim(), b.dim());
    for (int n = -b.N; n <= b.N; ++n)
        for (int m = -b.N; m <= b.N; ++m) out(b.index(m, n), b.index(m, n)) = double(m) + tau * double(n);
    return out;
}

inline TruncatedTriple torus_dirac(const TorusBasis& b, cplx tau, const ToleranceConfig& tol = {}) {
    b.validate();
    check_tau(tau);
    const Mat del = torus_holomorphic_derivative(b, tau);
    TruncatedTriple t{HermitianOperator(offdiag(del, del.adjoint()), tol), {}, {}, "torus"};
    for (TorusGen g : {TorusGen::U, TorusGen::V, TorusGen::U_adj, TorusGen::V_adj})
        t.generators.emplace_back(to_string(g), spinor_diag(torus_left_mult(g, b)));
    t.interior_mask = spinor_lift(torus_interior(b, 1), b.dim());
    return t;
}

// k = c0 + cu (U + U*)/2 + cv (V + V*)/2, acting by right multiplication.
struct KSpec {
    double c0 = 2.0;
    double cu = 1.0;
    double cv = 0.0;
};

inline Mat torus_right_multiplier(const TorusBasis& b, const KSpec& k) {
    Mat out = k.c0 * Mat::Identity(b.dim(), b.dim());
    if (k.cu != 0.0) {
        Mat ru = torus_right_mult(TorusGen::U, b);
        out += 0.5 * k.cu * (ru + ru.adjoint());
    }
    if (k.cv != 0.0) {
        Mat rv = torus_right_mult(TorusGen::V, b);
        out += 0.5 * k.cv * (rv + rv.adjoint());
    }
    return out;
}

inline constexpr double kMinMultiplierEigenvalue = 1e-6;

struct TorusConformalPair {
    TruncatedTriple base;       // D
    TruncatedTriple rescaled;   // D_k with blocks k^2 del and del-bar k^2
    ConformalFactor mu;         // k acting on both spinor components
    double identity_residual;   // ||D_k - k D k - offdiag(-k[del,k], [del-bar,k]k)|| on interior columns
};

inline TorusConformalPair torus_conformal_pair(const TorusBasis& b, cplx tau, const KSpec& kspec,
                                               const ToleranceConfig& tol = {}) {
    TruncatedTriple base = torus_dirac(b, tau, tol);
    const Mat k = torus_right_multiplier(b, kspec);
    double kmin = detail::min_eigenvalue(k);
    if (!(kmin > kMinMultiplierEigenvalue))
        throw ParameterError(detail::cat("multiplier k is not invertible at truncation, min eigenvalue ", kmin));
    const Mat del = torus_holomorphic_derivative(b, tau);
    const Mat del_bar = del.adjoint();
    const Mat k2 = k * k;
    TruncatedTriple rescaled{HermitianOperator(offdiag(k2 * del, del_bar * k2), tol), base.generators,
                             base.interior_mask, "torus-rescaled"};
    const Mat kk = spinor_diag(k);
    const Mat lhs = rescaled.dirac.matrix() - kk * base.dirac.matrix() * kk;
    const Mat rhs = offdiag(-k * commutator(del, k), commutator(del_bar, k) * k);
    double residual = operator_norm(columns(lhs - rhs, base.interior_mask));
    return {std::move(base), std::move(rescaled), ConformalFactor(kk), residual};
}

namespace detail {

// One n-sector (fixed n, all m) of the torus operators used by the sweep.
struct TorusSector {
    Mat dirac;       // 2(2N+1) square
    Mat left_u;      // spinor-diagonal
    Mat multiplier;  // spinor-diagonal k
};

inline TorusSector torus_sector(const TorusBasis& b, cplx tau, const KSpec& k, int n) {
    const Index s = b.side();
    Mat del = Mat::Zero(s, s), shift = Mat::Zero(s, s);
    for (int m = -b.N; m <= b.N; ++m) {
        del(m + b.N, m + b.N) = double(m) + tau * double(n);
        if (m < b.N) shift(m + 1 + b.N, m + b.N) = 1.0;
    }
    Mat ru = b.phase(n) * shift;
    Mat kk = k.c0 * Mat::Identity(s, s) + 0.5 * k.cu * (ru + ru.adjoint());
    return {offdiag(del, del.adjoint()), spinor_diag(shift), spinor_diag(kk)};
}

inline double torus_difference_block(const Mat& d, const Mat& left_u, const Mat& kk, double beta,
                                     const ToleranceConfig& tol) {
    const HermitianOperator dirac(d, tol);
    const HermitianOperator conj(kk * d * kk, tol);
    const Mat diff = bounded_transform(conj).matrix() - bounded_transform(dirac).matrix();
    return operator_norm(diff * left_u * kk * bracket_power(dirac, beta).matrix());
}

}  // namespace detail

// ||(F_{kDk} - F_D) U k <D>^beta|| assembled densely on the whole box.
inline double torus_difference_norm_dense(const TorusBasis& b, cplx tau, const KSpec& k, double beta,
                                          const ToleranceConfig& tol = {}) {
    const TorusConformalPair pair = torus_conformal_pair(b, tau, k, tol);
    return detail::torus_difference_block(pair.base.dirac.matrix(), pair.base.generator("U"), pair.mu.mu(), beta,
                                          tol);
}

// Same quantity. Without a V term in k every operator involved preserves n, so the
// norm is the largest over the 2N+1 sectors; otherwise fall back to the dense form.
inline double torus_difference_norm(const TorusBasis& b, cplx tau, const KSpec& k, double beta,
                                    const ToleranceConfig& tol = {}) {
    b.validate();
    check_tau(tau);
    if (k.cv != 0.0) return torus_difference_norm_dense(b, tau, k, beta, tol);
    if (!(k.c0 - std::abs(k.cu) > kMinMultiplierEigenvalue)) {
        // Spectrum bound is not conclusive; let the dense path run the exact check.
        return torus_difference_norm_dense(b, tau, k, beta, tol);
    }
    double best = 0.0;
    for (int n = -b.N; n <= b.N; ++n) {
        auto sec = detail::torus_sector(b, tau, k, n);
        best = std::max(best, detail::torus_difference_block(sec.dirac, sec.left_u, sec.multiplier, beta, tol));
    }
    return best;
}

// The difference norm over a list of truncations N.
inline SweepReport torus_difference_sweep(double theta, cplx tau, const KSpec& k, double beta,
                                          const std::vector<double>& n_values, std::uint64_t seed = 0,
                                          const std::string& config_hash = "", unsigned workers = 1) {
    const std::string name = detail::cat("torus_difference(theta=", theta, ",tau=", tau, ",k=", k.c0, "+", k.cu,
                                         "u+", k.cv, "v,beta=", beta, ")");
    return run_sweep(name, "N", n_values,
                     [&](double n) { return torus_difference_norm(TorusBasis(static_cast<int>(n), theta), tau, k, beta); },
                     seed, config_hash, workers);
}

// ||[D, U]|| over truncations, computed per n-sector (D and U both preserve n).
inline double torus_dirac_commutator_norm(const TorusBasis& b, cplx tau) {
    b.validate();
    check_tau(tau);
    double best = 0.0;
    for (int n = -b.N; n <= b.N; ++n) {
        auto sec = detail::torus_sector(b, tau, KSpec{1.0, 0.0, 0.0}, n);
        best = std::max(best, operator_norm(commutator(sec.dirac, sec.left_u)));
    }
    return best;
}

inline SweepReport torus_commutator_sweep(double theta, cplx tau, const std::vector<double>& n_values,
                                          std::uint64_t seed = 0, const std::string& config_hash = "",
                                          unsigned workers = 1) {
    const std::string name = detail::cat("torus_dirac_commutator(theta=", theta, ",tau=", tau, ",U)");
    return run_sweep(name, "N", n_values,
                     [&](double n) { return torus_dirac_commutator_norm(TorusBasis(static_cast<int>(n), theta), tau); },
                     seed, config_hash, workers);
}

// Singular values of (F_{kDk} - F_D) U, gathered sector by sector (k without V term).
inline SingularProfile torus_difference_profile(const TorusBasis& b, cplx tau, const KSpec& k,
                                                const ToleranceConfig& tol = {}) {
    if (k.cv != 0.0) throw ParameterError("sector profile needs a multiplier without V term");
    std::vector<double> all;
    for (int n = -b.N; n <= b.N; ++n) {
        auto sec = detail::torus_sector(b, tau, k, n);
        const HermitianOperator dirac(sec.dirac, tol);
        const HermitianOperator conj(sec.multiplier * sec.dirac * sec.multiplier, tol);
        Mat diff = (bounded_transform(conj).matrix() - bounded_transform(dirac).matrix()) * sec.left_u;
        Eigen::BDCSVD<Mat> svd(diff);
        for (Index i = 0; i < svd.singularValues().size(); ++i) all.push_back(svd.singularValues()(i));
    }
    return singular_profile_from_values(std::move(all), 2 * b.dim());
}

// Singular values of (1 + D^2)^{-1}, i.e. 1/(1 + |m + tau n|^2) twice each.
inline SingularProfile torus_resolvent_profile(const TorusBasis& b, cplx tau) {
    std::vector<double> all;
    for (int n = -b.N; n <= b.N; ++n)
        for (int m = -b.N; m <= b.N; ++m) {
            double v = 1.0 / (1.0 + std::norm(double(m) + tau * double(n)));
            all.push_back(v);
            all.push_back(v);
        }
    return singular_profile_from_values(std::move(all), 2 * b.dim());
}

// ---- circle model ----

inline HermitianOperator circle_dirac(int N, const ToleranceConfig& tol = {}) {
    if (N < 1) throw ParameterError("circle truncation N must be >= 1");
    std::vector<double> d;
    for (int n = -N; n <= N; ++n) d.push_back(n);
    return HermitianOperator(diagonal(d), tol);
}

// e_n -> e_{n+1}, top vector dropped.
inline Mat circle_shift(int N) {
    const Index s = 2 * N + 1;
    Mat out = Mat::Zero(s, s);
    for (Index i = 0; i + 1 < s; ++i) out(i + 1, i) = 1.0;
    return out;
}

struct CircleDilationReport {
    double transform_gap;          // ||F_{kappa D} - F_D||
    SingularProfile shifted;       // of (F_{kappa D} - F_D) shift
    double weighted_gap;           // ||(F_{kappa D} - F_D) <D>^beta||
};

inline CircleDilationReport circle_dilation_compare(int N, double kappa, double beta,
                                                    const ToleranceConfig& tol = {}) {
    if (!(kappa > 0.0)) throw ParameterError(detail::cat("kappa must be positive, got ", kappa));
    const HermitianOperator d = circle_dirac(N, tol);
    const HermitianOperator kd(kappa * d.matrix(), tol);
    const Mat diff = bounded_transform(kd).matrix() - bounded_transform(d).matrix();
    return {operator_norm(diff), singular_profile(diff * circle_shift(N)),
            operator_norm(diff * bracket_power(d, beta).matrix())};
}

// ||L_{kappa D} - L_D|| on the circle model.
inline double log_dampening_gap(int N, double kappa, const ToleranceConfig& tol = {}) {
    if (!(kappa > 0.0)) throw ParameterError(detail::cat("kappa must be positive, got ", kappa));
    const HermitianOperator d = circle_dirac(N, tol);
    const HermitianOperator kd(kappa * d.matrix(), tol);
    return operator_norm(log_transform(kd).matrix() - log_transform(d).matrix());
}

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
inline double hashed_unit(std::uint64_t seed, long i, long j, std::uint64_t salt) {
    std::uint64_t h = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(i) * 0x100000001b3ULL ^
                                                   splitmix64(static_cast<std::uint64_t>(j) + salt)));
    return static_cast<double>(h >> 11) * 0x1.0p-53 - 0.5;
}
}  // namespace detail

// Hermitian band matrix on the circle basis. Entries depend only on (seed, n, n'),
// so truncations are nested and the norm is bounded by 2 * bandwidth + 1.
inline Mat banded_perturbation(int N, std::uint64_t seed, int bandwidth = 2) {
    const Index s = 2 * N + 1;
    Mat v = Mat::Zero(s, s);
    for (int a = -N; a <= N; ++a)
        for (int c = a; c <= std::min(N, a + bandwidth); ++c) {
            double re = detail::hashed_unit(seed, a, c, 1);
            double im = a == c ? 0.0 : detail::hashed_unit(seed, a, c, 2);
            v(c + N, a + N) = cplx(re, im);
            v(a + N, c + N) = cplx(re, -im);
        }
    return v;
}

// ||(F_{D+V} - F_D) <D>^beta|| for the circle model.
inline double additive_transfer_norm(int N, std::uint64_t seed, double beta, const ToleranceConfig& tol = {}) {
    const HermitianOperator d = circle_dirac(N, tol);
    const HermitianOperator d1(d.matrix() + banded_perturbation(N, seed), tol);
    const Mat diff = bounded_transform(d1).matrix() - bounded_transform(d).matrix();
    return operator_norm(diff * bracket_power(d, beta).matrix());
}

}  // namespace kkp
