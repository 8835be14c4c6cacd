#pragma once

// Integer Heisenberg group with the Clifford-valued symbol
//   ell(a,b,c) = (a g1 + b g2) sqrt(a^2 + b^2) + c g3,
// where g1, g2, g3 are the Pauli matrices.

#include "sweep.hpp"

#include <array>
#include <cstdint>

namespace kkp {

struct OverflowError : Error { using Error::Error; };

struct HeisPoint {
    std::int64_t a = 0, b = 0, c = 0;
    friend bool operator==(const HeisPoint&, const HeisPoint&) = default;
};

namespace detail {
inline std::int64_t add_checked(std::int64_t x, std::int64_t y) {
    std::int64_t r;
    if (__builtin_add_overflow(x, y, &r)) throw OverflowError(cat("integer overflow in ", x, " + ", y));
    return r;
}
inline std::int64_t mul_checked(std::int64_t x, std::int64_t y) {
    std::int64_t r;
    if (__builtin_mul_overflow(x, y, &r)) throw OverflowError(cat("integer overflow in ", x, " * ", y));
    return r;
}
}  // namespace detail

// (a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab')
inline HeisPoint heis_mul(const HeisPoint& g, const HeisPoint& h) {
    using detail::add_checked;
    return {add_checked(g.a, h.a), add_checked(g.b, h.b),
            add_checked(add_checked(g.c, h.c), detail::mul_checked(g.a, h.b))};
}

inline HeisPoint heis_inv(const HeisPoint& g) {
    return {-g.a, -g.b, detail::add_checked(-g.c, detail::mul_checked(g.a, g.b))};
}

// Integer dilation (ta, tb, t^2 c); a group homomorphism.
inline HeisPoint heis_dilate(const HeisPoint& g, std::int64_t t) {
    using detail::mul_checked;
    return {mul_checked(t, g.a), mul_checked(t, g.b), mul_checked(mul_checked(t, t), g.c)};
}

using Clifford = Eigen::Matrix2cd;

inline const std::array<Clifford, 3>& gammas() {
    static const std::array<Clifford, 3> g = [] {
        std::array<Clifford, 3> out;
        out[0] << 0, 1, 1, 0;
        out[1] << 0, cplx(0, -1), cplx(0, 1), 0;
        out[2] << 1, 0, 0, -1;
        return out;
    }();
    return g;
}

// Real coefficients of ell(g) on (g1, g2, g3).
inline std::array<double, 3> ell_coefficients(const HeisPoint& g) {
    const double a = static_cast<double>(g.a), b = static_cast<double>(g.b);
    const double r = std::sqrt(a * a + b * b);
    return {a * r, b * r, static_cast<double>(g.c)};
}

inline Clifford ell(const HeisPoint& g) {
    const auto v = ell_coefficients(g);
    const auto& gm = gammas();
    return v[0] * gm[0] + v[1] * gm[1] + v[2] * gm[2];
}

// 1 + ell(g)^2 is this multiple of the identity.
inline double ell_bracket_squared(const HeisPoint& g) {
    const double a = static_cast<double>(g.a), b = static_cast<double>(g.b), c = static_cast<double>(g.c);
    const double r2 = a * a + b * b;
    return 1.0 + r2 * r2 + c * c;
}

// ---- exact symbol arithmetic ----

// k * sqrt(n) with n squarefree (n = 1 for integers, k = 0 normalises n to 1).
struct Surd {
    std::int64_t k = 0;
    std::int64_t n = 1;
    friend bool operator==(const Surd&, const Surd&) = default;
};

inline Surd make_surd(std::int64_t k, std::int64_t radicand) {
    if (radicand < 0) throw DomainError("negative radicand");
    if (k == 0 || radicand == 0) return {0, 1};
    std::int64_t out = 1, rest = radicand;
    for (std::int64_t p = 2; p * p <= rest; ++p)
        while (rest % (p * p) == 0) {
            rest /= p * p;
            out = detail::mul_checked(out, p);
        }
    return {detail::mul_checked(k, out), rest};
}

// ell(g) with each coefficient kept as an exact surd.
struct ExactSymbol {
    Surd x, y;
    std::int64_t z = 0;
    friend bool operator==(const ExactSymbol&, const ExactSymbol&) = default;
};

inline ExactSymbol ell_exact(const HeisPoint& g) {
    using detail::add_checked;
    using detail::mul_checked;
    const std::int64_t r2 = add_checked(mul_checked(g.a, g.a), mul_checked(g.b, g.b));
    return {make_surd(g.a, r2), make_surd(g.b, r2), g.c};
}

inline ExactSymbol scale(const ExactSymbol& s, std::int64_t f) {
    using detail::mul_checked;
    auto sc = [&](Surd v) { return v.k == 0 || f == 0 ? Surd{0, 1} : Surd{mul_checked(v.k, f), v.n}; };
    return {sc(s.x), sc(s.y), mul_checked(s.z, f)};
}

struct DilationReport {
    std::int64_t t = 1;
    std::int64_t radius = 0;
    double max_residual = 0.0;     // floating: max ||ell(delta_t h) - t^2 ell(h)||
    std::int64_t exact_mismatches = 0;
    double coverage = 0.0;         // fraction of window points whose dilate stays in the window
    std::int64_t lattice_index = 0;  // [Z^3 : delta_t Z^3], counted
    double normalization = 1.0;      // 1/sqrt(index) = t^{-2}
};

inline bool in_window(const HeisPoint& h, std::int64_t r) {
    return std::abs(h.a) <= r && std::abs(h.b) <= r && std::abs(h.c) <= r;
}

// The pullback V_t xi = xi o delta_t satisfies V_t M_ell = t^2 M_ell V_t pointwise,
// so t^{-2} V_t M_ell V_t^{-1} = M_ell on points whose dilate stays in the window.
inline DilationReport dilation_check(std::int64_t t, std::int64_t radius) {
    if (t < 1) throw ParameterError(detail::cat("dilation factor must be >= 1, got ", t));
    if (radius < 0) throw ParameterError("window radius must be nonnegative");
    DilationReport r;
    r.t = t;
    r.radius = radius;
    std::int64_t covered = 0, total = 0;
    const double t2 = static_cast<double>(t * t);
    for (std::int64_t a = -radius; a <= radius; ++a)
        for (std::int64_t b = -radius; b <= radius; ++b)
            for (std::int64_t c = -radius; c <= radius; ++c) {
                ++total;
                const HeisPoint h{a, b, c};
                const HeisPoint th = heis_dilate(h, t);
                if (!in_window(th, radius)) continue;
                ++covered;
                if (!(ell_exact(th) == scale(ell_exact(h), t * t))) ++r.exact_mismatches;
                r.max_residual = std::max(r.max_residual, (ell(th) - t2 * ell(h)).norm());
            }
    r.coverage = static_cast<double>(covered) / static_cast<double>(total);
    // Count delta_t(Z^3) inside [0, M)^3 with M a multiple of t^2: the ratio is the index.
    const std::int64_t side = t * t * 2;
    std::int64_t image = 0;
    for (std::int64_t a = 0; a * t < side; ++a)
        for (std::int64_t b = 0; b * t < side; ++b)
            for (std::int64_t c = 0; c * t * t < side; ++c) ++image;
    r.lattice_index = side * side * side / image;
    r.normalization = 1.0 / std::sqrt(static_cast<double>(r.lattice_index));
    return r;
}

// ||(ell(g h) - ell(h)) (1 + ell(h)^2)^{exponent}|| for one h. The difference has no
// identity part, so its norm is the Euclidean length of its gamma coefficients.
inline double commutator_symbol(const HeisPoint& g, const HeisPoint& h, double exponent) {
    const auto u = ell_coefficients(heis_mul(g, h));
    const auto v = ell_coefficients(h);
    const double d = std::hypot(u[0] - v[0], u[1] - v[1], u[2] - v[2]);
    return d * std::pow(ell_bracket_squared(h), exponent);
}

// sup over the box |a|,|b|,|c| <= R.
inline double commutator_bound(const HeisPoint& g, std::int64_t radius, double exponent = -0.25) {
    double best = 0.0;
    for (std::int64_t a = -radius; a <= radius; ++a)
        for (std::int64_t b = -radius; b <= radius; ++b)
            for (std::int64_t c = -radius; c <= radius; ++c)
                best = std::max(best, commutator_symbol(g, {a, b, c}, exponent));
    return best;
}

inline SweepReport commutator_bound_sweep(const HeisPoint& g, const std::vector<double>& radii,
                                          double exponent = -0.25, std::uint64_t seed = 0,
                                          const std::string& config_hash = "", unsigned workers = 1) {
    const std::string name = detail::cat("heisenberg_commutator(", g.a, ",", g.b, ",", g.c, ";", exponent, ")");
    return run_sweep(name, "R", radii,
                     [&](double r) { return commutator_bound(g, static_cast<std::int64_t>(r), exponent); }, seed,
                     config_hash, workers);
}

inline std::vector<HeisPoint> heis_generators() {
    return {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
}

// Values (1 + ell(h)^2)^{-1} over the window, each twice (spinor copies). Only the decay
// is exhibited; no compactness test is implied.
inline SingularProfile heis_resolvent_profile(std::int64_t radius) {
    std::vector<double> all;
    for (std::int64_t a = -radius; a <= radius; ++a)
        for (std::int64_t b = -radius; b <= radius; ++b)
            for (std::int64_t c = -radius; c <= radius; ++c) {
                const double v = 1.0 / ell_bracket_squared({a, b, c});
                all.push_back(v);
                all.push_back(v);
            }
    const auto n = static_cast<Index>(all.size());
    return singular_profile_from_values(std::move(all), n);
}

// ---- explicit window model, for cross-checks at small radius ----

struct HeisWindow {
    std::int64_t radius;
    Index points() const { return (2 * radius + 1) * (2 * radius + 1) * (2 * radius + 1); }
    Index index(const HeisPoint& h) const {
        const Index s = 2 * radius + 1;
        return ((h.a + radius) * s + (h.b + radius)) * s + (h.c + radius);
    }
    HeisPoint point(Index k) const {
        const Index s = 2 * radius + 1;
        return {k / (s * s) - radius, (k / s) % s - radius, k % s - radius};
    }
};

// M_ell on l^2(window) (x) C^2, point-major.
inline Mat heis_multiplication_operator(const HeisWindow& w) {
    Mat out = Mat::Zero(2 * w.points(), 2 * w.points());
    for (Index k = 0; k < w.points(); ++k) out.block(2 * k, 2 * k, 2, 2) = ell(w.point(k));
    return out;
}

// Left translation (lambda_g xi)(h) = xi(g^{-1} h), clipped to the window.
inline Mat heis_left_translation(const HeisWindow& w, const HeisPoint& g) {
    Mat out = Mat::Zero(2 * w.points(), 2 * w.points());
    for (Index k = 0; k < w.points(); ++k) {
        const HeisPoint gh = heis_mul(g, w.point(k));
        if (!in_window(gh, w.radius)) continue;
        const Index j = w.index(gh);
        out(2 * j, 2 * k) = 1.0;
        out(2 * j + 1, 2 * k + 1) = 1.0;
    }
    return out;
}

}  // namespace kkp
