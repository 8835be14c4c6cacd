#pragma once

// Seeded random matrices. Engine: std::mt19937_64, whose output sequence is fixed
// by the standard. Uniforms take the top 53 bits; normals use Box-Muller on those
// uniforms, so no implementation-defined std:: distribution is involved.

#include "opcore.hpp"

#include <cstdint>
#include <numbers>
#include <random>

namespace kkp {

inline constexpr const char* kGeneratorName = "mt19937_64/u53/box-muller";

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Uniform on [0, 1).
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [lo, hi].
    int uniform_int(int lo, int hi) {
        std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t x;
        do { x = eng_(); } while (x >= limit);
        return lo + static_cast<int>(x % span);
    }

    double normal() {
        double u1 = 1.0 - uniform();  // (0, 1]
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    cplx cnormal() {
        double re = normal();
        double im = normal();
        return {re, im};
    }

private:
    std::mt19937_64 eng_;
};

inline Mat random_complex(Index rows, Index cols, Rng& rng) {
    Mat m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = rng.cnormal();
    return m;
}

inline Mat random_hermitian(Index n, Rng& rng, double scale = 1.0) {
    Mat g = random_complex(n, n, rng);
    return scale * 0.5 * (g + g.adjoint());
}

// Haar-distributed unitary: QR of a Ginibre matrix with the phases of R divided out.
inline Mat random_unitary(Index n, Rng& rng) {
    Mat g = random_complex(n, n, rng);
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ() * Mat::Identity(n, n);
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index k = 0; k < n; ++k) {
        double a = std::abs(r(k, k));
        if (a > 0) q.col(k) *= r(k, k) / a;
    }
    return q;
}

// Log-uniform spectrum in [lo, hi] with both endpoints attained when n >= 2.
inline RVec log_uniform_spectrum(Index n, double lo, double hi, Rng& rng) {
    RVec s(n);
    for (Index k = 0; k < n; ++k) s(k) = std::exp(rng.uniform(std::log(lo), std::log(hi)));
    if (n >= 2) {
        s(0) = lo;
        s(1) = hi;
    }
    return s;
}

// Positive definite with condition number exactly cond (n >= 2).
inline Mat random_positive(Index n, double cond, Rng& rng, double scale = 1.0) {
    Mat u = random_unitary(n, rng);
    RVec s = scale * log_uniform_spectrum(n, 1.0, cond, rng);
    Mat p = u * s.cast<cplx>().asDiagonal() * u.adjoint();
    return 0.5 * (p + p.adjoint());
}

// Invertible, non-normal in general, with ||m|| ||m^-1|| = cond.
inline Mat random_invertible(Index n, double cond, Rng& rng) {
    Mat u = random_unitary(n, rng);
    Mat v = random_unitary(n, rng);
    double shift = std::exp(rng.uniform(-std::log(cond), 0.0));
    RVec s = shift * log_uniform_spectrum(n, 1.0, cond, rng);
    return u * s.cast<cplx>().asDiagonal() * v.adjoint();
}

}  // namespace kkp
