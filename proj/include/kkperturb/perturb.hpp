#pragma once

// Multiplicative perturbation estimates: derivation norms, Stampfli's bound,
// fractional-power interpolation, conformal-factor bounds, the resolvent sandwich,
// bounded-transform differences and the converse decomposition.

#include "random.hpp"
#include "transforms.hpp"

#include <algorithm>

namespace kkp {

class ConformalFactor {
public:
    static constexpr double kCondCap = 1e8;

    explicit ConformalFactor(const Mat& mu) : mu_(mu) {
        if (mu.rows() != mu.cols() || mu.rows() == 0)
            throw ParameterError("conformal factor must be a non-empty square matrix");
        if (!mu.allFinite()) throw ParameterError("conformal factor has non-finite entries");
        const Mat id = Mat::Identity(mu.rows(), mu.rows());
        mu_inv_ = Eigen::PartialPivLU<Mat>(mu).inverse();
        if (!mu_inv_.allFinite()) throw ParameterError("conformal factor is singular");
        mu_inv_ += mu_inv_ * (id - mu_ * mu_inv_);  // one refinement step
        cond_ = operator_norm(mu_) * operator_norm(mu_inv_);
        if (!(cond_ <= kCondCap))
            throw ParameterError(detail::cat("conformal factor condition number ", cond_, " exceeds cap"));
        double defect = operator_norm(mu_ * mu_inv_ - id);
        if (defect > 1e-10)
            throw ParameterError(detail::cat("conformal factor inverse defect ", defect, " above 1e-10"));
    }

    static ConformalFactor scalar(Index n, double c) { return ConformalFactor(c * Mat::Identity(n, n)); }

    const Mat& mu() const { return mu_; }
    const Mat& mu_inv() const { return mu_inv_; }
    double cond() const { return cond_; }
    Index dim() const { return mu_.rows(); }

private:
    Mat mu_;
    Mat mu_inv_;
    double cond_ = 1.0;
};

// Matrix of x -> a x - x b on column-major vec(x), x of size dim(a) x dim(b).
inline Mat inner_derivation_matrix(const Mat& a, const Mat& b) {
    const Index na = a.rows(), nb = b.rows();
    Mat m = Mat::Zero(na * nb, na * nb);
    for (Index j = 0; j < nb; ++j) m.block(j * na, j * na, na, na) += a;
    for (Index j = 0; j < nb; ++j)
        for (Index k = 0; k < nb; ++k)
            if (b(k, j) != cplx(0)) m.block(j * na, k * na, na, na).diagonal().array() -= b(k, j);
    return m;
}

inline constexpr Index kDerivationExactCap = 16;

// Norm of x -> a x - x b for the Hilbert-Schmidt norm on x, from the assembled map.
inline double inner_derivation_norm_exact(const Mat& a, const Mat& b, Index cap = kDerivationExactCap) {
    if (a.rows() != a.cols() || b.rows() != b.cols()) throw ParameterError("derivation needs square a and b");
    if (a.rows() > cap || b.rows() > cap)
        throw SizeError(detail::cat("inner derivation dims ", a.rows(), ", ", b.rows(), " exceed cap ", cap));
    return operator_norm(inner_derivation_matrix(a, b));
}

// Randomized power iteration on the map applied matrix-free; used above the exact cap.
inline double inner_derivation_norm_power(const Mat& a, const Mat& b, std::uint64_t seed = 0x5eed,
                                          int max_iter = 2000, double rel_tol = 1e-12) {
    Rng rng(seed);
    Mat x = random_complex(a.rows(), b.rows(), rng);
    x /= x.norm();
    double est = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Mat y = a * x - x * b;
        Mat z = a.adjoint() * y - y * b.adjoint();  // adjoint map applied to y
        double zn = z.norm();
        if (zn == 0.0) return 0.0;
        double next = std::sqrt(zn);
        x = z / zn;
        if (std::abs(next - est) <= rel_tol * next) return next;
        est = next;
    }
    return est;
}

inline double inner_derivation_norm(const Mat& a, const Mat& b) {
    if (a.rows() <= kDerivationExactCap && b.rows() <= kDerivationExactCap)
        return inner_derivation_norm_exact(a, b);
    return inner_derivation_norm_power(a, b);
}

namespace detail {
inline double min_eigenvalue(const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> s(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
    return s.eigenvalues()(0);
}
}  // namespace detail

// max{||a|| - ||b^{-1}||^{-1}, ||b|| - ||a^{-1}||^{-1}} with ||x^{-1}||^{-1} = 0 for singular x.
inline double stampfli_bound(const Mat& a, const Mat& b, const ToleranceConfig& tol = {}) {
    double ma = psd_margin(a, tol), mb = psd_margin(b, tol);
    if (ma < -tol.inequality_slack)
        throw PreconditionError(detail::cat("stampfli_bound: a is not positive, margin ", ma));
    if (mb < -tol.inequality_slack)
        throw PreconditionError(detail::cat("stampfli_bound: b is not positive, margin ", mb));
    // For positive x, ||x^{-1}||^{-1} is the least eigenvalue, which tends to 0 as x degenerates.
    double inv_a = std::max(ma, 0.0), inv_b = std::max(mb, 0.0);
    return std::max({operator_norm(a) - inv_b, operator_norm(b) - inv_a, 0.0});
}

struct InequalityReport {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

// ||A^alpha T B^{-alpha}|| <= ||A T B^{-1}||^alpha ||T||^{1-alpha}
inline InequalityReport interpolation_check(const HermitianOperator& a, const HermitianOperator& b, const Mat& t,
                                            double alpha, const ToleranceConfig& tol = {}) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw ParameterError(detail::cat("interpolation exponent must lie in (0,1], got ", alpha));
    if (t.rows() != a.dim() || t.cols() != b.dim()) throw ParameterError("interpolation_check: dimension mismatch");
    double amin = a.eig().eigenvalues(0), bmin = b.eig().eigenvalues(0);
    if (!(amin > 0.0)) throw PreconditionError(detail::cat("A is not positive invertible, min eigenvalue ", amin));
    if (!(bmin > 0.0)) throw PreconditionError(detail::cat("B is not positive invertible, min eigenvalue ", bmin));
    const Mat b_inv = apply_function(b, [](double x) { return 1.0 / x; }).matrix();
    const Mat atb = a.matrix() * t * b_inv;
    InequalityReport r;
    const double endpoint = operator_norm(atb);
    if (alpha == 1.0) {
        r.lhs = endpoint;
        r.rhs = endpoint;
    } else {
        const Mat a_pow = apply_function(a, [alpha](double x) { return std::pow(x, alpha); }).matrix();
        const Mat b_pow = apply_function(b, [alpha](double x) { return std::pow(x, -alpha); }).matrix();
        r.lhs = operator_norm(a_pow * t * b_pow);
        r.rhs = std::pow(endpoint, alpha) * std::pow(operator_norm(t), 1.0 - alpha);
    }
    r.holds = r.lhs <= r.rhs + tol.inequality_slack;
    return r;
}

struct MuFractionalReport {
    InequalityReport lower;  // ||<D>^a mu* (mu<D>mu*)^{-a}|| <= ||mu^{-1}||^a ||mu||^{1-a}
    InequalityReport upper;  // ||(mu<D>mu*)^a mu^{-1*} <D>^{-a}|| <= ||mu||^a ||mu^{-1}||^{1-a}
    bool holds() const { return lower.holds && upper.holds; }
};

inline MuFractionalReport mu_fractional_bounds_check(const HermitianOperator& d, const ConformalFactor& mu,
                                                     double alpha, const ToleranceConfig& tol = {}) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw ParameterError(detail::cat("exponent must lie in (0,1], got ", alpha));
    if (mu.dim() != d.dim()) throw ParameterError("mu_fractional_bounds_check: dimension mismatch");
    const Mat& m = mu.mu();
    const Mat bracket = bracket_power(d, 1.0).matrix();
    const HermitianOperator conj(m * bracket * m.adjoint(), d.tolerances());
    const Mat d_pos = bracket_power(d, alpha).matrix();
    const Mat d_neg = bracket_power(d, -alpha).matrix();
    const Mat c_pos = apply_function(conj, [alpha](double x) { return std::pow(x, alpha); }).matrix();
    const Mat c_neg = apply_function(conj, [alpha](double x) { return std::pow(x, -alpha); }).matrix();
    const double nm = operator_norm(m), ni = operator_norm(mu.mu_inv());

    MuFractionalReport r;
    r.lower.lhs = operator_norm(d_pos * m.adjoint() * c_neg);
    r.lower.rhs = std::pow(ni, alpha) * std::pow(nm, 1.0 - alpha);
    r.lower.holds = r.lower.lhs <= r.lower.rhs + tol.inequality_slack;
    r.upper.lhs = operator_norm(c_pos * mu.mu_inv().adjoint() * d_neg);
    r.upper.rhs = std::pow(nm, alpha) * std::pow(ni, 1.0 - alpha);
    r.upper.holds = r.upper.lhs <= r.upper.rhs + tol.inequality_slack;
    return r;
}

struct SandwichReport {
    double constant = 1.0;  // C = max(||mu||^2, ||mu^{-1}||^2)
    double margin_lower = 0.0;
    double margin_upper = 0.0;
    bool holds(const ToleranceConfig& tol = {}) const {
        return margin_lower >= -tol.inequality_slack && margin_upper >= -tol.inequality_slack;
    }
};

// C^{-1} mu^{-*}(1+D^2)^{-1}mu^{-1} <= (1+(mu D mu*)^2)^{-1} <= C mu^{-*}(1+D^2)^{-1}mu^{-1}
inline SandwichReport sandwich_check(const HermitianOperator& d, const ConformalFactor& mu,
                                     const ToleranceConfig& tol = {}) {
    if (mu.dim() != d.dim()) throw ParameterError("sandwich_check: dimension mismatch");
    const Mat& m = mu.mu();
    const Mat& mi = mu.mu_inv();
    SandwichReport r;
    r.constant = std::max(std::pow(operator_norm(m), 2), std::pow(operator_norm(mi), 2));
    const Mat res = bracket_power(d, -2.0).matrix();
    Mat base = mi.adjoint() * res * mi;
    base = 0.5 * (base + base.adjoint()).eval();
    const HermitianOperator conj(m * d.matrix() * m.adjoint(), d.tolerances());
    const Mat middle = bracket_power(conj, -2.0).matrix();
    r.margin_lower = psd_margin(middle - base / r.constant, tol);
    r.margin_upper = psd_margin(r.constant * base - middle, tol);
    return r;
}

// ||(F_{mu D mu*} - F_D) a mu <D>^beta||
inline double conformal_difference_norm(const HermitianOperator& d, const ConformalFactor& mu, const Mat& a,
                                        double beta) {
    if (mu.dim() != d.dim() || a.rows() != d.dim() || a.cols() != d.dim())
        throw ParameterError("conformal_difference_norm: dimension mismatch");
    const Mat& m = mu.mu();
    const HermitianOperator conj(m * d.matrix() * m.adjoint(), d.tolerances());
    const Mat diff = bounded_transform(conj).matrix() - bounded_transform(d).matrix();
    return operator_norm(diff * a * m * bracket_power(d, beta).matrix());
}

struct ConverseParts {
    ConformalFactor mu;
    HermitianOperator additive;  // T
    double residual = 0.0;       // ||D2 - (mu D1 mu* + T)||
};

// D2 = mu D1 mu* + T with mu = <D2>^{1/2} <D1>^{-1/2}, T = <D2>^{1/2}(F_{D2} - F_{D1})<D2>^{1/2}.
inline ConverseParts converse_decompose(const HermitianOperator& d1, const HermitianOperator& d2) {
    if (d1.dim() != d2.dim()) throw ParameterError("converse_decompose: dimension mismatch");
    const Index n = d1.dim();
    if (d1.matrix() == d2.matrix())
        return {ConformalFactor(Mat::Identity(n, n)), HermitianOperator(Mat::Zero(n, n), d2.tolerances()), 0.0};
    const Mat h2 = bracket_power(d2, 0.5).matrix();
    const Mat mu = h2 * bracket_power(d1, -0.5).matrix();
    const Mat fdiff = bounded_transform(d2).matrix() - bounded_transform(d1).matrix();
    const Mat t = h2 * fdiff * h2;
    ConverseParts parts{ConformalFactor(mu), HermitianOperator(0.5 * (t + t.adjoint()), d2.tolerances()), 0.0};
    parts.residual = operator_norm(d2.matrix() - (mu * d1.matrix() * mu.adjoint() + parts.additive.matrix()));
    const double scale = 1.0 + operator_norm(d2.matrix());
    if (!(parts.residual <= d2.tolerances().reconstruction_tol * scale))
        throw NumericalError(detail::cat("converse reconstruction residual ", parts.residual,
                                         " above tolerance; numerical breakdown"));
    return parts;
}

// Norms appearing in the converse statement for a caller-chosen alpha. They are
// reported, not classified: no constants are fixed for them.
struct ConverseDiagnostics {
    double premise;                 // ||(F_{D1} - F_{D2}) <D1>^alpha||
    double additive_two_sided;      // ||<D1>^{-1/2} T <D1>^{-1/2+alpha}||
    double commutator_remainder;    // ||([F_{D1}, mu] - T <D2>^{-1}) <D1>^alpha||
    double additive_one_sided;      // ||T <D1>^{-1+alpha}||
    double commutator;              // ||[F_{D1}, mu] <D1>^alpha||
};

inline ConverseDiagnostics converse_diagnostics(const HermitianOperator& d1, const HermitianOperator& d2,
                                                const ConverseParts& parts, double alpha) {
    const Mat f1 = bounded_transform(d1).matrix();
    const Mat f2 = bounded_transform(d2).matrix();
    const Mat w = bracket_power(d1, alpha).matrix();
    const Mat& t = parts.additive.matrix();
    const Mat c = commutator(f1, parts.mu.mu());
    ConverseDiagnostics g{};
    g.premise = operator_norm((f1 - f2) * w);
    g.additive_two_sided = operator_norm(bracket_power(d1, -0.5).matrix() * t * bracket_power(d1, alpha - 0.5).matrix());
    g.commutator_remainder = operator_norm((c - t * bracket_power(d2, -1.0).matrix()) * w);
    g.additive_one_sided = operator_norm(t * bracket_power(d1, alpha - 1.0).matrix());
    g.commutator = operator_norm(c * w);
    return g;
}

}  // namespace kkp
