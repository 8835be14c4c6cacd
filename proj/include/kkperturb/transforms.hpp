#pragma once

// Bounded and logarithmic transforms, fractional resolvent powers by quadrature,
// and weighted commutator norms.

#include "opcore.hpp"

#include <numbers>
#include <utility>

namespace kkp {

struct ExponentParams {
    double alpha = 0.0;
    double beta = 0.0;

    void validate() const {
        if (!(alpha >= 0.0 && alpha < 1.0))
            throw ParameterError(detail::cat("alpha must lie in [0,1), got ", alpha));
    }
};

namespace scalar {
inline double bounded(double x) { return x / std::sqrt(1.0 + x * x); }
inline double bracket(double x) { return std::sqrt(1.0 + x * x); }
inline double bracket_power(double x, double s) { return std::pow(1.0 + x * x, 0.5 * s); }
inline double log_transform(double x) { return bounded(x) * 0.5 * std::log1p(x * x); }
}  // namespace scalar

// F_D = D (1 + D^2)^{-1/2}
inline HermitianOperator bounded_transform(const HermitianOperator& d) {
    return apply_function(d, scalar::bounded);
}

// L_D = F_D log<D>
inline HermitianOperator log_transform(const HermitianOperator& d) {
    return apply_function(d, scalar::log_transform);
}

// <D>^s = (1 + D^2)^{s/2}
inline HermitianOperator bracket_power(const HermitianOperator& d, double s) {
    return apply_function(d, [s](double x) { return scalar::bracket_power(x, s); });
}

enum class QuadratureRule { adaptive, fixed_log_grid };

struct QuadratureSpec {
    QuadratureRule rule = QuadratureRule::adaptive;
    int nodes = 32;
    double lambda_cap = 1e12;
    int max_doublings = 10;

    void validate() const {
        if (nodes < 8) throw ParameterError(detail::cat("quadrature needs at least 8 nodes, got ", nodes));
        if (!(lambda_cap > 1.0)) throw ParameterError("lambda_cap must exceed 1");
    }
};

struct QuadratureResult {
    HermitianOperator value;
    double error_estimate;  // relative, in operator norm
    int nodes_used;
};

struct QuadratureError : Error {
    QuadratureError(const std::string& what, double estimate) : Error(what), achieved(estimate) {}
    double achieved;
};

namespace detail {

// Trapezoid rule in t = log(lambda) on [-T, T] with n intervals, plus the leading
// terms of both tails. Every node is one Cholesky solve of (lambda + 1 + D^2).
inline Mat resolvent_power_trapezoid(const Mat& one_plus_d2, const Mat& inv_one_plus_d2, double alpha,
                                     double t_max, int n) {
    const Index dim = one_plus_d2.rows();
    const Mat id = Mat::Identity(dim, dim);
    Mat acc = Mat::Zero(dim, dim);
    const double h = 2.0 * t_max / n;
    for (int k = 0; k <= n; ++k) {
        double t = -t_max + h * k;
        double lam = std::exp(t);
        double w = (k == 0 || k == n) ? 0.5 : 1.0;
        Mat shifted = one_plus_d2 + lam * id;
        Eigen::LLT<Mat> llt(shifted);
        acc += (w * h * std::exp((1.0 - alpha) * t)) * llt.solve(id);
    }
    acc += (std::exp(-alpha * t_max) / alpha) * id;
    acc += (std::exp(-(1.0 - alpha) * t_max) / (1.0 - alpha)) * inv_one_plus_d2;
    return std::sin(alpha * std::numbers::pi) / std::numbers::pi * acc;
}

}  // namespace detail

// Unchecked fixed-grid evaluation, for convergence studies.
inline Mat resolvent_power_fixed(const HermitianOperator& d, double alpha, int nodes, double lambda_cap) {
    const Mat& dm = d.matrix();
    const Index dim = dm.rows();
    Mat one_plus_d2 = Mat::Identity(dim, dim) + dm * dm;
    Mat inv = Eigen::LLT<Mat>(one_plus_d2).solve(Mat::Identity(dim, dim));
    return detail::resolvent_power_trapezoid(one_plus_d2, inv, alpha, std::log(lambda_cap), nodes);
}

// (1 + D^2)^{-alpha} = sin(alpha pi)/pi * int_0^inf lambda^{-alpha} (lambda + 1 + D^2)^{-1} dlambda
inline QuadratureResult resolvent_power_quadrature(const HermitianOperator& d, double alpha,
                                                   const QuadratureSpec& spec = {},
                                                   const ToleranceConfig& tol = {}) {
    spec.validate();
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ParameterError(detail::cat("quadrature exponent must lie in (0,1), got ", alpha));
    const Mat& dm = d.matrix();
    const Index dim = dm.rows();
    Mat one_plus_d2 = Mat::Identity(dim, dim) + dm * dm;
    one_plus_d2 = 0.5 * (one_plus_d2 + one_plus_d2.adjoint()).eval();
    Mat inv = Eigen::LLT<Mat>(one_plus_d2).solve(Mat::Identity(dim, dim));

    const double t_max = std::log(spec.lambda_cap);
    // Remainders after the leading tail terms; c ranges over the spectrum of 1 + D^2.
    const double c_max = operator_norm(one_plus_d2);
    const double pref = std::sin(alpha * std::numbers::pi) / std::numbers::pi;
    double tail = 0.0;
    if (c_max < spec.lambda_cap)
        tail += c_max * std::exp(-(1.0 + alpha) * t_max) / (1.0 + alpha);
    else
        tail += std::numeric_limits<double>::infinity();
    tail += std::exp(-(2.0 - alpha) * t_max) / (2.0 - alpha);
    tail *= pref;

    int n = spec.nodes;
    const Mat base = detail::resolvent_power_trapezoid(one_plus_d2, inv, alpha, t_max, n);
    Mat prev = base;
    Mat cur = base;
    int doublings = spec.rule == QuadratureRule::adaptive ? spec.max_doublings : 1;
    double estimate = std::numeric_limits<double>::infinity();
    for (int step = 0; step < doublings; ++step) {
        cur = detail::resolvent_power_trapezoid(one_plus_d2, inv, alpha, t_max, 2 * n);
        estimate = (operator_norm(cur - prev) + tail) / operator_norm(cur);
        if (spec.rule == QuadratureRule::fixed_log_grid) break;
        n *= 2;
        if (estimate < tol.quadrature_rel_tol) break;
        prev = cur;
    }
    if (spec.rule == QuadratureRule::fixed_log_grid) cur = base;  // the doubled grid only served the estimate
    if (!(estimate < tol.quadrature_rel_tol))
        throw QuadratureError(detail::cat("quadrature did not reach relative tolerance ",
                                          tol.quadrature_rel_tol, "; achieved estimate ", estimate),
                              estimate);
    return {HermitianOperator(0.5 * (cur + cur.adjoint()), d.tolerances()), estimate, n};
}

// ||(F a - a F) <D>^beta||
inline double weighted_commutator_norm(const Mat& f, const Mat& a, const HermitianOperator& d, double beta) {
    if (f.rows() != a.rows() || a.rows() != d.dim() || f.cols() != a.cols())
        throw ParameterError("weighted_commutator_norm: dimension mismatch");
    return operator_norm(commutator(f, a) * bracket_power(d, beta).matrix());
}

// (||[D,a] <D>^{-alpha}||, ||<D>^{-alpha} [D,a]||)
inline std::pair<double, double> lipschitz_alpha_norm(const HermitianOperator& d, const Mat& a, double alpha) {
    if (a.rows() != d.dim() || a.cols() != d.dim())
        throw ParameterError("lipschitz_alpha_norm: dimension mismatch");
    Mat c = commutator(d.matrix(), a);
    Mat w = bracket_power(d, -alpha).matrix();
    return {operator_norm(c * w), operator_norm(w * c)};
}

}  // namespace kkp
