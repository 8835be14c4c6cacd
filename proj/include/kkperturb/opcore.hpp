#pragma once

// Dense complex Hermitian linear algebra shared by every other header.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kkp {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using Index = Eigen::Index;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericalError : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct PreconditionError : Error { using Error::Error; };
struct ParameterError : Error { using Error::Error; };
struct SizeError : Error { using Error::Error; };
struct IndexError : Error { using Error::Error; };

namespace detail {
template <class... Args>
std::string cat(const Args&... args) {
    std::ostringstream os;
    os.precision(17);
    (os << ... << args);
    return os.str();
}

// Short form for names and labels.
inline std::string num(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}
}  // namespace detail

struct ToleranceConfig {
    double hermitian_tol = 1e-8;
    double reconstruction_tol = 1e-9;
    double inequality_slack = 1e-9;
    double quadrature_rel_tol = 1e-6;

    void validate() const {
        if (!(hermitian_tol > 0 && reconstruction_tol > 0 && inequality_slack > 0 &&
              quadrature_rel_tol > 0))
            throw ParameterError("tolerances must be strictly positive");
        if (inequality_slack > 1e-6)
            throw ParameterError(detail::cat("inequality_slack ", inequality_slack, " exceeds 1e-6"));
    }
};

inline bool all_finite(const Mat& m) { return m.allFinite(); }

// Largest singular value.
inline double operator_norm(const Mat& m) {
    if (m.size() == 0) return 0.0;
    if (m.rows() == 1 || m.cols() == 1) return m.norm();
    Eigen::BDCSVD<Mat> svd(m);
    return svd.singularValues()(0);
}

struct EigenDecomposition {
    RVec eigenvalues;  // ascending
    Mat vectors;       // columns are eigenvectors
    double residual = 0.0;  // ||H - U diag U*||_F
};

class HermitianOperator {
public:
    explicit HermitianOperator(const Mat& m, const ToleranceConfig& tol = {}) : tol_(tol) {
        if (m.rows() < 1 || m.rows() != m.cols())
            throw ParameterError(detail::cat("Hermitian operator needs a square matrix, got ",
                                             m.rows(), "x", m.cols()));
        if (!all_finite(m)) throw DomainError("Hermitian operator has non-finite entries");
        Mat adj = m.adjoint();
        asymmetry_ = (m - adj).norm();
        double scale = m.norm();
        if (asymmetry_ > tol.hermitian_tol * scale)
            throw DomainError(detail::cat("matrix is not Hermitian: ||M - M*||_F = ", asymmetry_,
                                          " against ||M||_F = ", scale));
        matrix_ = std::make_shared<const Mat>(0.5 * (m + adj));
        cache_ = std::make_shared<Cache>();
    }

    const Mat& matrix() const { return *matrix_; }
    Index dim() const { return matrix_->rows(); }
    double asymmetry() const { return asymmetry_; }
    const ToleranceConfig& tolerances() const { return tol_; }

    // Computed on first use; copies share the cache.
    const EigenDecomposition& eig() const {
        std::call_once(cache_->once, [this] { cache_->value = compute(); });
        return cache_->value;
    }

private:
    struct Cache {
        std::once_flag once;
        EigenDecomposition value;
    };

    EigenDecomposition compute() const {
        const Mat& h = *matrix_;
        Eigen::SelfAdjointEigenSolver<Mat> solver(h);
        EigenDecomposition out;
        if (solver.info() != Eigen::Success) {
            throw NumericalError(detail::cat("Hermitian eigensolver did not converge (dim ", h.rows(),
                                             ", ||H||_F = ", h.norm(), ")"));
        }
        out.eigenvalues = solver.eigenvalues();
        out.vectors = solver.eigenvectors();
        out.residual =
            (h - out.vectors * out.eigenvalues.cast<cplx>().asDiagonal() * out.vectors.adjoint()).norm();
        if (!(out.residual <= tol_.reconstruction_tol * (1.0 + h.norm())))
            throw NumericalError(detail::cat("eigendecomposition residual ", out.residual,
                                             " above tolerance for dim ", h.rows()));
        return out;
    }

    std::shared_ptr<const Mat> matrix_;
    std::shared_ptr<Cache> cache_;
    double asymmetry_ = 0.0;
    ToleranceConfig tol_;
};

inline const EigenDecomposition& hermitian_eig(const HermitianOperator& h) { return h.eig(); }

// U f(Λ) U*.
inline HermitianOperator apply_function(const HermitianOperator& h,
                                        const std::function<double(double)>& f) {
    const auto& e = h.eig();
    RVec fv(e.eigenvalues.size());
    for (Index k = 0; k < fv.size(); ++k) {
        double x = e.eigenvalues(k);
        double y = f(x);
        if (!std::isfinite(y))
            throw DomainError(detail::cat("function is not finite at eigenvalue ", x));
        fv(k) = y;
    }
    Mat out = e.vectors * fv.cast<cplx>().asDiagonal() * e.vectors.adjoint();
    return HermitianOperator(0.5 * (out + out.adjoint()), h.tolerances());
}

struct SingularProfile {
    RVec values;                       // nonincreasing
    std::optional<double> decay_rate;  // empty when fewer than two usable points
};

// Slope of log sigma_k against log k (k counted from 1) over k >= 2, skipping
// numerically zero values. Values are sorted nonincreasing first.
inline SingularProfile singular_profile_from_values(std::vector<double> values, Index ambient_dim) {
    std::sort(values.begin(), values.end(), std::greater<>());
    SingularProfile p;
    p.values = RVec::Map(values.data(), static_cast<Index>(values.size()));
    if (values.size() < 2) return p;
    double floor = values[0] * std::numeric_limits<double>::epsilon() * static_cast<double>(ambient_dim);
    std::vector<double> xs, ys;
    for (size_t k = 1; k < values.size(); ++k) {
        if (values[k] > floor && values[k] > 0) {
            xs.push_back(std::log(static_cast<double>(k + 1)));
            ys.push_back(std::log(values[k]));
        }
    }
    if (xs.size() < 2) return p;
    double n = static_cast<double>(xs.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    p.decay_rate = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return p;
}

inline SingularProfile singular_profile(const Mat& m) {
    if (m.size() == 0) return {};
    Eigen::BDCSVD<Mat> svd(m);
    const RVec& sv = svd.singularValues();
    return singular_profile_from_values(std::vector<double>(sv.data(), sv.data() + sv.size()),
                                        std::max(m.rows(), m.cols()));
}

// Smallest eigenvalue of (M + M*)/2. A <= B is checked as psd_margin(B - A) >= -slack.
inline double psd_margin(const Mat& m, const ToleranceConfig& tol = {}) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw ParameterError("psd_margin needs a non-empty square matrix");
    Mat adj = m.adjoint();
    double asym = (m - adj).norm();
    if (asym > tol.hermitian_tol * m.norm())
        throw DomainError(detail::cat("psd_margin input is not Hermitian: ||M - M*||_F = ", asym));
    Mat sym = 0.5 * (m + adj);
    Eigen::SelfAdjointEigenSolver<Mat> solver(sym, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalError("psd_margin eigensolver failed");
    return solver.eigenvalues()(0);
}

inline Mat identity(Index n) { return Mat::Identity(n, n); }

inline Mat diagonal(const std::vector<double>& d) {
    Mat m = Mat::Zero(static_cast<Index>(d.size()), static_cast<Index>(d.size()));
    for (size_t i = 0; i < d.size(); ++i) m(static_cast<Index>(i), static_cast<Index>(i)) = d[i];
    return m;
}

inline Mat commutator(const Mat& a, const Mat& b) { return a * b - b * a; }

// Algebra generators and a Dirac matrix at finite truncation. interior_mask lists the
// basis indices whose images under the generators are not clipped by the cutoff.
struct TruncatedTriple {
    HermitianOperator dirac;
    std::vector<std::pair<std::string, Mat>> generators;
    std::vector<Index> interior_mask;
    std::string label;

    const Mat& generator(const std::string& name) const {
        for (const auto& [n, m] : generators)
            if (n == name) return m;
        throw ParameterError("no generator named '" + name + "' in " + label);
    }
};

// Columns of m selected by idx.
inline Mat columns(const Mat& m, const std::vector<Index>& idx) {
    Mat out(m.rows(), static_cast<Index>(idx.size()));
    for (size_t k = 0; k < idx.size(); ++k) out.col(static_cast<Index>(k)) = m.col(idx[k]);
    return out;
}

// Submatrix m(rows, cols).
inline Mat submatrix(const Mat& m, const std::vector<Index>& rows, const std::vector<Index>& cols) {
    Mat out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
    for (size_t j = 0; j < cols.size(); ++j)
        for (size_t i = 0; i < rows.size(); ++i)
            out(static_cast<Index>(i), static_cast<Index>(j)) = m(rows[i], cols[j]);
    return out;
}

}  // namespace kkp
