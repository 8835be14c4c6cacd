#pragma once

// Peter-Weyl truncation of O(SU_q(2)) (spins l <= L), the Podles-sphere Dirac
// operator on the spinor sectors j = +-1/2, and the twisted adjoint actions.
//
// Half-integers are stored doubled: l2 = 2l, i2 = 2i, j2 = 2j.
// Haar weights: phi(t^{l*}_{ij} t^l_{ij}) = q^{-2i} / [2l+1]_q, all other pairings zero.

#include "sweep.hpp"
#include "transforms.hpp"

#include <array>
#include <map>
#include <tuple>

namespace kkp {

inline void check_q(double q) {
    if (!(q > 0.0 && q < 1.0)) throw ParameterError(detail::cat("q must lie in (0,1), got ", q));
}

// [x]_q = (q^x - q^{-x}) / (q - q^{-1}), for integer and half-integer x alike.
inline double q_number(double x, double q) {
    check_q(q);
    return (std::pow(q, x) - std::pow(q, -x)) / (q - 1.0 / q);
}

// kappa^l_k = sqrt([l+1/2]^2 - [k-1/2]^2), arguments doubled.
inline double kappa(int l2, int k2, double q) {
    const double top = q_number(0.5 * (l2 + 1), q);
    const double low = q_number(0.5 * (k2 - 1), q);
    const double rad = top * top - low * low;
    if (rad < -1e-12 * top * top)
        throw IndexError(detail::cat("kappa radicand negative for l = ", l2, "/2, k = ", k2, "/2"));
    return std::sqrt(std::max(rad, 0.0));
}

struct PeterWeylIndex {
    int l2 = 0, i2 = 0, j2 = 0;

    bool valid() const {
        return l2 >= 0 && std::abs(i2) <= l2 && std::abs(j2) <= l2 && (l2 - i2) % 2 == 0 && (l2 - j2) % 2 == 0;
    }
    friend bool operator==(const PeterWeylIndex&, const PeterWeylIndex&) = default;
};

class PodlesTruncation {
public:
    PodlesTruncation(int L2, double q) : L2_(L2), q_(q) {
        check_q(q);
        if (L2 < 1) throw ParameterError(detail::cat("Peter-Weyl cutoff must be at least 1/2, got ", L2, "/2"));
        Index off = 0;
        for (int l2 = 0; l2 <= L2; ++l2) {
            offset_.push_back(off);
            for (int i2 = -l2; i2 <= l2; i2 += 2)
                for (int j2 = -l2; j2 <= l2; j2 += 2) basis_.push_back({l2, i2, j2});
            off += static_cast<Index>(l2 + 1) * (l2 + 1);
        }
        weights_.resize(static_cast<Index>(basis_.size()));
        for (size_t k = 0; k < basis_.size(); ++k) {
            const auto& b = basis_[k];
            weights_(static_cast<Index>(k)) = std::pow(q, -b.i2) / q_number(b.l2 + 1, q);
            if (b.j2 == 1) s_plus_.push_back(static_cast<Index>(k));
            if (b.j2 == -1) s_minus_.push_back(static_cast<Index>(k));
        }
    }

    int L2() const { return L2_; }
    double q() const { return q_; }
    Index dim() const { return static_cast<Index>(basis_.size()); }
    const std::vector<PeterWeylIndex>& basis() const { return basis_; }
    const RVec& haar_weights() const { return weights_; }
    const std::vector<Index>& s_plus() const { return s_plus_; }
    const std::vector<Index>& s_minus() const { return s_minus_; }

    bool contains(const PeterWeylIndex& t) const { return t.valid() && t.l2 <= L2_; }
    Index index(const PeterWeylIndex& t) const {
        if (!contains(t)) throw IndexError(detail::cat("index (", t.l2, ",", t.i2, ",", t.j2, ")/2 outside truncation"));
        return offset_[t.l2] + static_cast<Index>((t.i2 + t.l2) / 2) * (t.l2 + 1) + (t.j2 + t.l2) / 2;
    }

    // Indices with l <= L - depth/2, where a word of degree `depth` cannot overflow.
    std::vector<Index> interior(int depth) const {
        std::vector<Index> out;
        for (size_t k = 0; k < basis_.size(); ++k)
            if (basis_[k].l2 <= L2_ - depth) out.push_back(static_cast<Index>(k));
        return out;
    }
    // S_+ then S_-, restricted to l <= L - depth/2.
    std::vector<Index> spinor_interior(int depth) const {
        std::vector<Index> out;
        for (Index k : s_plus_)
            if (basis_[k].l2 <= L2_ - depth) out.push_back(k);
        for (Index k : s_minus_)
            if (basis_[k].l2 <= L2_ - depth) out.push_back(k);
        return out;
    }

private:
    int L2_;
    double q_;
    std::vector<Index> offset_;
    std::vector<PeterWeylIndex> basis_;
    RVec weights_;
    std::vector<Index> s_plus_, s_minus_;
};

// ---- q-Clebsch-Gordan coefficients ----

// <1/2 s; l m | L, s+m> for coupling 1/2 (x) l, closed form. Zero off the ladder.
inline double qcg_half_left(int l2, int L2, int s2, int m2, double q) {
    if (std::abs(s2) != 1 || std::abs(m2) > l2 || (l2 - m2) % 2 != 0) return 0.0;
    if (L2 != l2 + 1 && L2 != l2 - 1) return 0.0;
    if (L2 < 0 || std::abs(s2 + m2) > L2) return 0.0;
    const double l = 0.5 * l2, M = 0.5 * (s2 + m2), n = q_number(l2 + 1, q);
    const double up = std::sqrt(q_number(l + M + 0.5, q) / n), dn = std::sqrt(q_number(l - M + 0.5, q) / n);
    if (L2 == l2 + 1)
        return s2 == 1 ? std::pow(q, -(l + 0.5 - M) / 2) * up : std::pow(q, (l + 0.5 + M) / 2) * dn;
    return s2 == 1 ? -std::pow(q, (l + 0.5 + M) / 2) * dn : std::pow(q, (M - l - 0.5) / 2) * up;
}

// <l m; 1/2 s | L, m+s> for coupling l (x) 1/2, closed form.
inline double qcg_half_right(int l2, int L2, int m2, int s2, double q) {
    if (std::abs(s2) != 1 || std::abs(m2) > l2 || (l2 - m2) % 2 != 0) return 0.0;
    if (L2 != l2 + 1 && L2 != l2 - 1) return 0.0;
    if (L2 < 0 || std::abs(s2 + m2) > L2) return 0.0;
    const double l = 0.5 * l2, M = 0.5 * (s2 + m2), n = q_number(l2 + 1, q);
    const double up = std::sqrt(q_number(l + M + 0.5, q) / n), dn = std::sqrt(q_number(l - M + 0.5, q) / n);
    if (L2 == l2 + 1)
        return s2 == 1 ? std::pow(q, (l + 0.5 - M) / 2) * up : std::pow(q, -(l + 0.5 + M) / 2) * dn;
    return s2 == 1 ? std::pow(q, -(l + 0.5 + M) / 2) * dn : -std::pow(q, (l + 0.5 - M) / 2) * up;
}

// Key (L2, m1_2, m2_2) for <l1 m1; l2 m2 | L, m1+m2>.
using QcgTable = std::map<std::tuple<int, int, int>, double>;

namespace detail {

struct Irrep {
    Eigen::MatrixXd k, k_inv, e, f;
};

// Spin l2/2 irrep on e_m, m ascending: K e_m = q^m e_m, E e_m = sqrt([l-m][l+m+1]) e_{m+1}.
inline Irrep irrep(int l2, double q) {
    const int n = l2 + 1;
    Irrep r{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n), {}};
    for (int p = 0; p < n; ++p) {
        const double m = 0.5 * (-l2 + 2 * p);
        r.k(p, p) = std::pow(q, m);
        r.k_inv(p, p) = std::pow(q, -m);
        if (p + 1 < n) r.e(p + 1, p) = std::sqrt(q_number(0.5 * l2 - m, q) * q_number(0.5 * l2 + m + 1, q));
    }
    r.f = r.e.transpose();
    return r;
}

inline Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

}  // namespace detail

// Numerical construction from the coproduct Delta(E) = E(x)K + K^{-1}(x)E: the highest
// weight vector of each L is the kernel of Delta(E) in its weight space (orthogonal to
// higher L), signed so its smallest-m1 component is positive, then lowered with Delta(F).
inline QcgTable qcg_numeric(int l1_2, int l2_2, double q) {
    check_q(q);
    const auto r1 = detail::irrep(l1_2, q), r2 = detail::irrep(l2_2, q);
    const Eigen::MatrixXd de = detail::kron(r1.e, r2.k) + detail::kron(r1.k_inv, r2.e);
    const Eigen::MatrixXd df = detail::kron(r1.f, r2.k) + detail::kron(r1.k_inv, r2.f);
    const int n1 = l1_2 + 1, n2 = l2_2 + 1;
    auto weight2 = [&](int p) { return (-l1_2 + 2 * (p / n2)) + (-l2_2 + 2 * (p % n2)); };
    std::vector<Eigen::VectorXd> found;
    QcgTable table;
    for (int big = l1_2 + l2_2; big >= std::abs(l1_2 - l2_2); big -= 2) {
        std::vector<int> idx;
        for (int p = 0; p < n1 * n2; ++p)
            if (weight2(p) == big) idx.push_back(p);
        std::vector<const Eigen::VectorXd*> same;
        for (const auto& v : found) {
            bool touches = false;
            for (int p : idx) touches = touches || v(p) != 0.0;
            if (touches) same.push_back(&v);
        }
        Eigen::MatrixXd sys(de.rows() + static_cast<Index>(same.size()), static_cast<Index>(idx.size()));
        for (size_t c = 0; c < idx.size(); ++c) {
            sys.block(0, static_cast<Index>(c), de.rows(), 1) = de.col(idx[c]);
            for (size_t s = 0; s < same.size(); ++s)
                sys(de.rows() + static_cast<Index>(s), static_cast<Index>(c)) = (*same[s])(idx[c]);
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys, Eigen::ComputeFullV);
        Eigen::VectorXd kern = svd.matrixV().col(static_cast<Index>(idx.size()) - 1);
        Eigen::VectorXd v = Eigen::VectorXd::Zero(n1 * n2);
        for (size_t c = 0; c < idx.size(); ++c) v(idx[c]) = kern(static_cast<Index>(c));
        for (int p : idx)
            if (std::abs(v(p)) > 1e-12) {
                if (v(p) < 0) v = -v;
                break;
            }
        const double L = 0.5 * big;
        for (int m2x = big;; m2x -= 2) {
            for (int p = 0; p < n1 * n2; ++p)
                if (v(p) != 0.0 && weight2(p) == m2x)
                    table[{big, -l1_2 + 2 * (p / n2), -l2_2 + 2 * (p % n2)}] = v(p);
            found.push_back(v);
            if (m2x == -big) break;
            const double m = 0.5 * m2x;
            v = df * v / std::sqrt(q_number(L + m, q) * q_number(L - m + 1, q));
            for (int p = 0; p < n1 * n2; ++p)
                if (std::abs(v(p)) < 1e-300) v(p) = 0.0;
        }
    }
    return table;
}

inline double qcg_lookup(const QcgTable& t, int L2, int m1_2, int m2_2) {
    auto it = t.find({L2, m1_2, m2_2});
    return it == t.end() ? 0.0 : it->second;
}

// ---- multiplication operators ----

enum class Side { left, right };

// Multiplication by t^l_{ij} on the truncated space (products landing above L are
// dropped). Spin 1/2 uses the closed-form coefficients; higher spins the numerical
// construction.
//   t^{l}_{s r} t^{l'}_{i j} = sum_L C^L(s,i) C^L(r,j) t^L_{s+i, r+j}
inline Mat pw_mult(const PodlesTruncation& tr, const PeterWeylIndex& g, Side side) {
    if (!g.valid()) throw IndexError("invalid Peter-Weyl index");
    const Index n = tr.dim();
    if (g.l2 == 0) return Mat::Identity(n, n);
    const double q = tr.q();
    Mat out = Mat::Zero(n, n);
    std::map<int, QcgTable> tables;
    for (Index k = 0; k < n; ++k) {
        const auto& b = tr.basis()[static_cast<size_t>(k)];
        for (int big = b.l2 + g.l2; big >= std::abs(b.l2 - g.l2); big -= 2) {
            if (big > tr.L2()) continue;
            double c1, c2;
            if (g.l2 == 1) {
                c1 = side == Side::left ? qcg_half_left(b.l2, big, g.i2, b.i2, q) : qcg_half_right(b.l2, big, b.i2, g.i2, q);
                c2 = side == Side::left ? qcg_half_left(b.l2, big, g.j2, b.j2, q) : qcg_half_right(b.l2, big, b.j2, g.j2, q);
            } else {
                auto it = tables.find(b.l2);
                if (it == tables.end())
                    it = tables.emplace(b.l2, side == Side::left ? qcg_numeric(g.l2, b.l2, q) : qcg_numeric(b.l2, g.l2, q))
                             .first;
                c1 = side == Side::left ? qcg_lookup(it->second, big, g.i2, b.i2) : qcg_lookup(it->second, big, b.i2, g.i2);
                c2 = side == Side::left ? qcg_lookup(it->second, big, g.j2, b.j2) : qcg_lookup(it->second, big, b.j2, g.j2);
            }
            if (c1 == 0.0 || c2 == 0.0) continue;
            out(tr.index({big, b.i2 + g.i2, b.j2 + g.j2}), k) += c1 * c2;
        }
    }
    return out;
}

// (t^l_{ij})* = (-q)^{j-i} t^l_{-i,-j}
inline double star_sign(const PeterWeylIndex& g, double q) { return std::pow(-q, 0.5 * (g.j2 - g.i2)); }

inline Mat pw_mult_star(const PodlesTruncation& tr, const PeterWeylIndex& g, Side side) {
    return star_sign(g, tr.q()) * pw_mult(tr, {g.l2, -g.i2, -g.j2}, side);
}

// a, b, c, d = t^{1/2}_{-,-}, t^{1/2}_{-,+}, t^{1/2}_{+,-}, t^{1/2}_{+,+}
inline PeterWeylIndex generator_index(char g) {
    switch (g) {
        case 'a': return {1, -1, -1};
        case 'b': return {1, -1, 1};
        case 'c': return {1, 1, -1};
        case 'd': return {1, 1, 1};
    }
    throw ParameterError(std::string("unknown SU_q(2) generator '") + g + "'");
}

inline Mat generator_mult(char g, Side side, const PodlesTruncation& tr) { return pw_mult(tr, generator_index(g), side); }

inline CVec unit_vector(const PodlesTruncation& tr) {
    CVec v = CVec::Zero(tr.dim());
    v(tr.index({0, 0, 0})) = 1.0;
    return v;
}

// Coefficient vector of x*.
inline CVec star_vector(const PodlesTruncation& tr, const CVec& v) {
    CVec w = CVec::Zero(tr.dim());
    for (Index k = 0; k < tr.dim(); ++k) {
        const auto& b = tr.basis()[static_cast<size_t>(k)];
        if (v(k) != cplx(0)) w(tr.index({b.l2, -b.i2, -b.j2})) += std::conj(v(k)) * star_sign(b, tr.q());
    }
    return w;
}

// Haar state of the element x(1): its t^0_{00} coefficient.
inline cplx haar_state(const PodlesTruncation& tr, const Mat& x) {
    const Index u = tr.index({0, 0, 0});
    return x(u, u);
}

inline cplx haar_inner(const PodlesTruncation& tr, const CVec& x, const CVec& y) {
    return (x.conjugate().array() * y.array() * tr.haar_weights().cast<cplx>().array()).sum();
}

// ---- derivations, K actions, Dirac operator ----

// d_E t^l_{ij} = kappa^l_{j+1} t^l_{i,j+1}
inline Mat derivative_e(const PodlesTruncation& tr) {
    Mat out = Mat::Zero(tr.dim(), tr.dim());
    for (Index k = 0; k < tr.dim(); ++k) {
        const auto& b = tr.basis()[static_cast<size_t>(k)];
        if (b.j2 + 2 <= b.l2) out(tr.index({b.l2, b.i2, b.j2 + 2}), k) = kappa(b.l2, b.j2 + 2, tr.q());
    }
    return out;
}

// d_F t^l_{ij} = kappa^l_j t^l_{i,j-1}
inline Mat derivative_f(const PodlesTruncation& tr) {
    Mat out = Mat::Zero(tr.dim(), tr.dim());
    for (Index k = 0; k < tr.dim(); ++k) {
        const auto& b = tr.basis()[static_cast<size_t>(k)];
        if (b.j2 - 2 >= -b.l2) out(tr.index({b.l2, b.i2, b.j2 - 2}), k) = kappa(b.l2, b.j2, tr.q());
    }
    return out;
}

struct KActions {
    Mat left, left_inv, right, right_inv;
};

// K acting from the left scales t^l_{ij} by q^j, from the right by q^i.
inline KActions k_actions(const PodlesTruncation& tr) {
    const Index n = tr.dim();
    KActions k{Mat::Zero(n, n), Mat::Zero(n, n), Mat::Zero(n, n), Mat::Zero(n, n)};
    for (Index p = 0; p < n; ++p) {
        const auto& b = tr.basis()[static_cast<size_t>(p)];
        k.left(p, p) = std::pow(tr.q(), 0.5 * b.j2);
        k.left_inv(p, p) = std::pow(tr.q(), -0.5 * b.j2);
        k.right(p, p) = std::pow(tr.q(), 0.5 * b.i2);
        k.right_inv(p, p) = std::pow(tr.q(), -0.5 * b.i2);
    }
    return k;
}

// X in the Haar-orthonormal frame: W^{1/2} X W^{-1/2}, restricted to rows x cols.
inline Mat haar_frame(const PodlesTruncation& tr, const Mat& x, const std::vector<Index>& rows,
                      const std::vector<Index>& cols) {
    Mat out = submatrix(x, rows, cols);
    const RVec& w = tr.haar_weights();
    for (size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) *= std::sqrt(w(rows[i]));
    for (size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Index>(j)) /= std::sqrt(w(cols[j]));
    return out;
}

inline std::vector<Index> all_indices(const PodlesTruncation& tr) {
    std::vector<Index> out(static_cast<size_t>(tr.dim()));
    for (Index k = 0; k < tr.dim(); ++k) out[static_cast<size_t>(k)] = k;
    return out;
}

// Podles-sphere generators A = c*c, B = a c*, B* = c d as left multiplications.
inline Mat podles_a(const PodlesTruncation& tr) {
    return pw_mult_star(tr, generator_index('c'), Side::left) * generator_mult('c', Side::left, tr);
}
inline Mat podles_b(const PodlesTruncation& tr) {
    return generator_mult('a', Side::left, tr) * pw_mult_star(tr, generator_index('c'), Side::left);
}
inline Mat podles_b_adj(const PodlesTruncation& tr) {
    return generator_mult('c', Side::left, tr) * generator_mult('d', Side::left, tr);
}

// D = offdiag(d_E, d_F) on S_+ (+) S_-, written in the Haar-orthonormal frame.
inline TruncatedTriple build_podles_dirac(const PodlesTruncation& tr, const ToleranceConfig& tol = {}) {
    std::vector<Index> spin = tr.s_plus();
    spin.insert(spin.end(), tr.s_minus().begin(), tr.s_minus().end());
    const Mat full = derivative_e(tr) + derivative_f(tr);
    const Mat d = haar_frame(tr, full, spin, spin);
    TruncatedTriple t{HermitianOperator(d, tol), {}, {}, detail::cat("podles(q=", tr.q(), ",L=", tr.L2(), "/2)")};
    t.generators.emplace_back("A", haar_frame(tr, podles_a(tr), spin, spin));
    t.generators.emplace_back("B", haar_frame(tr, podles_b(tr), spin, spin));
    t.generators.emplace_back("B*", haar_frame(tr, podles_b_adj(tr), spin, spin));
    for (size_t k = 0; k < spin.size(); ++k)
        if (tr.basis()[static_cast<size_t>(spin[k])].l2 <= tr.L2() - 2) t.interior_mask.push_back(static_cast<Index>(k));
    return t;
}

// ---- twisted adjoint action ----

// omega_z(t^l_{ij}): beta -> sum_k q^{-2zk} t^l_{ik} beta (t^l_{jk})*
inline Mat omega_action(const PodlesTruncation& tr, const PeterWeylIndex& g, double z) {
    if (!tr.contains(g)) throw IndexError("omega_action: index outside truncation");
    Mat out = Mat::Zero(tr.dim(), tr.dim());
    for (int k2 = -g.l2; k2 <= g.l2; k2 += 2)
        out += std::pow(tr.q(), -z * k2) * pw_mult(tr, {g.l2, g.i2, k2}, Side::left) *
               pw_mult_star(tr, {g.l2, g.j2, k2}, Side::right);
    return out;
}

// omega_z((t^l_{ij})*) by linearity through the star map.
inline Mat omega_action_star(const PodlesTruncation& tr, const PeterWeylIndex& g, double z) {
    return star_sign(g, tr.q()) * omega_action(tr, {g.l2, -g.i2, -g.j2}, z);
}

// ---- identity suites (residuals on the interior) ----

struct NamedResidual {
    std::string name;
    double value;
};

inline double column_residual(const Mat& x, const std::vector<Index>& cols) {
    return columns(x, cols).cwiseAbs().maxCoeff();
}

inline std::vector<NamedResidual> relation_residuals(const PodlesTruncation& tr) {
    const double q = tr.q();
    const Mat a = generator_mult('a', Side::left, tr), b = generator_mult('b', Side::left, tr);
    const Mat c = generator_mult('c', Side::left, tr), d = generator_mult('d', Side::left, tr);
    const Mat id = Mat::Identity(tr.dim(), tr.dim());
    const auto in = tr.interior(2);
    return {{"ab - q ba", column_residual(a * b - q * b * a, in)},
            {"ac - q ca", column_residual(a * c - q * c * a, in)},
            {"bd - q db", column_residual(b * d - q * d * b, in)},
            {"cd - q dc", column_residual(c * d - q * d * c, in)},
            {"bc - cb", column_residual(b * c - c * b, in)},
            {"ad - 1 - q bc", column_residual(a * d - id - q * b * c, in)},
            {"da - 1 - q^-1 bc", column_residual(d * a - id - b * c / q, in)}};
}

// Generator adjoints a* = d, b* = -q c, c* = -q^{-1} b, d* = a, read off the star map.
inline std::vector<NamedResidual> star_generator_residuals(const PodlesTruncation& tr) {
    const double q = tr.q();
    const CVec one = unit_vector(tr);
    auto vec = [&](char g) -> CVec { return generator_mult(g, Side::left, tr) * one; };
    return {{"a* - d", (star_vector(tr, vec('a')) - vec('d')).cwiseAbs().maxCoeff()},
            {"b* + q c", (star_vector(tr, vec('b')) + q * vec('c')).cwiseAbs().maxCoeff()},
            {"c* + b/q", (star_vector(tr, vec('c')) + vec('b') / q).cwiseAbs().maxCoeff()},
            {"d* - a", (star_vector(tr, vec('d')) - vec('a')).cwiseAbs().maxCoeff()}};
}

// d(g beta) = d(g)(K -> beta) + (K^{-1} -> g) d(beta) as operators, for g in {a,b,c,d}.
inline std::vector<NamedResidual> leibniz_residuals(const PodlesTruncation& tr) {
    const double q = tr.q();
    const Mat de = derivative_e(tr), df = derivative_f(tr);
    const KActions k = k_actions(tr);
    const auto in = tr.interior(1);
    std::vector<NamedResidual> out;
    for (char g : {'a', 'b', 'c', 'd'}) {
        const PeterWeylIndex t = generator_index(g);
        const Mat lg = pw_mult(tr, t, Side::left);
        const double kinv = std::pow(q, -0.5 * t.j2);  // K^{-1} -> t^l_{ij} = q^{-j} t^l_{ij}
        Mat de_g = Mat::Zero(tr.dim(), tr.dim()), df_g = Mat::Zero(tr.dim(), tr.dim());
        if (t.j2 + 2 <= t.l2) de_g = kappa(t.l2, t.j2 + 2, q) * pw_mult(tr, {t.l2, t.i2, t.j2 + 2}, Side::left);
        if (t.j2 - 2 >= -t.l2) df_g = kappa(t.l2, t.j2, q) * pw_mult(tr, {t.l2, t.i2, t.j2 - 2}, Side::left);
        out.push_back({std::string("E on ") + g, column_residual(de * lg - (de_g * k.left + kinv * lg * de), in)});
        out.push_back({std::string("F on ") + g, column_residual(df * lg - (df_g * k.left + kinv * lg * df), in)});
    }
    return out;
}

inline Mat word_operator(const PodlesTruncation& tr, const std::string& word) {
    Mat m = Mat::Identity(tr.dim(), tr.dim());
    for (char ch : word) m = m * generator_mult(ch, Side::left, tr);
    return m;
}

// d_E(x*) = -q d_F(x)* and d_F(x*) = -q^{-1} d_E(x)* on elements x = word(1).
inline double star_relation_residual(const PodlesTruncation& tr, const std::vector<std::string>& words) {
    const double q = tr.q();
    const Mat de = derivative_e(tr), df = derivative_f(tr);
    double worst = 0.0;
    for (const auto& w : words) {
        const CVec x = word_operator(tr, w) * unit_vector(tr);
        const CVec xs = star_vector(tr, x);
        worst = std::max(worst, (de * xs + q * star_vector(tr, df * x)).cwiseAbs().maxCoeff());
        worst = std::max(worst, (df * xs + star_vector(tr, de * x) / q).cwiseAbs().maxCoeff());
    }
    return worst;
}

// phi(alpha beta) = phi(beta (K^2 -> alpha <- K^2)) for alpha = word1(1), beta = word2(1).
inline double modular_residual(const PodlesTruncation& tr, const std::string& w1, const std::string& w2) {
    const Mat m1 = word_operator(tr, w1), m2 = word_operator(tr, w2);
    const CVec one = unit_vector(tr);
    CVec twisted = m1 * one;
    for (Index k = 0; k < tr.dim(); ++k) {
        const auto& b = tr.basis()[static_cast<size_t>(k)];
        twisted(k) *= std::pow(tr.q(), b.i2 + b.j2);
    }
    const Index u = tr.index({0, 0, 0});
    const cplx lhs = (m1 * m2 * one)(u);
    const cplx rhs = (m2 * twisted)(u);
    return std::abs(lhs - rhs);
}

// sum_j omega_0(t_{ij}) omega_1(t*_{i'j}) = left multiplication by omega_{-1}(t_{ii'})(1), l = 1/2.
inline double omega_composition_residual(const PodlesTruncation& tr) {
    const double q = tr.q();
    const auto in = tr.interior(4);
    double worst = 0.0;
    for (int i2 : {-1, 1})
        for (int ip2 : {-1, 1}) {
            Mat lhs = Mat::Zero(tr.dim(), tr.dim());
            for (int j2 : {-1, 1}) lhs += omega_action(tr, {1, i2, j2}, 0.0) * omega_action_star(tr, {1, ip2, j2}, 1.0);
            Mat rhs = Mat::Zero(tr.dim(), tr.dim());
            for (int k2 : {-1, 1})
                rhs += std::pow(q, k2) * pw_mult(tr, {1, i2, k2}, Side::left) * pw_mult_star(tr, {1, ip2, k2}, Side::left);
            worst = std::max(worst, column_residual(lhs - rhs, in));
            // The element omega_{-1}(t_{ii'})(1) itself.
            const CVec direct = omega_action(tr, {1, i2, ip2}, -1.0) * unit_vector(tr);
            worst = std::max(worst, (direct - rhs * unit_vector(tr)).cwiseAbs().maxCoeff());
        }
    return worst;
}

// <omega_z(alpha) beta, gamma> = <beta, omega_{2-z}(alpha*) gamma> for alpha = t^{1/2}_{ij}.
inline double omega_adjoint_residual(const PodlesTruncation& tr, double z) {
    const auto in = tr.interior(2);
    const Mat w = tr.haar_weights().cast<cplx>().asDiagonal();
    double worst = 0.0;
    for (int i2 : {-1, 1})
        for (int j2 : {-1, 1}) {
            const Mat a = omega_action(tr, {1, i2, j2}, z);
            const Mat b = omega_action_star(tr, {1, i2, j2}, 2.0 - z);
            worst = std::max(worst, submatrix(a.adjoint() * w - w * b, in, in).cwiseAbs().maxCoeff());
        }
    return worst;
}

// <D x, y> = <x, D y> in the Haar inner product, checked on the raw matrices.
inline double dirac_symmetry_residual(const PodlesTruncation& tr) {
    std::vector<Index> spin = tr.s_plus();
    spin.insert(spin.end(), tr.s_minus().begin(), tr.s_minus().end());
    const Mat d = derivative_e(tr) + derivative_f(tr);
    const Mat w = tr.haar_weights().cast<cplx>().asDiagonal();
    return submatrix(d.adjoint() * w - w * d, spin, spin).cwiseAbs().maxCoeff();
}

struct MuHalfReport {
    double display_plus;     // P_+ against (q^2 A, -B; -B*, 1 - A)
    double display_minus;    // P_- against (1 - q^2 A, B; B*, A)
    double resolution;       // P_+ + P_- - 1
    double idempotent_plus;  // P_+^2 - P_+
    double idempotent_minus;
    double two_projection;   // q^{1/2}P_+ + q^{-1/2}P_- against the display
    double spectrum;         // (mu - q^{1/2})(mu - q^{-1/2})
    double classical_gap;    // ||mu - 1|| on the interior
    double worst() const {
        return std::max({display_plus, display_minus, resolution, idempotent_plus, idempotent_minus, two_projection,
                         spectrum});
    }
};

// P_k = [t_{ik} t*_{jk}]_{i,j in {-1/2,1/2}} acting on two copies of the space.
inline MuHalfReport mu_half_check(const PodlesTruncation& tr) {
    if (tr.L2() < 3) throw ParameterError("mu_half_check needs L >= 3/2");
    const double q = tr.q();
    const Index n = tr.dim();
    auto proj = [&](int k2) {
        Mat p(2 * n, 2 * n);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                p.block(a * n, b * n, n, n) = pw_mult(tr, {1, 2 * a - 1, k2}, Side::left) *
                                              pw_mult_star(tr, {1, 2 * b - 1, k2}, Side::left);
        return p;
    };
    const Mat pp = proj(1), pm = proj(-1);
    const Mat A = podles_a(tr), B = podles_b(tr), Bs = podles_b_adj(tr), id = Mat::Identity(n, n);
    Mat dp(2 * n, 2 * n), dm(2 * n, 2 * n);
    dp << q * q * A, -B, -Bs, id - A;
    dm << id - q * q * A, B, Bs, A;
    auto lift = [&](const std::vector<Index>& v) {
        std::vector<Index> out(v);
        for (Index k : v) out.push_back(k + n);
        return out;
    };
    const auto in2 = lift(tr.interior(2)), in4 = lift(tr.interior(4));
    const Mat id2 = Mat::Identity(2 * n, 2 * n);
    const double sq = std::sqrt(q);
    const Mat mu = sq * pp + pm / sq;
    const Mat mu_display = sq * dp + dm / sq;
    MuHalfReport r{};
    r.display_plus = column_residual(pp - dp, in2);
    r.display_minus = column_residual(pm - dm, in2);
    r.resolution = column_residual(pp + pm - id2, in2);
    r.idempotent_plus = column_residual(pp * pp - pp, in4);
    r.idempotent_minus = column_residual(pm * pm - pm, in4);
    r.two_projection = column_residual(mu - mu_display, in2);
    r.spectrum = column_residual((mu - sq * id2) * (mu - id2 / sq), in4);
    r.classical_gap = operator_norm(submatrix(mu - id2, in2, in2));
    return r;
}

// ---- twisted commutators ----

enum class Derivation { e, f };

// ||d omega_z(g) - omega_{z+1}(g) d|| on interior spinors, Haar-orthonormal frame.
inline double twisted_commutator_norm(const PodlesTruncation& tr, const PeterWeylIndex& g, double z,
                                      Derivation which = Derivation::e) {
    const Mat d = which == Derivation::e ? derivative_e(tr) : derivative_f(tr);
    const Mat x = d * omega_action(tr, g, z) - omega_action(tr, g, z + 1.0) * d;
    return operator_norm(haar_frame(tr, x, all_indices(tr), tr.spinor_interior(2 * g.l2)));
}

// ||d L_g - L_g d|| on the same columns: the contrast without the twist.
inline double untwisted_commutator_norm(const PodlesTruncation& tr, const PeterWeylIndex& g,
                                        Derivation which = Derivation::e) {
    const Mat d = which == Derivation::e ? derivative_e(tr) : derivative_f(tr);
    const Mat lg = pw_mult(tr, g, Side::left);
    return operator_norm(haar_frame(tr, d * lg - lg * d, all_indices(tr), tr.spinor_interior(g.l2)));
}

// Parameter is L itself (half-integers, as doubles).
inline SweepReport twisted_commutator_sweep(const PeterWeylIndex& g, double z, double q,
                                            const std::vector<double>& l_values, std::uint64_t seed = 0,
                                            const std::string& config_hash = "", unsigned workers = 1) {
    const std::string name = detail::cat("podles_twisted_commutator(l=", g.l2, "/2,i=", g.i2, "/2,j=", g.j2,
                                         "/2;z=", detail::num(z), ";q=", detail::num(q), ")");
    return run_sweep(name, "L", l_values,
                     [&](double L) {
                         return twisted_commutator_norm(PodlesTruncation(static_cast<int>(std::lround(2 * L)), q), g, z);
                     },
                     seed, config_hash, workers);
}

inline SweepReport untwisted_commutator_sweep(const PeterWeylIndex& g, double q, const std::vector<double>& l_values,
                                              std::uint64_t seed = 0, const std::string& config_hash = "", unsigned workers = 1) {
    const std::string name =
        detail::cat("podles_untwisted_commutator(l=", g.l2, "/2,i=", g.i2, "/2,j=", g.j2, "/2;q=", detail::num(q), ")");
    return run_sweep(name, "L", l_values,
                     [&](double L) {
                         return untwisted_commutator_norm(PodlesTruncation(static_cast<int>(std::lround(2 * L)), q), g);
                     },
                     seed, config_hash, workers);
}

}  // namespace kkp
