#include <kkperturb/podles.hpp>
#include <kkperturb/random.hpp>

#include <gtest/gtest.h>

using namespace kkp;

namespace {

// Left multiplication by the adjoint of a generator: a* = d, b* = -q c, c* = -b/q, d* = a.
Mat star_generator(const PodlesTruncation& tr, char g) {
    const double q = tr.q();
    switch (g) {
        case 'a': return generator_mult('d', Side::left, tr);
        case 'b': return -q * generator_mult('c', Side::left, tr);
        case 'c': return -generator_mult('b', Side::left, tr) / q;
        default: return generator_mult('a', Side::left, tr);
    }
}

double max_abs(const CVec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

TEST(QNumbers, Examples) {
    EXPECT_DOUBLE_EQ(q_number(0, 0.5), 0.0);
    EXPECT_NEAR(q_number(1, 0.5), 1.0, 1e-15);
    EXPECT_NEAR(q_number(2, 0.5), 2.5, 1e-15);
    EXPECT_NEAR(q_number(2, 0.999), 2.0, 1e-5);
    EXPECT_NEAR(q_number(0.5, 0.5), (std::sqrt(0.5) - std::sqrt(2.0)) / (0.5 - 2.0), 1e-15);
    EXPECT_THROW(q_number(1, 1.0), ParameterError);
    EXPECT_THROW(q_number(1, 0.0), ParameterError);
}

TEST(Kappa, Examples) {
    for (double q : {0.3, 0.5, 0.8}) {
        EXPECT_NEAR(kappa(1, 1, q), 1.0, 1e-14);        // l = 1/2, k = 1/2
        EXPECT_NEAR(kappa(3, 1, q), q_number(2, q), 1e-14);  // l = 3/2, k = 1/2
        for (int l2 = 1; l2 <= 7; ++l2) EXPECT_EQ(kappa(l2, l2 + 2, q), 0.0);
    }
    EXPECT_THROW(kappa(1, 5, 0.5), IndexError);
}

TEST(Kappa, HalfIntegerQNumbersEnterThroughTheFormula) {
    // k = 1 and k = 0 at l = 1/2 both give sqrt([1]^2 - [1/2]^2), since [-1/2] = -[1/2].
    const double q = 0.5, half = q_number(0.5, q);
    EXPECT_NEAR(kappa(1, 2, q), std::sqrt(1.0 - half * half), 1e-15);
    EXPECT_NEAR(kappa(1, 0, q), kappa(1, 2, q), 1e-15);
    EXPECT_NEAR(q_number(-0.5, q), -half, 1e-15);
}

TEST(Kappa, ClassicalLimit) {
    const double q = 0.999;
    for (int l2 = 1; l2 <= 7; l2 += 2)
        for (int k2 = -l2 + 2; k2 <= l2; k2 += 2) {
            const double l = 0.5 * l2, k = 0.5 * k2;
            EXPECT_NEAR(kappa(l2, k2, q), std::sqrt((l + 0.5) * (l + 0.5) - (k - 0.5) * (k - 0.5)), 2e-3);
        }
}

TEST(Truncation, BasisAndSectors) {
    const PodlesTruncation tr(3, 0.5);
    EXPECT_EQ(tr.dim(), 1 + 4 + 9 + 16);
    for (Index k = 0; k < tr.dim(); ++k) EXPECT_EQ(tr.index(tr.basis()[static_cast<size_t>(k)]), k);
    EXPECT_EQ(tr.s_plus().size(), 2u + 4u);
    EXPECT_EQ(tr.s_minus().size(), 2u + 4u);
    for (Index k = 0; k < tr.dim(); ++k) EXPECT_GT(tr.haar_weights()(k), 0.0);
    EXPECT_THROW(tr.index({5, 1, 1}), IndexError);
    EXPECT_THROW(PodlesTruncation(0, 0.5), ParameterError);
}

TEST(QClebschGordan, ClosedFormMatchesCoproductConstruction) {
    for (double q : {0.5, 0.8}) {
        for (int l2 = 0; l2 <= 8; ++l2) {
            const QcgTable left = qcg_numeric(1, l2, q), right = qcg_numeric(l2, 1, q);
            for (int big : {l2 - 1, l2 + 1}) {
                if (big < 0) continue;
                for (int s2 : {-1, 1})
                    for (int m2 = -l2; m2 <= l2; m2 += 2) {
                        EXPECT_NEAR(qcg_half_left(l2, big, s2, m2, q), qcg_lookup(left, big, s2, m2), 1e-12)
                            << "q=" << q << " l2=" << l2 << " L2=" << big << " s2=" << s2 << " m2=" << m2;
                        EXPECT_NEAR(qcg_half_right(l2, big, m2, s2, q), qcg_lookup(right, big, m2, s2), 1e-12)
                            << "q=" << q << " l2=" << l2 << " L2=" << big << " s2=" << s2 << " m2=" << m2;
                    }
            }
        }
    }
}

TEST(QClebschGordan, CouplingMatrixIsOrthogonal) {
    for (double q : {0.5, 0.8})
        for (auto [l1, l2] : {std::pair{1, 1}, std::pair{2, 3}, std::pair{4, 2}}) {
            const QcgTable t = qcg_numeric(l1, l2, q);
            const int n = (l1 + 1) * (l2 + 1);
            Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
            int row = 0;
            for (int big = l1 + l2; big >= std::abs(l1 - l2); big -= 2)
                for (int M = -big; M <= big; M += 2, ++row)
                    for (int m1 = -l1; m1 <= l1; m1 += 2) {
                        const int m2 = M - m1;
                        if (std::abs(m2) > l2) continue;
                        c(row, ((m1 + l1) / 2) * (l2 + 1) + (m2 + l2) / 2) = qcg_lookup(t, big, m1, m2);
                    }
            EXPECT_LT((c * c.transpose() - Eigen::MatrixXd::Identity(n, n)).norm(), 1e-12);
        }
}

TEST(Multiplication, GeneratorOnUnitAndHigherSpinProduct) {
    const PodlesTruncation tr(6, 0.5);
    const CVec one = unit_vector(tr);
    const CVec a1 = generator_mult('a', Side::left, tr) * one;
    EXPECT_NEAR(std::abs(a1(tr.index({1, -1, -1})) - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(a1.norm(), 1.0, 1e-15);
    // a^2 is the extremal spin-1 element: closed-form spin-1/2 route against the numerical spin-1 table.
    const Mat a = generator_mult('a', Side::left, tr);
    const auto in = tr.interior(2);
    EXPECT_LT(column_residual(a * a - pw_mult(tr, {2, -2, -2}, Side::left), in), 1e-13);
    const Mat d = generator_mult('d', Side::left, tr);
    EXPECT_LT(column_residual(d * d - pw_mult(tr, {2, 2, 2}, Side::left), in), 1e-13);
}

TEST(Relations, HoldOnInteriorForBothDeformations) {
    for (double q : {0.5, 0.8}) {
        const PodlesTruncation tr(6, q);
        for (const auto& r : relation_residuals(tr)) EXPECT_LT(r.value, 1e-9) << q << " " << r.name;
        for (const auto& r : star_generator_residuals(tr)) EXPECT_LT(r.value, 1e-12) << q << " " << r.name;
    }
}

TEST(Relations, RightMultiplicationIsOppositeAlgebra) {
    // R(x) R(y) = R(yx): ab = q ba becomes R(b)R(a) = q R(a)R(b).
    const double q = 0.6;
    const PodlesTruncation tr(6, q);
    const Mat a = generator_mult('a', Side::right, tr), b = generator_mult('b', Side::right, tr);
    const Mat c = generator_mult('c', Side::right, tr), d = generator_mult('d', Side::right, tr);
    const Mat id = Mat::Identity(tr.dim(), tr.dim());
    const auto in = tr.interior(2);
    EXPECT_LT(column_residual(b * a - q * a * b, in), 1e-10);
    EXPECT_LT(column_residual(c * a - q * a * c, in), 1e-10);
    EXPECT_LT(column_residual(d * a - id - q * c * b, in), 1e-10);
    for (char l : {'a', 'b', 'c', 'd'})
        for (char r : {'a', 'b', 'c', 'd'}) {
            const Mat comm = commutator(generator_mult(l, Side::left, tr), generator_mult(r, Side::right, tr));
            EXPECT_LT(column_residual(comm, in), 1e-10) << l << r;
        }
}

TEST(Haar, StateValuesAndPositivity) {
    for (double q : {0.5, 0.8}) {
        const PodlesTruncation tr(6, q);
        EXPECT_NEAR(std::abs(haar_state(tr, Mat::Identity(tr.dim(), tr.dim())) - 1.0), 0.0, 1e-15);
        const cplx phi_a = haar_state(tr, podles_a(tr));
        EXPECT_GT(phi_a.real(), 0.0);
        EXPECT_LT(phi_a.real(), 1.0);
        EXPECT_LT(std::abs(phi_a.imag()), 1e-15);
        // phi(c* c) against the weighted norm of c(1).
        const CVec c1 = generator_mult('c', Side::left, tr) * unit_vector(tr);
        EXPECT_NEAR(std::abs(phi_a - haar_inner(tr, c1, c1)), 0.0, 1e-14);
    }
}

TEST(Haar, WeightsReproduceStateOfProducts) {
    // phi(x* x) from the algebra (adjoint word times word, read at the unit) against
    // the weighted inner product of the coefficient vectors.
    Rng rng(3);
    for (double q : {0.5, 0.8}) {
        const PodlesTruncation tr(6, q);
        for (int draw = 0; draw < 30; ++draw) {
            std::string w;
            for (int k = rng.uniform_int(1, 3); k > 0; --k) w += "abcd"[rng.uniform_int(0, 3)];
            Mat x_star = Mat::Identity(tr.dim(), tr.dim());
            for (auto it = w.rbegin(); it != w.rend(); ++it) x_star = x_star * star_generator(tr, *it);
            const Mat x = word_operator(tr, w);
            const CVec v = x * unit_vector(tr);
            EXPECT_NEAR(std::abs(haar_state(tr, x_star * x) - haar_inner(tr, v, v)), 0.0, 1e-12) << w;
            EXPECT_GT(haar_inner(tr, v, v).real(), 0.0);
        }
    }
}

TEST(Haar, ModularProperty) {
    Rng rng(4);
    const PodlesTruncation tr(6, 0.5);
    auto word = [&] {
        std::string w;
        for (int k = rng.uniform_int(1, 3); k > 0; --k) w += "abcd"[rng.uniform_int(0, 3)];
        return w;
    };
    for (int k = 0; k < 50; ++k) EXPECT_LT(modular_residual(tr, word(), word()), 1e-9);
}

TEST(StarMap, IsInvolution) {
    Rng rng(5);
    const PodlesTruncation tr(4, 0.7);
    const CVec v = random_complex(tr.dim(), 1, rng);
    EXPECT_LT(max_abs(star_vector(tr, star_vector(tr, v)) - v), 1e-14);
}

TEST(Derivations, TwistedLeibnizAndStarRelations) {
    for (double q : {0.5, 0.8}) {
        const PodlesTruncation tr(6, q);
        for (const auto& r : leibniz_residuals(tr)) EXPECT_LT(r.value, 1e-9) << q << " " << r.name;
        EXPECT_LT(star_relation_residual(tr, {"a", "b", "c", "d", "ab", "cd", "ac", "bd", "abc", "dca"}), 1e-8);
    }
}

TEST(KActions, InverseAndScaling) {
    const PodlesTruncation tr(3, 0.5);
    const KActions k = k_actions(tr);
    const Mat id = Mat::Identity(tr.dim(), tr.dim());
    EXPECT_LT((k.left * k.left_inv - id).norm(), 1e-14);
    EXPECT_LT((k.right * k.right_inv - id).norm(), 1e-14);
    EXPECT_NEAR(k.left(tr.index({1, -1, 1}), tr.index({1, -1, 1})).real(), std::sqrt(0.5), 1e-15);
    EXPECT_NEAR(k.left(tr.index({0, 0, 0}), tr.index({0, 0, 0})).real(), 1.0, 1e-15);
}

TEST(Dirac, SpectrumIsQuantumHalfIntegers) {
    for (double q : {0.5, 0.8, 0.999}) {
        const PodlesTruncation tr(5, q);
        const auto t = build_podles_dirac(tr);
        std::vector<double> expect;
        for (int l2 = 1; l2 <= 5; l2 += 2)
            for (int copies = 0; copies < l2 + 1; ++copies) {
                expect.push_back(q_number(0.5 * (l2 + 1), q));
                expect.push_back(-q_number(0.5 * (l2 + 1), q));
            }
        std::sort(expect.begin(), expect.end());
        const auto& ev = t.dirac.eig().eigenvalues;
        ASSERT_EQ(ev.size(), static_cast<Index>(expect.size()));
        for (Index k = 0; k < ev.size(); ++k) EXPECT_NEAR(ev(k), expect[static_cast<size_t>(k)], 1e-12) << q;
        if (q == 0.999) EXPECT_NEAR(ev(ev.size() - 1), 3.0, 1e-3);
    }
}

TEST(Dirac, SymmetricInHaarInnerProduct) {
    for (double q : {0.5, 0.8}) EXPECT_LT(dirac_symmetry_residual(PodlesTruncation(6, q)), 1e-12);
}

TEST(Omega, UnitActsAsIdentity) {
    const PodlesTruncation tr(3, 0.5);
    EXPECT_LT((omega_action(tr, {0, 0, 0}, 0.3) - Mat::Identity(tr.dim(), tr.dim())).norm(), 1e-15);
}

TEST(Omega, CompositionAndAdjointIdentities) {
    for (double q : {0.5, 0.8}) {
        const PodlesTruncation tr(6, q);
        EXPECT_LT(omega_composition_residual(tr), 1e-9) << q;
        for (double z : {0.0, 0.5, 1.0}) EXPECT_LT(omega_adjoint_residual(tr, z), 1e-9) << q << " z=" << z;
    }
}

TEST(Omega, StarFormulaMatchesStarOfCoefficients) {
    // omega_z is linear in its argument, and the star of t^l_{ij} is (-q)^{j-i} t^l_{-i,-j}.
    const PodlesTruncation tr(4, 0.6);
    for (int i2 : {-1, 1})
        for (int j2 : {-1, 1}) {
            const PeterWeylIndex g{1, i2, j2};
            CVec coeff = CVec::Zero(tr.dim());
            coeff(tr.index(g)) = 1.0;
            const CVec star = star_vector(tr, coeff);
            Mat by_coeff = Mat::Zero(tr.dim(), tr.dim());
            for (Index k = 0; k < tr.dim(); ++k)
                if (star(k) != cplx(0)) by_coeff += star(k) * omega_action(tr, tr.basis()[static_cast<size_t>(k)], 0.4);
            EXPECT_LT((omega_action_star(tr, g, 0.4) - by_coeff).norm(), 1e-14);
        }
}

TEST(MuHalf, ProjectionIdentities) {
    for (double q : {0.5, 0.8}) {
        const auto r = mu_half_check(PodlesTruncation(6, q));
        EXPECT_LT(r.worst(), 1e-9) << q;
        EXPECT_GT(r.classical_gap, 0.05);
    }
    EXPECT_THROW(mu_half_check(PodlesTruncation(2, 0.5)), ParameterError);
}

TEST(MuHalf, ClassicalLimitApproachesIdentity) {
    const auto r = mu_half_check(PodlesTruncation(5, 0.999));
    EXPECT_LT(r.classical_gap, 1e-3);
    EXPECT_LT(r.worst(), 1e-9);
}

TEST(TwistedCommutator, UnitIsZero) {
    const PodlesTruncation tr(5, 0.5);
    EXPECT_LT(twisted_commutator_norm(tr, {0, 0, 0}, 0.0), 1e-15);
    EXPECT_LT(untwisted_commutator_norm(tr, {0, 0, 0}), 1e-15);
}

TEST(TwistedCommutator, TwistedPlateauUntwistedDivergent) {
    const std::vector<double> ladder{1.5, 2.5, 3.5, 4.5};
    const auto tw = twisted_commutator_sweep(generator_index('a'), 0.0, 0.5, ladder);
    ASSERT_FALSE(tw.failure.has_value());
    EXPECT_EQ(tw.classification, Trend::bounded_plateau) << tw.slope;
    for (size_t k = 1; k < tw.values.size(); ++k) EXPECT_LT(tw.values[k], 0.5);
    const auto un = untwisted_commutator_sweep(generator_index('a'), 0.5, ladder);
    ASSERT_FALSE(un.failure.has_value());
    EXPECT_EQ(un.classification, Trend::divergent) << un.slope;
}

TEST(TwistedCommutator, FDerivationAlsoBounded) {
    std::vector<double> values;
    for (int L2 : {3, 5, 7}) values.push_back(twisted_commutator_norm(PodlesTruncation(L2, 0.5), generator_index('a'), 0.0, Derivation::f));
    for (double v : values) EXPECT_TRUE(std::isfinite(v));
    EXPECT_LT(top_half_slope({1.5, 2.5, 3.5}, values), 0.3);
}
