#pragma once

// Seeded verification suites and geometry sweeps, each producing a ReportDocument
// whose check rows say pass or fail.

#include "heisenberg.hpp"
#include "podles.hpp"
#include "report.hpp"
#include "torus.hpp"

#include <numbers>

namespace kkp {

namespace detail {

inline ReportDocument start_document(RunConfig& cfg) {
    ReportDocument d;
    d.suite = cfg.suite;
    d.seed = cfg.seed;
    d.config = cfg.canonical();
    d.config_hash = config_hash(cfg);
    return d;
}

inline std::string draw_label(int i) { return "draw=" + std::to_string(i); }

inline double log_uniform(Rng& rng, double lo, double hi) {
    return std::exp(rng.uniform(std::log(lo), std::log(hi)));
}

// Records a sweep together with a check that it reached the expected trend.
inline void add_sweep(ReportDocument& d, SweepReport s, Trend expected) {
    const bool ok = !s.failure && s.classification == expected;
    d.checks.push_back({s.observable + " expect " + to_string(expected), "slope", s.slope, ok});
    d.sweeps.push_back(std::move(s));
}

}  // namespace detail

// ---- perturbation and transform suites ----

inline ReportDocument verify_interpolation(std::uint64_t seed, int draws, const ToleranceConfig& tol = {}) {
    RunConfig cfg{"verify-interpolation", seed, tol, {{"draws", draws}, {"max_dim", 12}, {"max_cond", 100}}, {}};
    ReportDocument doc = detail::start_document(cfg);
    Rng rng(seed);
    const double alphas[] = {0.25, 0.5, 0.75, 1.0};
    for (int i = 0; i < draws; ++i) {
        const Index n = rng.uniform_int(1, 12);
        const double alpha = alphas[rng.uniform_int(0, 3)];
        const HermitianOperator a(random_positive(n, detail::log_uniform(rng, 1.0, 100.0), rng,
                                                  detail::log_uniform(rng, 0.1, 10.0)), tol);
        const HermitianOperator b(random_positive(n, detail::log_uniform(rng, 1.0, 100.0), rng,
                                                  detail::log_uniform(rng, 0.1, 10.0)), tol);
        const Mat t = random_complex(n, n, rng);
        const auto r = interpolation_check(a, b, t, alpha, tol);
        doc.checks.push_back({"interpolation rhs-lhs", detail::draw_label(i), r.rhs - r.lhs, r.holds});
    }
    return doc;
}

inline ReportDocument verify_stampfli(std::uint64_t seed, int draws, const ToleranceConfig& tol = {}) {
    RunConfig cfg{"verify-stampfli", seed, tol, {{"draws", draws}, {"max_dim", 6}}, {}};
    ReportDocument doc = detail::start_document(cfg);
    Rng rng(seed);
    for (int i = 0; i < draws; ++i) {
        const Index n = rng.uniform_int(1, 6);
        Mat a = random_positive(n, detail::log_uniform(rng, 1.0, 100.0), rng, detail::log_uniform(rng, 0.1, 10.0));
        Mat b = random_positive(n, detail::log_uniform(rng, 1.0, 100.0), rng, detail::log_uniform(rng, 0.1, 10.0));
        if (n >= 2 && rng.uniform() < 0.1) {
            // A singular positive operator, to exercise the zero convention.
            Mat u = random_unitary(n, rng);
            RVec s = log_uniform_spectrum(n, 1.0, 10.0, rng);
            s(0) = 0.0;
            a = u * s.cast<cplx>().asDiagonal() * u.adjoint();
            a = 0.5 * (a + a.adjoint()).eval();
        }
        const double exact = inner_derivation_norm_exact(a, b);
        const double bound = stampfli_bound(a, b, tol);
        doc.checks.push_back({"stampfli bound-exact", detail::draw_label(i), bound - exact,
                              bound - exact >= -tol.inequality_slack});
    }
    const Mat a = diagonal({1, 2}), b = diagonal({3, 5});
    const double exact = inner_derivation_norm_exact(a, b), bound = stampfli_bound(a, b, tol);
    const double gap = std::max(std::abs(exact - 4.0), std::abs(bound - 4.0));
    doc.checks.push_back({"stampfli witness diag(1,2)/diag(3,5) equals 4", "witness", gap, gap < 1e-12});
    return doc;
}

inline ReportDocument verify_sandwich(std::uint64_t seed, int draws, const ToleranceConfig& tol = {}) {
    RunConfig cfg{"verify-sandwich", seed, tol, {{"draws", draws}, {"max_dim", 12}, {"max_cond_mu", 20}}, {}};
    ReportDocument doc = detail::start_document(cfg);
    Rng rng(seed);
    const double alphas[] = {0.25, 0.5, 0.75};
    for (int i = 0; i < draws; ++i) {
        const Index n = rng.uniform_int(1, 12);
        const HermitianOperator d(random_hermitian(n, rng, detail::log_uniform(rng, 0.1, 10.0)), tol);
        const ConformalFactor mu(random_invertible(n, detail::log_uniform(rng, 1.0, 20.0), rng));
        const auto s = sandwich_check(d, mu, tol);
        doc.checks.push_back({"sandwich margin", detail::draw_label(i), std::min(s.margin_lower, s.margin_upper),
                              s.holds(tol)});
        const auto f = mu_fractional_bounds_check(d, mu, alphas[rng.uniform_int(0, 2)], tol);
        doc.checks.push_back({"mu fractional rhs-lhs", detail::draw_label(i),
                              std::min(f.lower.rhs - f.lower.lhs, f.upper.rhs - f.upper.lhs), f.holds()});
    }
    return doc;
}

inline ReportDocument verify_quadrature(std::uint64_t seed, int draws, const ToleranceConfig& tol = {}) {
    RunConfig cfg{"verify-quadrature", seed, tol, {{"draws", draws}, {"max_dim", 64}}, {}};
    ReportDocument doc = detail::start_document(cfg);
    Rng rng(seed);
    const double alphas[] = {0.25, 0.5, 0.75};
    for (int i = 0; i < draws; ++i) {
        const Index n = rng.uniform_int(1, 64);
        const double alpha = alphas[rng.uniform_int(0, 2)];
        const HermitianOperator d(random_hermitian(n, rng, detail::log_uniform(rng, 0.1, 30.0)), tol);
        const Mat exact = bracket_power(d, -2.0 * alpha).matrix();
        try {
            const auto q = resolvent_power_quadrature(d, alpha, {}, tol);
            const double rel = operator_norm(q.value.matrix() - exact) / operator_norm(exact);
            doc.checks.push_back({"quadrature relative error", detail::draw_label(i), rel, rel < tol.quadrature_rel_tol});
        } catch (const QuadratureError& e) {
            doc.checks.push_back({"quadrature relative error", detail::draw_label(i), e.achieved, false});
        }
    }
    return doc;
}

inline ReportDocument verify_converse(std::uint64_t seed, int draws, const ToleranceConfig& tol = {}) {
    RunConfig cfg{"verify-converse", seed, tol, {{"draws", draws}, {"max_dim", 12}}, {}};
    ReportDocument doc = detail::start_document(cfg);
    Rng rng(seed);
    for (int i = 0; i < draws; ++i) {
        const Index n = rng.uniform_int(1, 12);
        const HermitianOperator d1(random_hermitian(n, rng, detail::log_uniform(rng, 0.1, 10.0)), tol);
        const HermitianOperator d2(random_hermitian(n, rng, detail::log_uniform(rng, 0.1, 10.0)), tol);
        const auto parts = converse_decompose(d1, d2);
        doc.checks.push_back({"converse reconstruction residual", detail::draw_label(i), parts.residual,
                              parts.residual < 1e-8});
    }
    const HermitianOperator d(random_hermitian(6, rng), tol);
    const auto same = converse_decompose(d, d);
    const bool exact = same.mu.mu() == Mat::Identity(6, 6) && same.additive.matrix() == Mat::Zero(6, 6);
    doc.checks.push_back({"converse D2 = D1 gives mu = 1, T = 0", "identical", exact ? 0.0 : 1.0, exact});
    return doc;
}

// ---- torus ----

struct TorusSuiteParams {
    double theta = std::numbers::phi - 1.0;
    cplx tau{0.0, 1.0};
    std::vector<double> n_list{8, 12, 16, 20, 24};
    double beta = 0.5;
    KSpec k;
};

inline ReportDocument torus_suite(const TorusSuiteParams& p, std::uint64_t seed = 0, unsigned workers = 1,
                                  const ToleranceConfig& tol = {}) {
    RunConfig cfg{"torus", seed, tol,
                  {{"theta", p.theta}, {"tau", {p.tau.real(), p.tau.imag()}}, {"n_list", p.n_list},
                   {"beta", p.beta}, {"k", {p.k.c0, p.k.cu, p.k.cv}}},
                  {}};
    ReportDocument doc = detail::start_document(cfg);
    detail::add_sweep(doc, torus_difference_sweep(p.theta, p.tau, p.k, p.beta, p.n_list, seed, doc.config_hash, workers),
                      Trend::bounded_plateau);
    detail::add_sweep(doc, torus_commutator_sweep(p.theta, p.tau, p.n_list, seed, doc.config_hash, workers),
                      Trend::bounded_plateau);
    for (double nv : p.n_list) {
        const int n = static_cast<int>(nv);
        const TorusBasis b(n, p.theta);
        const std::string label = "N=" + std::to_string(n);
        if (nv == p.n_list.front()) {
            const auto pair = torus_conformal_pair(b, p.tau, p.k, tol);
            doc.checks.push_back({"torus D_k - kDk identity residual", label, pair.identity_residual,
                                  pair.identity_residual < 1e-10});
        }
        if (n >= 16 && p.k.cv == 0.0) {
            const auto diff = torus_difference_profile(b, p.tau, p.k, tol);
            const double ds = diff.decay_rate.value_or(0.0);
            doc.checks.push_back({"torus difference singular decay", label, ds, diff.decay_rate && ds <= -0.4});
            const auto res = torus_resolvent_profile(b, p.tau);
            const double rs = res.decay_rate.value_or(0.0);
            doc.checks.push_back({"torus resolvent singular decay", label, rs, res.decay_rate && rs <= -0.9});
        }
    }
    return doc;
}

// ---- Podles sphere ----

enum class PodlesSuite { relations, omega, mu, twisted };

inline PodlesSuite podles_suite_from_string(const std::string& s) {
    if (s == "relations") return PodlesSuite::relations;
    if (s == "omega") return PodlesSuite::omega;
    if (s == "mu") return PodlesSuite::mu;
    if (s == "twisted") return PodlesSuite::twisted;
    throw ParameterError("unknown podles suite '" + s + "'");
}

inline const char* to_string(PodlesSuite s) {
    switch (s) {
        case PodlesSuite::relations: return "relations";
        case PodlesSuite::omega: return "omega";
        case PodlesSuite::mu: return "mu";
        case PodlesSuite::twisted: return "twisted";
    }
    return "?";
}

struct PodlesSuiteParams {
    std::vector<double> q_values{0.5, 0.8};
    double l_max = 3.0;  // twisted sweeps use the half-integers 3/2, 5/2, ... up to l_max
    std::string generators = "a";
    double z = 0.0;
};

namespace detail {

inline std::string random_word(Rng& rng, int max_len) {
    static const char letters[] = {'a', 'b', 'c', 'd'};
    const int len = rng.uniform_int(1, max_len);
    std::string w;
    for (int k = 0; k < len; ++k) w += letters[rng.uniform_int(0, 3)];
    return w;
}

inline void podles_relations(ReportDocument& doc, const PodlesTruncation& tr, Rng& rng, const std::string& tag) {
    for (const auto& r : relation_residuals(tr))
        doc.checks.push_back({"podles relation " + r.name, tag, r.value, r.value < 1e-9});
    for (const auto& r : star_generator_residuals(tr))
        doc.checks.push_back({"podles adjoint " + r.name, tag, r.value, r.value < 1e-9});
    for (const auto& r : leibniz_residuals(tr))
        doc.checks.push_back({"podles twisted Leibniz " + r.name, tag, r.value, r.value < 1e-9});
    std::vector<std::string> words;
    for (char x : std::string("abcd")) {
        words.emplace_back(1, x);
        for (char y : std::string("abcd")) words.push_back(std::string{x, y});
    }
    const double star = star_relation_residual(tr, words);
    doc.checks.push_back({"podles star relation dE(x*) = -q dF(x)*", tag, star, star < 1e-8});
    double modular = 0.0;
    for (int k = 0; k < 50; ++k) modular = std::max(modular, modular_residual(tr, random_word(rng, 3), random_word(rng, 3)));
    doc.checks.push_back({"podles Haar modular property (50 words)", tag, modular, modular < 1e-9});
    const double sym = dirac_symmetry_residual(tr);
    doc.checks.push_back({"podles D Haar symmetry", tag, sym, sym < 1e-9});
    const cplx one = haar_state(tr, Mat::Identity(tr.dim(), tr.dim()));
    doc.checks.push_back({"podles Haar state of 1", tag, std::abs(one - 1.0), std::abs(one - 1.0) < 1e-12});
    const cplx pa = haar_state(tr, podles_a(tr));
    const bool pa_ok = std::abs(pa.imag()) < 1e-12 && pa.real() > 0.0 && pa.real() < 1.0;
    doc.checks.push_back({"podles Haar state of A in (0,1)", tag, pa.real(), pa_ok});
}

inline void podles_omega(ReportDocument& doc, const PodlesTruncation& tr, const std::string& tag) {
    const double comp = omega_composition_residual(tr);
    doc.checks.push_back({"podles omega composition", tag, comp, comp < 1e-8});
    for (double z : {0.0, 0.5, 1.3}) {
        const double adj = omega_adjoint_residual(tr, z);
        doc.checks.push_back({"podles omega adjoint z=" + detail::num(z), tag, adj, adj < 1e-8});
    }
    const double unit =
        (omega_action(tr, {0, 0, 0}, 0.7) - Mat::Identity(tr.dim(), tr.dim())).cwiseAbs().maxCoeff();
    doc.checks.push_back({"podles omega of unit", tag, unit, unit < 1e-12});
}

inline void podles_mu(ReportDocument& doc, const PodlesTruncation& tr, const std::string& tag) {
    const auto r = mu_half_check(tr);
    const std::pair<const char*, double> rows[] = {
        {"P+ display", r.display_plus},       {"P- display", r.display_minus},
        {"P+ + P- = 1", r.resolution},        {"P+ idempotent", r.idempotent_plus},
        {"P- idempotent", r.idempotent_minus}, {"mu^1/2 two-projection form", r.two_projection}};
    for (const auto& [name, v] : rows) doc.checks.push_back({std::string("podles ") + name, tag, v, v < 1e-9});
    doc.checks.push_back({"podles mu^1/2 spectrum in {q^1/2, q^-1/2}", tag, r.spectrum, r.spectrum < 1e-8});
}

}  // namespace detail

inline std::vector<double> half_integer_ladder(double from, double to) {
    std::vector<double> out;
    for (double l = from; l <= to + 1e-9; l += 1.0) out.push_back(l);
    return out;
}

inline ReportDocument podles_suite(PodlesSuite which, const PodlesSuiteParams& p, std::uint64_t seed = 0,
                                   unsigned workers = 1, const ToleranceConfig& tol = {}) {
    RunConfig cfg{std::string("podles-") + to_string(which), seed, tol,
                  {{"q", p.q_values}, {"l_max", p.l_max}, {"generators", p.generators}, {"z", p.z}}, {}};
    ReportDocument doc = detail::start_document(cfg);
    Rng rng(seed);
    const int L2 = static_cast<int>(std::lround(2.0 * p.l_max));
    if (std::abs(2.0 * p.l_max - L2) > 1e-9 || L2 < 1)
        throw ParameterError(detail::cat("l-max must be a positive half-integer, got ", p.l_max));
    for (double q : p.q_values) {
        const std::string tag = "q=" + detail::num(q) + ",L=" + detail::num(p.l_max);
        switch (which) {
            case PodlesSuite::relations: detail::podles_relations(doc, PodlesTruncation(L2, q), rng, tag); break;
            case PodlesSuite::omega: detail::podles_omega(doc, PodlesTruncation(L2, q), tag); break;
            case PodlesSuite::mu: detail::podles_mu(doc, PodlesTruncation(L2, q), tag); break;
            case PodlesSuite::twisted: {
                const auto ladder = half_integer_ladder(1.5, p.l_max);
                for (char g : p.generators) {
                    if (g == ',') continue;
                    const PeterWeylIndex idx = generator_index(g);
                    detail::add_sweep(doc, twisted_commutator_sweep(idx, p.z, q, ladder, seed, doc.config_hash, workers),
                                      Trend::bounded_plateau);
                    detail::add_sweep(doc, untwisted_commutator_sweep(idx, q, ladder, seed, doc.config_hash, workers),
                                      Trend::divergent);
                }
                break;
            }
        }
    }
    return doc;
}

// ---- Heisenberg ----

struct HeisenbergSuiteParams {
    std::vector<double> radii{10, 20, 40, 80};
    std::vector<HeisPoint> generators = heis_generators();
    double exponent = -0.25;
    double contrast_exponent = -0.125;
    std::vector<std::int64_t> dilations{1, 2, 3};
    std::int64_t dilation_radius = 20;
};

inline std::string to_string(const HeisPoint& g) { return detail::cat("(", g.a, ",", g.b, ",", g.c, ")"); }

inline ReportDocument heisenberg_suite(const HeisenbergSuiteParams& p, std::uint64_t seed = 0, unsigned workers = 1,
                                       const ToleranceConfig& tol = {}) {
    Json gens = Json::array();
    for (const auto& g : p.generators) gens.push_back({g.a, g.b, g.c});
    RunConfig cfg{"heisenberg", seed, tol,
                  {{"radii", p.radii}, {"generators", gens}, {"exponent", p.exponent},
                   {"contrast_exponent", p.contrast_exponent}, {"dilations", p.dilations},
                   {"dilation_radius", p.dilation_radius}},
                  {}};
    ReportDocument doc = detail::start_document(cfg);
    for (std::int64_t t : p.dilations) {
        const auto r = dilation_check(t, p.dilation_radius);
        const std::string tag = "t=" + std::to_string(t);
        doc.checks.push_back({"heisenberg exact dilation mismatches", tag, double(r.exact_mismatches),
                              r.exact_mismatches == 0});
        const double scale = double(t * t) * std::pow(double(p.dilation_radius), 2.0) + 1.0;
        doc.checks.push_back({"heisenberg dilation float residual", tag, r.max_residual,
                              r.max_residual <= 1e-14 * scale});
        const double norm_err = std::abs(r.normalization - 1.0 / double(t * t));
        doc.checks.push_back({"heisenberg lattice index t^4", tag, double(r.lattice_index),
                              r.lattice_index == t * t * t * t && norm_err < 1e-15});
    }
    for (const auto& g : p.generators) {
        SweepReport s = commutator_bound_sweep(g, p.radii, p.exponent, seed, doc.config_hash, workers);
        bool monotone = !s.failure && s.values.size() >= 2;
        for (size_t i = 1; monotone && i < s.values.size(); ++i) monotone = s.values[i] >= s.values[i - 1];
        const double ratio = s.values.size() >= 2 && s.values[s.values.size() - 2] > 0
                                 ? s.values.back() / s.values[s.values.size() - 2]
                                 : 1.0;
        doc.checks.push_back({s.observable + " nondecreasing, last ratio < 1.05", to_string(g), ratio,
                              monotone && ratio < 1.05});
        detail::add_sweep(doc, std::move(s), Trend::bounded_plateau);
        if (g.a != 0 || g.b != 0)
            detail::add_sweep(doc, commutator_bound_sweep(g, p.radii, p.contrast_exponent, seed, doc.config_hash, workers),
                              Trend::divergent);
    }
    return doc;
}

// ---- logarithmic dampening on the circle ----

struct LogDampenParams {
    double kappa = 2.0;
    std::vector<double> n_list{64, 128, 256, 512};
};

// ||L_{kappa D} - L_D|| per N; the largest N is held to [log kappa - 0.01, log kappa + 1e-6].
inline ReportDocument log_dampen_suite(const LogDampenParams& p, std::uint64_t seed = 0, unsigned workers = 1,
                                       const ToleranceConfig& tol = {}) {
    RunConfig cfg{"log-dampen", seed, tol, {{"kappa", p.kappa}, {"n_list", p.n_list}}, {}};
    ReportDocument doc = detail::start_document(cfg);
    SweepReport s = run_sweep(detail::cat("log_dampening_gap(kappa=", p.kappa, ")"), "N", p.n_list,
                              [&](double n) { return log_dampening_gap(static_cast<int>(n), p.kappa, tol); }, seed,
                              doc.config_hash, workers);
    if (!s.failure) {
        const double v = s.values.back(), target = std::log(p.kappa);
        doc.checks.push_back({"log dampening gap within [log kappa - 0.01, log kappa + 1e-6]",
                              "N=" + format_double(s.parameter_values.back()), v,
                              v >= target - 0.01 && v <= target + 1e-6});
    }
    detail::add_sweep(doc, std::move(s), Trend::bounded_plateau);
    return doc;
}

}  // namespace kkp
