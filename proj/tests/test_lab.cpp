#include <kkperturb/suites.hpp>

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace kkp;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("kkperturb_test_lab_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(RunSweep, ConstantSequenceIsPlateau) {
    const auto r = run_sweep("const", "N", {1, 2, 3, 4}, [](double) { return 5.0; });
    EXPECT_EQ(r.slope, 0.0);
    EXPECT_EQ(r.classification, Trend::bounded_plateau);
    EXPECT_EQ(r.values.size(), r.parameter_values.size());
}

TEST(RunSweep, LinearSequenceIsDivergent) {
    const auto r = run_sweep("linear", "N", {8, 16, 32, 64}, [](double n) { return n; });
    EXPECT_NEAR(r.slope, 1.0, 1e-12);
    EXPECT_EQ(r.classification, Trend::divergent);
}

TEST(RunSweep, ThreePlusInverseIsPlateau) {
    const std::vector<double> ns{8, 16, 32, 64};
    const auto r = run_sweep("3+1/N", "N", ns, [](double n) { return 3.0 + 1.0 / n; });
    // Closed-form fit over the top half (N = 32, 64): two points, so the slope is exact.
    const double expect = (std::log(3.0 + 1.0 / 64) - std::log(3.0 + 1.0 / 32)) / std::log(2.0);
    EXPECT_NEAR(r.slope, expect, 1e-12);
    EXPECT_EQ(r.classification, Trend::bounded_plateau);
}

TEST(RunSweep, Preconditions) {
    auto f = [](double) { return 1.0; };
    EXPECT_THROW(run_sweep("x", "N", {1, 2}, f), PreconditionError);
    EXPECT_THROW(run_sweep("x", "N", {1, 3, 2}, f), PreconditionError);
    EXPECT_THROW(run_sweep("x", "N", {0, 1, 2}, f), PreconditionError);
}

TEST(RunSweep, FailureGivesPartialReport) {
    const auto r = run_sweep("fragile", "N", {1, 2, 3, 4}, [](double n) {
        if (n > 2.5) throw NumericalError("boom");
        return n;
    });
    ASSERT_TRUE(r.failure.has_value());
    EXPECT_NE(r.failure->find("failed at N=3"), std::string::npos) << *r.failure;
    EXPECT_EQ(r.values.size(), 2u);
    EXPECT_EQ(r.classification, Trend::inconclusive);
}

TEST(RunSweep, NegativeValueIsFailure) {
    const auto r = run_sweep("neg", "N", {1, 2, 3}, [](double n) { return n > 1.5 ? -1.0 : 1.0; });
    ASSERT_TRUE(r.failure.has_value());
    EXPECT_EQ(r.values.size(), 1u);
}

TEST(RunSweep, ConcurrentWorkersGiveSameReport) {
    auto f = [](double n) { return std::sqrt(n) + std::sin(n); };
    const std::vector<double> ns{2, 3, 5, 7, 11, 13, 17};
    const auto serial = run_sweep("f", "N", ns, f, 3, "h", 1);
    const auto parallel = run_sweep("f", "N", ns, f, 3, "h", 3);
    EXPECT_EQ(serial.values, parallel.values);
    EXPECT_EQ(serial.slope, parallel.slope);
}

TEST(Classification, Thresholds) {
    EXPECT_EQ(classify_slope(0.05), Trend::bounded_plateau);
    EXPECT_EQ(classify_slope(0.0500001), Trend::inconclusive);
    EXPECT_EQ(classify_slope(0.3), Trend::divergent);
    EXPECT_EQ(classify_slope(-2.0), Trend::bounded_plateau);
    for (Trend t : {Trend::bounded_plateau, Trend::divergent, Trend::inconclusive})
        EXPECT_EQ(trend_from_string(to_string(t)), t);
    EXPECT_THROW(trend_from_string("flat"), ParameterError);
}

TEST(Classification, ZeroValues) {
    EXPECT_EQ(top_half_slope({1, 2, 3, 4}, {0, 0, 0, 0}), 0.0);
    EXPECT_GT(top_half_slope({1, 2, 3, 4}, {0, 0, 0, 1}), 0.3);
    EXPECT_LT(top_half_slope({1, 2, 3, 4}, {1, 1, 1, 0}), -0.3);
}

TEST(ConfigHash, StableAndSensitive) {
    RunConfig a{"s", 7, {}, {{"N", 8}}, "out1"};
    RunConfig b = a;
    b.output_dir = "out2";
    EXPECT_EQ(config_hash(a), config_hash(b));
    b.seed = 8;
    EXPECT_NE(config_hash(a), config_hash(b));
    b = a;
    b.parameters["N"] = 9;
    EXPECT_NE(config_hash(a), config_hash(b));
    b = a;
    b.tolerances.inequality_slack = 2e-9;
    EXPECT_NE(config_hash(a), config_hash(b));
    EXPECT_EQ(a.canonical()["generator"], kGeneratorName);
    EXPECT_EQ(config_hash(a).size(), 16u);
}

TEST(EmitReport, EmptyListIsValidDocument) {
    const auto dir = scratch_dir("empty");
    emit_report(std::vector<SweepReport>{}, dir / "r.json");
    const auto doc = read_report(dir / "r.json");
    EXPECT_TRUE(doc.sweeps.empty());
    EXPECT_TRUE(doc.checks.empty());
    EXPECT_EQ(slurp(dir / "r.csv"), "suite,observable,parameter,value,seed,config_hash\n");
}

TEST(EmitReport, SingleReportRoundTripsExactly) {
    const auto dir = scratch_dir("roundtrip");
    auto r = run_sweep("obs,with comma", "N", {8, 16, 32}, [](double n) { return 1.0 / 3.0 + 1e-7 * n; }, 11, "abc");
    r.failure = std::nullopt;
    emit_report({r}, dir / "r.json", "suite", "abc", 11);
    const auto back = read_report(dir / "r.json");
    ASSERT_EQ(back.sweeps.size(), 1u);
    const auto& s = back.sweeps[0];
    EXPECT_EQ(s.observable, r.observable);
    EXPECT_EQ(s.parameter_name, r.parameter_name);
    EXPECT_EQ(s.parameter_values, r.parameter_values);
    EXPECT_EQ(s.values, r.values);
    EXPECT_EQ(s.classification, r.classification);
    EXPECT_EQ(s.slope, r.slope);
    EXPECT_EQ(s.seed, r.seed);
    EXPECT_EQ(s.config_hash, r.config_hash);
    EXPECT_FALSE(s.failure.has_value());
    const std::string csv = slurp(dir / "r.csv");
    EXPECT_NE(csv.find("\"obs,with comma\""), std::string::npos);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(EmitReport, DuplicateHashWithDifferentValuesIsViolation) {
    const auto dir = scratch_dir("dup");
    auto r = run_sweep("obs", "N", {1, 2, 3}, [](double n) { return n; }, 0, "h1");
    emit_report({r}, dir / "r.json", "suite", "h1");
    EXPECT_NO_THROW(emit_report({r}, dir / "r.json", "suite", "h1"));
    auto changed = r;
    changed.values[1] += 1e-6;
    EXPECT_THROW(emit_report({changed}, dir / "r.json", "suite", "h1"), DeterminismError);
    EXPECT_NO_THROW(emit_report({changed}, dir / "r.json", "suite", "h2"));
}

TEST(EmitReport, UnwritablePathNamesPath) {
    const auto dir = scratch_dir("unwritable");
    std::ofstream(dir / "file") << "x";
    try {
        emit_report(std::vector<SweepReport>{}, dir / "file" / "r.json");
        FAIL() << "expected IoError";
    } catch (const IoError& e) {
        EXPECT_NE(std::string(e.what()).find("file"), std::string::npos);
    }
}

TEST(OutputDirectory, EnvironmentOverrides) {
    ::unsetenv("KKPERTURB_OUT");
    EXPECT_EQ(output_directory("fallback"), fs::path("fallback"));
    ::setenv("KKPERTURB_OUT", "/tmp/elsewhere", 1);
    EXPECT_EQ(output_directory("fallback"), fs::path("/tmp/elsewhere"));
    ::unsetenv("KKPERTURB_OUT");
}

TEST(Determinism, IdenticalConfigGivesIdenticalCsv) {
    EXPECT_EQ(to_csv(verify_interpolation(7, 50)), to_csv(verify_interpolation(7, 50)));
    EXPECT_NE(to_csv(verify_interpolation(7, 50)), to_csv(verify_interpolation(8, 50)));
    TorusSuiteParams tp;
    tp.n_list = {3, 4, 5};
    EXPECT_EQ(to_csv(torus_suite(tp)), to_csv(torus_suite(tp)));
}

TEST(Suites, VerifyRowsCarryOneCheckPerDraw) {
    const auto d = verify_stampfli(3, 40);
    EXPECT_EQ(d.checks.size(), 41u);
    EXPECT_TRUE(d.all_passed());
    EXPECT_EQ(d.suite, "verify-stampfli");
}
