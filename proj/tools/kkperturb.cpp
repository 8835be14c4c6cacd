#include <kkperturb/suites.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <iostream>
#include <sstream>
#include <thread>

namespace {

using namespace kkp;

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        size_t used = 0;
        double v = std::stod(item, &used);
        if (used != item.size()) throw ParameterError("cannot parse '" + item + "' as a number");
        out.push_back(v);
    }
    if (out.empty()) throw ParameterError("empty list '" + text + "'");
    return out;
}

HeisPoint parse_generator(const std::string& name) {
    static const std::map<std::string, HeisPoint> named{{"a+", {1, 0, 0}}, {"a-", {-1, 0, 0}}, {"b+", {0, 1, 0}},
                                                        {"b-", {0, -1, 0}}, {"c+", {0, 0, 1}}, {"c-", {0, 0, -1}}};
    if (auto it = named.find(name); it != named.end()) return it->second;
    throw ParameterError("unknown Heisenberg generator '" + name + "' (use a+, a-, b+, b-, c+, c-)");
}

void print_summary(const ReportDocument& doc, std::ostream& os) {
    os << "suite " << doc.suite << "  config " << doc.config_hash << "  seed " << doc.seed << "\n";
    for (const auto& s : doc.sweeps) {
        os << "  " << s.observable << "\n    " << s.parameter_name << ":";
        for (double p : s.parameter_values) os << " " << p;
        os << "\n    value:";
        for (double v : s.values) os << " " << format_double(v);
        os << "\n    slope " << s.slope << "  " << to_string(s.classification);
        if (s.failure) os << "  [" << *s.failure << "]";
        os << "\n";
    }
    std::map<std::string, std::pair<int, int>> tally;
    std::map<std::string, std::pair<double, double>> range;
    std::vector<std::string> order;
    for (const auto& c : doc.checks) {
        if (!tally.count(c.observable)) order.push_back(c.observable);
        auto& t = tally[c.observable];
        ++t.second;
        if (c.passed) ++t.first;
        auto& r = range[c.observable];
        r = t.second == 1 ? std::make_pair(c.value, c.value)
                          : std::make_pair(std::min(r.first, c.value), std::max(r.second, c.value));
    }
    for (const auto& name : order) {
        const auto& t = tally[name];
        os << "  " << (t.first == t.second ? "pass " : "FAIL ") << t.first << "/" << t.second << "  " << name
           << "  (values in [" << format_double(range[name].first) << ", " << format_double(range[name].second)
           << "])\n";
    }
}

int finish(const ReportDocument& doc, const std::string& out_dir) {
    print_summary(doc, std::cout);
    const auto dir = output_directory(out_dir);
    const auto path = dir / (doc.suite + ".json");
    emit_report(doc, path);
    std::cout << "report " << path.string() << "\n";
    int failed = 0;
    for (const auto& c : doc.checks)
        if (!c.passed) {
            if (failed < 10) std::cerr << "FAILED: " << c.observable << " at " << c.parameter << " (value "
                                       << format_double(c.value) << ")\n";
            ++failed;
        }
    for (const auto& s : doc.sweeps)
        if (s.failure) {
            std::cerr << "FAILED: " << s.observable << ": " << *s.failure << "\n";
            ++failed;
        }
    if (failed > 10) std::cerr << "... " << failed << " failures in total\n";
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multiplicative perturbation laboratory: verification suites and truncation sweeps"};
    app.require_subcommand(1);
    app.fallthrough();
    std::uint64_t seed = 0;
    std::string out_dir = "kkperturb_out";
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    app.add_option("--out", out_dir, "Output directory (KKPERTURB_OUT overrides)");
    app.add_option("--workers", workers, "Concurrent sweep points")->check(CLI::Range(1u, 256u));

    auto* verify = app.add_subcommand("verify", "Randomised checks of the operator inequalities");
    std::string verify_suite;
    int draws = -1;
    verify->add_option("suite", verify_suite, "interpolation|stampfli|sandwich|quadrature|converse")
        ->required()
        ->check(CLI::IsMember({"interpolation", "stampfli", "sandwich", "quadrature", "converse"}));
    verify->add_option("--seed", seed, "RNG seed");
    verify->add_option("--draws", draws, "Number of random draws")->check(CLI::PositiveNumber);

    auto* torus = app.add_subcommand("torus", "Noncommutative torus conformal sweep");
    TorusSuiteParams tp;
    std::string tau_text = "0,1", n_text = "8,12,16,20,24", k_text = "2,1,0";
    torus->add_option("--theta", tp.theta, "Deformation parameter in [0,1)");
    torus->add_option("--tau", tau_text, "Complex modulus as re,im");
    torus->add_option("--n-list", n_text, "Truncations N, comma separated");
    torus->add_option("--beta", tp.beta, "Weight exponent on <D>");
    torus->add_option("--k", k_text, "Multiplier coefficients c0,cu,cv of c0 + cu(U+U*)/2 + cv(V+V*)/2");
    torus->add_option("--seed", seed, "Seed recorded in the report");

    auto* podles = app.add_subcommand("podles", "Podles sphere identity suites and twisted sweeps");
    PodlesSuiteParams pp;
    std::string q_text, podles_suite_name = "relations";
    double l_max = -1.0;
    podles->add_option("--q", q_text, "Deformation parameters, comma separated (default 0.5,0.8, or 0.5 for twisted)");
    podles->add_option("--l-max", l_max, "Peter-Weyl cutoff L (default 3, or 9/2 for twisted)");
    podles->add_option("--suite", podles_suite_name, "relations|omega|mu|twisted")
        ->check(CLI::IsMember({"relations", "omega", "mu", "twisted"}));
    podles->add_option("--generators", pp.generators, "Generators for the twisted suite, from a,b,c,d");
    podles->add_option("--z", pp.z, "Twist parameter z");
    podles->add_option("--seed", seed, "Seed for random words");

    auto* heis = app.add_subcommand("heisenberg", "Heisenberg symbol dilation and commutator bounds");
    HeisenbergSuiteParams hp;
    std::string radii_text = "10,20,40,80", gen_text = "a+,a-,b+,b-,c+,c-";
    heis->add_option("--radii", radii_text, "Window radii, comma separated");
    heis->add_option("--generators", gen_text, "Generators from a+,a-,b+,b-,c+,c-");
    heis->add_option("--exponent", hp.exponent, "Exponent on 1 + ell^2");
    heis->add_option("--contrast-exponent", hp.contrast_exponent, "Exponent for the divergence contrast");
    heis->add_option("--seed", seed, "Seed recorded in the report");

    auto* logd = app.add_subcommand("log-dampen", "Logarithmic transform of a dilated circle Dirac operator");
    LogDampenParams lp;
    std::string ln_text = "64,128,256,512";
    logd->add_option("--kappa", lp.kappa, "Dilation factor")->check(CLI::PositiveNumber);
    logd->add_option("--n-list", ln_text, "Truncations N, comma separated");
    logd->add_option("--seed", seed, "Seed recorded in the report");

    if (argc <= 1) {
        std::cerr << app.help();
        return 2;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n" << app.help();
        return 2;
    }

    try {
        if (verify->parsed()) {
            const std::map<std::string, int> defaults{
                {"interpolation", 1000}, {"stampfli", 1000}, {"sandwich", 500}, {"quadrature", 60}, {"converse", 500}};
            const int n = draws > 0 ? draws : defaults.at(verify_suite);
            ReportDocument doc;
            if (verify_suite == "interpolation") doc = verify_interpolation(seed, n);
            if (verify_suite == "stampfli") doc = verify_stampfli(seed, n);
            if (verify_suite == "sandwich") doc = verify_sandwich(seed, n);
            if (verify_suite == "quadrature") doc = verify_quadrature(seed, n);
            if (verify_suite == "converse") doc = verify_converse(seed, n);
            return finish(doc, out_dir);
        }
        if (torus->parsed()) {
            const auto tau = parse_list(tau_text);
            if (tau.size() != 2) throw ParameterError("--tau expects re,im");
            tp.tau = {tau[0], tau[1]};
            tp.n_list = parse_list(n_text);
            const auto k = parse_list(k_text);
            if (k.size() != 3) throw ParameterError("--k expects c0,cu,cv");
            tp.k = {k[0], k[1], k[2]};
            return finish(torus_suite(tp, seed, workers), out_dir);
        }
        if (podles->parsed()) {
            const PodlesSuite which = podles_suite_from_string(podles_suite_name);
            pp.q_values = parse_list(!q_text.empty() ? q_text : which == PodlesSuite::twisted ? "0.5" : "0.5,0.8");
            pp.l_max = l_max > 0 ? l_max : (which == PodlesSuite::twisted ? 4.5 : 3.0);
            return finish(podles_suite(which, pp, seed, workers), out_dir);
        }
        if (heis->parsed()) {
            hp.radii = parse_list(radii_text);
            hp.generators.clear();
            std::stringstream ss(gen_text);
            std::string g;
            while (std::getline(ss, g, ','))
                if (!g.empty()) hp.generators.push_back(parse_generator(g));
            return finish(heisenberg_suite(hp, seed, workers), out_dir);
        }
        if (logd->parsed()) {
            lp.n_list = parse_list(ln_text);
            return finish(log_dampen_suite(lp, seed, workers), out_dir);
        }
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
