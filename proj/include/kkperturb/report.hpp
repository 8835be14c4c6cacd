#pragma once

// Run configuration, config hashing, and JSON/CSV report persistence.

#include "random.hpp"
#include "sweep.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>

namespace kkp {

using Json = nlohmann::json;

struct IoError : Error { using Error::Error; };
struct DeterminismError : Error { using Error::Error; };

struct RunConfig {
    std::string suite;
    std::uint64_t seed = 0;
    ToleranceConfig tolerances;
    std::map<std::string, Json> parameters;  // geometry and sweep parameters, by name
    std::string output_dir;                   // not part of the hash

    Json canonical() const {
        Json j;
        j["suite"] = suite;
        j["seed"] = seed;
        j["generator"] = kGeneratorName;
        j["tolerances"] = {{"hermitian_tol", tolerances.hermitian_tol},
                           {"reconstruction_tol", tolerances.reconstruction_tol},
                           {"inequality_slack", tolerances.inequality_slack},
                           {"quadrature_rel_tol", tolerances.quadrature_rel_tol}};
        j["parameters"] = Json(parameters);
        return j;
    }
};

// FNV-1a 64 over the canonical JSON text (keys sorted by nlohmann::json).
inline std::string config_hash(const RunConfig& cfg) {
    const std::string text = cfg.canonical().dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// A single pass/fail assertion from a verification suite.
struct CheckRow {
    std::string observable;
    std::string parameter;  // e.g. "draw=17"
    double value = 0.0;     // margin or residual being judged
    bool passed = false;
};

struct ReportDocument {
    std::string suite;
    std::string config_hash;
    std::uint64_t seed = 0;
    Json config;
    std::vector<SweepReport> sweeps;
    std::vector<CheckRow> checks;

    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        for (const auto& s : sweeps)
            if (s.failure) return false;
        return true;
    }
};

inline Json to_json(const SweepReport& r) {
    Json j{{"observable", r.observable},
           {"parameter_name", r.parameter_name},
           {"parameter_values", r.parameter_values},
           {"values", r.values},
           {"classification", to_string(r.classification)},
           {"slope", r.slope},
           {"seed", r.seed},
           {"config_hash", r.config_hash}};
    j["failure"] = r.failure ? Json(*r.failure) : Json(nullptr);
    return j;
}

inline SweepReport sweep_from_json(const Json& j) {
    SweepReport r;
    r.observable = j.at("observable").get<std::string>();
    r.parameter_name = j.at("parameter_name").get<std::string>();
    r.parameter_values = j.at("parameter_values").get<std::vector<double>>();
    r.values = j.at("values").get<std::vector<double>>();
    r.classification = trend_from_string(j.at("classification").get<std::string>());
    r.slope = j.at("slope").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.config_hash = j.at("config_hash").get<std::string>();
    if (j.contains("failure") && !j.at("failure").is_null()) r.failure = j.at("failure").get<std::string>();
    if (r.values.size() != r.parameter_values.size())
        throw ParameterError("sweep record has mismatched parameter and value lengths");
    return r;
}

inline Json to_json(const ReportDocument& d) {
    Json sweeps = Json::array(), checks = Json::array();
    for (const auto& s : d.sweeps) sweeps.push_back(to_json(s));
    for (const auto& c : d.checks)
        checks.push_back({{"observable", c.observable}, {"parameter", c.parameter}, {"value", c.value}, {"passed", c.passed}});
    return {{"suite", d.suite}, {"config_hash", d.config_hash}, {"seed", d.seed},
            {"config", d.config.is_null() ? Json::object() : d.config}, {"sweeps", sweeps}, {"checks", checks}};
}

inline ReportDocument document_from_json(const Json& j) {
    ReportDocument d;
    d.suite = j.at("suite").get<std::string>();
    d.config_hash = j.at("config_hash").get<std::string>();
    d.seed = j.at("seed").get<std::uint64_t>();
    d.config = j.at("config");
    for (const auto& s : j.at("sweeps")) d.sweeps.push_back(sweep_from_json(s));
    for (const auto& c : j.at("checks"))
        d.checks.push_back({c.at("observable").get<std::string>(), c.at("parameter").get<std::string>(),
                            c.at("value").get<double>(), c.at("passed").get<bool>()});
    return d;
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Quote a CSV field when it contains a separator, quote or newline.
inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

// Columns: suite, observable, parameter, value, seed, config_hash.
inline std::string to_csv(const ReportDocument& d) {
    std::string out = "suite,observable,parameter,value,seed,config_hash\n";
    auto row = [&](const std::string& obs, const std::string& param, double v, std::uint64_t seed) {
        out += csv_field(d.suite) + "," + csv_field(obs) + "," + csv_field(param) + "," + format_double(v) + "," +
               std::to_string(seed) + "," + d.config_hash + "\n";
    };
    for (const auto& s : d.sweeps)
        for (size_t i = 0; i < s.values.size(); ++i)
            row(s.observable, s.parameter_name + "=" + format_double(s.parameter_values[i]), s.values[i], s.seed);
    for (const auto& c : d.checks) row(c.observable, c.parameter, c.value, d.seed);
    return out;
}

inline ReportDocument read_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open report " + path.string());
    try {
        return document_from_json(Json::parse(in));
    } catch (const Json::exception& e) {
        throw IoError("malformed report " + path.string() + ": " + e.what());
    }
}

// Numbers of two runs under one config hash must agree to 1e-12 (relative to magnitude).
inline void check_determinism(const ReportDocument& previous, const ReportDocument& current) {
    if (previous.config_hash != current.config_hash) return;
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); };
    std::map<std::string, const SweepReport*> old;
    for (const auto& s : previous.sweeps) old[s.observable] = &s;
    for (const auto& s : current.sweeps) {
        auto it = old.find(s.observable);
        if (it == old.end()) continue;
        const SweepReport& p = *it->second;
        bool same = p.values.size() == s.values.size() && p.parameter_values == s.parameter_values;
        for (size_t i = 0; same && i < s.values.size(); ++i) same = close(p.values[i], s.values[i]);
        if (!same)
            throw DeterminismError("determinism violation: observable '" + s.observable + "' under config hash " +
                                   current.config_hash + " differs from the previous run");
    }
    std::map<std::pair<std::string, std::string>, double> old_checks;
    for (const auto& c : previous.checks) old_checks[{c.observable, c.parameter}] = c.value;
    for (const auto& c : current.checks) {
        auto it = old_checks.find({c.observable, c.parameter});
        if (it != old_checks.end() && !close(it->second, c.value))
            throw DeterminismError("determinism violation: check '" + c.observable + "' at " + c.parameter +
                                   " under config hash " + current.config_hash + " differs from the previous run");
    }
}

// Writes <path> (JSON) and <path minus .json>.csv. An existing document at <path>
// with the same config hash must carry the same numbers.
inline void emit_report(const ReportDocument& doc, const std::filesystem::path& path) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (fs::exists(path, ec)) {
        ReportDocument previous;
        bool readable = true;
        try {
            previous = read_report(path);
        } catch (const IoError&) {
            readable = false;
        }
        if (readable) check_determinism(previous, doc);
    }
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    auto write = [](const fs::path& p, const std::string& text) {
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + p.string());
        out << text;
        if (!out) throw IoError("write failed for " + p.string());
    };
    write(path, to_json(doc).dump(2) + "\n");
    fs::path csv = path;
    csv.replace_extension(".csv");
    write(csv, to_csv(doc));
}

// Convenience form for a bare list of sweeps.
inline void emit_report(const std::vector<SweepReport>& reports, const std::filesystem::path& path,
                        const std::string& suite = "sweeps", const std::string& hash = "", std::uint64_t seed = 0) {
    ReportDocument d;
    d.suite = suite;
    d.config_hash = hash;
    d.seed = seed;
    d.sweeps = reports;
    emit_report(d, path);
}

// KKPERTURB_OUT, when set and non-empty, overrides the given directory.
inline std::filesystem::path output_directory(const std::string& fallback) {
    if (const char* env = std::getenv("KKPERTURB_OUT"); env && *env) return env;
    return fallback;
}

}  // namespace kkp
