#pragma once

// Truncation sweeps and their trend classification.

#include "opcore.hpp"

#include <algorithm>
#include <cstdint>
#include <future>
#include <optional>
#include <string>
#include <vector>

namespace kkp {

enum class Trend { bounded_plateau, divergent, inconclusive };

inline const char* to_string(Trend t) {
    switch (t) {
        case Trend::bounded_plateau: return "bounded-plateau";
        case Trend::divergent: return "divergent";
        case Trend::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

inline Trend trend_from_string(const std::string& s) {
    if (s == "bounded-plateau") return Trend::bounded_plateau;
    if (s == "divergent") return Trend::divergent;
    if (s == "inconclusive") return Trend::inconclusive;
    throw ParameterError("unknown trend classification '" + s + "'");
}

inline constexpr double kPlateauSlope = 0.05;
inline constexpr double kDivergentSlope = 0.3;

inline Trend classify_slope(double slope) {
    if (slope <= kPlateauSlope) return Trend::bounded_plateau;
    if (slope >= kDivergentSlope) return Trend::divergent;
    return Trend::inconclusive;
}

// Least-squares slope of log(value) against log(parameter) over the last ceil(n/2)
// points (at least two). Zero values are floored at the smallest normal double, so a
// jump off zero reads as divergence and a collapse to zero as decay.
inline double top_half_slope(const std::vector<double>& params, const std::vector<double>& values) {
    const size_t n = std::min(params.size(), values.size());
    if (n < 2) throw PreconditionError("slope fit needs at least two points");
    size_t take = std::max<size_t>(2, (n + 1) / 2);
    size_t start = n - take;
    bool all_zero = true;
    for (size_t i = start; i < n; ++i) all_zero = all_zero && values[i] == 0.0;
    if (all_zero) return 0.0;
    const double tiny = std::numeric_limits<double>::min();
    double sx = 0, sy = 0, sxx = 0, sxy = 0, m = static_cast<double>(take);
    for (size_t i = start; i < n; ++i) {
        double x = std::log(params[i]);
        double y = std::log(std::max(values[i], tiny));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

struct SweepReport {
    std::string observable;
    std::string parameter_name;
    std::vector<double> parameter_values;
    std::vector<double> values;
    Trend classification = Trend::inconclusive;
    double slope = 0.0;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::optional<std::string> failure;  // set when the observable threw part-way
};

// Evaluates the observable at each parameter. With workers > 1 the points run
// concurrently in batches, so the observable must be pure. Results are collected in
// parameter order; the first failure in that order stops the sweep and yields a
// partial, inconclusive report carrying the message.
template <class Observable>
SweepReport run_sweep(const std::string& observable, const std::string& parameter_name,
                      const std::vector<double>& parameters, Observable&& eval, std::uint64_t seed = 0,
                      const std::string& config_hash = "", unsigned workers = 1) {
    if (parameters.size() < 3) throw PreconditionError("sweep needs at least three parameter values");
    for (size_t i = 1; i < parameters.size(); ++i)
        if (!(parameters[i] > parameters[i - 1]))
            throw PreconditionError("sweep parameters must be strictly increasing");
    for (double p : parameters)
        if (!(p > 0.0)) throw PreconditionError("sweep parameters must be positive for the log-log fit");

    SweepReport r;
    r.observable = observable;
    r.parameter_name = parameter_name;
    r.seed = seed;
    r.config_hash = config_hash;
    auto checked = [&eval](double p) {
        double v = eval(p);
        if (!(v >= 0.0) || !std::isfinite(v))
            throw DomainError(detail::cat("observable returned ", v, ", expected a finite nonnegative value"));
        return v;
    };
    const size_t batch = std::max(1u, workers);
    for (size_t start = 0; start < parameters.size() && !r.failure; start += batch) {
        const size_t stop = std::min(parameters.size(), start + batch);
        std::vector<std::future<double>> pending;
        for (size_t i = start; i < stop; ++i)
            pending.push_back(std::async(batch > 1 ? std::launch::async : std::launch::deferred, checked,
                                         parameters[i]));
        for (size_t i = start; i < stop; ++i) {
            try {
                const double v = pending[i - start].get();
                if (r.failure) continue;
                r.parameter_values.push_back(parameters[i]);
                r.values.push_back(v);
            } catch (const std::exception& e) {
                if (!r.failure) r.failure = detail::cat("failed at ", parameter_name, "=", parameters[i], ": ", e.what());
            }
        }
    }
    if (!r.failure) {
        r.slope = top_half_slope(r.parameter_values, r.values);
        r.classification = classify_slope(r.slope);
    }
    return r;
}

}  // namespace kkp
