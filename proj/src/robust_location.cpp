#include "repdesc/robust_location.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "repdesc/errors.hpp"
#include "repdesc/summation.hpp"

namespace repdesc {
namespace {

// Relative threshold below which the spread counts as collapsed: the kernel
// divides by sigma^2, so iteration must stop once it hits rounding noise.
constexpr double kDegenerateSpread = 1e-24;

// Unit weight when `weights` is empty; multiplying by the explicit 1.0 is
// bit-identical to the weightless formula, so both paths share one core.
double weight_at(std::span<const double> weights, std::size_t i) {
    return weights.empty() ? 1.0 : weights[i];
}

double mean_core(std::span<const double> values, std::span<const double> weights) {
    CompensatedSum num;
    CompensatedSum den;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double w = weight_at(weights, i);
        num.add(w * values[i]);
        den.add(w);
    }
    return num.value() / den.value();
}

double variance_core(std::span<const double> values, std::span<const double> weights,
                     double center) {
    CompensatedSum num;
    CompensatedSum den;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double w = weight_at(weights, i);
        const double d = values[i] - center;
        num.add(w * (d * d));
        den.add(w);
    }
    return std::max(0.0, num.value() / den.value());
}

void validate_values(std::span<const double> values) {
    if (values.empty()) throw InvalidInputError("empty sample set");
    for (double x : values) {
        if (!std::isfinite(x)) throw InvalidInputError("non-finite sample value");
    }
}

// Returns the weight total after checking shape and sign.
double validate_weights(std::span<const double> weights, std::size_t expected) {
    if (weights.size() != expected) throw InvalidInputError("weight count mismatch");
    CompensatedSum total;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw InvalidInputError("weights must be finite and non-negative");
        }
        total.add(w);
    }
    return total.value();
}

RobustLocationTrace robust_core(std::span<const double> values, std::span<const double> eps,
                                int iterations) {
    validate_values(values);
    if (iterations < 1) throw InvalidInputError("iteration count must be positive");
    if (!eps.empty() && !(validate_weights(eps, values.size()) > 0.0)) {
        throw InvalidInputError("all weights zero");
    }

    const std::size_t k = values.size();
    RobustLocationTrace trace;
    trace.locations.reserve(iterations);
    trace.spreads.reserve(iterations);

    std::vector<double> raw(k);  // unnormalized weights driving the current iteration
    for (std::size_t i = 0; i < k; ++i) raw[i] = weight_at(eps, i);
    std::vector<double> dsq(k);  // squared deviations, reused across iterations

    for (int q = 1; q <= iterations; ++q) {
        const double m = mean_core(values, raw);

        CompensatedSum num;
        CompensatedSum den;
        double dsq_min = std::numeric_limits<double>::infinity();  // over positive weights
        for (std::size_t i = 0; i < k; ++i) {
            const double d = values[i] - m;
            const double sq = d * d;
            dsq[i] = sq;
            num.add(raw[i] * sq);
            den.add(raw[i]);
            if (raw[i] > 0.0 && sq < dsq_min) dsq_min = sq;
        }
        const double variance = std::max(0.0, num.value() / den.value());
        if (!std::isfinite(variance)) throw NumericalError("spread overflow");

        trace.locations.push_back(m);
        trace.spreads.push_back(std::sqrt(variance));
        trace.iterations_run = q;

        if (variance <= kDegenerateSpread * std::max(1.0, m * m)) break;
        if (q == iterations) break;

        // Gaussian-kernel reweighting, with the exponent shifted by its
        // maximum over positively weighted samples so the best-supported
        // sample keeps exp(0) and tight clusters cannot underflow to zero.
        const double inv_two_var = 1.0 / (2.0 * variance);
        for (std::size_t i = 0; i < k; ++i) {
            const double base = weight_at(eps, i);
            raw[i] = base == 0.0 ? 0.0 : base * std::exp((dsq_min - dsq[i]) * inv_two_var);
        }
    }

    // Pad so the trace always spans the requested iteration count.
    while (static_cast<int>(trace.locations.size()) < iterations) {
        trace.locations.push_back(trace.locations.back());
        trace.spreads.push_back(trace.spreads.back());
    }

    // Expose, normalized, the weights that produced the last genuine location.
    CompensatedSum total;
    for (double w : raw) total.add(w);
    const double t = total.value();
    trace.final_weights.resize(k);
    for (std::size_t i = 0; i < k; ++i) trace.final_weights[i] = raw[i] / t;
    return trace;
}

}  // namespace

double weighted_mean(std::span<const double> values, std::span<const double> weights) {
    validate_values(values);
    if (!(validate_weights(weights, values.size()) > 0.0)) {
        throw InvalidInputError("degenerate weights");
    }
    return mean_core(values, weights);
}

double weighted_mean(std::span<const Sample> samples, std::span<const double> weights) {
    std::vector<double> values(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) values[i] = samples[i].value;
    return weighted_mean(values, weights);
}

double weighted_variance(std::span<const double> values, std::span<const double> weights,
                         double center) {
    validate_values(values);
    if (!std::isfinite(center)) throw InvalidInputError("non-finite center");
    if (!(validate_weights(weights, values.size()) > 0.0)) {
        throw InvalidInputError("degenerate weights");
    }
    return variance_core(values, weights, center);
}

double weighted_variance(std::span<const Sample> samples, std::span<const double> weights,
                         double center) {
    std::vector<double> values(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) values[i] = samples[i].value;
    return weighted_variance(values, weights, center);
}

int iteration_count(std::int64_t sample_count) {
    if (sample_count < 1) throw InvalidInputError("sample count must be positive");
    const double k = static_cast<double>(sample_count);
    const double estimate = std::pow(k, 0.25) * std::sqrt(std::log2(k + 1.0));
    return std::max(1, static_cast<int>(std::floor(estimate)));
}

RobustLocationTrace robust_scalar_location(std::span<const Sample> samples, int iterations) {
    std::vector<double> values(samples.size());
    std::vector<double> eps(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        values[i] = samples[i].value;
        eps[i] = samples[i].base_weight;
    }
    return robust_core(values, eps, iterations);
}

RobustLocationTrace robust_scalar_location(std::span<const double> values, int iterations) {
    return robust_core(values, {}, iterations);
}

RobustLocationTrace robust_scalar_location(std::span<const double> values,
                                           std::span<const double> base_weights, int iterations) {
    return robust_core(values, base_weights, iterations);
}

}  // namespace repdesc
