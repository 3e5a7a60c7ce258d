#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace repdesc {

/// One scalar observation with its statistical importance weight.
struct Sample {
    double value = 0.0;
    double base_weight = 1.0;  ///< epsilon; non-negative, default 1
};

/// Per-iteration record of the reweighted scalar location estimate.
///
/// `locations[q-1]` / `spreads[q-1]` hold m_q and sigma_q. Both sequences
/// always span the requested number of iterations; if the spread collapses
/// the loop stops early, the remaining entries repeat the last computed pair,
/// and `iterations_run` reports the genuine count.
struct RobustLocationTrace {
    std::vector<double> locations;
    std::vector<double> spreads;
    std::vector<double> final_weights;  ///< normalized, in input order
    int iterations_run = 0;

    bool early_stopped() const { return iterations_run < static_cast<int>(locations.size()); }
    double final_location() const { return locations.back(); }
    double final_spread() const { return spreads.back(); }
};

/// Weighted arithmetic mean; weights need not be pre-normalized.
double weighted_mean(std::span<const double> values, std::span<const double> weights);
double weighted_mean(std::span<const Sample> samples, std::span<const double> weights);

/// Weighted mean squared deviation from `center`.
double weighted_variance(std::span<const double> values, std::span<const double> weights,
                         double center);
double weighted_variance(std::span<const Sample> samples, std::span<const double> weights,
                         double center);

/// Recommended iteration count for `sample_count` observations:
/// max(1, floor(K^(1/4) * sqrt(log2(K + 1)))).
int iteration_count(std::int64_t sample_count);

/// Iteratively reweighted location estimate for scalar data.
///
/// Iteration q computes the weighted mean m_q and spread sigma_q of the
/// samples under the current weights, then reweights with the Gaussian
/// kernel: w_k proportional to base_weight_k * exp(-(x_k - m_q)^2 /
/// (2 sigma_q^2)). The first iteration uses the base weights, so m_1 is the
/// base-weighted mean; as q grows the estimate moves from the mean through
/// the neighborhood of the median (q around 3) toward the mode.
///
/// The overload without weights treats every sample as base weight 1; passing
/// an empty weight span means the same thing.
RobustLocationTrace robust_scalar_location(std::span<const Sample> samples, int iterations);
RobustLocationTrace robust_scalar_location(std::span<const double> values, int iterations);
RobustLocationTrace robust_scalar_location(std::span<const double> values,
                                           std::span<const double> base_weights, int iterations);

}  // namespace repdesc
