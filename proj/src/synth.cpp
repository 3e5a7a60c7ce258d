#include "repdesc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "repdesc/robust_location.hpp"
#include "repdesc/rng.hpp"
#include "repdesc/summation.hpp"

namespace repdesc {
namespace {

// Median of the gamma(shape 2, rate 1) density x * exp(-x): the root of
// (1 + x) * exp(-x) = 1/2.
constexpr double kGamma2Median = 1.6783469900166605;

std::vector<double> random_unit_coords(Xoshiro256pp& rng, std::size_t n) {
    std::vector<double> coords(n);
    for (int attempt = 0; attempt < 100; ++attempt) {
        for (double& c : coords) c = rng.normal();
        CompensatedSum sq;
        for (double c : coords) sq.add(c * c);
        const double norm = std::sqrt(std::max(0.0, sq.value()));
        if (norm > 1e-9) {
            for (double& c : coords) c /= norm;
            return coords;
        }
    }
    throw NumericalError("failed to draw a unit direction");
}

double sample_std(std::span<const double> values) {
    if (values.size() < 2) return 0.0;
    CompensatedSum sum;
    for (double v : values) sum.add(v);
    const double mean = sum.value() / static_cast<double>(values.size());
    CompensatedSum sq;
    for (double v : values) {
        const double d = v - mean;
        sq.add(d * d);
    }
    return std::sqrt(std::max(0.0, sq.value() / static_cast<double>(values.size() - 1)));
}

int resolve_iterations(const ScalarExperimentConfig& config) {
    if (config.iterations < 0) throw InvalidInputError("iteration count must be positive");
    return config.iterations == kAutoIterations ? iteration_count(config.sample_count)
                                                : config.iterations;
}

void validate_scalar_config(const ScalarExperimentConfig& config) {
    if (config.sample_count < 2) throw InvalidInputError("sample count must be at least 2");
    if (config.trials < 1) throw InvalidInputError("trial count must be positive");
}

}  // namespace

std::string_view to_string(ScalarDistribution distribution) {
    switch (distribution) {
        case ScalarDistribution::Gamma2: return "gamma_shape2";
        case ScalarDistribution::Exponential: return "exponential";
        case ScalarDistribution::LognormalHalf: return "lognormal_sigma_half";
        case ScalarDistribution::Gaussian: return "gaussian";
    }
    return "unknown";
}

std::optional<ScalarDistribution> distribution_from_string(std::string_view name) {
    if (name == "gamma_shape2") return ScalarDistribution::Gamma2;
    if (name == "exponential") return ScalarDistribution::Exponential;
    if (name == "lognormal_sigma_half") return ScalarDistribution::LognormalHalf;
    if (name == "gaussian") return ScalarDistribution::Gaussian;
    return std::nullopt;
}

DistributionReference reference_values(ScalarDistribution distribution) {
    switch (distribution) {
        case ScalarDistribution::Gamma2: return {2.0, kGamma2Median, 1.0};
        case ScalarDistribution::Exponential: return {1.0, std::numbers::ln2, 0.0};
        case ScalarDistribution::LognormalHalf:
            return {std::exp(0.125), 1.0, std::exp(-0.25)};
        case ScalarDistribution::Gaussian: return {0.0, 0.0, 0.0};
    }
    throw InvalidInputError("unknown distribution");
}

std::vector<double> sample_gamma2(std::int64_t count, std::uint64_t seed) {
    if (count < 1) throw InvalidInputError("sample count must be positive");
    Xoshiro256pp rng(seed);
    std::vector<double> out(static_cast<std::size_t>(count));
    for (double& x : out) {
        const double a = rng.exponential();
        const double b = rng.exponential();
        x = a + b;
    }
    return out;
}

std::vector<double> sample_scalar(ScalarDistribution distribution, std::int64_t count,
                                  std::uint64_t seed) {
    if (count < 1) throw InvalidInputError("sample count must be positive");
    if (distribution == ScalarDistribution::Gamma2) return sample_gamma2(count, seed);
    Xoshiro256pp rng(seed);
    std::vector<double> out(static_cast<std::size_t>(count));
    switch (distribution) {
        case ScalarDistribution::Exponential:
            for (double& x : out) x = rng.exponential();
            break;
        case ScalarDistribution::LognormalHalf:
            for (double& x : out) x = std::exp(0.5 * rng.normal());
            break;
        case ScalarDistribution::Gaussian:
            for (double& x : out) x = rng.normal();
            break;
        case ScalarDistribution::Gamma2: break;  // handled above
    }
    return out;
}

SphericalCluster sample_spherical_cluster(const ClusterConfig& config) {
    if (config.dimension < 2) throw InvalidInputError("dimension must be at least 2");
    if (config.inlier_count < 2) throw InvalidInputError("inlier count must be at least 2");
    if (!(config.inlier_spread > 0.0)) throw InvalidInputError("inlier spread must be positive");
    if (!(config.outlier_min_angle > config.inlier_spread)) {
        throw InvalidInputError("outlier minimum angle must exceed the inlier spread");
    }
    if (config.outlier_count > 0 && config.outlier_min_angle >= std::numbers::pi) {
        throw InvalidInputError("outlier minimum angle must be below pi");
    }

    Xoshiro256pp rng(config.seed);
    const std::size_t n = config.dimension;

    std::optional<Descriptor> center;
    if (config.true_center) {
        if (config.true_center->dimension() != n) {
            throw InvalidInputError("true center dimension mismatch");
        }
        center = *config.true_center;
    } else {
        center = normalize(random_unit_coords(rng, n));
    }

    // Per-axis std that makes the *total* tangent displacement have std
    // inlier_spread (the noise lives in the (n-1)-dimensional tangent space).
    const double axis_std = config.inlier_spread / std::sqrt(static_cast<double>(n - 1));

    std::vector<Descriptor> members;
    members.reserve(config.inlier_count + config.outlier_count);
    std::vector<double> noise(n);
    std::vector<double> candidate(n);
    for (std::size_t i = 0; i < config.inlier_count; ++i) {
        for (double& g : noise) g = axis_std * rng.normal();
        const double along = compensated_dot(noise, center->coords());
        for (std::size_t j = 0; j < n; ++j) {
            candidate[j] = (*center)[j] + (noise[j] - along * (*center)[j]);
        }
        members.push_back(normalize(candidate));
    }
    for (std::size_t i = 0; i < config.outlier_count; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < 100000; ++attempt) {
            Descriptor outlier = normalize(random_unit_coords(rng, n));
            if (angular_distance(outlier, *center) >= config.outlier_min_angle) {
                members.push_back(std::move(outlier));
                placed = true;
                break;
            }
        }
        if (!placed) throw NumericalError("failed to place outlier");
    }

    return {DescriptorSet(std::move(members)), std::move(*center)};
}

ConvergenceCurve run_convergence_experiment(const ScalarExperimentConfig& config) {
    validate_scalar_config(config);
    const int q = resolve_iterations(config);

    ConvergenceCurve curve{.config = config,
                           .trial_locations = {},
                           .trial_spreads = {},
                           .location_mean = {},
                           .location_std = {},
                           .reference = reference_values(config.distribution)};
    curve.config.iterations = q;

    for (int t = 0; t < config.trials; ++t) {
        auto values =
            sample_scalar(config.distribution, config.sample_count, trial_seed(config.seed, t));
        RobustLocationTrace trace = robust_scalar_location(values, q);
        curve.trial_locations.push_back(std::move(trace.locations));
        curve.trial_spreads.push_back(std::move(trace.spreads));
    }

    curve.location_mean.resize(q);
    curve.location_std.resize(q);
    std::vector<double> column(config.trials);
    for (int qi = 0; qi < q; ++qi) {
        for (int t = 0; t < config.trials; ++t) column[t] = curve.trial_locations[t][qi];
        CompensatedSum sum;
        for (double v : column) sum.add(v);
        curve.location_mean[qi] = sum.value() / static_cast<double>(config.trials);
        curve.location_std[qi] = sample_std(column);
    }
    return curve;
}

ReliabilityReport run_reliability_experiment(const ScalarExperimentConfig& config) {
    if (config.trials < 50) throw InvalidInputError("insufficient trials");
    validate_scalar_config(config);
    const int q = resolve_iterations(config);

    ReliabilityReport report{.config = config,
                             .probe_iterations = {},
                             .spread = {},
                             .ratio = {},
                             .trial_locations = {}};
    report.config.iterations = q;

    const double k = static_cast<double>(config.sample_count);
    const auto cap = [q](int probe) { return std::clamp(probe, 1, q); };
    report.probe_iterations = {cap(1), cap(3),
                               cap(static_cast<int>(std::floor(std::log2(k + 1.0)))),
                               cap(static_cast<int>(std::floor(std::sqrt(k))))};

    for (int t = 0; t < config.trials; ++t) {
        auto values =
            sample_scalar(config.distribution, config.sample_count, trial_seed(config.seed, t));
        const RobustLocationTrace trace = robust_scalar_location(values, q);
        std::array<double, 4> probes{};
        for (int j = 0; j < 4; ++j) {
            probes[j] = trace.locations[report.probe_iterations[j] - 1];
        }
        report.trial_locations.push_back(probes);
    }

    std::vector<double> column(config.trials);
    for (int j = 0; j < 4; ++j) {
        for (int t = 0; t < config.trials; ++t) column[t] = report.trial_locations[t][j];
        report.spread[j] = sample_std(column);
    }
    if (!(report.spread[0] > 0.0)) throw NumericalError("zero baseline spread");
    for (int j = 0; j < 4; ++j) report.ratio[j] = report.spread[j] / report.spread[0];
    return report;
}

RobustnessReport run_robustness_experiment(const ClusterConfig& cluster, int trials,
                                           std::uint64_t seed) {
    if (trials < 1) throw InvalidInputError("trial count must be positive");

    RobustnessReport report;
    report.config = cluster;
    report.trials = trials;
    report.seed = seed;
    report.per_trial.reserve(trials);

    for (int t = 0; t < trials; ++t) {
        ClusterConfig trial_config = cluster;
        trial_config.seed = trial_seed(seed, t);
        const SphericalCluster sampled = sample_spherical_cluster(trial_config);

        RobustnessTrial trial;
        const auto score = [&sampled](auto&& estimator, double& error, std::string& failure) {
            try {
                const AggregationResult result = estimator();
                error = angular_distance(result.center, sampled.ground_truth);
            } catch (const std::exception& e) {
                failure = e.what();
            }
        };
        score([&] { return mean_center(sampled.set); }, trial.mean_error, trial.mean_failure);
        score([&] { return mode_median_center(sampled.set); }, trial.mode_median_error,
              trial.mode_median_failure);
        score([&] { return geodesic_median_center(sampled.set); }, trial.geodesic_median_error,
              trial.geodesic_median_failure);

        if (std::isfinite(trial.mean_error)) {
            report.max_mean_error = std::max(report.max_mean_error, trial.mean_error);
            if (std::isfinite(trial.mode_median_error) &&
                trial.mode_median_error < trial.mean_error) {
                ++report.mode_median_wins;
            }
            if (std::isfinite(trial.geodesic_median_error) &&
                trial.geodesic_median_error < trial.mean_error) {
                ++report.geodesic_median_wins;
            }
        }
        if (std::isfinite(trial.mode_median_error)) {
            report.max_mode_median_error =
                std::max(report.max_mode_median_error, trial.mode_median_error);
        }
        if (std::isfinite(trial.geodesic_median_error)) {
            report.max_geodesic_median_error =
                std::max(report.max_geodesic_median_error, trial.geodesic_median_error);
        }
        report.per_trial.push_back(std::move(trial));
    }
    return report;
}

}  // namespace repdesc
