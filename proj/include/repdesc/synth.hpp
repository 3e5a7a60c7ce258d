#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "repdesc/centers.hpp"
#include "repdesc/descriptor.hpp"

namespace repdesc {

/// Skewed unimodal test distributions with closed-form location constants,
/// plus a symmetric Gaussian for sanity checks.
enum class ScalarDistribution { Gamma2, Exponential, LognormalHalf, Gaussian };

std::string_view to_string(ScalarDistribution distribution);
std::optional<ScalarDistribution> distribution_from_string(std::string_view name);

/// Closed-form mean / median / mode of a test distribution.
struct DistributionReference {
    double mean;
    double median;
    double mode;
};
DistributionReference reference_values(ScalarDistribution distribution);

struct ScalarExperimentConfig {
    ScalarDistribution distribution = ScalarDistribution::Gamma2;
    std::int64_t sample_count = 1'000'000;
    int iterations = kAutoIterations;  ///< 0 derives iteration_count(sample_count)
    int trials = 1;
    std::uint64_t seed = 42;
};

/// i.i.d. draws with density x * exp(-x) on [0, inf): the sum of two
/// unit-rate exponential draws. Deterministic for a fixed seed.
std::vector<double> sample_gamma2(std::int64_t count, std::uint64_t seed);

/// Draws from any of the test distributions (Gamma2 delegates to
/// sample_gamma2; LognormalHalf is exp(0.5 * normal); Gaussian is standard).
std::vector<double> sample_scalar(ScalarDistribution distribution, std::int64_t count,
                                  std::uint64_t seed);

struct ClusterConfig {
    std::size_t dimension = 128;
    std::size_t inlier_count = 40;
    std::size_t outlier_count = 10;
    double inlier_spread = 0.05;     ///< std of the total tangent displacement, radians
    double outlier_min_angle = 0.8;  ///< radians; must exceed inlier_spread
    std::optional<Descriptor> true_center;  ///< absent: drawn from the seed
    std::uint64_t seed = 42;
};

/// Synthetic cluster on the sphere: inliers first (indices
/// [0, inlier_count)), then outliers; all epsilons 1.
struct SphericalCluster {
    DescriptorSet set;
    Descriptor ground_truth;
};

/// Inliers are normalize(center + isotropic Gaussian tangent noise), with the
/// per-axis std chosen as inlier_spread / sqrt(dimension - 1) so the total
/// displacement has std inlier_spread. Outliers are uniform unit vectors
/// rejection-sampled to lie at least outlier_min_angle from the center.
SphericalCluster sample_spherical_cluster(const ClusterConfig& config);

struct ConvergenceCurve {
    ScalarExperimentConfig config;  ///< echo with iterations resolved
    std::vector<std::vector<double>> trial_locations;  ///< [trial][iteration]
    std::vector<std::vector<double>> trial_spreads;
    std::vector<double> location_mean;  ///< across trials, per iteration
    std::vector<double> location_std;   ///< sample std; zeros when trials == 1
    DistributionReference reference;
};

/// One robust-location trace per trial plus across-trial aggregation and the
/// distribution's closed-form reference constants.
ConvergenceCurve run_convergence_experiment(const ScalarExperimentConfig& config);

/// Across-trial standard deviations of m_q at the probe iterations
/// {1, 3, floor(log2(K+1)), floor(sqrt(K))}, each capped at the trace length,
/// and their ratios to the first-iteration baseline.
struct ReliabilityReport {
    ScalarExperimentConfig config;  ///< echo with iterations resolved
    std::array<int, 4> probe_iterations{};
    std::array<double, 4> spread{};  ///< s_q at each probe
    std::array<double, 4> ratio{};   ///< s_q / s_1; ratio[0] == 1
    std::vector<std::array<double, 4>> trial_locations;  ///< m_q per trial at the probes
};
ReliabilityReport run_reliability_experiment(const ScalarExperimentConfig& config);

struct RobustnessTrial {
    double mean_error = std::numeric_limits<double>::quiet_NaN();
    double mode_median_error = std::numeric_limits<double>::quiet_NaN();
    double geodesic_median_error = std::numeric_limits<double>::quiet_NaN();
    std::string mean_failure;  ///< empty when the estimator succeeded
    std::string mode_median_failure;
    std::string geodesic_median_failure;
};

struct RobustnessReport {
    ClusterConfig config;
    int trials = 0;
    std::uint64_t seed = 0;
    std::vector<RobustnessTrial> per_trial;
    int mode_median_wins = 0;  ///< trials with strictly smaller error than the mean's
    int geodesic_median_wins = 0;
    double max_mean_error = 0.0;  ///< maxima over successful trials
    double max_mode_median_error = 0.0;
    double max_geodesic_median_error = 0.0;
};

/// Per trial: draw a cluster (per-trial seed stream), run the mean,
/// mode-median (auto iterations), and geodesic-median centers, and score each
/// against the planted ground truth. Estimator failures are recorded in the
/// trial record rather than aborting the experiment.
RobustnessReport run_robustness_experiment(const ClusterConfig& cluster, int trials,
                                           std::uint64_t seed);

}  // namespace repdesc
