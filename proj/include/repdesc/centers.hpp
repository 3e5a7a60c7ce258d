#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "repdesc/descriptor.hpp"
#include "repdesc/errors.hpp"

namespace repdesc {

enum class CenterMethod { Mean, Karcher, GeodesicMedian, ModeMedian };

std::string_view to_string(CenterMethod method);
std::optional<CenterMethod> center_method_from_string(std::string_view name);

/// Central descriptor plus method metadata. `per_coordinate_spread` is filled
/// by the mode-median estimator only (empty otherwise). `iterations_used`
/// counts solver updates — 0 when the start point is already converged — or,
/// for the mode-median, the per-coordinate iteration count.
struct AggregationResult {
    Descriptor center;
    CenterMethod method = CenterMethod::Mean;
    std::vector<double> per_coordinate_spread;
    int iterations_used = 0;
};

/// An iterative solver exhausted its budget; carries the last iterate so
/// callers can inspect how far it got.
class ConvergenceError : public NumericalError {
public:
    ConvergenceError(const std::string& what, Descriptor last_iterate, int iterations)
        : NumericalError(what), last_iterate_(std::move(last_iterate)), iterations_(iterations) {}

    const Descriptor& last_iterate() const { return last_iterate_; }
    int iterations() const { return iterations_; }

private:
    Descriptor last_iterate_;
    int iterations_;
};

inline constexpr double kCenterTolerance = 1e-10;  // radians
inline constexpr int kCenterMaxIterations = 1000;
inline constexpr int kAutoIterations = 0;  ///< "derive the count from the set size"

/// Epsilon-weighted Euclidean mean projected back to the sphere.
AggregationResult mean_center(const DescriptorSet& set);

/// Minimizer of the epsilon-weighted sum of squared angular distances,
/// via intrinsic gradient iteration (log-map average, exp-map update, unit
/// step). Requires the positively weighted members to fit in an open
/// hemisphere around the normalized mean.
AggregationResult karcher_center(const DescriptorSet& set, double tolerance = kCenterTolerance,
                                 int max_iterations = kCenterMaxIterations);

/// Minimizer of the epsilon-weighted sum of angular distances (Weiszfeld
/// reweighting on the tangent space); more outlier-robust than the mean.
/// An iterate landing on an input descriptor drops that term for the step;
/// if the first-order condition holds there, that member is the minimizer.
AggregationResult geodesic_median_center(const DescriptorSet& set,
                                         double tolerance = kCenterTolerance,
                                         int max_iterations = kCenterMaxIterations);

/// Per-coordinate robust location (robust_scalar_location with the set's
/// epsilons), assembled across coordinates and normalized. `iterations` of
/// kAutoIterations selects iteration_count(K).
AggregationResult mode_median_center(const DescriptorSet& set, int iterations = kAutoIterations);

}  // namespace repdesc
