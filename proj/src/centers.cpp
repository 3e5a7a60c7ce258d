#include "repdesc/centers.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "repdesc/robust_location.hpp"
#include "repdesc/summation.hpp"

namespace repdesc {
namespace {

// Tangent vector at `base` pointing toward `point`, with length equal to the
// angle between them (the inverse of exp_map). Writes into `out` and returns
// the angle; the tangent is zero when the points coincide.
double log_map_into(std::span<const double> base, const Descriptor& point, std::span<double> out) {
    const std::size_t n = base.size();
    const double cosine = std::clamp(compensated_dot(base, point.coords()), -1.0, 1.0);
    const double angle = std::acos(cosine);
    // residual = point - cos * base is orthogonal to base with norm sin(angle)
    CompensatedSum norm_sq;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = point[i] - cosine * base[i];
        norm_sq.add(out[i] * out[i]);
    }
    const double rnorm = std::sqrt(std::max(0.0, norm_sq.value()));
    if (rnorm <= 1e-15) {
        std::fill(out.begin(), out.end(), 0.0);
        return angle;
    }
    const double scale = angle / rnorm;
    for (std::size_t i = 0; i < n; ++i) out[i] *= scale;
    return angle;
}

// Walk from `base` along `tangent` (arc length = |tangent|), staying on the
// sphere; the result is renormalized to cancel accumulated drift.
std::vector<double> exp_map(std::span<const double> base, std::span<const double> tangent) {
    const std::size_t n = base.size();
    CompensatedSum norm_sq;
    for (double t : tangent) norm_sq.add(t * t);
    const double angle = std::sqrt(std::max(0.0, norm_sq.value()));
    std::vector<double> out(base.begin(), base.end());
    if (angle <= 1e-16) return out;
    const double c = std::cos(angle);
    const double s = std::sin(angle) / angle;
    for (std::size_t i = 0; i < n; ++i) out[i] = c * base[i] + s * tangent[i];
    CompensatedSum out_sq;
    for (double v : out) out_sq.add(v * v);
    const double norm = std::sqrt(out_sq.value());
    for (double& v : out) v /= norm;
    return out;
}

double norm_of(std::span<const double> v) {
    CompensatedSum sq;
    for (double x : v) sq.add(x * x);
    return std::sqrt(std::max(0.0, sq.value()));
}

// Shared precondition of the intrinsic solvers: the normalized mean exists
// and every positively weighted member lies strictly in its hemisphere.
Descriptor hemisphere_anchor(const DescriptorSet& set) {
    std::optional<Descriptor> anchor;
    try {
        anchor = mean_center(set).center;
    } catch (const NumericalError&) {
        throw NumericalError("cluster too dispersed");
    }
    const auto eps = set.epsilons();
    for (std::size_t k = 0; k < set.size(); ++k) {
        if (eps[k] > 0.0 && set[k].dot(*anchor) <= 0.0) {
            throw NumericalError("cluster too dispersed");
        }
    }
    return std::move(*anchor);
}

void validate_solver_params(double tolerance, int max_iterations) {
    if (!(tolerance > 0.0)) throw InvalidInputError("tolerance must be positive");
    if (max_iterations < 1) throw InvalidInputError("max iterations must be positive");
}

}  // namespace

std::string_view to_string(CenterMethod method) {
    switch (method) {
        case CenterMethod::Mean: return "mean";
        case CenterMethod::Karcher: return "karcher";
        case CenterMethod::GeodesicMedian: return "geodesic_median";
        case CenterMethod::ModeMedian: return "mode_median";
    }
    return "unknown";
}

std::optional<CenterMethod> center_method_from_string(std::string_view name) {
    if (name == "mean") return CenterMethod::Mean;
    if (name == "karcher") return CenterMethod::Karcher;
    if (name == "geodesic_median") return CenterMethod::GeodesicMedian;
    if (name == "mode_median") return CenterMethod::ModeMedian;
    return std::nullopt;
}

AggregationResult mean_center(const DescriptorSet& set) {
    const std::size_t n = set.dimension();
    const std::size_t count = set.size();
    std::vector<double> column(count);
    std::vector<double> average(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < count; ++k) column[k] = set[k][i];
        average[i] = weighted_mean(column, set.epsilons());
    }
    return {normalize(average), CenterMethod::Mean, {}, 0};
}

AggregationResult karcher_center(const DescriptorSet& set, double tolerance, int max_iterations) {
    validate_solver_params(tolerance, max_iterations);
    const Descriptor anchor = hemisphere_anchor(set);
    const std::size_t n = set.dimension();
    const auto eps = set.epsilons();

    std::vector<double> w(anchor.coords().begin(), anchor.coords().end());
    std::vector<double> tangent(n);
    std::vector<double> step(n);

    for (int iter = 0; iter <= max_iterations; ++iter) {
        std::vector<CompensatedSum> num(n);
        CompensatedSum den;
        for (std::size_t k = 0; k < set.size(); ++k) {
            if (eps[k] == 0.0) continue;
            log_map_into(w, set[k], tangent);
            for (std::size_t i = 0; i < n; ++i) num[i].add(eps[k] * tangent[i]);
            den.add(eps[k]);
        }
        for (std::size_t i = 0; i < n; ++i) step[i] = num[i].value() / den.value();
        if (norm_of(step) < tolerance) {
            return {normalize(w), CenterMethod::Karcher, {}, iter};
        }
        if (iter == max_iterations) {
            throw ConvergenceError("karcher center did not converge", normalize(w), iter);
        }
        w = exp_map(w, step);
    }
    throw NumericalError("karcher center did not converge");  // unreachable
}

AggregationResult geodesic_median_center(const DescriptorSet& set, double tolerance,
                                         int max_iterations) {
    validate_solver_params(tolerance, max_iterations);
    const Descriptor anchor = hemisphere_anchor(set);
    const std::size_t n = set.dimension();
    const auto eps = set.epsilons();

    std::vector<double> w(anchor.coords().begin(), anchor.coords().end());
    std::vector<double> tangent(n);
    std::vector<double> step(n);

    for (int iter = 0; iter <= max_iterations; ++iter) {
        std::vector<CompensatedSum> num(n);
        CompensatedSum den;
        double anchored_weight = 0.0;
        std::size_t anchored_index = set.size();
        for (std::size_t k = 0; k < set.size(); ++k) {
            if (eps[k] == 0.0) continue;
            const double angle = log_map_into(w, set[k], tangent);
            if (angle < tolerance) {
                // Weiszfeld singularity: drop the coinciding member's term
                // for this step and remember it for the optimality check.
                anchored_weight += eps[k];
                if (anchored_index == set.size()) anchored_index = k;
                continue;
            }
            const double scale = eps[k] / angle;
            for (std::size_t i = 0; i < n; ++i) num[i].add(scale * tangent[i]);
            den.add(scale);
        }

        if (anchored_index < set.size()) {
            // First-order condition at an input point: the combined pull of
            // the remaining members cannot exceed the weight sitting there.
            std::vector<double> residual(n);
            for (std::size_t i = 0; i < n; ++i) residual[i] = num[i].value();
            if (norm_of(residual) <= anchored_weight) {
                return {set[anchored_index], CenterMethod::GeodesicMedian, {}, iter};
            }
        }
        if (!(den.value() > 0.0)) throw NumericalError("degenerate median weights");

        for (std::size_t i = 0; i < n; ++i) step[i] = num[i].value() / den.value();
        if (norm_of(step) < tolerance) {
            return {normalize(w), CenterMethod::GeodesicMedian, {}, iter};
        }
        if (iter == max_iterations) {
            throw ConvergenceError("geodesic median did not converge", normalize(w), iter);
        }
        w = exp_map(w, step);
    }
    throw NumericalError("geodesic median did not converge");  // unreachable
}

AggregationResult mode_median_center(const DescriptorSet& set, int iterations) {
    if (iterations < 0) throw InvalidInputError("iteration count must be positive");
    const int q = iterations == kAutoIterations
                      ? iteration_count(static_cast<std::int64_t>(set.size()))
                      : iterations;
    const std::size_t n = set.dimension();
    const std::size_t count = set.size();

    std::vector<double> column(count);
    std::vector<double> location(n);
    std::vector<double> spread(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < count; ++k) column[k] = set[k][i];
        const RobustLocationTrace trace = robust_scalar_location(column, set.epsilons(), q);
        location[i] = trace.final_location();
        spread[i] = trace.final_spread();
    }

    std::optional<Descriptor> center;
    try {
        center = normalize(location);
    } catch (const NumericalError&) {
        throw NumericalError("degenerate mode-median vector");
    }
    return {std::move(*center), CenterMethod::ModeMedian, std::move(spread), q};
}

}  // namespace repdesc
