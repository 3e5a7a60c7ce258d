#include "repdesc/descriptor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "repdesc/errors.hpp"
#include "repdesc/summation.hpp"

namespace repdesc {
namespace {

double checked_norm(std::span<const double> coords) {
    if (coords.size() < 2) throw InvalidInputError("descriptor needs at least 2 coordinates");
    for (double c : coords) {
        if (!std::isfinite(c)) throw InvalidInputError("non-finite descriptor coordinate");
    }
    return std::sqrt(compensated_dot(coords, coords));
}

}  // namespace

Descriptor::Descriptor(std::vector<double> coords) : coords_(std::move(coords)) {
    const double norm = checked_norm(coords_);
    if (std::abs(norm - 1.0) > 1e-6) throw InvalidInputError("descriptor is not unit length");
    for (double& c : coords_) c /= norm;
}

double Descriptor::dot(const Descriptor& other) const {
    if (other.dimension() != dimension()) throw InvalidInputError("descriptor dimension mismatch");
    return compensated_dot(coords_, other.coords_);
}

Descriptor normalize(std::span<const double> vector) {
    const double norm = checked_norm(vector);
    if (!std::isfinite(norm) || norm <= 1e-12) throw NumericalError("unnormalizable vector");
    std::vector<double> scaled(vector.begin(), vector.end());
    for (double& c : scaled) c /= norm;
    return Descriptor(std::move(scaled), Descriptor::Trusted{});
}

double angular_distance(const Descriptor& u, const Descriptor& v) {
    return std::acos(std::clamp(u.dot(v), -1.0, 1.0));
}

double pose_weight(double theta, int exponent) {
    if (!(theta >= 0.0 && theta <= std::numbers::pi)) {
        throw InvalidInputError("pose angle outside [0, pi]");
    }
    if (exponent < 2) throw InvalidInputError("pose exponent must be at least 2");
    if (theta >= std::numbers::pi / 2.0) return 0.0;
    return std::pow(std::cos(theta), exponent);
}

DescriptorSet::DescriptorSet(std::vector<Descriptor> descriptors)
    : DescriptorSet(std::move(descriptors), std::vector<double>{}) {}

DescriptorSet::DescriptorSet(std::vector<Descriptor> descriptors, std::vector<double> epsilons)
    : descriptors_(std::move(descriptors)), epsilons_(std::move(epsilons)) {
    if (descriptors_.size() < 2) {
        throw InvalidInputError("descriptor set needs at least 2 descriptors");
    }
    const std::size_t n = descriptors_.front().dimension();
    for (const Descriptor& d : descriptors_) {
        if (d.dimension() != n) throw InvalidInputError("descriptor dimension mismatch");
    }
    if (epsilons_.empty()) epsilons_.assign(descriptors_.size(), 1.0);
    if (epsilons_.size() != descriptors_.size()) throw InvalidInputError("epsilon count mismatch");
    CompensatedSum total;
    for (double e : epsilons_) {
        if (!(e >= 0.0) || !std::isfinite(e)) {
            throw InvalidInputError("epsilon weights must be finite and non-negative");
        }
        total.add(e);
    }
    epsilon_sum_ = total.value();
    if (!(epsilon_sum_ > 0.0)) throw InvalidInputError("epsilon weights sum to zero");
}

}  // namespace repdesc
