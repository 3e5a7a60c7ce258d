#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace repdesc {

/// Unit-length feature vector — a point on the hypersphere.
///
/// Construction validates dimension (at least 2), finiteness, and unit norm
/// within 1e-6 (files carry limited precision), then stores the coordinates
/// exactly renormalized.
class Descriptor {
public:
    explicit Descriptor(std::vector<double> coords);

    std::size_t dimension() const { return coords_.size(); }
    std::span<const double> coords() const { return coords_; }
    double operator[](std::size_t i) const { return coords_[i]; }

    /// Compensated dot product; dimensions must match.
    double dot(const Descriptor& other) const;

private:
    struct Trusted {};  // tag: coordinates already normalized by the library
    Descriptor(std::vector<double> coords, Trusted) : coords_(std::move(coords)) {}
    friend Descriptor normalize(std::span<const double> vector);

    std::vector<double> coords_;
};

/// Scale a vector to unit length. A near-zero norm (<= 1e-12) signals a
/// degenerate average — e.g. the sum of antipodal vectors — and is an error.
Descriptor normalize(std::span<const double> vector);

/// Great-circle distance in radians, in [0, pi]. The dot product is clamped
/// to [-1, 1] first: rounding can push unit-vector dots past the ends.
double angular_distance(const Descriptor& u, const Descriptor& v);

/// View-angle attenuation cos^p(theta) for theta < pi/2, else 0. `theta`
/// must lie in [0, pi]; `exponent` must be an integer >= 2.
double pose_weight(double theta, int exponent);

/// K >= 2 descriptors of equal dimension plus per-descriptor importance
/// weights epsilon_k >= 0 (default 1) with a positive total. Members with
/// epsilon 0 are carried but ignored by every estimator and are not
/// candidates for pairwise selection.
class DescriptorSet {
public:
    explicit DescriptorSet(std::vector<Descriptor> descriptors);
    DescriptorSet(std::vector<Descriptor> descriptors, std::vector<double> epsilons);

    std::size_t size() const { return descriptors_.size(); }
    std::size_t dimension() const { return descriptors_.front().dimension(); }
    const Descriptor& operator[](std::size_t k) const { return descriptors_[k]; }
    const std::vector<Descriptor>& descriptors() const { return descriptors_; }
    std::span<const double> epsilons() const { return epsilons_; }
    double epsilon_sum() const { return epsilon_sum_; }

private:
    std::vector<Descriptor> descriptors_;
    std::vector<double> epsilons_;
    double epsilon_sum_ = 0.0;
};

}  // namespace repdesc
