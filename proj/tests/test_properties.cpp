#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "repdesc/centers.hpp"
#include "repdesc/descriptor.hpp"
#include "repdesc/rng.hpp"
#include "repdesc/robust_location.hpp"
#include "repdesc/selection.hpp"
#include "repdesc/synth.hpp"
#include "test_util.hpp"

using repdesc::Descriptor;
using repdesc::DescriptorSet;
using repdesc::geodesic_median_center;
using repdesc::karcher_center;
using repdesc::mean_center;
using repdesc::mode_median_center;
using repdesc::normalize;
using repdesc::robust_scalar_location;
using repdesc::RobustLocationTrace;
using repdesc::Xoshiro256pp;
using testutil::angular_gap;

namespace {

DescriptorSet random_cluster_set(std::size_t dimension, std::size_t count, double spread,
                                 std::uint64_t seed) {
    repdesc::ClusterConfig config;
    config.dimension = dimension;
    config.inlier_count = count;
    config.outlier_count = 0;
    config.inlier_spread = spread;
    config.seed = seed;
    return repdesc::sample_spherical_cluster(config).set;
}

}  // namespace

TEST_CASE("canonically ordered inputs give bit-identical scalar results") {
    // The scalar core fixes a left-to-right summation order, so the
    // reproducibility contract is: equal sequences give equal bits, and any
    // permutation agrees after canonical (sorted) reordering.
    Xoshiro256pp rng(1);
    std::vector<double> values(257);
    for (double& v : values) v = rng.normal() * 3.0 + 1.0;

    std::vector<double> shuffled = values;
    for (std::size_t i = shuffled.size() - 1; i > 0; --i) {
        std::swap(shuffled[i], shuffled[rng.next() % (i + 1)]);
    }
    REQUIRE(shuffled != values);

    std::vector<double> canonical_a = values;
    std::vector<double> canonical_b = shuffled;
    std::sort(canonical_a.begin(), canonical_a.end());
    std::sort(canonical_b.begin(), canonical_b.end());
    const RobustLocationTrace a = robust_scalar_location(canonical_a, 5);
    const RobustLocationTrace b = robust_scalar_location(canonical_b, 5);
    CHECK(a.locations == b.locations);
    CHECK(a.spreads == b.spreads);

    // Without reordering the change is bounded by compensated-summation
    // noise, far below any statistical use of the estimate.
    const RobustLocationTrace raw = robust_scalar_location(values, 5);
    const RobustLocationTrace permuted = robust_scalar_location(shuffled, 5);
    for (int q = 0; q < 5; ++q) {
        CHECK(raw.locations[q] ==
              doctest::Approx(permuted.locations[q]).epsilon(1e-12));
    }
}

TEST_CASE("permuting set members permutes selection through the same map") {
    Xoshiro256pp rng(52);
    const DescriptorSet set = random_cluster_set(5, 9, 0.3, 77);
    std::vector<std::size_t> perm(set.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = perm.size() - 1; i > 0; --i) {
        std::swap(perm[i], perm[rng.next() % (i + 1)]);
    }
    std::vector<Descriptor> shuffled;
    shuffled.reserve(set.size());
    for (std::size_t k = 0; k < set.size(); ++k) shuffled.push_back(set[perm[k]]);
    const DescriptorSet permuted(shuffled);

    const auto original = repdesc::select_pairwise(set, 2);
    const auto reordered = repdesc::select_pairwise(permuted, 2);
    CHECK(perm[reordered.selected_index] == original.selected_index);
    for (std::size_t k = 0; k < set.size(); ++k) {
        CHECK(reordered.scores[k] == doctest::Approx(original.scores[perm[k]]).epsilon(1e-12));
    }
}

TEST_CASE("permuting set members moves the robust center only by summation noise") {
    const DescriptorSet set = random_cluster_set(6, 12, 0.25, 3001);
    std::vector<Descriptor> reversed;
    for (std::size_t k = set.size(); k-- > 0;) reversed.push_back(set[k]);
    const DescriptorSet flipped(reversed);
    CHECK(angular_gap(mode_median_center(set, 4).center,
                      mode_median_center(flipped, 4).center) <= 1e-12);
    CHECK(angular_gap(mean_center(set).center, mean_center(flipped).center) <= 1e-12);
}

TEST_CASE("scalar core scales exactly by powers of two") {
    Xoshiro256pp rng(6);
    std::vector<double> values(101);
    for (double& v : values) v = rng.normal() + 2.0;
    std::vector<double> scaled = values;
    for (double& v : scaled) v *= 4.0;

    const RobustLocationTrace base = robust_scalar_location(values, 5);
    const RobustLocationTrace wide = robust_scalar_location(scaled, 5);
    for (int q = 0; q < 5; ++q) {
        CHECK(wide.locations[q] == 4.0 * base.locations[q]);
        CHECK(wide.spreads[q] == 4.0 * base.spreads[q]);
    }
    CHECK(wide.final_weights == base.final_weights);
}

TEST_CASE("scalar core is shift- and scale-equivariant") {
    Xoshiro256pp rng(61);
    std::vector<double> values(151);
    for (double& v : values) v = rng.exponential();
    const double a = 2.5;
    const double b = -1.75;
    std::vector<double> transformed = values;
    for (double& v : transformed) v = a * v + b;

    const RobustLocationTrace base = robust_scalar_location(values, 6);
    const RobustLocationTrace moved = robust_scalar_location(transformed, 6);
    for (int q = 0; q < 6; ++q) {
        CHECK(moved.locations[q] ==
              doctest::Approx(a * base.locations[q] + b).epsilon(1e-9));
        CHECK(moved.spreads[q] == doctest::Approx(a * base.spreads[q]).epsilon(1e-9));
    }
}

TEST_CASE("every center estimator returns a unit vector") {
    Xoshiro256pp rng(14);
    for (int rep = 0; rep < 10; ++rep) {
        const DescriptorSet set =
            random_cluster_set(3 + rep % 5, 6 + rep, 0.2 + 0.02 * rep, 1000 + rep);
        for (const auto& result :
             {mean_center(set), karcher_center(set), geodesic_median_center(set),
              mode_median_center(set)}) {
            double norm_sq = 0.0;
            for (std::size_t i = 0; i < set.dimension(); ++i) {
                norm_sq += result.center[i] * result.center[i];
            }
            CHECK(std::abs(std::sqrt(norm_sq) - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("sphere centers are rotation equivariant") {
    Xoshiro256pp rng(2040);
    const DescriptorSet set = random_cluster_set(6, 8, 0.2, 97);
    const auto rotation = testutil::random_rotation(6, rng);
    const DescriptorSet rotated = testutil::rotate_set(rotation, set);

    CHECK(angular_gap(testutil::rotate(rotation, mean_center(set).center),
                      mean_center(rotated).center) < 1e-9);
    CHECK(angular_gap(testutil::rotate(rotation, karcher_center(set).center),
                      karcher_center(rotated).center) < 1e-9);
    CHECK(angular_gap(testutil::rotate(rotation, geodesic_median_center(set).center),
                      geodesic_median_center(rotated).center) < 1e-8);
}

TEST_CASE("mode-median center rides coordinate permutations") {
    const DescriptorSet set = random_cluster_set(7, 11, 0.3, 4242);
    const std::vector<std::size_t> perm{3, 0, 6, 1, 5, 2, 4};
    std::vector<Descriptor> remapped;
    for (std::size_t k = 0; k < set.size(); ++k) {
        std::vector<double> coords(7);
        for (std::size_t i = 0; i < 7; ++i) coords[i] = set[k][perm[i]];
        remapped.push_back(normalize(coords));
    }
    const Descriptor base = mode_median_center(set, 3).center;
    const Descriptor moved = mode_median_center(DescriptorSet(remapped), 3).center;
    std::vector<double> unshuffled(7);
    for (std::size_t i = 0; i < 7; ++i) unshuffled[i] = moved[i];
    std::vector<double> expected(7);
    for (std::size_t i = 0; i < 7; ++i) expected[i] = base[perm[i]];
    CHECK(angular_gap(normalize(unshuffled), normalize(expected)) <= 1e-12);
}

TEST_CASE("mode-median center negates a sign-flipped coordinate exactly") {
    const DescriptorSet seed_set = random_cluster_set(5, 9, 0.25, 555);
    // Build both sets through the identical normalize pass so the only
    // difference between them is the sign of coordinate 2.
    std::vector<Descriptor> straight;
    std::vector<Descriptor> flipped;
    for (std::size_t k = 0; k < seed_set.size(); ++k) {
        std::vector<double> coords(5);
        for (std::size_t i = 0; i < 5; ++i) coords[i] = seed_set[k][i];
        straight.push_back(normalize(coords));
        coords[2] = -coords[2];
        flipped.push_back(normalize(coords));
    }
    const Descriptor base = mode_median_center(DescriptorSet(straight), 3).center;
    const Descriptor mirrored = mode_median_center(DescriptorSet(flipped), 3).center;
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(mirrored[i] == (i == 2 ? -base[i] : base[i]));
    }
}

TEST_CASE("selection tie-breaks are deterministic across repetition") {
    const Descriptor center({1.0, 0.0, 0.0});
    // All three share first coordinate cos(0.2), so the center-similarity
    // scores tie exactly three ways and the lowest index must win.
    const DescriptorSet trio(std::vector<Descriptor>{
        normalize(std::vector<double>{std::cos(0.2), std::sin(0.2), 0.0}),
        normalize(std::vector<double>{std::cos(0.2), -std::sin(0.2), 0.0}),
        normalize(std::vector<double>{std::cos(0.2), 0.0, std::sin(0.2)})});
    // A mirror pair scores identically under any pairwise exponent.
    const DescriptorSet pair(std::vector<Descriptor>{
        normalize(std::vector<double>{std::cos(0.2), std::sin(0.2), 0.0}),
        normalize(std::vector<double>{std::cos(0.2), -std::sin(0.2), 0.0})});
    for (int rep = 0; rep < 20; ++rep) {
        CHECK(repdesc::select_by_center(trio, center).selected_index == 0);
        CHECK(repdesc::select_pairwise(pair, 1).selected_index == 0);
        CHECK(repdesc::select_pairwise(pair, 2).selected_index == 0);
    }
}

TEST_CASE("pose weight hits its boundary values") {
    CHECK(repdesc::pose_weight(0.0, 2) == 1.0);
    CHECK(repdesc::pose_weight(0.0, 7) == 1.0);
    CHECK(repdesc::pose_weight(std::numbers::pi / 2, 2) == 0.0);
    CHECK(repdesc::pose_weight(std::numbers::pi / 2 + 0.01, 4) == 0.0);
    CHECK(repdesc::pose_weight(std::numbers::pi, 2) == 0.0);
}

TEST_CASE("scaling all epsilons rescales nothing that matters") {
    const DescriptorSet base = random_cluster_set(6, 10, 0.3, 808);
    std::vector<double> eps(base.size());
    Xoshiro256pp rng(9090);
    for (double& e : eps) e = 0.2 + rng.uniform01();
    std::vector<double> scaled = eps;
    for (double& e : scaled) e *= 7.0;
    const DescriptorSet weighted(base.descriptors(), eps);
    const DescriptorSet rescaled(base.descriptors(), scaled);

    CHECK(angular_gap(mean_center(weighted).center, mean_center(rescaled).center) <= 1e-12);
    CHECK(angular_gap(mode_median_center(weighted, 4).center,
                      mode_median_center(rescaled, 4).center) <= 1e-12);
    CHECK(angular_gap(geodesic_median_center(weighted).center,
                      geodesic_median_center(rescaled).center) <= 1e-10);
    CHECK(repdesc::select_pairwise(weighted, 2).selected_index ==
          repdesc::select_pairwise(rescaled, 2).selected_index);
}
