#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "repdesc/descriptor.hpp"
#include "repdesc/errors.hpp"
#include "test_util.hpp"

using repdesc::angular_distance;
using repdesc::Descriptor;
using repdesc::DescriptorSet;
using repdesc::InvalidInputError;
using repdesc::normalize;
using repdesc::NumericalError;
using repdesc::pose_weight;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("descriptor construction validates dimension, finiteness, norm") {
    CHECK_THROWS_WITH_AS(Descriptor({1.0}), "descriptor needs at least 2 coordinates",
                         InvalidInputError);
    CHECK_THROWS_WITH_AS(Descriptor({1.0, std::numeric_limits<double>::infinity()}),
                         "non-finite descriptor coordinate", InvalidInputError);
    CHECK_THROWS_WITH_AS(Descriptor({0.5, 0.5}), "descriptor is not unit length",
                         InvalidInputError);
    CHECK_NOTHROW(Descriptor({1.0, 0.0}));
}

TEST_CASE("construction renormalizes small deviations away") {
    const Descriptor d({1.0 + 5e-7, 0.0, 0.0});
    double norm_sq = 0.0;
    for (std::size_t i = 0; i < d.dimension(); ++i) norm_sq += d[i] * d[i];
    CHECK(std::abs(std::sqrt(norm_sq) - 1.0) <= 1e-15);
}

TEST_CASE("normalize scales exactly on a 3-4-5 triangle") {
    const Descriptor d = normalize(std::vector<double>{3.0, 4.0});
    CHECK(d[0] == 0.6);
    CHECK(d[1] == 0.8);
}

TEST_CASE("normalize rejects near-zero and non-finite input") {
    CHECK_THROWS_WITH_AS(normalize(std::vector<double>{0.0, 0.0}), "unnormalizable vector",
                         NumericalError);
    CHECK_THROWS_WITH_AS(normalize(std::vector<double>{1e-13, 0.0}), "unnormalizable vector",
                         NumericalError);
    // Non-finite coordinates are an input defect, caught before any numerics.
    CHECK_THROWS_WITH_AS(normalize(std::vector<double>{std::nan(""), 1.0}),
                         "non-finite descriptor coordinate", InvalidInputError);
}

TEST_CASE("dot product requires matching dimensions") {
    const Descriptor a({1.0, 0.0});
    const Descriptor b({1.0, 0.0, 0.0});
    CHECK_THROWS_WITH_AS(a.dot(b), "descriptor dimension mismatch", InvalidInputError);
}

TEST_CASE("angular distance on axis-aligned cases") {
    const Descriptor ex({1.0, 0.0, 0.0});
    const Descriptor ey({0.0, 1.0, 0.0});
    const Descriptor mex({-1.0, 0.0, 0.0});
    CHECK(angular_distance(ex, ex) == 0.0);
    CHECK(angular_distance(ex, ey) == doctest::Approx(kPi / 2).epsilon(1e-15));
    CHECK(angular_distance(ex, mex) == doctest::Approx(kPi).epsilon(1e-15));
}

TEST_CASE("angular distance survives dot products that round past one") {
    // Two renormalized copies of the same direction: the compensated dot can
    // land a hair above 1; the clamp must keep acos defined.
    const Descriptor a = normalize(std::vector<double>{0.1, 0.2, 0.3, 0.4});
    const Descriptor b = normalize(std::vector<double>{0.1, 0.2, 0.3, 0.4});
    const double d = angular_distance(a, b);
    CHECK(std::isfinite(d));
    CHECK(d >= 0.0);
    CHECK(d < 1e-7);
}

TEST_CASE("pose weight boundary and interior values") {
    CHECK(pose_weight(0.0, 2) == 1.0);
    CHECK(pose_weight(kPi / 2, 2) == 0.0);
    CHECK(pose_weight(2.0, 2) == 0.0);
    CHECK(pose_weight(kPi, 3) == 0.0);
    CHECK(pose_weight(kPi / 4, 2) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(pose_weight(kPi / 3, 2) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(pose_weight(kPi / 3, 4) == doctest::Approx(0.0625).epsilon(1e-12));
}

TEST_CASE("pose weight is non-increasing in the angle") {
    for (int p : {2, 3, 5}) {
        double previous = pose_weight(0.0, p);
        for (int i = 1; i <= 100; ++i) {
            const double theta = kPi * i / 100.0;
            const double w = pose_weight(theta, p);
            CHECK(w <= previous);
            CHECK(w >= 0.0);
            previous = w;
        }
    }
}

TEST_CASE("pose weight validates its arguments") {
    CHECK_THROWS_WITH_AS(pose_weight(-0.1, 2), "pose angle outside [0, pi]", InvalidInputError);
    CHECK_THROWS_WITH_AS(pose_weight(kPi + 0.1, 2), "pose angle outside [0, pi]",
                         InvalidInputError);
    CHECK_THROWS_WITH_AS(pose_weight(0.5, 1), "pose exponent must be at least 2",
                         InvalidInputError);
}

TEST_CASE("descriptor set validates membership and weights") {
    std::vector<Descriptor> pair{Descriptor({1.0, 0.0}), Descriptor({0.0, 1.0})};
    CHECK_THROWS_WITH_AS(DescriptorSet(std::vector<Descriptor>{Descriptor({1.0, 0.0})}),
                         "descriptor set needs at least 2 descriptors", InvalidInputError);
    CHECK_THROWS_WITH_AS(
        DescriptorSet(std::vector<Descriptor>{Descriptor({1.0, 0.0}),
                                              Descriptor({0.0, 1.0, 0.0})}),
        "descriptor dimension mismatch", InvalidInputError);
    CHECK_THROWS_WITH_AS(DescriptorSet(pair, std::vector<double>{1.0}),
                         "epsilon count mismatch", InvalidInputError);
    CHECK_THROWS_WITH_AS(DescriptorSet(pair, std::vector<double>{1.0, -1.0}),
                         "epsilon weights must be finite and non-negative", InvalidInputError);
    CHECK_THROWS_WITH_AS(DescriptorSet(pair, std::vector<double>{0.0, 0.0}),
                         "epsilon weights sum to zero", InvalidInputError);
}

TEST_CASE("descriptor set defaults epsilons to one and sums them") {
    const DescriptorSet set(
        std::vector<Descriptor>{Descriptor({1.0, 0.0}), Descriptor({0.0, 1.0})});
    REQUIRE(set.size() == 2);
    CHECK(set.dimension() == 2);
    CHECK(set.epsilons()[0] == 1.0);
    CHECK(set.epsilons()[1] == 1.0);
    CHECK(set.epsilon_sum() == 2.0);

    const DescriptorSet weighted(
        std::vector<Descriptor>{Descriptor({1.0, 0.0}), Descriptor({0.0, 1.0})},
        std::vector<double>{0.25, 1.5});
    CHECK(weighted.epsilon_sum() == 1.75);
}

TEST_CASE("chord-based test helper agrees with the acos distance away from zero") {
    repdesc::Xoshiro256pp rng(99);
    for (int i = 0; i < 50; ++i) {
        const Descriptor u = testutil::random_unit(8, rng);
        const Descriptor v = testutil::random_unit(8, rng);
        CHECK(testutil::angular_gap(u, v) ==
              doctest::Approx(angular_distance(u, v)).epsilon(1e-9));
    }
}
