#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ks/gadget.hpp"
#include "ks/graph.hpp"

using namespace ks;

namespace {

// 40-digit roots of the closed-form cosine = cos 18 deg, computed offline with
// arbitrary-precision root finding.
constexpr double kDiagonal18 = 0.78615137775742328607;  // x = y
constexpr double kCompanion18 = 0.65915342923780328967; // y at x = 1
constexpr double kSqrt8Over3 = 0.94280904158206336587;
constexpr double kBoundRad = 0.3398369094541219371;

double angle_from_rays(const GadgetSet& g)
{
    const double c = std::abs(dot(g.ray(GadgetRole::S0).xyz(), g.ray(GadgetRole::S3_3).xyz()));
    return std::acos(std::min(1.0, c));
}

} // namespace

TEST_CASE("gadget vectors at x = y = 1")
{
    const GadgetSet g = build_gadget(1.0, 1.0);
    const Ray3& s0 = g.ray(GadgetRole::S0);
    const double r3 = 1.0 / std::sqrt(3.0);
    CHECK(s0[0] == doctest::Approx(r3).epsilon(1e-12));
    CHECK(s0[1] == doctest::Approx(-r3).epsilon(1e-12));
    CHECK(s0[2] == doctest::Approx(r3).epsilon(1e-12));
    CHECK(g.ortho_edges.size() == 15);
    CHECK(max_orthogonality_residual(g) <= 1e-12);
    CHECK(g.ray(GadgetRole::S2_1).xyz() == Vec3{1, 0, 0});
    CHECK(g.ray(GadgetRole::S3_2).xyz() == Vec3{0, 0, 1});
}

TEST_CASE("orthogonality relations for random parameters")
{
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int n = 0; n < 1000; ++n) {
        const GadgetSet g = build_gadget(u(rng), u(rng));
        REQUIRE(g.ortho_edges.size() == 15);
        CHECK(max_orthogonality_residual(g) <= 1e-9);
        CHECK(std::abs(dot(g.ray(GadgetRole::S0).xyz(), g.ray(GadgetRole::S2_2).xyz())) <= 1e-12);
        CHECK(std::abs(gadget_angle(g.x, g.y) - angle_from_rays(g)) <= 1e-9);
        CHECK(std::abs(gadget_angle(g.x, g.y) - gadget_ray_angle(g)) <= 1e-9);
        CHECK(gadget_angle(g.x, g.y) <= gadget_angle_bound() + 1e-9);
    }
}

TEST_CASE("degenerate and limiting parameters")
{
    const GadgetSet g = build_gadget(0.0, 0.0);
    CHECK(g.ray(GadgetRole::S0).xyz() == g.ray(GadgetRole::S3_3).xyz());
    CHECK(g.ray(GadgetRole::S0).xyz() == Vec3{0, 0, 1});
    CHECK(gadget_angle(0.0, 0.0) == 0.0);
    CHECK(gadget_angle(1e-4, 1e-4) < 1e-3);
    CHECK_THROWS_AS(build_gadget(NAN, 1.0), DegenerateParameterError);
    CHECK_THROWS_AS(build_gadget(1.0, INFINITY), DegenerateParameterError);
    CHECK_THROWS_AS(gadget_angle(NAN, 0.0), DegenerateParameterError);
}

TEST_CASE("angle law and its bound")
{
    CHECK(gadget_angle_bound() == doctest::Approx(kBoundRad).epsilon(1e-15));
    CHECK(gadget_angle(1.0, 1.0) == doctest::Approx(kBoundRad).epsilon(1e-12));
    CHECK(gadget_angle(-1.0, -1.0) == doctest::Approx(kBoundRad).epsilon(1e-12));
    CHECK(radians_to_degrees(gadget_angle(1.0, 1.0)) == doctest::Approx(19.4712206).epsilon(1e-8));
    CHECK(gadget_cosine(1.0, 1.0) == doctest::Approx(kSqrt8Over3).epsilon(1e-15));
}

TEST_CASE("parameter inversion")
{
    CHECK(solve_parameter_for_angle(gadget_angle_bound()) == doctest::Approx(1.0).epsilon(1e-6));
    const double t = solve_parameter_for_angle(degrees_to_radians(18.0));
    CHECK(t > 0.0);
    CHECK(t < 1.0);
    CHECK(std::abs(t - kDiagonal18) < 1e-12);
    CHECK(std::abs(gadget_angle(t, t) - degrees_to_radians(18.0)) <= 1e-9);

    const double y = solve_companion_parameter(1.0, degrees_to_radians(18.0));
    CHECK(std::abs(y - kCompanion18) < 1e-12);
    CHECK(std::abs(gadget_angle(1.0, y) - degrees_to_radians(18.0)) <= 1e-9);

    CHECK_THROWS_AS(solve_parameter_for_angle(degrees_to_radians(25.0)), OutOfRangeError);
    CHECK_THROWS_AS(solve_parameter_for_angle(0.0), OutOfRangeError);
    CHECK_THROWS_AS(solve_parameter_for_angle(-0.1), OutOfRangeError);
    CHECK_THROWS_AS(solve_companion_parameter(0.2, degrees_to_radians(18.0)), OutOfRangeError);
}

TEST_CASE("bound minimization")
{
    const BoundSearch b = minimize_gadget_cosine();
    CHECK(std::abs(b.min_cosine - kSqrt8Over3) <= 1e-6);
    // the cosine is even in x and in y, so every quadrant holds a minimizer
    CHECK(b.argmins.size() == 4);
    for (const auto& [x, y] : b.argmins) {
        CHECK(std::abs(std::abs(x) - 1.0) < 1e-4);
        CHECK(std::abs(std::abs(y) - 1.0) < 1e-4);
    }
    CHECK(gadget_cosine(1.0, -1.0) == gadget_cosine(1.0, 1.0));
    const BoundSearch coarse = minimize_gadget_cosine(11, 2.0, false);
    CHECK(coarse.min_cosine >= kSqrt8Over3 - 1e-3);
}

TEST_CASE("assignment enumeration")
{
    // isolated triad
    CHECK(exactly_one_assignments(3, {{0, 1, 2}}, {{0, 1}, {0, 2}, {1, 2}}).size() == 3);
    CHECK_THROWS_AS(exactly_one_assignments(26, {}, {}), SizeError);

    const AdmissiblePairSet at_bound = enumerate_gadget_assignments(build_gadget(1.0, 1.0));
    CHECK(at_bound.excludes_one_zero());
    CHECK(at_bound.contains(0, 0));
    CHECK(at_bound.contains(1, 1));
    CHECK(at_bound.assignment_count > 0);

    const double t = solve_parameter_for_angle(degrees_to_radians(18.0));
    const AdmissiblePairSet at18 = enumerate_gadget_assignments(build_gadget(t, t));
    CHECK(at18.assignment_count > 0);
    CHECK(at18.excludes_one_zero());
    CHECK(at18.pairs() == at_bound.pairs());

    // The gadget's admissible set is purely combinatorial.
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int n = 0; n < 50; ++n) {
        const AdmissiblePairSet p = enumerate_gadget_assignments(build_gadget(u(rng), u(rng)));
        CHECK(p.pairs() == at_bound.pairs());
        CHECK(p.assignment_count == at_bound.assignment_count);
    }
}

TEST_CASE("enumeration invariant under global rotation")
{
    const GadgetSet g = build_gadget(0.7, -1.3);
    const auto base = enumerate_gadget_assignments(g);
    std::mt19937_64 rng(15);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int k = 0; k < 20; ++k) {
        const Vec3 axis{n(rng), n(rng), n(rng)};
        const double angle = n(rng);
        std::array<Ray3, kGadgetSize> rotated;
        for (std::size_t i = 0; i < kGadgetSize; ++i)
            rotated[i] = Ray3::from_vector(rotate_vector(g.rays[i].xyz(), axis, angle));
        const GadgetSet r = gadget_from_rays(rotated, g.x, g.y);
        CHECK(max_orthogonality_residual(r) <= 1e-12);
        CHECK(std::abs(gadget_ray_angle(r) - gadget_ray_angle(g)) <= 1e-12);
        const auto p = enumerate_gadget_assignments(r);
        CHECK(p.pairs() == base.pairs());
        CHECK(p.assignment_count == base.assignment_count);
    }
}

TEST_CASE("roles and serialization")
{
    for (std::size_t i = 0; i < kGadgetSize; ++i) {
        const auto r = static_cast<GadgetRole>(i);
        CHECK(role_from_name(role_name(r)) == r);
    }
    CHECK_FALSE(role_from_name("s4(1)").has_value());
    const auto j = to_json(build_gadget(1.0, 0.5));
    CHECK(j["rays"].size() == 10);
    CHECK(j["edges"].size() == 15);
    CHECK(j["rays"][0]["label"] == "s0");
    CHECK(j["x"] == 1.0);
}
