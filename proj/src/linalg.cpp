#include "ks/linalg.hpp"

#include <cmath>

namespace ks {

Vec3 canonical_sign(const Vec3& v)
{
    for (double c : v) {
        if (std::abs(c) > kCanonicalTol)
            return c > 0.0 ? v : scaled(v, -1.0);
    }
    return v;
}

Ray3 Ray3::from_vector(const Vec3& v, std::string label)
{
    const double n = norm(v);
    if (!std::isfinite(n) || n <= kCanonicalTol)
        throw NormalizationError("Ray3: cannot normalize vector of norm " + std::to_string(n));
    Ray3 r;
    r.c_ = canonical_sign(scaled(v, 1.0 / n));
    r.label_ = std::move(label);
    return r;
}

double ray_angle(const Ray3& a, const Ray3& b)
{
    return std::atan2(norm(cross(a.xyz(), b.xyz())), std::abs(dot(a.xyz(), b.xyz())));
}

SpinHalfPair spin_half_eigenvectors(double theta)
{
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    return SpinHalfPair{
        SpinHalfVector{{c, s}, theta, Sign::Plus},
        SpinHalfVector{{-s, c}, theta, Sign::Minus},
    };
}

Mat2 spin_operator(double theta)
{
    const auto [plus, minus] = spin_half_eigenvectors(theta);
    return 0.5 * (outer(plus.components, plus.components) - outer(minus.components, minus.components));
}

BranchProbabilities transition_probability_spin_half(double prep_theta, Sign prep_sign, double meas_theta)
{
    const double c = std::cos((meas_theta - prep_theta) / 2.0);
    const double same = c * c;
    const double other = 1.0 - same;
    if (prep_sign == Sign::Plus)
        return {same, other};
    return {other, same};
}

double spin1_overlap(const Ray3& state, const Ray3& outcome)
{
    const double d = dot(state.xyz(), outcome.xyz());
    return d * d;
}

Context Context::from_triad(const Ray3& a, const Ray3& b, const Ray3& c, const Ray3& b_direction)
{
    constexpr double tol = 1e-9;
    const double ab = std::abs(dot(a.xyz(), b.xyz()));
    const double ac = std::abs(dot(a.xyz(), c.xyz()));
    const double bc = std::abs(dot(b.xyz(), c.xyz()));
    if (ab >= tol || ac >= tol || bc >= tol)
        throw ContextError("Context: triad is not mutually orthogonal (max |dot| = " +
                           std::to_string(std::max({ab, ac, bc})) + ")");
    Context ctx;
    ctx.triad_ = {a, b, c};
    ctx.b_ = b_direction;
    return ctx;
}

Context Context::stern_gerlach(double theta)
{
    const Vec3 field{-std::sin(theta), 0.0, std::cos(theta)};
    const Vec3 axis{0.0, 1.0, 0.0};
    const Ray3 b = Ray3::from_vector(field, "B");
    return from_triad(b, Ray3::from_vector(axis, "j"), Ray3::from_vector(cross(field, axis), "Bxj"), b);
}

double verify_completion(const Context& context)
{
    Mat3 sum;
    for (const auto& r : context.triad())
        sum += projector_from_ray(r).entries;
    return (sum - Mat3::identity()).max_abs();
}

double verify_completion_spin_half(double theta)
{
    const auto [plus, minus] = spin_half_eigenvectors(theta);
    const Mat2 sum = projector_from_vector(plus.components).entries + projector_from_vector(minus.components).entries;
    return (sum - Mat2::identity()).max_abs();
}

} // namespace ks
