#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>

#include "ks/error.hpp"

namespace ks {

template <std::size_t N>
using Vec = std::array<double, N>;

using Vec2 = Vec<2>;
using Vec3 = Vec<3>;

// Row-major N x N matrix.
template <std::size_t N>
struct Mat {
    std::array<double, N * N> a{};

    constexpr double& operator()(std::size_t i, std::size_t j) { return a[i * N + j]; }
    constexpr double operator()(std::size_t i, std::size_t j) const { return a[i * N + j]; }

    static constexpr Mat identity()
    {
        Mat m;
        for (std::size_t i = 0; i < N; ++i)
            m(i, i) = 1.0;
        return m;
    }

    constexpr Mat& operator+=(const Mat& o)
    {
        for (std::size_t k = 0; k < N * N; ++k)
            a[k] += o.a[k];
        return *this;
    }
    constexpr Mat& operator-=(const Mat& o)
    {
        for (std::size_t k = 0; k < N * N; ++k)
            a[k] -= o.a[k];
        return *this;
    }
    constexpr Mat& operator*=(double s)
    {
        for (auto& x : a)
            x *= s;
        return *this;
    }

    friend constexpr Mat operator+(Mat l, const Mat& r) { return l += r; }
    friend constexpr Mat operator-(Mat l, const Mat& r) { return l -= r; }
    friend constexpr Mat operator*(Mat l, double s) { return l *= s; }
    friend constexpr Mat operator*(double s, Mat r) { return r *= s; }

    friend constexpr Mat operator*(const Mat& l, const Mat& r)
    {
        Mat out;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t k = 0; k < N; ++k)
                for (std::size_t j = 0; j < N; ++j)
                    out(i, j) += l(i, k) * r(k, j);
        return out;
    }

    friend constexpr Vec<N> operator*(const Mat& m, const Vec<N>& v)
    {
        Vec<N> out{};
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j)
                out[i] += m(i, j) * v[j];
        return out;
    }

    constexpr double trace() const
    {
        double t = 0.0;
        for (std::size_t i = 0; i < N; ++i)
            t += (*this)(i, i);
        return t;
    }

    constexpr Mat transposed() const
    {
        Mat t;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j)
                t(j, i) = (*this)(i, j);
        return t;
    }

    // Largest absolute entry.
    double max_abs() const
    {
        double m = 0.0;
        for (double x : a)
            m = std::max(m, std::abs(x));
        return m;
    }
};

using Mat2 = Mat<2>;
using Mat3 = Mat<3>;

template <std::size_t N>
constexpr double dot(const Vec<N>& u, const Vec<N>& v)
{
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i)
        s += u[i] * v[i];
    return s;
}

template <std::size_t N>
double norm(const Vec<N>& v)
{
    return std::sqrt(dot(v, v));
}

template <std::size_t N>
constexpr Vec<N> scaled(const Vec<N>& v, double s)
{
    Vec<N> out = v;
    for (auto& x : out)
        x *= s;
    return out;
}

template <std::size_t N>
constexpr Vec<N> operator+(const Vec<N>& u, const Vec<N>& v)
{
    Vec<N> out;
    for (std::size_t i = 0; i < N; ++i)
        out[i] = u[i] + v[i];
    return out;
}

template <std::size_t N>
constexpr Vec<N> operator-(const Vec<N>& u, const Vec<N>& v)
{
    Vec<N> out;
    for (std::size_t i = 0; i < N; ++i)
        out[i] = u[i] - v[i];
    return out;
}

constexpr Vec3 cross(const Vec3& u, const Vec3& v)
{
    return {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
}

template <std::size_t N>
constexpr Mat<N> outer(const Vec<N>& u, const Vec<N>& v)
{
    Mat<N> m;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j)
            m(i, j) = u[i] * v[j];
    return m;
}

inline constexpr double kPi = std::numbers::pi;

constexpr double degrees_to_radians(double deg) { return deg * (kPi / 180.0); }
constexpr double radians_to_degrees(double rad) { return rad * (180.0 / kPi); }

// Threshold below which a component counts as zero when fixing the ray sign.
inline constexpr double kCanonicalTol = 1e-12;
// Accepted deviation of |v| from 1 for inputs that must already be unit.
inline constexpr double kUnitTol = 1e-9;

// Flips v so that its first component of magnitude > kCanonicalTol is positive.
Vec3 canonical_sign(const Vec3& v);

// A direction in R3 with v and -v identified. Always unit and canonical.
class Ray3 {
public:
    Ray3() = default;

    // Normalizes and canonicalizes; throws NormalizationError on a (near) zero
    // or non-finite input.
    static Ray3 from_vector(const Vec3& v, std::string label = {});

    const Vec3& xyz() const { return c_; }
    double operator[](std::size_t i) const { return c_[i]; }
    const std::string& label() const { return label_; }
    void set_label(std::string label) { label_ = std::move(label); }

private:
    Vec3 c_{1.0, 0.0, 0.0};
    std::string label_;
};

// Angle between two rays in [0, pi/2]; well conditioned near 0.
double ray_angle(const Ray3& a, const Ray3& b);

enum class Sign { Plus, Minus };

constexpr double sign_value(Sign s) { return s == Sign::Plus ? 1.0 : -1.0; }
constexpr Sign opposite(Sign s) { return s == Sign::Plus ? Sign::Minus : Sign::Plus; }

struct SpinHalfVector {
    Vec2 components{};
    double theta = 0.0;
    Sign branch = Sign::Plus;
};

struct SpinHalfPair {
    SpinHalfVector plus;
    SpinHalfVector minus;
};

// |+>_theta = (cos theta/2, sin theta/2), |->_theta = (-sin theta/2, cos theta/2).
SpinHalfPair spin_half_eigenvectors(double theta);

template <std::size_t N>
struct Projector {
    Mat<N> entries;
    Vec<N> source{};

    double symmetry_residual() const { return (entries - entries.transposed()).max_abs(); }
    double idempotence_residual() const { return (entries * entries - entries).max_abs(); }
    double trace() const { return entries.trace(); }
};

// Rank-1 projector v v^T; v must be unit within kUnitTol.
template <std::size_t N>
Projector<N> projector_from_vector(const Vec<N>& v)
{
    const double n = norm(v);
    if (!std::isfinite(n) || std::abs(n - 1.0) > kUnitTol)
        throw NormalizationError("projector_from_vector: input norm " + std::to_string(n) + " is not 1");
    return Projector<N>{outer(v, v), v};
}

inline Projector<3> projector_from_ray(const Ray3& r) { return projector_from_vector(r.xyz()); }

// S_theta = (P_theta+ - P_theta-)/2 = 1/2 [[cos, sin], [sin, -cos]].
Mat2 spin_operator(double theta);

struct BranchProbabilities {
    double plus = 0.0;
    double minus = 0.0;
};

// Outcome probabilities at an apparatus at meas_theta for a particle prepared
// in branch prep_sign at prep_theta. Same-sign outcome has cos^2(phi/2),
// phi = meas_theta - prep_theta; plus + minus == 1 exactly.
BranchProbabilities transition_probability_spin_half(double prep_theta, Sign prep_sign, double meas_theta);

// Born weight (state . outcome)^2 for real spin-1 rays.
double spin1_overlap(const Ray3& state, const Ray3& outcome);

// A spin-1 measurement context: three mutually orthogonal outcome rays
// together with the average field direction that selects them.
class Context {
public:
    // Throws ContextError when any pair has |dot| >= 1e-9.
    static Context from_triad(const Ray3& a, const Ray3& b, const Ray3& c, const Ray3& b_direction);
    static Context from_triad(const Ray3& a, const Ray3& b, const Ray3& c) { return from_triad(a, b, c, a); }

    // Apparatus rotated by theta about the lab y-axis: B = (-sin, 0, cos), so
    // B = -i at theta = pi/2.
    // Outcome rays are B, the rotation axis j, and B x j.
    static Context stern_gerlach(double theta);

    const std::array<Ray3, 3>& triad() const { return triad_; }
    const Ray3& b_direction() const { return b_; }

private:
    std::array<Ray3, 3> triad_;
    Ray3 b_;
};

// max |(P1 + P2 + P3 - I)_ij| over the context's projectors.
double verify_completion(const Context& context);
// Same for the spin-1/2 pair P_theta+ + P_theta-.
double verify_completion_spin_half(double theta);

} // namespace ks
