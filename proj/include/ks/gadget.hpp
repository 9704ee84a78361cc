#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ks/linalg.hpp"

namespace ks {

// Positions of the ten rays inside a gadget. s0 is the free ray; sA(B) is the
// A-th member of triad B.
enum class GadgetRole : std::uint8_t { S0, S1_1, S2_1, S3_1, S1_2, S2_2, S3_2, S1_3, S2_3, S3_3 };

inline constexpr std::size_t kGadgetSize = 10;
inline constexpr std::size_t kGadgetEdgeCount = 15;

constexpr std::size_t index_of(GadgetRole r) { return static_cast<std::size_t>(r); }

std::string_view role_name(GadgetRole r);
std::optional<GadgetRole> role_from_name(std::string_view name);

using IndexPair = std::pair<std::size_t, std::size_t>;
using IndexTriple = std::array<std::size_t, 3>;

// The three triads by role index.
const std::array<IndexTriple, 3>& gadget_triads();
// 9 intra-triad edges followed by the 6 extra orthogonalities.
const std::array<IndexPair, kGadgetEdgeCount>& gadget_edges();

// Unnormalized vectors of the parametrized family, indexed by role.
std::array<Vec3, kGadgetSize> gadget_raw_vectors(double x, double y);

struct GadgetSet {
    double x = 0.0;
    double y = 0.0;
    std::array<Ray3, kGadgetSize> rays;
    std::vector<IndexPair> ortho_edges;

    const Ray3& ray(GadgetRole r) const { return rays[index_of(r)]; }
};

// Throws DegenerateParameterError when a vector has norm <= 1e-9 or x, y are
// not finite.
GadgetSet build_gadget(double x, double y);

// Wraps already-placed rays (e.g. a rotated copy) with the gadget structure.
GadgetSet gadget_from_rays(const std::array<Ray3, kGadgetSize>& rays, double x, double y);

// max |dot| over the 15 structural orthogonalities.
double max_orthogonality_residual(const GadgetSet& g);

// Closed-form cos of the s0 / s3(3) angle.
double gadget_cosine(double x, double y);
// arccos of gadget_cosine, in [0, pi/2].
double gadget_angle(double x, double y);
// Same angle measured on constructed rays.
double gadget_ray_angle(const GadgetSet& g);

// arccos(sqrt(8)/3).
double gadget_angle_bound();

// t with gadget_angle(t, t) == target, by bisection over (0, 1].
double solve_parameter_for_angle(double target);
// y in (0, 1] with gadget_angle(x, y) == target.
double solve_companion_parameter(double x, double target);

struct BoundSearch {
    double min_cosine = 1.0;
    double angle = 0.0;
    std::vector<std::pair<double, double>> argmins;
    std::size_t grid_points = 0;
    double grid_min_cosine = 1.0;
};

// Grid scan of gadget_cosine on [-half_width, half_width]^2 followed by a
// compass-search refinement from the best grid point of each quadrant.
BoundSearch minimize_gadget_cosine(std::size_t grid_points = 401, double half_width = 2.0, bool refine = true);

struct AdmissiblePairSet {
    // present[2 * v0 + v3] for (nu(s0), nu(s3(3))) = (v0, v3).
    std::array<bool, 4> present{};
    std::size_t assignment_count = 0;

    bool contains(int v0, int v3) const { return present[2 * v0 + v3]; }
    std::vector<std::pair<int, int>> pairs() const;
    bool excludes_one_zero() const { return !contains(1, 0); }
    bool excludes_zero_one() const { return !contains(0, 1); }
};

// Every 0/1 map over `node_count` nodes with exactly one 1 per triad and no
// edge valued (1, 1), as bitmasks (bit i = value of node i). node_count <= 25.
std::vector<std::uint32_t> exactly_one_assignments(std::size_t node_count, const std::vector<IndexTriple>& triads,
                                                   const std::vector<IndexPair>& edges);

// Exhaustive scan of all 2^10 assignments of the gadget.
AdmissiblePairSet enumerate_gadget_assignments(const GadgetSet& g);

nlohmann::json to_json(const GadgetSet& g);

} // namespace ks
