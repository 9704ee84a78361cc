#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ks/gadget.hpp"
#include "ks/linalg.hpp"

namespace ks {

inline constexpr std::size_t kNoNode = std::numeric_limits<std::size_t>::max();
inline constexpr double kDefaultOrthogonalityTol = 1e-7;
inline constexpr double kDefaultDedupTol = 1e-7;

// Rodrigues rotation of v about `axis` (normalized internally) by `angle`.
Vec3 rotate_vector(const Vec3& v, const Vec3& axis, double angle);
Ray3 rotate_ray(const Ray3& r, const Ray3& axis, double angle);

struct LabeledRay {
    Ray3 ray;
    std::size_t copy = 0; // 1-based gadget copy
    GadgetRole role = GadgetRole::S0;
};

// Label in the running-superscript notation: copy m, triad t -> s_i^(3(m-1)+t).
std::string copy_label(std::size_t copy, GadgetRole role);

// One placed copy of the gadget. nodes[i] indexes the deduplicated RaySet,
// kNoNode where the ray did not make it into the set.
struct GadgetInstance {
    std::size_t copy = 0;
    std::array<Ray3, kGadgetSize> rays;
    std::array<std::size_t, kGadgetSize> nodes{};

    std::size_t node(GadgetRole r) const { return nodes[index_of(r)]; }
};

// A rotation of the current copy about one of its own rays. Positive angles
// turn s0 toward s3(3) whenever the axis is normal to their plane; any other
// axis is used with its canonical orientation. Each repetition applies the
// rotation once, and a copy is recorded after it when `emit` is set.
struct RotationStep {
    std::string axis; // role name, e.g. "s2(3)"
    double angle = 0.0;
    int repetitions = 1;
    bool emit = true;
};

struct RotationSchedule {
    std::vector<RotationStep> steps;

    // Three legs of five copies each: sweep about s2(3), pivot 90 degrees
    // about s3(3), sweep, pivot, sweep. With an 18 degree step every leg turns
    // the chain through a right angle and the last s3(3) returns to the first s0.
    static RotationSchedule standard(double step_angle);
};

nlohmann::json to_json(const RotationSchedule& s);

struct RaySet {
    std::vector<Ray3> rays;                       // representatives, first occurrence order
    std::vector<LabeledRay> labeled;              // before deduplication
    std::vector<std::size_t> merge_map;           // labeled index -> rays index
    std::vector<std::vector<std::size_t>> groups; // rays index -> labeled indices
    std::vector<GadgetInstance> instances;
    RotationSchedule schedule;
    double step_angle = 0.0;
    double x = 0.0;
    double y = 0.0;

    std::size_t merges() const { return labeled.size() - rays.size(); }
    std::optional<std::size_t> find(const Ray3& r, double tol = kDefaultDedupTol) const;
};

nlohmann::json to_json(const RaySet& rs);

// Union-find over pairs closer than `tol` radians; the representative of each
// class is its first member.
RaySet dedupe_rays(std::vector<LabeledRay> rays, double tol = kDefaultDedupTol);

// Replicates `initial` by the schedule. The first copy is aligned so that its
// s2(3) lies on the y-axis and s0 on the z-axis. Every copy contributes its
// nine triad rays; the first s0 is added only if no copy closes the chain
// back onto it. Throws ScheduleError for unknown axis roles.
RaySet assemble_ks_set(const GadgetSet& initial, const RotationSchedule& schedule, double step_angle,
                       double dedup_tol = kDefaultDedupTol);

enum class ParameterChoice {
    Companion, // x = 1, y solved for the step angle
    Diagonal,  // x = y solved for the step angle
};

// Default construction at `step_angle` with the standard schedule.
RaySet assemble_ks_set(double step_angle = degrees_to_radians(18.0), ParameterChoice choice = ParameterChoice::Companion);

// A single unrotated gadget as a ray set (10 rays, one instance).
RaySet single_gadget_set(const GadgetSet& g);

struct OrthogonalityGraph {
    std::size_t node_count = 0;
    std::vector<Ray3> rays; // empty for purely combinatorial graphs
    std::vector<IndexPair> edges;
    std::vector<IndexTriple> triads;
    std::vector<std::vector<std::size_t>> adjacency;

    bool adjacent(std::size_t a, std::size_t b) const;

    // Builds adjacency and finds every triangle as a triad.
    static OrthogonalityGraph from_edges(std::size_t node_count, std::vector<IndexPair> edges);

    // Subgraph on `nodes` (renumbered in the given order); keeps edges and
    // triads fully inside.
    OrthogonalityGraph induced(const std::vector<std::size_t>& nodes) const;
};

// Edges between rays with |dot| <= tol, triads = all triangles. Each triad is
// checked to sum to the identity within 1e-6.
OrthogonalityGraph build_orthogonality_graph(const std::vector<Ray3>& rays, double tol = kDefaultOrthogonalityTol);
inline OrthogonalityGraph build_orthogonality_graph(const RaySet& rs, double tol = kDefaultOrthogonalityTol)
{
    return build_orthogonality_graph(rs.rays, tol);
}

nlohmann::json to_json(const OrthogonalityGraph& g);

} // namespace ks
