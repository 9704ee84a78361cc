#include "ks/graph.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numeric>

namespace ks {

namespace {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }

    std::size_t find(std::size_t a)
    {
        while (parent_[a] != a) {
            parent_[a] = parent_[parent_[a]];
            a = parent_[a];
        }
        return a;
    }

    // Keeps the smaller index as root so the first occurrence represents the class.
    void unite(std::size_t a, std::size_t b)
    {
        a = find(a);
        b = find(b);
        if (a == b)
            return;
        if (b < a)
            std::swap(a, b);
        parent_[b] = a;
    }

private:
    std::vector<std::size_t> parent_;
};

using Frame = std::array<Vec3, kGadgetSize>;

// Rotation taking s2(3) to +y and s0 to +z.
Frame align_initial(const GadgetSet& g)
{
    const Vec3 e2 = g.ray(GadgetRole::S2_3).xyz();
    const Vec3 e3 = g.ray(GadgetRole::S0).xyz();
    const Vec3 e1 = cross(e2, e3);
    Frame out;
    for (std::size_t i = 0; i < kGadgetSize; ++i) {
        const Vec3& v = g.rays[i].xyz();
        out[i] = {dot(e1, v), dot(e2, v), dot(e3, v)};
    }
    return out;
}

Vec3 oriented_axis(const Frame& f, GadgetRole role)
{
    Vec3 axis = scaled(f[index_of(role)], 1.0 / norm(f[index_of(role)]));
    const Vec3& s0 = f[index_of(GadgetRole::S0)];
    Vec3 s3 = f[index_of(GadgetRole::S3_3)];
    if (dot(s0, s3) < 0.0)
        s3 = scaled(s3, -1.0);
    const Vec3 n = cross(s0, s3);
    const double nn = norm(n);
    if (nn > 1e-12) {
        const double c = dot(axis, n) / nn;
        if (std::abs(c) > 1.0 - 1e-9)
            return c > 0.0 ? axis : scaled(axis, -1.0);
    }
    return canonical_sign(axis);
}

GadgetInstance make_instance(const Frame& f, std::size_t copy)
{
    GadgetInstance inst;
    inst.copy = copy;
    for (std::size_t i = 0; i < kGadgetSize; ++i)
        inst.rays[i] = Ray3::from_vector(f[i], copy_label(copy, static_cast<GadgetRole>(i)));
    inst.nodes.fill(kNoNode);
    return inst;
}

} // namespace

Vec3 rotate_vector(const Vec3& v, const Vec3& axis, double angle)
{
    const Vec3 k = scaled(axis, 1.0 / norm(axis));
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return scaled(v, c) + scaled(cross(k, v), s) + scaled(k, dot(k, v) * (1.0 - c));
}

Ray3 rotate_ray(const Ray3& r, const Ray3& axis, double angle)
{
    return Ray3::from_vector(rotate_vector(r.xyz(), axis.xyz(), angle), r.label());
}

std::string copy_label(std::size_t copy, GadgetRole role)
{
    if (role == GadgetRole::S0)
        return copy == 1 ? "s0" : "s0@" + std::to_string(copy);
    const auto name = role_name(role); // "sA(B)"
    const std::size_t triad = static_cast<std::size_t>(name[3] - '0');
    return std::string(name.substr(0, 2)) + "^(" + std::to_string(3 * (copy - 1) + triad) + ")";
}

RotationSchedule RotationSchedule::standard(double step_angle)
{
    const double quarter = kPi / 2.0;
    return RotationSchedule{{
        {"s2(3)", step_angle, 4, true},
        {"s3(3)", quarter, 1, false},
        {"s2(3)", step_angle, 5, true},
        {"s3(3)", quarter, 1, false},
        {"s2(3)", step_angle, 5, true},
    }};
}

nlohmann::json to_json(const RotationSchedule& s)
{
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& st : s.steps)
        steps.push_back({{"axis", st.axis},
                         {"angle_deg", radians_to_degrees(st.angle)},
                         {"repetitions", st.repetitions},
                         {"emit", st.emit}});
    return steps;
}

std::optional<std::size_t> RaySet::find(const Ray3& r, double tol) const
{
    for (std::size_t i = 0; i < rays.size(); ++i)
        if (ray_angle(rays[i], r) <= tol)
            return i;
    return std::nullopt;
}

RaySet dedupe_rays(std::vector<LabeledRay> rays, double tol)
{
    DisjointSets sets(rays.size());
    for (std::size_t i = 0; i < rays.size(); ++i)
        for (std::size_t j = i + 1; j < rays.size(); ++j)
            if (ray_angle(rays[i].ray, rays[j].ray) <= tol)
                sets.unite(i, j);

    RaySet out;
    out.merge_map.assign(rays.size(), kNoNode);
    std::vector<std::size_t> slot(rays.size(), kNoNode);
    for (std::size_t i = 0; i < rays.size(); ++i) {
        const std::size_t root = sets.find(i);
        if (slot[root] == kNoNode) {
            slot[root] = out.rays.size();
            out.rays.push_back(rays[root].ray);
            out.groups.emplace_back();
        }
        out.merge_map[i] = slot[root];
        out.groups[slot[root]].push_back(i);
    }
    out.labeled = std::move(rays);
    return out;
}

RaySet assemble_ks_set(const GadgetSet& initial, const RotationSchedule& schedule, double step_angle, double dedup_tol)
{
    Frame frame = align_initial(initial);
    std::vector<GadgetInstance> instances;
    instances.push_back(make_instance(frame, 1));

    for (std::size_t si = 0; si < schedule.steps.size(); ++si) {
        const auto& step = schedule.steps[si];
        const auto role = role_from_name(step.axis);
        if (!role)
            throw ScheduleError("schedule step " + std::to_string(si) + " references unknown axis '" + step.axis + "'");
        if (!std::isfinite(step.angle) || step.repetitions < 0)
            throw ScheduleError("schedule step " + std::to_string(si) + " has an invalid angle or repetition count");
        for (int rep = 0; rep < step.repetitions; ++rep) {
            const Vec3 axis = oriented_axis(frame, *role);
            for (auto& v : frame)
                v = rotate_vector(v, axis, step.angle);
            if (step.emit)
                instances.push_back(make_instance(frame, instances.size() + 1));
        }
    }

    std::vector<LabeledRay> labeled;
    for (const auto& inst : instances)
        for (std::size_t i = 1; i < kGadgetSize; ++i)
            labeled.push_back({inst.rays[i], inst.copy, static_cast<GadgetRole>(i)});
    const Ray3& origin = instances.front().rays[index_of(GadgetRole::S0)];
    const bool closed = instances.size() > 1 &&
                        ray_angle(origin, instances.back().rays[index_of(GadgetRole::S3_3)]) <= dedup_tol;
    if (!closed)
        labeled.push_back({origin, 1, GadgetRole::S0});

    RaySet out = dedupe_rays(std::move(labeled), dedup_tol);
    for (auto& inst : instances)
        for (std::size_t i = 0; i < kGadgetSize; ++i)
            inst.nodes[i] = out.find(inst.rays[i], dedup_tol).value_or(kNoNode);
    out.instances = std::move(instances);
    out.schedule = schedule;
    out.step_angle = step_angle;
    out.x = initial.x;
    out.y = initial.y;
    return out;
}

RaySet assemble_ks_set(double step_angle, ParameterChoice choice)
{
    if (!(step_angle < gadget_angle_bound()))
        throw OutOfRangeError("assemble_ks_set: step angle must be below arccos(sqrt(8)/3)");
    double x = 1.0;
    double y = 0.0;
    if (choice == ParameterChoice::Diagonal) {
        x = y = solve_parameter_for_angle(step_angle);
    } else {
        y = solve_companion_parameter(x, step_angle);
    }
    return assemble_ks_set(build_gadget(x, y), RotationSchedule::standard(step_angle), step_angle);
}

RaySet single_gadget_set(const GadgetSet& g)
{
    return assemble_ks_set(g, RotationSchedule{}, gadget_ray_angle(g));
}

nlohmann::json to_json(const RaySet& rs)
{
    nlohmann::json rays = nlohmann::json::array();
    for (std::size_t i = 0; i < rs.rays.size(); ++i) {
        nlohmann::json members = nlohmann::json::array();
        for (std::size_t l : rs.groups[i])
            members.push_back(rs.labeled[l].ray.label());
        rays.push_back({{"index", i}, {"label", rs.rays[i].label()}, {"xyz", rs.rays[i].xyz()}, {"members", members}});
    }
    nlohmann::json instances = nlohmann::json::array();
    for (const auto& inst : rs.instances) {
        nlohmann::json nodes = nlohmann::json::object();
        for (std::size_t i = 0; i < kGadgetSize; ++i) {
            const auto role = std::string(role_name(static_cast<GadgetRole>(i)));
            if (inst.nodes[i] == kNoNode)
                nodes[role] = nullptr;
            else
                nodes[role] = inst.nodes[i];
        }
        instances.push_back({{"copy", inst.copy}, {"nodes", nodes}});
    }
    return {{"step_angle_deg", radians_to_degrees(rs.step_angle)},
            {"x", rs.x},
            {"y", rs.y},
            {"schedule", to_json(rs.schedule)},
            {"labeled_count", rs.labeled.size()},
            {"ray_count", rs.rays.size()},
            {"rays", rays},
            {"instances", instances}};
}

bool OrthogonalityGraph::adjacent(std::size_t a, std::size_t b) const
{
    const auto& row = adjacency[a];
    return std::binary_search(row.begin(), row.end(), b);
}

OrthogonalityGraph OrthogonalityGraph::from_edges(std::size_t node_count, std::vector<IndexPair> edges)
{
    OrthogonalityGraph g;
    g.node_count = node_count;
    for (auto& [a, b] : edges) {
        if (a == b || a >= node_count || b >= node_count)
            throw Error("OrthogonalityGraph: invalid edge (" + std::to_string(a) + ", " + std::to_string(b) + ")");
        if (b < a)
            std::swap(a, b);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    g.edges = std::move(edges);

    g.adjacency.assign(node_count, {});
    for (const auto& [a, b] : g.edges) {
        g.adjacency[a].push_back(b);
        g.adjacency[b].push_back(a);
    }
    for (auto& row : g.adjacency)
        std::sort(row.begin(), row.end());

    std::vector<std::size_t> common;
    for (const auto& [a, b] : g.edges) {
        common.clear();
        std::set_intersection(g.adjacency[a].begin(), g.adjacency[a].end(), g.adjacency[b].begin(),
                              g.adjacency[b].end(), std::back_inserter(common));
        for (std::size_t c : common)
            if (c > b)
                g.triads.push_back({a, b, c});
    }
    std::sort(g.triads.begin(), g.triads.end());
    return g;
}

OrthogonalityGraph OrthogonalityGraph::induced(const std::vector<std::size_t>& nodes) const
{
    std::vector<std::size_t> renumber(node_count, kNoNode);
    for (std::size_t i = 0; i < nodes.size(); ++i)
        renumber[nodes[i]] = i;
    std::vector<IndexPair> kept;
    for (const auto& [a, b] : edges)
        if (renumber[a] != kNoNode && renumber[b] != kNoNode)
            kept.emplace_back(renumber[a], renumber[b]);
    OrthogonalityGraph sub = from_edges(nodes.size(), std::move(kept));
    if (!rays.empty())
        for (std::size_t n : nodes)
            sub.rays.push_back(rays[n]);
    return sub;
}

OrthogonalityGraph build_orthogonality_graph(const std::vector<Ray3>& rays, double tol)
{
    std::vector<IndexPair> edges;
    for (std::size_t i = 0; i < rays.size(); ++i)
        for (std::size_t j = i + 1; j < rays.size(); ++j)
            if (std::abs(dot(rays[i].xyz(), rays[j].xyz())) <= tol)
                edges.emplace_back(i, j);
    OrthogonalityGraph g = OrthogonalityGraph::from_edges(rays.size(), std::move(edges));
    g.rays = rays;
    for (const auto& t : g.triads) {
        Mat3 sum;
        for (std::size_t n : t)
            sum += outer(rays[n].xyz(), rays[n].xyz());
        if ((sum - Mat3::identity()).max_abs() > 1e-6)
            throw Error("build_orthogonality_graph: triangle (" + std::to_string(t[0]) + ", " + std::to_string(t[1]) +
                        ", " + std::to_string(t[2]) + ") does not complete to the identity");
    }
    return g;
}

nlohmann::json to_json(const OrthogonalityGraph& g)
{
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [a, b] : g.edges)
        edges.push_back({a, b});
    nlohmann::json triads = nlohmann::json::array();
    for (const auto& t : g.triads)
        triads.push_back(t);
    return {{"nodes", g.node_count}, {"edges", edges}, {"triads", triads}};
}

} // namespace ks
