#include "ks/gadget.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ks {

namespace {

constexpr std::array<std::string_view, kGadgetSize> kRoleNames = {
    "s0", "s1(1)", "s2(1)", "s3(1)", "s1(2)", "s2(2)", "s3(2)", "s1(3)", "s2(3)", "s3(3)",
};

constexpr double kDegenerateNorm = 1e-9;

double bisect(auto&& f, double lo, double hi, double target)
{
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Checks strict increase of f on a 1e-3 grid over (0, 1].
void require_monotone(auto&& f, const char* what)
{
    double prev = f(1e-3);
    for (int k = 2; k <= 1000; ++k) {
        const double cur = f(k * 1e-3);
        if (!(cur > prev))
            throw OutOfRangeError(std::string(what) + ": angle is not monotone in the search interval");
        prev = cur;
    }
}

void check_target(double target)
{
    const double bound = gadget_angle_bound();
    if (!std::isfinite(target) || target <= 0.0 || target > bound + 1e-12)
        throw OutOfRangeError("target angle " + std::to_string(radians_to_degrees(target)) +
                              " deg is outside (0, " + std::to_string(radians_to_degrees(bound)) + "] deg");
}

} // namespace

std::string_view role_name(GadgetRole r) { return kRoleNames[index_of(r)]; }

std::optional<GadgetRole> role_from_name(std::string_view name)
{
    for (std::size_t i = 0; i < kGadgetSize; ++i)
        if (kRoleNames[i] == name)
            return static_cast<GadgetRole>(i);
    return std::nullopt;
}

const std::array<IndexTriple, 3>& gadget_triads()
{
    static constexpr std::array<IndexTriple, 3> triads = {{{1, 2, 3}, {4, 5, 6}, {7, 8, 9}}};
    return triads;
}

const std::array<IndexPair, kGadgetEdgeCount>& gadget_edges()
{
    using R = GadgetRole;
    static constexpr auto e = [](R a, R b) { return IndexPair{index_of(a), index_of(b)}; };
    static const std::array<IndexPair, kGadgetEdgeCount> edges = {
        e(R::S1_1, R::S2_1), e(R::S1_1, R::S3_1), e(R::S2_1, R::S3_1),
        e(R::S1_2, R::S2_2), e(R::S1_2, R::S3_2), e(R::S2_2, R::S3_2),
        e(R::S1_3, R::S2_3), e(R::S1_3, R::S3_3), e(R::S2_3, R::S3_3),
        e(R::S0, R::S1_1),   e(R::S0, R::S2_2),   e(R::S0, R::S2_3),
        e(R::S1_3, R::S3_1), e(R::S1_3, R::S1_2), e(R::S2_1, R::S3_2),
    };
    return edges;
}

std::array<Vec3, kGadgetSize> gadget_raw_vectors(double x, double y)
{
    const double xx = x * x;
    const double yy = y * y;
    return {{
        {-x * y, x, -1.0},
        {0.0, 1.0, x},
        {1.0, 0.0, 0.0},
        {0.0, -x, 1.0},
        {y, -1.0, 0.0},
        {1.0, y, 0.0},
        {0.0, 0.0, 1.0},
        {-1.0, -y, -x * y},
        {-y * (1.0 + xx), 1.0 - xx * yy, x * (1.0 + yy)},
        {-x * y * yy * (1.0 + xx), x * (1.0 + 2.0 * yy + xx * yy), -(1.0 + yy)},
    }};
}

GadgetSet build_gadget(double x, double y)
{
    if (!std::isfinite(x) || !std::isfinite(y))
        throw DegenerateParameterError("build_gadget: parameters must be finite");
    const auto raw = gadget_raw_vectors(x, y);
    std::array<Ray3, kGadgetSize> rays;
    for (std::size_t i = 0; i < kGadgetSize; ++i) {
        if (norm(raw[i]) <= kDegenerateNorm)
            throw DegenerateParameterError("build_gadget: " + std::string(kRoleNames[i]) + " vanishes at x=" +
                                           std::to_string(x) + ", y=" + std::to_string(y));
        rays[i] = Ray3::from_vector(raw[i], std::string(kRoleNames[i]));
    }
    return gadget_from_rays(rays, x, y);
}

GadgetSet gadget_from_rays(const std::array<Ray3, kGadgetSize>& rays, double x, double y)
{
    GadgetSet g;
    g.x = x;
    g.y = y;
    g.rays = rays;
    g.ortho_edges.assign(gadget_edges().begin(), gadget_edges().end());
    return g;
}

double max_orthogonality_residual(const GadgetSet& g)
{
    double worst = 0.0;
    for (const auto& [a, b] : g.ortho_edges)
        worst = std::max(worst, std::abs(dot(g.rays[a].xyz(), g.rays[b].xyz())));
    return worst;
}

double gadget_cosine(double x, double y)
{
    const double xx = x * x;
    const double yy = y * y;
    const double numerator = 1.0 + xx + yy + xx * yy * (2.0 + xx + yy + xx * yy);
    const double n0 = std::sqrt(xx * yy + xx + 1.0);
    const double a = x * y * yy * (1.0 + xx);
    const double b = x * (1.0 + 2.0 * yy + xx * yy);
    const double c = 1.0 + yy;
    const double n3 = std::sqrt(a * a + b * b + c * c);
    if (n0 <= kDegenerateNorm || n3 <= kDegenerateNorm)
        throw DegenerateParameterError("gadget_cosine: degenerate parameters");
    return std::min(1.0, numerator / (n0 * n3));
}

double gadget_angle(double x, double y)
{
    if (!std::isfinite(x) || !std::isfinite(y))
        throw DegenerateParameterError("gadget_angle: parameters must be finite");
    return std::acos(gadget_cosine(x, y));
}

double gadget_ray_angle(const GadgetSet& g) { return ray_angle(g.ray(GadgetRole::S0), g.ray(GadgetRole::S3_3)); }

double gadget_angle_bound() { return std::acos(std::sqrt(8.0) / 3.0); }

double solve_parameter_for_angle(double target)
{
    check_target(target);
    const auto f = [](double t) { return gadget_angle(t, t); };
    require_monotone(f, "solve_parameter_for_angle");
    return bisect(f, 0.0, 1.0, target);
}

double solve_companion_parameter(double x, double target)
{
    check_target(target);
    const auto f = [x](double y) { return gadget_angle(x, y); };
    require_monotone(f, "solve_companion_parameter");
    if (target > f(1.0) + 1e-12)
        throw OutOfRangeError("solve_companion_parameter: target exceeds the largest angle reachable for this x");
    return bisect(f, 0.0, 1.0, target);
}

BoundSearch minimize_gadget_cosine(std::size_t grid_points, double half_width, bool refine)
{
    if (grid_points < 2)
        throw OutOfRangeError("minimize_gadget_cosine: need at least 2 grid points per axis");
    BoundSearch out;
    out.grid_points = grid_points;

    struct Best {
        double c = std::numeric_limits<double>::infinity();
        double x = 0.0, y = 0.0;
    };
    std::array<Best, 4> quadrant{};
    const double step = 2.0 * half_width / static_cast<double>(grid_points - 1);
    for (std::size_t i = 0; i < grid_points; ++i) {
        const double x = -half_width + 2.0 * half_width * static_cast<double>(i) / static_cast<double>(grid_points - 1);
        for (std::size_t j = 0; j < grid_points; ++j) {
            const double y =
                -half_width + 2.0 * half_width * static_cast<double>(j) / static_cast<double>(grid_points - 1);
            const double c = gadget_cosine(x, y);
            out.grid_min_cosine = std::min(out.grid_min_cosine, c);
            if (x == 0.0 || y == 0.0)
                continue;
            auto& q = quadrant[(x > 0.0 ? 1 : 0) + (y > 0.0 ? 2 : 0)];
            if (c < q.c)
                q = {c, x, y};
        }
    }

    out.min_cosine = out.grid_min_cosine;
    std::vector<Best> candidates;
    for (auto q : quadrant) {
        if (!std::isfinite(q.c))
            continue;
        if (refine) {
            for (double h = step; h > 1e-12;) {
                bool moved = false;
                for (auto [dx, dy] : {std::pair{h, 0.0}, {-h, 0.0}, {0.0, h}, {0.0, -h}}) {
                    const double c = gadget_cosine(q.x + dx, q.y + dy);
                    if (c < q.c) {
                        q = {c, q.x + dx, q.y + dy};
                        moved = true;
                    }
                }
                if (!moved)
                    h *= 0.5;
            }
        }
        candidates.push_back(q);
    }

    for (const auto& q : candidates)
        out.min_cosine = std::min(out.min_cosine, q.c);
    for (const auto& q : candidates)
        if (q.c <= out.min_cosine + 1e-12)
            out.argmins.emplace_back(q.x, q.y);
    out.angle = std::acos(out.min_cosine);
    return out;
}

std::vector<std::pair<int, int>> AdmissiblePairSet::pairs() const
{
    std::vector<std::pair<int, int>> out;
    for (int v0 = 0; v0 < 2; ++v0)
        for (int v3 = 0; v3 < 2; ++v3)
            if (contains(v0, v3))
                out.emplace_back(v0, v3);
    return out;
}

std::vector<std::uint32_t> exactly_one_assignments(std::size_t node_count, const std::vector<IndexTriple>& triads,
                                                   const std::vector<IndexPair>& edges)
{
    if (node_count > 25)
        throw SizeError("exactly_one_assignments: " + std::to_string(node_count) + " nodes exceeds the limit of 25");
    std::vector<std::uint32_t> out;
    const std::uint32_t limit = std::uint32_t{1} << node_count;
    for (std::uint32_t mask = 0; mask < limit; ++mask) {
        const auto bit = [mask](std::size_t i) { return (mask >> i) & 1u; };
        const bool triads_ok = std::all_of(triads.begin(), triads.end(),
                                           [&](const IndexTriple& t) { return bit(t[0]) + bit(t[1]) + bit(t[2]) == 1; });
        if (!triads_ok)
            continue;
        const bool edges_ok =
            std::none_of(edges.begin(), edges.end(), [&](const IndexPair& e) { return bit(e.first) && bit(e.second); });
        if (edges_ok)
            out.push_back(mask);
    }
    return out;
}

AdmissiblePairSet enumerate_gadget_assignments(const GadgetSet& g)
{
    const std::vector<IndexTriple> triads(gadget_triads().begin(), gadget_triads().end());
    AdmissiblePairSet result;
    for (std::uint32_t mask : exactly_one_assignments(kGadgetSize, triads, g.ortho_edges)) {
        const int v0 = static_cast<int>((mask >> index_of(GadgetRole::S0)) & 1u);
        const int v3 = static_cast<int>((mask >> index_of(GadgetRole::S3_3)) & 1u);
        result.present[2 * v0 + v3] = true;
        ++result.assignment_count;
    }
    return result;
}

nlohmann::json to_json(const GadgetSet& g)
{
    nlohmann::json rays = nlohmann::json::array();
    for (const auto& r : g.rays)
        rays.push_back({{"label", r.label()}, {"xyz", r.xyz()}});
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [a, b] : g.ortho_edges)
        edges.push_back({a, b});
    return {{"x", g.x}, {"y", g.y}, {"rays", rays}, {"edges", edges}};
}

} // namespace ks
