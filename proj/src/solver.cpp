#include "ks/solver.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

namespace ks {

ValueAssignment::ValueAssignment(std::initializer_list<int> values)
{
    for (int v : values)
        values_.push_back(static_cast<std::int8_t>(v));
}

ValueAssignment ValueAssignment::from_mask(std::size_t n, std::uint64_t mask)
{
    ValueAssignment a(n);
    for (std::size_t i = 0; i < n; ++i)
        a.set(i, static_cast<int>((mask >> i) & 1u));
    return a;
}

std::optional<int> ValueAssignment::get(std::size_t i) const
{
    if (!is_set(i))
        return std::nullopt;
    return values_[i];
}

bool ValueAssignment::is_total() const
{
    return std::all_of(values_.begin(), values_.end(), [](std::int8_t v) { return v != kUnset; });
}

nlohmann::json to_json(const ValueAssignment& a)
{
    nlohmann::json out = nlohmann::json::array();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.is_set(i))
            out.push_back(a.value(i));
        else
            out.push_back(nullptr);
    }
    return out;
}

std::string_view outcome_name(Outcome o) { return o == Outcome::Sat ? "SAT" : "UNSAT"; }

std::uint64_t certificate_digest(std::span<const std::int32_t> certificate)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::int32_t tok : certificate) {
        const auto u = static_cast<std::uint32_t>(tok);
        for (int b = 0; b < 4; ++b) {
            h ^= (u >> (8 * b)) & 0xffu;
            h *= 0x100000001b3ull;
        }
    }
    return h;
}

nlohmann::json to_json(const SolverVerdict& v)
{
    std::ostringstream digest;
    digest << std::hex;
    digest.width(16);
    digest.fill('0');
    digest << v.certificate_digest;
    nlohmann::json out = {
        {"outcome", outcome_name(v.outcome)},
        {"stats",
         {{"nodes_explored", v.stats.nodes_explored},
          {"propagations", v.stats.propagations},
          {"max_depth", v.stats.max_depth}}},
        {"certificate_digest", digest.str()},
        {"certificate_length", v.certificate.size()},
        {"degenerate", v.degenerate},
    };
    if (v.witness)
        out["witness"] = to_json(*v.witness);
    return out;
}

namespace {

constexpr std::int8_t kUnset = -1;

class Propagator {
public:
    explicit Propagator(const OrthogonalityGraph& g) : g_(g), value_(g.node_count, kUnset), node_triads_(g.node_count)
    {
        for (std::size_t t = 0; t < g.triads.size(); ++t)
            for (std::size_t n : g.triads[t])
                node_triads_[n].push_back(t);
    }

    std::size_t mark() const { return trail_.size(); }

    void undo_to(std::size_t mark)
    {
        while (trail_.size() > mark) {
            value_[trail_.back()] = kUnset;
            trail_.pop_back();
        }
        head_ = mark;
    }

    // Assigns and propagates to fixpoint; false on conflict (state must then
    // be rolled back by the caller).
    bool decide(std::size_t n, int v)
    {
        if (!assign(n, v))
            return false;
        return propagate();
    }

    std::int8_t value(std::size_t n) const { return value_[n]; }
    std::uint64_t propagations() const { return propagations_; }

    // Unassigned node in the most open triads, then with the most unassigned
    // neighbours, then lowest index; nullopt when everything is assigned.
    std::optional<std::size_t> choose() const
    {
        std::optional<std::size_t> best;
        std::pair<std::size_t, std::size_t> best_score{0, 0};
        for (std::size_t n = 0; n < g_.node_count; ++n) {
            if (value_[n] != kUnset)
                continue;
            std::size_t open = 0;
            for (std::size_t t : node_triads_[n]) {
                const auto& tri = g_.triads[t];
                if (value_[tri[0]] != 1 && value_[tri[1]] != 1 && value_[tri[2]] != 1)
                    ++open;
            }
            std::size_t degree = 0;
            for (std::size_t u : g_.adjacency[n])
                if (value_[u] == kUnset)
                    ++degree;
            const std::pair<std::size_t, std::size_t> score{open, degree};
            if (!best || score > best_score) {
                best = n;
                best_score = score;
            }
        }
        return best;
    }

    ValueAssignment snapshot() const
    {
        ValueAssignment a(g_.node_count);
        for (std::size_t n = 0; n < g_.node_count; ++n)
            if (value_[n] != kUnset)
                a.set(n, value_[n]);
        return a;
    }

private:
    bool assign(std::size_t n, int v)
    {
        if (value_[n] != kUnset)
            return value_[n] == v;
        value_[n] = static_cast<std::int8_t>(v);
        trail_.push_back(n);
        return true;
    }

    bool propagate()
    {
        while (head_ < trail_.size()) {
            const std::size_t n = trail_[head_++];
            if (value_[n] == 1) {
                for (std::size_t u : g_.adjacency[n]) {
                    if (value_[u] == 1)
                        return false;
                    if (value_[u] == kUnset) {
                        assign(u, 0);
                        ++propagations_;
                    }
                }
                continue;
            }
            for (std::size_t t : node_triads_[n]) {
                const auto& tri = g_.triads[t];
                std::size_t zeros = 0;
                std::optional<std::size_t> free;
                bool has_one = false;
                for (std::size_t m : tri) {
                    if (value_[m] == 1)
                        has_one = true;
                    else if (value_[m] == 0)
                        ++zeros;
                    else
                        free = m;
                }
                if (has_one)
                    continue;
                if (zeros == 3)
                    return false;
                if (zeros == 2) {
                    assign(*free, 1);
                    ++propagations_;
                }
            }
        }
        return true;
    }

    const OrthogonalityGraph& g_;
    std::vector<std::int8_t> value_;
    std::vector<std::vector<std::size_t>> node_triads_;
    std::vector<std::size_t> trail_;
    std::size_t head_ = 0;
    std::uint64_t propagations_ = 0;
};

class Search {
public:
    explicit Search(const OrthogonalityGraph& g) : prop_(g) {}

    bool run(std::size_t depth)
    {
        ++stats_.nodes_explored;
        stats_.max_depth = std::max(stats_.max_depth, depth);
        const auto var = prop_.choose();
        if (!var) {
            certificate_.push_back(kSolutionLeaf);
            witness_ = prop_.snapshot();
            return true;
        }
        certificate_.push_back(static_cast<std::int32_t>(*var));
        for (int v : {1, 0}) {
            const std::size_t mark = prop_.mark();
            if (prop_.decide(*var, v)) {
                if (run(depth + 1))
                    return true;
            } else {
                certificate_.push_back(kConflictLeaf);
            }
            prop_.undo_to(mark);
        }
        return false;
    }

    SolverVerdict verdict(bool sat)
    {
        SolverVerdict v;
        v.outcome = sat ? Outcome::Sat : Outcome::Unsat;
        v.witness = std::move(witness_);
        stats_.propagations = prop_.propagations();
        v.stats = stats_;
        v.certificate = std::move(certificate_);
        v.certificate_digest = certificate_digest(v.certificate);
        return v;
    }

private:
    Propagator prop_;
    SolverStats stats_;
    std::vector<std::int32_t> certificate_;
    std::optional<ValueAssignment> witness_;
};

bool replay_node(Propagator& prop, std::span<const std::int32_t> cert, std::size_t& pos, bool conflicted,
                 std::size_t node_count)
{
    if (pos >= cert.size())
        return false;
    const std::int32_t tok = cert[pos++];
    if (conflicted)
        return tok == kConflictLeaf;
    if (tok < 0 || static_cast<std::size_t>(tok) >= node_count)
        return false;
    const auto var = static_cast<std::size_t>(tok);
    if (prop.value(var) != kUnset)
        return false;
    for (int v : {1, 0}) {
        const std::size_t mark = prop.mark();
        const bool ok = prop.decide(var, v);
        if (!replay_node(prop, cert, pos, !ok, node_count))
            return false;
        prop.undo_to(mark);
    }
    return true;
}

} // namespace

SolverVerdict check_colorability(const OrthogonalityGraph& g)
{
    if (g.triads.empty()) {
        SolverVerdict v;
        v.outcome = Outcome::Sat;
        v.witness = ValueAssignment::from_mask(g.node_count, 0);
        v.degenerate = true;
        v.certificate_digest = certificate_digest(v.certificate);
        return v;
    }
    Search search(g);
    const bool sat = search.run(0);
    return search.verdict(sat);
}

bool replay_certificate(const OrthogonalityGraph& g, std::span<const std::int32_t> certificate)
{
    Propagator prop(g);
    std::size_t pos = 0;
    return replay_node(prop, certificate, pos, false, g.node_count) && pos == certificate.size();
}

std::vector<Violation> verify_assignment(const OrthogonalityGraph& g, const ValueAssignment& a)
{
    if (a.size() != g.node_count || !a.is_total())
        throw IncompleteAssignmentError("verify_assignment: assignment must give a value to all " +
                                        std::to_string(g.node_count) + " nodes");
    std::vector<Violation> out;
    // A triad holding two 1s is already reported by its edges; the triad rule
    // itself only adds the requirement that some member is 1.
    for (std::size_t t = 0; t < g.triads.size(); ++t) {
        const auto& tri = g.triads[t];
        if (a.value(tri[0]) + a.value(tri[1]) + a.value(tri[2]) == 0)
            out.push_back({Violation::Kind::Triad, t,
                           "triad (" + std::to_string(tri[0]) + ", " + std::to_string(tri[1]) + ", " +
                               std::to_string(tri[2]) + ") has no node valued 1"});
    }
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        const auto [u, v] = g.edges[e];
        if (a.value(u) == 1 && a.value(v) == 1)
            out.push_back({Violation::Kind::Edge, e,
                           "edge (" + std::to_string(u) + ", " + std::to_string(v) + ") has both nodes valued 1"});
    }
    return out;
}

std::vector<ValueAssignment> enumerate_all_colorings(const OrthogonalityGraph& g, std::size_t cap)
{
    const std::size_t n = g.node_count;
    if (n > cap || n > 40)
        throw SizeError("enumerate_all_colorings: " + std::to_string(n) + " nodes exceeds the cap of " +
                        std::to_string(std::min<std::size_t>(cap, 40)));
    std::vector<std::uint64_t> triad_masks;
    for (const auto& t : g.triads)
        triad_masks.push_back((1ull << t[0]) | (1ull << t[1]) | (1ull << t[2]));
    std::vector<std::uint64_t> edge_masks;
    for (const auto& [u, v] : g.edges)
        edge_masks.push_back((1ull << u) | (1ull << v));

    std::vector<ValueAssignment> out;
    const std::uint64_t limit = 1ull << n;
    for (std::uint64_t mask = 0; mask < limit; ++mask) {
        const bool candidate =
            std::all_of(triad_masks.begin(), triad_masks.end(), [mask](std::uint64_t t) { return (mask & t) != 0; }) &&
            std::none_of(edge_masks.begin(), edge_masks.end(), [mask](std::uint64_t e) { return (mask & e) == e; });
        if (!candidate)
            continue;
        auto a = ValueAssignment::from_mask(n, mask);
        if (verify_assignment(g, a).empty())
            out.push_back(std::move(a));
    }
    return out;
}

nlohmann::json to_json(const ChainReport& r)
{
    nlohmann::json links = nlohmann::json::array();
    for (const auto& l : r.links) {
        nlohmann::json pairs = nlohmann::json::array();
        for (const auto& [a, b] : l.pairs.pairs())
            pairs.push_back({a, b});
        links.push_back({{"copy", l.copy},
                         {"from", l.from_node},
                         {"to", l.to_node},
                         {"angle_deg", radians_to_degrees(l.angle)},
                         {"admissible_pairs", pairs},
                         {"assignments", l.pairs.assignment_count},
                         {"forward_forced", l.forward_forced()},
                         {"backward_forced", l.backward_forced()}});
    }
    nlohmann::json out = {{"links", links},
                          {"all_links_forced", r.all_links_forced},
                          {"symmetric_forcing", r.symmetric_forcing},
                          {"closed", r.closed},
                          {"chain_nodes", r.chain_nodes},
                          {"equal_to_origin", r.equal_to_origin},
                          {"contradiction", r.contradiction},
                          {"summary", r.summary}};
    if (r.contradiction_triad)
        out["contradiction_triad"] = *r.contradiction_triad;
    return out;
}

ChainReport forcing_chain_check(double gadget_angle, std::span<const GadgetInstance> chain,
                                const OrthogonalityGraph& graph)
{
    ChainReport report;
    for (std::size_t k = 0; k < chain.size(); ++k) {
        const auto& inst = chain[k];
        ChainLink link;
        link.copy = inst.copy;
        link.from_node = inst.node(GadgetRole::S0);
        link.to_node = inst.node(GadgetRole::S3_3);
        const std::string where = "link " + std::to_string(k) + " (copy " + std::to_string(inst.copy) + ")";
        if (link.from_node == kNoNode || link.to_node == kNoNode)
            throw ChainIntegrityError(where + ": chaining ray is missing from the ray set");
        if (k > 0 && link.from_node != report.links.back().to_node)
            throw ChainIntegrityError(where + ": s0 does not coincide with the previous link's s3(3)");
        const GadgetSet g = gadget_from_rays(inst.rays, 0.0, 0.0);
        if (max_orthogonality_residual(g) > 1e-9)
            throw ChainIntegrityError(where + ": gadget orthogonalities do not hold");
        link.angle = gadget_ray_angle(g);
        if (std::abs(link.angle - gadget_angle) > 1e-9)
            throw ChainIntegrityError(where + ": s0 / s3(3) angle differs from the expected gadget angle");
        link.pairs = enumerate_gadget_assignments(g);
        report.links.push_back(link);
    }
    if (report.links.empty()) {
        report.summary = "empty chain";
        return report;
    }

    report.all_links_forced = std::all_of(report.links.begin(), report.links.end(),
                                          [](const ChainLink& l) { return l.forward_forced(); });
    report.symmetric_forcing = std::all_of(report.links.begin(), report.links.end(), [](const ChainLink& l) {
        return l.forward_forced() && l.backward_forced();
    });
    report.closed = report.links.size() > 1 && report.links.back().to_node == report.links.front().from_node;

    auto& nodes = report.chain_nodes;
    nodes.push_back(report.links.front().from_node);
    for (const auto& l : report.links)
        if (std::find(nodes.begin(), nodes.end(), l.to_node) == nodes.end())
            nodes.push_back(l.to_node);
    const std::size_t m = nodes.size();
    const auto slot = [&](std::size_t node) {
        return static_cast<std::size_t>(std::find(nodes.begin(), nodes.end(), node) - nodes.begin());
    };

    // implies[a][b]: nu(a) = 1 forces nu(b) = 1.
    std::vector<std::vector<bool>> implies(m, std::vector<bool>(m, false));
    for (std::size_t a = 0; a < m; ++a)
        implies[a][a] = true;
    for (const auto& l : report.links) {
        if (l.forward_forced())
            implies[slot(l.from_node)][slot(l.to_node)] = true;
        if (l.backward_forced())
            implies[slot(l.to_node)][slot(l.from_node)] = true;
    }
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t a = 0; a < m; ++a)
            if (implies[a][k])
                for (std::size_t b = 0; b < m; ++b)
                    if (implies[k][b])
                        implies[a][b] = true;

    for (std::size_t b = 0; b < m; ++b)
        if (implies[0][b] && implies[b][0])
            report.equal_to_origin.push_back(nodes[b]);

    const auto in_chain = [&](std::size_t node) { return std::find(nodes.begin(), nodes.end(), node) != nodes.end(); };
    const auto equal = [&](std::size_t a, std::size_t b) {
        return implies[slot(a)][slot(b)] && implies[slot(b)][slot(a)];
    };

    std::ostringstream summary;
    for (const auto& t : graph.triads) {
        if (in_chain(t[0]) && in_chain(t[1]) && in_chain(t[2]) && equal(t[0], t[1]) && equal(t[0], t[2])) {
            report.contradiction = true;
            report.contradiction_triad = t;
            summary << "nodes " << t[0] << ", " << t[1] << ", " << t[2]
                    << " are forced to share one value, but as a triad they need exactly one 1";
            break;
        }
    }

    if (!report.contradiction) {
        // nu(a) = 1 would force an orthogonal partner to 1 as well, so nu(a) = 0;
        // zeros then flow backwards along the implications.
        std::vector<bool> zero(m, false);
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < m; ++b)
                if (a != b && implies[a][b] && graph.adjacent(nodes[a], nodes[b]))
                    zero[a] = true;
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < m; ++b)
                if (zero[b] && implies[a][b])
                    zero[a] = true;
        for (const auto& t : graph.triads) {
            if (in_chain(t[0]) && in_chain(t[1]) && in_chain(t[2]) && zero[slot(t[0])] && zero[slot(t[1])] &&
                zero[slot(t[2])]) {
                report.contradiction = true;
                report.contradiction_triad = t;
                summary << "nodes " << t[0] << ", " << t[1] << ", " << t[2]
                        << " are all forced to 0, but as a triad they need exactly one 1";
                break;
            }
        }
    }

    if (!report.contradiction)
        summary << report.links.size() << " link(s) checked; no contradiction derivable from the chain";
    report.summary = summary.str();
    return report;
}

} // namespace ks
