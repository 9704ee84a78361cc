#include "ks/io.hpp"

#include <cmath>
#include <iomanip>
#include <regex>
#include <sstream>

namespace ks {

std::string format_number(double v)
{
    std::ostringstream out;
    out << std::setprecision(kOutputPrecision) << v;
    return out.str();
}

nlohmann::json rounded(const nlohmann::json& j)
{
    if (j.is_number_float())
        return std::stod(format_number(j.get<double>()));
    if (j.is_array() || j.is_object()) {
        nlohmann::json out = j;
        for (auto& v : out)
            v = rounded(v);
        return out;
    }
    return j;
}

std::string emit_dot(const OrthogonalityGraph& g, const std::vector<std::string>& labels, bool triad_comments)
{
    std::ostringstream out;
    out << "graph orthogonality {\n";
    out << "  node [shape=circle, label=\"\", width=0.15, fixedsize=true];\n";
    out << "  edge [arrowhead=none];\n";
    for (std::size_t n = 0; n < g.node_count; ++n) {
        out << "  n" << n;
        if (n < labels.size() && !labels[n].empty())
            out << " [tooltip=\"" << labels[n] << "\"]";
        out << ";\n";
    }
    for (const auto& [a, b] : g.edges)
        out << "  n" << a << " -- n" << b << ";\n";
    if (triad_comments)
        for (std::size_t t = 0; t < g.triads.size(); ++t)
            out << "  // triad " << t << ": n" << g.triads[t][0] << " n" << g.triads[t][1] << " n" << g.triads[t][2]
                << "\n";
    out << "}\n";
    return out.str();
}

DotCounts parse_dot_counts(std::string_view dot)
{
    const std::string text(dot);
    static const std::regex header(R"(^\s*(strict\s+)?graph\s+\w*\s*\{)");
    if (!std::regex_search(text, header))
        throw ParseError("parse_dot_counts: not an undirected graph block");
    if (text.find('}') == std::string::npos)
        throw ParseError("parse_dot_counts: unterminated graph block");

    static const std::regex node_stmt(R"(^\s*n\d+\s*(\[[^\]]*\])?\s*;?\s*$)");
    static const std::regex edge_stmt(R"(^\s*n\d+\s*--\s*n\d+\s*(\[[^\]]*\])?\s*;?\s*$)");
    DotCounts counts;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        const auto comment = line.find("//");
        if (comment != std::string::npos)
            line.erase(comment);
        if (std::regex_match(line, edge_stmt))
            ++counts.edges;
        else if (std::regex_match(line, node_stmt))
            ++counts.nodes;
    }
    return counts;
}

std::vector<std::string> merged_labels(const RaySet& rs)
{
    std::vector<std::string> out;
    out.reserve(rs.rays.size());
    for (const auto& group : rs.groups) {
        std::string s;
        for (std::size_t l : group) {
            if (!s.empty())
                s += '=';
            s += rs.labeled[l].ray.label();
        }
        out.push_back(s);
    }
    return out;
}

void write_census_csv(std::ostream& out, const RaySet& rs)
{
    out << "copy,triad,ray_1,ray_2,ray_3,node_1,node_2,node_3,new_rays\n";
    for (const auto& inst : rs.instances) {
        for (std::size_t t = 0; t < 3; ++t) {
            const auto& roles = gadget_triads()[t];
            out << inst.copy << ',' << t + 1;
            for (std::size_t i : roles)
                out << ',' << inst.rays[i].label();
            std::size_t fresh = 0;
            for (std::size_t i : roles) {
                const std::size_t node = inst.nodes[i];
                if (node == kNoNode) {
                    out << ",";
                    continue;
                }
                out << ',' << node;
                const auto& first = rs.labeled[rs.groups[node].front()];
                if (first.copy == inst.copy && index_of(first.role) == i)
                    ++fresh;
            }
            out << ',' << fresh << '\n';
        }
    }
}

nlohmann::json census_summary(const RaySet& rs)
{
    nlohmann::json shared = nlohmann::json::array();
    const auto labels = merged_labels(rs);
    for (std::size_t n = 0; n < rs.groups.size(); ++n)
        if (rs.groups[n].size() > 1)
            shared.push_back({{"node", n}, {"labels", labels[n]}});
    return {{"copies", rs.instances.size()},
            {"labeled_rays", rs.labeled.size()},
            {"distinct_rays", rs.rays.size()},
            {"merges", rs.merges()},
            {"shared", shared}};
}

void write_spin_half_table(std::ostream& out)
{
    struct Row {
        double theta_deg;
        char sign;
        Vec2 v;
    };
    std::vector<Row> rows;
    for (double deg : {0.0, 90.0, 180.0, 270.0}) {
        const auto pair = spin_half_eigenvectors(degrees_to_radians(deg));
        rows.push_back({deg, '+', pair.plus.components});
        rows.push_back({deg, '-', pair.minus.components});
    }
    out << "theta_deg,branch,c1,c2,norm,same_state_as\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        std::string same;
        for (std::size_t k = 0; k < rows.size(); ++k) {
            if (k == i || rows[k].theta_deg == r.theta_deg)
                continue;
            const Vec2 d = r.v - rows[k].v;
            if (std::abs(d[0]) <= 1e-12 && std::abs(d[1]) <= 1e-12) {
                if (!same.empty())
                    same += ';';
                same += format_number(rows[k].theta_deg) + rows[k].sign;
            }
        }
        out << format_number(r.theta_deg) << ',' << r.sign << ',' << format_number(r.v[0]) << ','
            << format_number(r.v[1]) << ',' << format_number(norm(r.v)) << ',' << same << '\n';
    }
}

void write_spin1_table(std::ostream& out)
{
    const std::array<std::string_view, 4> names = {"k", "-i", "-k", "i"};
    out << "theta_deg,B,ray,x,y,z,norm\n";
    for (std::size_t c = 0; c < 4; ++c) {
        const double deg = 90.0 * static_cast<double>(c);
        const auto ctx = Context::stern_gerlach(degrees_to_radians(deg));
        for (std::size_t i = 0; i < 3; ++i) {
            const auto& r = ctx.triad()[i];
            out << format_number(deg) << ',' << names[c] << ",s" << i + 1 << ',' << format_number(r[0]) << ','
                << format_number(r[1]) << ',' << format_number(r[2]) << ',' << format_number(norm(r.xyz())) << '\n';
        }
    }
}

void write_counts_csv(std::ostream& out, const SequenceResult& r)
{
    out << "# generator=" << kGeneratorName << " seed=" << r.spec.seed
        << " preparation=" << describe(r.spec.preparation) << '\n';
    out << "stage,theta_deg,n_plus,n_minus,n_zero,N\n";
    for (std::size_t s = 0; s < r.stages.size(); ++s) {
        const auto& c = r.stages[s];
        out << s + 1 << ',' << format_number(radians_to_degrees(c.theta)) << ',' << c.n_plus << ',' << c.n_minus << ','
            << c.n_zero << ',' << c.total << '\n';
    }
}

void write_scan_csv(std::ostream& out, double psi, const std::vector<double>& grid, const std::vector<double>& values)
{
    out << "psi_deg,phi_deg,overlap\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
        out << format_number(radians_to_degrees(psi)) << ',' << format_number(radians_to_degrees(grid[i])) << ','
            << format_number(values[i]) << '\n';
}

} // namespace ks
