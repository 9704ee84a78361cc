#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ks/graph.hpp"
#include "ks/simulator.hpp"

namespace ks {

inline constexpr int kOutputPrecision = 9;

// Shortest form with 9 significant digits.
std::string format_number(double v);

// Copy of `j` with every floating-point value cut to 9 significant digits.
nlohmann::json rounded(const nlohmann::json& j);

// Undirected DOT graph: small open circles, plain edges, one comment line per
// triad when requested. `labels` (if nonempty) become node tooltips.
std::string emit_dot(const OrthogonalityGraph& g, const std::vector<std::string>& labels = {},
                     bool triad_comments = true);

struct DotCounts {
    std::size_t nodes = 0;
    std::size_t edges = 0;
};

// Counts node and edge statements of a document produced by emit_dot.
// Throws ParseError when the text is not an undirected graph block.
DotCounts parse_dot_counts(std::string_view dot);

// Node labels for a ray set: every label that merged into each ray, joined
// with '='.
std::vector<std::string> merged_labels(const RaySet& rs);

// One row per copy and triad: the three labels, their node ids and how many
// of them first appear there.
void write_census_csv(std::ostream& out, const RaySet& rs);
nlohmann::json census_summary(const RaySet& rs);

// Spin-1/2 eigenvectors at 0, 90, 180, 270 degrees; equal states are flagged.
void write_spin_half_table(std::ostream& out);
// Spin-1 outcome triads for the fields k, -i, -k, i.
void write_spin1_table(std::ostream& out);

void write_counts_csv(std::ostream& out, const SequenceResult& r);
void write_scan_csv(std::ostream& out, double psi, const std::vector<double>& grid, const std::vector<double>& values);

} // namespace ks
