#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ks/gadget.hpp"
#include "ks/graph.hpp"

namespace ks {

// Partial or total map node -> {0, 1}.
class ValueAssignment {
public:
    ValueAssignment() = default;
    explicit ValueAssignment(std::size_t n) : values_(n, kUnset) {}
    ValueAssignment(std::initializer_list<int> values);

    static ValueAssignment from_mask(std::size_t n, std::uint64_t mask);

    std::size_t size() const { return values_.size(); }
    bool is_set(std::size_t i) const { return values_[i] != kUnset; }
    int value(std::size_t i) const { return values_[i]; }
    std::optional<int> get(std::size_t i) const;
    void set(std::size_t i, int v) { values_[i] = static_cast<std::int8_t>(v); }
    void clear(std::size_t i) { values_[i] = kUnset; }
    bool is_total() const;

    friend bool operator==(const ValueAssignment&, const ValueAssignment&) = default;

private:
    static constexpr std::int8_t kUnset = -1;
    std::vector<std::int8_t> values_;
};

nlohmann::json to_json(const ValueAssignment& a);

enum class Outcome { Sat, Unsat };

std::string_view outcome_name(Outcome o);

struct SolverStats {
    std::uint64_t nodes_explored = 0;
    std::uint64_t propagations = 0;
    std::size_t max_depth = 0;

    friend bool operator==(const SolverStats&, const SolverStats&) = default;
};

// Preorder encoding of the search tree: a node index opens a decision that is
// followed by its value-1 subtree and then its value-0 subtree; kConflictLeaf
// closes a refuted branch and kSolutionLeaf the branch holding the witness.
inline constexpr std::int32_t kConflictLeaf = -1;
inline constexpr std::int32_t kSolutionLeaf = -2;

struct SolverVerdict {
    Outcome outcome = Outcome::Sat;
    std::optional<ValueAssignment> witness;
    SolverStats stats;
    std::vector<std::int32_t> certificate;
    std::uint64_t certificate_digest = 0;
    bool degenerate = false; // graph had no triads
};

nlohmann::json to_json(const SolverVerdict& v);

// FNV-1a over the little-endian bytes of the tokens.
std::uint64_t certificate_digest(std::span<const std::int32_t> certificate);

// Complete backtracking search. Setting a node to 1 forces its neighbours to
// 0; a triad with two 0s forces its third node to 1; a triad of three 0s or an
// edge of two 1s is a conflict. Branches on the unassigned node in the most
// open triads (then highest open degree, then lowest index), value 1 first.
SolverVerdict check_colorability(const OrthogonalityGraph& g);

// Re-walks an UNSAT certificate with the same propagation rules and confirms
// that every leaf conflicts and every decision covers both values.
bool replay_certificate(const OrthogonalityGraph& g, std::span<const std::int32_t> certificate);

struct Violation {
    enum class Kind { Triad, Edge };
    Kind kind;
    std::size_t index; // into g.triads or g.edges
    std::string description;
};

// Throws IncompleteAssignmentError unless `a` is total and sized to the graph.
std::vector<Violation> verify_assignment(const OrthogonalityGraph& g, const ValueAssignment& a);

// All satisfying total assignments by a 2^n scan; refuses (SizeError) when
// node_count exceeds `cap`.
std::vector<ValueAssignment> enumerate_all_colorings(const OrthogonalityGraph& g, std::size_t cap = 25);

struct ChainLink {
    std::size_t copy = 0;
    std::size_t from_node = kNoNode; // s0
    std::size_t to_node = kNoNode;   // s3(3)
    double angle = 0.0;
    AdmissiblePairSet pairs;

    // nu(s0) = 1 implies nu(s3(3)) = 1.
    bool forward_forced() const { return pairs.excludes_one_zero(); }
    // nu(s3(3)) = 1 implies nu(s0) = 1.
    bool backward_forced() const { return pairs.excludes_zero_one(); }
};

struct ChainReport {
    std::vector<ChainLink> links;
    bool all_links_forced = false;    // every link forward forced
    bool symmetric_forcing = false;   // every link forced both ways
    bool closed = false;              // last s3(3) is the first s0
    std::vector<std::size_t> chain_nodes;
    // Nodes proven equal to chain_nodes.front() by the implications.
    std::vector<std::size_t> equal_to_origin;
    std::optional<IndexTriple> contradiction_triad;
    bool contradiction = false;
    std::string summary;
};

nlohmann::json to_json(const ChainReport& r);

// Checks every link by exhaustive enumeration of its gadget, composes the
// forced implications along the chain, and looks for a triad of the graph
// whose three values the implications make impossible. Throws
// ChainIntegrityError when consecutive links do not share their chaining ray
// or a link's angle differs from `gadget_angle` by more than 1e-9.
ChainReport forcing_chain_check(double gadget_angle, std::span<const GadgetInstance> chain,
                                const OrthogonalityGraph& graph);

} // namespace ks
