#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace gisl {

using VertexId = std::size_t;

enum class VertexKind { Observed, Latent, Selection, Indicator };

std::string to_string(VertexKind kind);
VertexKind vertex_kind_from_string(const std::string& s);

struct Vertex {
    VertexId id;
    VertexKind kind;
    std::string label;
};

// Unordered pair, stored with a < b.
struct VarPair {
    VertexId a = 0;
    VertexId b = 0;

    VarPair() = default;
    VarPair(VertexId x, VertexId y) : a(x < y ? x : y), b(x < y ? y : x) {}

    auto operator<=>(const VarPair&) const = default;
};

using PairSet = std::set<VarPair>;
using DirectedEdge = std::pair<VertexId, VertexId>;

class Dag {
public:
    VertexId add_vertex(VertexKind kind, std::string label);
    // Throws std::invalid_argument on unknown ids, self loops, duplicates or cycles.
    void add_edge(VertexId tail, VertexId head);
    void remove_edge(VertexId tail, VertexId head);

    std::size_t num_vertices() const { return vertices_.size(); }
    const Vertex& vertex(VertexId v) const;
    const std::vector<Vertex>& vertices() const { return vertices_; }
    const std::vector<VertexId>& parents(VertexId v) const;
    const std::vector<VertexId>& children(VertexId v) const;
    bool has_edge(VertexId tail, VertexId head) const;
    bool adjacent(VertexId u, VertexId v) const;
    std::size_t num_edges() const;
    std::vector<DirectedEdge> edges() const;

    std::vector<VertexId> of_kind(VertexKind kind) const;
    std::optional<VertexId> find(const std::string& label) const;

    std::vector<VertexId> topological_order() const;
    // Reflexive.
    std::set<VertexId> ancestors(const std::set<VertexId>& vs) const;
    std::set<VertexId> descendants(VertexId v) const;
    bool reaches(VertexId from, VertexId to) const;

    // Kind invariants (selection sinks, indicator sources with one child).
    void validate() const;

    bool operator==(const Dag& other) const;

private:
    void check(VertexId v) const;

    std::vector<Vertex> vertices_;
    std::vector<std::vector<VertexId>> parents_;
    std::vector<std::vector<VertexId>> children_;
};

struct AugmentedDag {
    Dag base;
    PairSet confounded_pairs;
    PairSet selection_pairs;
    std::set<VertexId> intervention_targets;

    std::vector<VertexId> observed() const { return base.of_kind(VertexKind::Observed); }
    void validate() const;
};

enum class EdgeMark { Tail, Arrow, Circle };

std::string to_string(EdgeMark mark);
EdgeMark edge_mark_from_string(const std::string& s);

struct MixedEdge {
    VertexId a;
    VertexId b;
    EdgeMark at_a;
    EdgeMark at_b;
};

class MixedGraph {
public:
    MixedGraph() = default;
    explicit MixedGraph(std::vector<VertexId> vertices) : vertices_(std::move(vertices)) {}

    const std::vector<VertexId>& vertices() const { return vertices_; }
    // Replaces any existing edge between a and b.
    void set_edge(VertexId a, VertexId b, EdgeMark at_a, EdgeMark at_b);
    void remove_edge(VertexId a, VertexId b);
    std::optional<MixedEdge> edge(VertexId a, VertexId b) const;
    std::vector<MixedEdge> edges() const;
    std::size_t num_edges() const { return edges_.size(); }
    // Tail-Arrow edges as (tail, head).
    std::set<DirectedEdge> directed_edges() const;

private:
    std::vector<VertexId> vertices_;
    std::map<VarPair, MixedEdge> edges_;
};

Dag generate_er_dag(std::size_t num_vars, std::size_t num_edges, std::uint64_t seed);
AugmentedDag augment_structure(const Dag& dag, std::size_t n_conf, std::size_t n_sel, std::uint64_t seed);
Dag mutilate(const Dag& dag, VertexId target);
// Indicator vertices are labelled "I_<target label>".
Dag add_indicators(const Dag& dag, const std::set<VertexId>& targets);
std::optional<VertexId> indicator_of(const Dag& dag, VertexId target);

bool d_separated(const Dag& dag, VertexId a, VertexId b, const std::set<VertexId>& cond);
// Vertices d-connected to a given cond (a itself excluded).
std::set<VertexId> d_connected_set(const Dag& dag, VertexId a, const std::set<VertexId>& cond);

bool is_inducing_path(const Dag& dag, const std::vector<VertexId>& path,
                      const std::set<VertexId>& latents, const std::set<VertexId>& selections);

// Every Selection vertex of the graph is added to cond.
bool selection_conditioned_dseparated(const Dag& dag, VertexId a, VertexId b,
                                      const std::set<VertexId>& cond);
bool selection_conditioned_dseparated(const AugmentedDag& aug, VertexId a, VertexId b,
                                      const std::set<VertexId>& cond);

}  // namespace gisl
