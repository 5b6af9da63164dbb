#include <doctest.h>

#include <random>

#include "gisl/graph.hpp"
#include "gisl/graph_io.hpp"
#include "oracles.hpp"

using namespace gisl;

namespace {

Dag chain(std::initializer_list<std::pair<int, int>> edges, std::size_t n) {
    Dag d;
    for (std::size_t i = 0; i < n; ++i) d.add_vertex(VertexKind::Observed, "V" + std::to_string(i));
    for (auto [a, b] : edges) d.add_edge(static_cast<VertexId>(a), static_cast<VertexId>(b));
    return d;
}

std::vector<oracle::Edge> edge_list(const Dag& d) {
    std::vector<oracle::Edge> out;
    for (auto [a, b] : d.edges()) out.emplace_back(a, b);
    return out;
}

}  // namespace

TEST_CASE("ER generator honours the edge count and is deterministic") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Dag d = generate_er_dag(10, 10, seed);
        CHECK(d.num_vertices() == 10);
        CHECK(d.num_edges() == 10);
        CHECK(d.topological_order().size() == 10);
        CHECK(d == generate_er_dag(10, 10, seed));
    }
    CHECK_FALSE(generate_er_dag(10, 10, 1) == generate_er_dag(10, 10, 2));
    CHECK(generate_er_dag(5, 10, 0).num_edges() == 10);
    CHECK_THROWS_AS(generate_er_dag(5, 11, 0), std::invalid_argument);
    CHECK_THROWS_AS(generate_er_dag(1, 0, 0), std::invalid_argument);
}

TEST_CASE("edges that would create cycles, loops or duplicates are rejected") {
    Dag d = chain({{0, 1}, {1, 2}}, 3);
    CHECK_THROWS_AS(d.add_edge(2, 0), std::invalid_argument);
    CHECK_THROWS_AS(d.add_edge(1, 1), std::invalid_argument);
    CHECK_THROWS_AS(d.add_edge(0, 1), std::invalid_argument);
    CHECK_THROWS_AS(d.add_edge(0, 7), std::invalid_argument);
    d.add_edge(0, 2);
    CHECK(d.num_edges() == 3);
}

TEST_CASE("ancestors and descendants are reflexive") {
    Dag d = chain({{0, 1}, {1, 2}, {3, 2}}, 4);
    CHECK(d.descendants(0) == std::set<VertexId>{0, 1, 2});
    CHECK(d.ancestors({2}) == std::set<VertexId>{0, 1, 2, 3});
    CHECK(d.reaches(0, 2));
    CHECK_FALSE(d.reaches(2, 0));
}

TEST_CASE("d-separation on the three canonical triples") {
    Dag ch = chain({{0, 1}, {1, 2}}, 3);
    CHECK_FALSE(d_separated(ch, 0, 2, {}));
    CHECK(d_separated(ch, 0, 2, {1}));
    Dag fork = chain({{1, 0}, {1, 2}}, 3);
    CHECK_FALSE(d_separated(fork, 0, 2, {}));
    CHECK(d_separated(fork, 0, 2, {1}));
    Dag coll = chain({{0, 1}, {2, 1}, {1, 3}}, 4);
    CHECK(d_separated(coll, 0, 2, {}));
    CHECK_FALSE(d_separated(coll, 0, 2, {1}));
    CHECK_FALSE(d_separated(coll, 0, 2, {3}));
    CHECK_THROWS_AS(d_separated(coll, 0, 0, {}), std::invalid_argument);
    CHECK_THROWS_AS(d_separated(coll, 0, 2, {0}), std::invalid_argument);
}

TEST_CASE("d-separation agrees with path enumeration on random DAGs") {
    std::mt19937_64 rng(7);
    std::size_t checked = 0;
    for (int g = 0; g < 40; ++g) {
        std::size_t n = 3 + rng() % 5;
        std::size_t max_e = n * (n - 1) / 2;
        Dag d = generate_er_dag(n, rng() % (max_e + 1), rng());
        auto edges = edge_list(d);
        for (VertexId a = 0; a < n; ++a)
            for (VertexId b = a + 1; b < n; ++b) {
                std::vector<VertexId> rest;
                for (VertexId v = 0; v < n; ++v)
                    if (v != a && v != b) rest.push_back(v);
                for (std::size_t mask = 0; mask < (1u << rest.size()); ++mask) {
                    std::set<VertexId> z;
                    for (std::size_t k = 0; k < rest.size(); ++k)
                        if (mask >> k & 1) z.insert(rest[k]);
                    bool expected = !oracle::d_connected(n, edges, a, b, z);
                    REQUIRE(d_separated(d, a, b, z) == expected);
                    ++checked;
                }
            }
    }
    CHECK(checked > 1000);
}

TEST_CASE("augmented structures respect vertex-kind invariants") {
    Dag d = generate_er_dag(10, 10, 3);
    AugmentedDag aug = augment_structure(d, 2, 2, 11);
    aug.validate();
    CHECK(aug.base.of_kind(VertexKind::Latent).size() == 2);
    CHECK(aug.base.of_kind(VertexKind::Selection).size() == 2);
    CHECK(aug.confounded_pairs.size() == 2);
    CHECK(aug.selection_pairs.size() == 2);
    for (auto p : aug.confounded_pairs) CHECK(aug.selection_pairs.count(p) == 0);
    for (VertexId s : aug.base.of_kind(VertexKind::Selection)) {
        CHECK(aug.base.children(s).empty());
        CHECK(aug.base.parents(s).size() == 2);
    }
    for (VertexId l : aug.base.of_kind(VertexKind::Latent)) {
        CHECK(aug.base.parents(l).empty());
        CHECK(aug.base.children(l).size() == 2);
    }
    CHECK(aug.intervention_targets.size() == 10);
    CHECK_THROWS_AS(augment_structure(generate_er_dag(2, 1, 0), 1, 1, 0), std::invalid_argument);
}

TEST_CASE("mutilation removes incoming edges only") {
    Dag d = chain({{0, 1}, {2, 1}, {1, 3}}, 4);
    Dag m = mutilate(d, 1);
    CHECK(m.parents(1).empty());
    CHECK(m.has_edge(1, 3));
    CHECK(m.num_edges() == 1);
    Dag with = add_indicators(d, {1});
    auto i = indicator_of(with, 1);
    REQUIRE(i);
    CHECK(with.vertex(*i).label == "I_V1");
    CHECK(with.vertex(*i).kind == VertexKind::Indicator);
    CHECK_FALSE(indicator_of(with, 0));
}

TEST_CASE("inducing paths through latents, colliders and selection") {
    // X <- L -> Y
    Dag a;
    VertexId x = a.add_vertex(VertexKind::Observed, "X");
    VertexId y = a.add_vertex(VertexKind::Observed, "Y");
    VertexId l = a.add_vertex(VertexKind::Latent, "L");
    a.add_edge(l, x);
    a.add_edge(l, y);
    CHECK(is_inducing_path(a, {x, l, y}, {l}, {}));
    CHECK_FALSE(is_inducing_path(a, {x, l, y}, {}, {}));

    // X -> Z <- Y with Z -> S
    Dag b;
    x = b.add_vertex(VertexKind::Observed, "X");
    y = b.add_vertex(VertexKind::Observed, "Y");
    VertexId z = b.add_vertex(VertexKind::Observed, "Z");
    VertexId s = b.add_vertex(VertexKind::Selection, "S");
    b.add_edge(x, z);
    b.add_edge(y, z);
    b.add_edge(z, s);
    CHECK(is_inducing_path(b, {x, z, y}, {}, {s}));
    CHECK_FALSE(is_inducing_path(b, {x, z, y}, {}, {}));
    CHECK(selection_conditioned_dseparated(b, x, y, {}) == false);
    CHECK(d_separated(b, x, y, {}));
}

TEST_CASE("mixed graph reports marks relative to the query order") {
    MixedGraph g({0, 1, 2});
    g.set_edge(0, 1, EdgeMark::Tail, EdgeMark::Arrow);
    g.set_edge(2, 1, EdgeMark::Arrow, EdgeMark::Arrow);
    auto e = g.edge(1, 0);
    REQUIRE(e);
    CHECK(e->at_a == EdgeMark::Arrow);
    CHECK(e->at_b == EdgeMark::Tail);
    CHECK(g.directed_edges() == std::set<DirectedEdge>{{0, 1}});
    g.remove_edge(1, 0);
    CHECK_FALSE(g.edge(0, 1));
}

TEST_CASE("graph JSON round trips") {
    AugmentedDag aug = augment_structure(generate_er_dag(8, 9, 5), 1, 2, 6);
    AugmentedDag back = augmented_from_json(to_json(aug));
    CHECK(back.base == aug.base);
    CHECK(back.confounded_pairs == aug.confounded_pairs);
    CHECK(back.selection_pairs == aug.selection_pairs);
    CHECK(back.intervention_targets == aug.intervention_targets);
    CHECK(dag_from_json(to_json(aug.base)) == aug.base);

    MixedGraph g({0, 1, 2});
    g.set_edge(0, 1, EdgeMark::Tail, EdgeMark::Arrow);
    g.set_edge(1, 2, EdgeMark::Circle, EdgeMark::Circle);
    std::vector<std::string> names{"A", "B", "C"};
    MixedGraph h = mixed_from_json(to_json(g, names), names);
    CHECK(h.edges().size() == 2);
    CHECK(h.edge(1, 2)->at_a == EdgeMark::Circle);
    auto dot = to_dot(g, names);
    CHECK(dot.find("label=\"A\"") != std::string::npos);
    CHECK(dot.find("0 -> 1 [dir=both, arrowtail=none, arrowhead=normal") != std::string::npos);
    CHECK(dot.find("arrowtail=odot") != std::string::npos);
    CHECK_THROWS(dag_from_json(Json{{"format", "something-else"}}));
}
