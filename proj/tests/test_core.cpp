#include <doctest.h>

#include <map>

#include "gisl/gisl.hpp"
#include "gisl/oracle.hpp"
#include "fixtures.hpp"

using namespace gisl;
using fixture::build;

namespace {

constexpr Slot D = Slot::Dep, I = Slot::Indep, U = Slot::Unusable;

PatternQuad quad(Slot a, Slot b, Slot c, Slot d) {
    PatternQuad q;
    q.t1 = a;
    q.t2 = b;
    q.t3 = c;
    q.t4 = d;
    return q;
}

// Indicator verdicts scripted per (k, j, cond); everything else independent.
class ScriptedBackend : public CiBackend {
public:
    explicit ScriptedBackend(std::vector<std::string> names) : names_(std::move(names)) {}
    const std::vector<std::string>& names() const override { return names_; }
    bool has_perturbation(std::size_t) const override { return true; }
    CiVerdict observational(std::size_t i, std::size_t j, const std::vector<std::size_t>&) override {
        CiVerdict v;
        v.dependent = adjacent.count(VarPair(i, j)) > 0;
        v.p_value = v.dependent ? 0.0 : 1.0;
        return v;
    }
    CiVerdict indicator(std::size_t k, std::size_t j, const std::vector<std::size_t>& cond) override {
        CiVerdict v;
        auto it = dep.find({k, j, cond});
        v.dependent = it != dep.end() && it->second;
        v.p_value = v.dependent ? 0.0 : 1.0;
        return v;
    }
    void script(std::size_t i, std::size_t j, const std::vector<std::size_t>& extra, const PatternQuad& q) {
        auto with = [&](std::size_t v) {
            auto c = extra;
            c.push_back(v);
            std::sort(c.begin(), c.end());
            return c;
        };
        dep[{i, j, extra}] = q.t1 == D;
        dep[{i, j, with(i)}] = q.t2 == D;
        dep[{j, i, extra}] = q.t3 == D;
        dep[{j, i, with(j)}] = q.t4 == D;
    }

    PairSet adjacent;
    std::map<std::tuple<std::size_t, std::size_t, std::vector<std::size_t>>, bool> dep;

private:
    std::vector<std::string> names_;
};

}  // namespace

TEST_CASE("pattern table") {
    CHECK(classify_pattern(quad(D, I, I, D)) == EdgeClass{ClassTag::Causal, Direction::IToJ});
    CHECK(classify_pattern(quad(I, D, D, I)) == EdgeClass{ClassTag::Causal, Direction::JToI});
    CHECK(classify_pattern(quad(I, D, I, D)) == EdgeClass{ClassTag::Latent, std::nullopt});
    CHECK(classify_pattern(quad(D, D, D, D)) == EdgeClass{ClassTag::Selection, std::nullopt});
    CHECK(classify_pattern(quad(D, D, I, D)) == EdgeClass{ClassTag::CausalAndLatent, Direction::IToJ});
    CHECK(classify_pattern(quad(I, D, D, D)) == EdgeClass{ClassTag::CausalAndLatent, Direction::JToI});
    CHECK(classify_pattern(quad(I, I, I, I)).tag == ClassTag::Unknown);
    CHECK(classify_pattern(quad(D, D, D, U)).tag == ClassTag::Unknown);

    // Swapping the pair mirrors the direction and never changes the class.
    const Slot vals[] = {D, I};
    for (Slot a : vals)
        for (Slot b : vals)
            for (Slot c : vals)
                for (Slot d : vals) {
                    auto q = quad(a, b, c, d);
                    auto x = classify_pattern(q), y = classify_pattern(swap_pair(q));
                    CHECK(x.tag == y.tag);
                    if (x.direction) CHECK(*x.direction != *y.direction);
                }
}

TEST_CASE("oracle quads for the five two-variable structures") {
    // (a) X -> Y
    auto a = build({"X", "Y"}, {{0, 1}}, {}, {});
    CHECK(oracle_quad(a, 0, 1, {}) == quad(D, I, I, D));
    // (b) X <- L -> Y
    auto b = build({"X", "Y"}, {}, {{0, 1}}, {});
    CHECK(oracle_quad(b, 0, 1, {}) == quad(I, D, I, D));
    // (c) X -> S <- Y
    auto c = build({"X", "Y"}, {}, {}, {{0, 1}});
    CHECK(oracle_quad(c, 0, 1, {}) == quad(D, D, D, D));
    // (d) X -> Y and X <- L -> Y
    auto d = build({"X", "Y"}, {{0, 1}}, {{0, 1}}, {});
    CHECK(oracle_quad(d, 0, 1, {}) == quad(D, D, I, D));
    // (e) X -> Y and X -> S <- Y
    auto e = build({"X", "Y"}, {{0, 1}}, {}, {{0, 1}});
    CHECK(oracle_quad(e, 0, 1, {}) == quad(D, D, D, D));

    CHECK(classify_pattern(oracle_quad(c, 0, 1, {})).tag == ClassTag::Selection);
    CHECK(classify_pattern(oracle_quad(e, 0, 1, {})).tag == ClassTag::Selection);
}

TEST_CASE("selection makes the indicator informative after conditioning on the target") {
    // With selection the perturbed unit was admitted on its pre-perturbation value as well, so
    // I_X and Y stay dependent given X even though the indicator graph d-separates them.
    auto e = build({"X", "Y"}, {{0, 1}}, {}, {{0, 1}});
    Dag with = add_indicators(e.base, {0});
    VertexId ix = *indicator_of(with, 0);
    CHECK(selection_conditioned_dseparated(with, ix, 1, {0}));
    CHECK(oracle_indicator_dependent(e, 0, 1, {0}));

    TwinGraph tw = twin_graph(e.base, 0);
    CHECK(tw.post.count(0) == 1);
    CHECK(tw.post.count(1) == 1);
    CHECK(tw.dag.has_edge(tw.indicator, tw.post.at(0)));
}

TEST_CASE("twin semantics reduce to d-separation without selection") {
    // X -> Y -> Z with latent X <- L -> Z; I_X vs Z given X and Y is blocked either way.
    auto g = build({"X", "Y", "Z"}, {{0, 1}, {1, 2}}, {{0, 2}}, {});
    Dag with = add_indicators(g.base, {0});
    VertexId ix = *indicator_of(with, 0);
    for (std::set<VertexId> cond : {std::set<VertexId>{}, {0}, {1}, {0, 1}}) {
        bool plain = !d_separated(with, ix, 2, cond);
        CHECK(oracle_indicator_dependent(g, 0, 2, cond) == plain);
    }
}

TEST_CASE("two-variable structures through the whole pipeline") {
    struct Case {
        AugmentedDag aug;
        EdgeMark at_x, at_y;
    };
    std::vector<Case> cases{
        {build({"X", "Y"}, {{0, 1}}, {}, {}), EdgeMark::Tail, EdgeMark::Arrow},
        {build({"X", "Y"}, {{1, 0}}, {}, {}), EdgeMark::Arrow, EdgeMark::Tail},
        {build({"X", "Y"}, {}, {{0, 1}}, {}), EdgeMark::Arrow, EdgeMark::Arrow},
        {build({"X", "Y"}, {}, {}, {{0, 1}}), EdgeMark::Tail, EdgeMark::Tail},
        {build({"X", "Y"}, {{0, 1}}, {{0, 1}}, {}), EdgeMark::Arrow, EdgeMark::Arrow},
    };
    for (auto& c : cases) {
        OracleBackend ob(c.aug);
        GislResult r = run_gisl(ob);
        auto e = r.graph.edge(0, 1);
        REQUIRE(e);
        CHECK(e->at_a == c.at_x);
        CHECK(e->at_b == c.at_y);
    }
    OracleBackend none(build({"X", "Y"}, {}, {}, {}));
    CHECK(run_gisl(none).graph.num_edges() == 0);
}

TEST_CASE("a mediated path keeps the latent pair mixed after correction") {
    // X <- L -> Y plus X -> Z -> Y. Z is a descendant of the collider X on I_X -> X <- L -> Y, so
    // conditioning on Z leaves the indicator path open and the pattern stays causal-and-latent.
    auto g = build({"X", "Y", "Z"}, {{0, 2}, {2, 1}}, {{0, 1}}, {});
    OracleBackend ob(g);
    CHECK(classify_pattern(oracle_quad(g, 0, 1, {})) == EdgeClass{ClassTag::CausalAndLatent, Direction::IToJ});
    auto given_z = oracle_quad(g, 0, 1, {2});
    CHECK(given_z.t1 == D);
    CHECK(given_z.t2 == D);
    CHECK(given_z.t3 == I);
    CHECK(given_z.t4 == D);

    GislResult r = run_gisl(ob);
    const AuditEntry* e = r.find(VarPair(0, 1));
    REQUIRE(e);
    CHECK(e->initial_class.tag == ClassTag::CausalAndLatent);
    bool tried_z = false;
    for (const auto& a : e->corrections) tried_z = tried_z || a.cond == std::vector<std::size_t>{2};
    CHECK(tried_z);
    CHECK(e->final_class.tag == ClassTag::CausalAndLatent);
    CHECK(r.confounded.count(VarPair(0, 1)) == 1);
}

TEST_CASE("correction moves unknown pairs to any class and mixed pairs only to causal or latent") {
    ScriptedBackend sb({"A", "B", "C"});
    sb.adjacent = {VarPair(0, 1), VarPair(1, 2)};
    // A-B: unknown at first, selection given C.
    sb.script(0, 1, {}, quad(I, I, I, I));
    sb.script(0, 1, {2}, quad(D, D, D, D));
    // B-C: selection at first; C&L given A is not accepted.
    sb.script(1, 2, {}, quad(D, D, D, D));
    sb.script(1, 2, {0}, quad(D, D, I, D));
    GislResult r = run_gisl(sb);
    CHECK(r.find(VarPair(0, 1))->final_class.tag == ClassTag::Selection);
    const AuditEntry* bc = r.find(VarPair(1, 2));
    CHECK(bc->final_class.tag == ClassTag::Selection);
    REQUIRE(bc->corrections.size() == 1);
    CHECK_FALSE(bc->corrections[0].applied);
    CHECK(r.selected == PairSet{VarPair(0, 1), VarPair(1, 2)});

    // Selection given a neighbour that yields a clean causal pattern is corrected.
    ScriptedBackend sc({"A", "B", "C"});
    sc.adjacent = {VarPair(0, 1), VarPair(1, 2)};
    sc.script(1, 2, {}, quad(D, D, D, D));
    sc.script(1, 2, {0}, quad(D, I, I, D));
    GislResult r2 = run_gisl(sc);
    CHECK(r2.find(VarPair(1, 2))->final_class == EdgeClass{ClassTag::Causal, Direction::IToJ});
    CHECK(r2.causal_edges() == std::set<DirectedEdge>{{1, 2}});
}

TEST_CASE("pairs without perturbation data are audited untested") {
    auto g = build({"X", "Y", "Z"}, {{0, 1}, {1, 2}}, {}, {}, {0, 1});
    OracleBackend ob(g);
    GislResult r = run_gisl(ob);
    const AuditEntry* e = r.find(VarPair(1, 2));
    REQUIRE(e);
    CHECK(e->status == PairStatus::Untested);
    CHECK(e->note.find("Z") != std::string::npos);
    CHECK(r.graph.edge(1, 2)->at_a == EdgeMark::Circle);
    CHECK(r.causal_edges() == std::set<DirectedEdge>{{0, 1}});
}

TEST_CASE("result JSON round trips") {
    auto g = build({"X", "Y", "Z", "W"}, {{0, 1}, {2, 3}}, {{1, 2}}, {{0, 3}});
    OracleBackend ob(g);
    GislResult r = run_gisl(ob);
    GislResult back = gisl_result_from_json(to_json(r));
    CHECK(back.names == r.names);
    CHECK(back.skeleton.edges == r.skeleton.edges);
    CHECK(back.causal_edges() == r.causal_edges());
    CHECK(back.latent == r.latent);
    CHECK(back.causal_and_latent == r.causal_and_latent);
    CHECK(back.selected == r.selected);
    CHECK(back.unknown == r.unknown);
    REQUIRE(back.audit.size() == r.audit.size());
    for (std::size_t k = 0; k < r.audit.size(); ++k) {
        CHECK(back.audit[k].initial == r.audit[k].initial);
        CHECK(back.audit[k].final_class == r.audit[k].final_class);
        CHECK(back.audit[k].corrections.size() == r.audit[k].corrections.size());
    }
    CHECK(to_json(back) == to_json(r));
    CHECK(to_dot(r).find("digraph") != std::string::npos);
}
