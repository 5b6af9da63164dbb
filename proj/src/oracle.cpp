#include "gisl/oracle.hpp"

#include <stdexcept>

namespace gisl {

TwinGraph twin_graph(const Dag& dag, VertexId target) {
    if (dag.vertex(target).kind != VertexKind::Observed) throw std::invalid_argument("twin target must be observed");
    TwinGraph t;
    t.dag = dag;
    auto desc = dag.descendants(target);
    for (VertexId v : dag.topological_order()) {
        if (!desc.count(v)) continue;
        const auto& src = dag.vertex(v);
        t.post[v] = t.dag.add_vertex(src.kind, src.label + "*");
    }
    t.indicator = t.dag.add_vertex(VertexKind::Indicator, "I_" + dag.vertex(target).label);
    for (auto [v, copy] : t.post) {
        if (v == target) {
            t.dag.add_edge(target, copy);
            t.dag.add_edge(t.indicator, copy);
            continue;
        }
        for (VertexId p : dag.parents(v)) t.dag.add_edge(desc.count(p) ? t.post.at(p) : p, copy);
        if (dag.vertex(v).kind == VertexKind::Observed) {
            VertexId u = t.dag.add_vertex(VertexKind::Latent, "U_" + dag.vertex(v).label);
            t.dag.add_edge(u, v);
            t.dag.add_edge(u, copy);
        }
    }
    return t;
}

bool oracle_indicator_dependent(const AugmentedDag& aug, VertexId k, VertexId j, const std::set<VertexId>& cond) {
    const Dag& g = aug.base;
    Dag plain = add_indicators(g, {k});
    VertexId ik = *indicator_of(plain, k);
    bool dep = !selection_conditioned_dseparated(plain, ik, j, cond);
    if (dep || !cond.count(k)) return dep;

    TwinGraph t = twin_graph(g, k);
    auto observed_copy = [&](VertexId v) { return t.post.count(v) ? t.post.at(v) : v; };
    std::set<VertexId> tc;
    for (VertexId c : cond) tc.insert(observed_copy(c));
    return !selection_conditioned_dseparated(t.dag, t.indicator, observed_copy(j), tc);
}

PatternQuad oracle_quad(const AugmentedDag& aug, VertexId i, VertexId j, const std::set<VertexId>& extra) {
    if (!aug.intervention_targets.count(i) || !aug.intervention_targets.count(j))
        throw std::invalid_argument("both endpoints must be intervention targets");
    auto slot = [&](VertexId k, VertexId v, std::set<VertexId> c) {
        return oracle_indicator_dependent(aug, k, v, c) ? Slot::Dep : Slot::Indep;
    };
    auto with = [&](VertexId v) {
        auto c = extra;
        c.insert(v);
        return c;
    };
    PatternQuad q;
    q.cond_used.assign(extra.begin(), extra.end());
    q.t1 = slot(i, j, extra);
    q.t2 = slot(i, j, with(i));
    q.t3 = slot(j, i, extra);
    q.t4 = slot(j, i, with(j));
    return q;
}

OracleBackend::OracleBackend(AugmentedDag aug) : aug_(std::move(aug)) {
    aug_.validate();
    observed_ = aug_.observed();
    for (VertexId v : observed_) names_.push_back(aug_.base.vertex(v).label);
}

bool OracleBackend::has_perturbation(std::size_t k) const {
    return k < observed_.size() && aug_.intervention_targets.count(observed_[k]) > 0;
}

std::set<VertexId> OracleBackend::to_vertices(const std::vector<std::size_t>& cond) const {
    std::set<VertexId> out;
    for (auto c : cond) out.insert(observed_.at(c));
    return out;
}

namespace {

CiVerdict exact(bool dependent) {
    CiVerdict v;
    v.dependent = dependent;
    v.p_value = dependent ? 0.0 : 1.0;
    v.statistic = dependent ? 1.0 : 0.0;
    return v;
}

}  // namespace

CiVerdict OracleBackend::observational(std::size_t i, std::size_t j, const std::vector<std::size_t>& cond) {
    return exact(!selection_conditioned_dseparated(aug_, observed_.at(i), observed_.at(j), to_vertices(cond)));
}

CiVerdict OracleBackend::indicator(std::size_t k, std::size_t j, const std::vector<std::size_t>& cond) {
    if (!has_perturbation(k)) throw CiError("no perturbation for " + names_.at(k));
    return exact(oracle_indicator_dependent(aug_, observed_.at(k), observed_.at(j), to_vertices(cond)));
}

}  // namespace gisl
