#include "gisl/graph.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <stdexcept>

#include "gisl/rng.hpp"

namespace gisl {

std::string to_string(VertexKind kind) {
    switch (kind) {
        case VertexKind::Observed: return "observed";
        case VertexKind::Latent: return "latent";
        case VertexKind::Selection: return "selection";
        case VertexKind::Indicator: return "indicator";
    }
    return "observed";
}

VertexKind vertex_kind_from_string(const std::string& s) {
    if (s == "observed") return VertexKind::Observed;
    if (s == "latent") return VertexKind::Latent;
    if (s == "selection") return VertexKind::Selection;
    if (s == "indicator") return VertexKind::Indicator;
    throw std::invalid_argument("unknown vertex kind: " + s);
}

std::string to_string(EdgeMark mark) {
    switch (mark) {
        case EdgeMark::Tail: return "tail";
        case EdgeMark::Arrow: return "arrow";
        case EdgeMark::Circle: return "circle";
    }
    return "circle";
}

EdgeMark edge_mark_from_string(const std::string& s) {
    if (s == "tail") return EdgeMark::Tail;
    if (s == "arrow") return EdgeMark::Arrow;
    if (s == "circle") return EdgeMark::Circle;
    throw std::invalid_argument("unknown edge mark: " + s);
}

// ---- Dag ----

void Dag::check(VertexId v) const {
    if (v >= vertices_.size()) throw std::invalid_argument("unknown vertex id " + std::to_string(v));
}

VertexId Dag::add_vertex(VertexKind kind, std::string label) {
    VertexId id = vertices_.size();
    vertices_.push_back({id, kind, std::move(label)});
    parents_.emplace_back();
    children_.emplace_back();
    return id;
}

void Dag::add_edge(VertexId tail, VertexId head) {
    check(tail);
    check(head);
    if (tail == head) throw std::invalid_argument("self loop on " + vertices_[tail].label);
    if (has_edge(tail, head)) throw std::invalid_argument("duplicate edge");
    if (reaches(head, tail))
        throw std::invalid_argument("edge " + vertices_[tail].label + "->" + vertices_[head].label +
                                    " creates a cycle");
    auto& ch = children_[tail];
    ch.insert(std::upper_bound(ch.begin(), ch.end(), head), head);
    auto& pa = parents_[head];
    pa.insert(std::upper_bound(pa.begin(), pa.end(), tail), tail);
}

void Dag::remove_edge(VertexId tail, VertexId head) {
    check(tail);
    check(head);
    auto& ch = children_[tail];
    ch.erase(std::remove(ch.begin(), ch.end(), head), ch.end());
    auto& pa = parents_[head];
    pa.erase(std::remove(pa.begin(), pa.end(), tail), pa.end());
}

const Vertex& Dag::vertex(VertexId v) const {
    check(v);
    return vertices_[v];
}

const std::vector<VertexId>& Dag::parents(VertexId v) const {
    check(v);
    return parents_[v];
}

const std::vector<VertexId>& Dag::children(VertexId v) const {
    check(v);
    return children_[v];
}

bool Dag::has_edge(VertexId tail, VertexId head) const {
    check(tail);
    check(head);
    return std::binary_search(children_[tail].begin(), children_[tail].end(), head);
}

bool Dag::adjacent(VertexId u, VertexId v) const { return has_edge(u, v) || has_edge(v, u); }

std::size_t Dag::num_edges() const {
    std::size_t n = 0;
    for (const auto& c : children_) n += c.size();
    return n;
}

std::vector<DirectedEdge> Dag::edges() const {
    std::vector<DirectedEdge> out;
    for (VertexId t = 0; t < children_.size(); ++t)
        for (VertexId h : children_[t]) out.emplace_back(t, h);
    return out;
}

std::vector<VertexId> Dag::of_kind(VertexKind kind) const {
    std::vector<VertexId> out;
    for (const auto& v : vertices_)
        if (v.kind == kind) out.push_back(v.id);
    return out;
}

std::optional<VertexId> Dag::find(const std::string& label) const {
    for (const auto& v : vertices_)
        if (v.label == label) return v.id;
    return std::nullopt;
}

std::vector<VertexId> Dag::topological_order() const {
    std::vector<std::size_t> indeg(vertices_.size());
    for (VertexId v = 0; v < vertices_.size(); ++v) indeg[v] = parents_[v].size();
    std::deque<VertexId> ready;
    for (VertexId v = 0; v < vertices_.size(); ++v)
        if (indeg[v] == 0) ready.push_back(v);
    std::vector<VertexId> order;
    while (!ready.empty()) {
        VertexId v = ready.front();
        ready.pop_front();
        order.push_back(v);
        for (VertexId c : children_[v])
            if (--indeg[c] == 0) ready.push_back(c);
    }
    if (order.size() != vertices_.size()) throw std::logic_error("graph has a directed cycle");
    return order;
}

std::set<VertexId> Dag::ancestors(const std::set<VertexId>& vs) const {
    std::set<VertexId> seen;
    std::vector<VertexId> stack(vs.begin(), vs.end());
    while (!stack.empty()) {
        VertexId v = stack.back();
        stack.pop_back();
        check(v);
        if (!seen.insert(v).second) continue;
        for (VertexId p : parents_[v]) stack.push_back(p);
    }
    return seen;
}

std::set<VertexId> Dag::descendants(VertexId v) const {
    check(v);
    std::set<VertexId> seen;
    std::vector<VertexId> stack{v};
    while (!stack.empty()) {
        VertexId u = stack.back();
        stack.pop_back();
        if (!seen.insert(u).second) continue;
        for (VertexId c : children_[u]) stack.push_back(c);
    }
    return seen;
}

bool Dag::reaches(VertexId from, VertexId to) const {
    if (from == to) return true;
    std::vector<char> seen(vertices_.size(), 0);
    std::vector<VertexId> stack{from};
    while (!stack.empty()) {
        VertexId u = stack.back();
        stack.pop_back();
        if (u == to) return true;
        if (seen[u]) continue;
        seen[u] = 1;
        for (VertexId c : children_[u]) stack.push_back(c);
    }
    return false;
}

void Dag::validate() const {
    topological_order();
    for (const auto& v : vertices_) {
        if (v.kind == VertexKind::Selection && !children_[v.id].empty())
            throw std::logic_error("selection vertex " + v.label + " has children");
        if (v.kind == VertexKind::Indicator &&
            (!parents_[v.id].empty() || children_[v.id].size() != 1))
            throw std::logic_error("indicator vertex " + v.label + " must be a source with one child");
    }
}

bool Dag::operator==(const Dag& other) const {
    if (vertices_.size() != other.vertices_.size()) return false;
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        if (vertices_[i].kind != other.vertices_[i].kind ||
            vertices_[i].label != other.vertices_[i].label)
            return false;
    }
    return children_ == other.children_;
}

void AugmentedDag::validate() const {
    base.validate();
    auto has_common = [&](VarPair p, VertexKind kind, bool as_parent) {
        for (VertexId v : base.of_kind(kind)) {
            bool ok = as_parent ? (base.has_edge(v, p.a) && base.has_edge(v, p.b))
                                : (base.has_edge(p.a, v) && base.has_edge(p.b, v));
            if (ok) return true;
        }
        return false;
    };
    for (auto p : confounded_pairs)
        if (!has_common(p, VertexKind::Latent, true))
            throw std::logic_error("confounded pair without a shared latent parent");
    for (auto p : selection_pairs)
        if (!has_common(p, VertexKind::Selection, false))
            throw std::logic_error("selection pair without a shared selection child");
    for (auto t : intervention_targets)
        if (base.vertex(t).kind != VertexKind::Observed)
            throw std::logic_error("intervention target is not observed");
}

// ---- MixedGraph ----

void MixedGraph::set_edge(VertexId a, VertexId b, EdgeMark at_a, EdgeMark at_b) {
    if (a == b) throw std::invalid_argument("mixed graph self loop");
    VarPair key(a, b);
    if (key.a == a)
        edges_[key] = {a, b, at_a, at_b};
    else
        edges_[key] = {b, a, at_b, at_a};
}

void MixedGraph::remove_edge(VertexId a, VertexId b) { edges_.erase(VarPair(a, b)); }

std::optional<MixedEdge> MixedGraph::edge(VertexId a, VertexId b) const {
    auto it = edges_.find(VarPair(a, b));
    if (it == edges_.end()) return std::nullopt;
    MixedEdge e = it->second;
    if (e.a != a) return MixedEdge{a, b, e.at_b, e.at_a};
    return e;
}

std::vector<MixedEdge> MixedGraph::edges() const {
    std::vector<MixedEdge> out;
    for (const auto& [k, e] : edges_) out.push_back(e);
    return out;
}

std::set<DirectedEdge> MixedGraph::directed_edges() const {
    std::set<DirectedEdge> out;
    for (const auto& [k, e] : edges_) {
        if (e.at_a == EdgeMark::Tail && e.at_b == EdgeMark::Arrow) out.emplace(e.a, e.b);
        if (e.at_a == EdgeMark::Arrow && e.at_b == EdgeMark::Tail) out.emplace(e.b, e.a);
    }
    return out;
}

// ---- constructors ----

Dag generate_er_dag(std::size_t num_vars, std::size_t num_edges, std::uint64_t seed) {
    if (num_vars < 2) throw std::invalid_argument("num_vars must be at least 2");
    std::size_t max_edges = num_vars * (num_vars - 1) / 2;
    if (num_edges > max_edges)
        throw std::invalid_argument("num_edges " + std::to_string(num_edges) + " exceeds maximum " +
                                    std::to_string(max_edges));
    Rng rng(derive_seed(seed, {0x45}));
    std::vector<VertexId> perm(num_vars);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);

    // Pairs of permutation positions (p < q), choose num_edges of them.
    std::vector<std::pair<std::size_t, std::size_t>> slots;
    for (std::size_t p = 0; p < num_vars; ++p)
        for (std::size_t q = p + 1; q < num_vars; ++q) slots.emplace_back(p, q);
    std::shuffle(slots.begin(), slots.end(), rng);
    slots.resize(num_edges);
    std::sort(slots.begin(), slots.end());

    Dag dag;
    for (std::size_t i = 0; i < num_vars; ++i) dag.add_vertex(VertexKind::Observed, "X" + std::to_string(i));
    for (auto [p, q] : slots) dag.add_edge(perm[p], perm[q]);
    return dag;
}

AugmentedDag augment_structure(const Dag& dag, std::size_t n_conf, std::size_t n_sel, std::uint64_t seed) {
    auto obs = dag.of_kind(VertexKind::Observed);
    std::vector<VarPair> pairs;
    for (std::size_t i = 0; i < obs.size(); ++i)
        for (std::size_t j = i + 1; j < obs.size(); ++j) pairs.emplace_back(obs[i], obs[j]);
    if (n_conf + n_sel > pairs.size())
        throw std::invalid_argument("cannot place " + std::to_string(n_conf + n_sel) + " pairs among " +
                                    std::to_string(pairs.size()) + " observed pairs");
    Rng rng(derive_seed(seed, {0xa7}));
    std::shuffle(pairs.begin(), pairs.end(), rng);

    AugmentedDag aug;
    aug.base = dag;
    for (std::size_t k = 0; k < n_conf; ++k) {
        VarPair p = pairs[k];
        VertexId l = aug.base.add_vertex(VertexKind::Latent, "L" + std::to_string(k));
        aug.base.add_edge(l, p.a);
        aug.base.add_edge(l, p.b);
        aug.confounded_pairs.insert(p);
    }
    for (std::size_t k = 0; k < n_sel; ++k) {
        VarPair p = pairs[n_conf + k];
        VertexId s = aug.base.add_vertex(VertexKind::Selection, "S" + std::to_string(k));
        aug.base.add_edge(p.a, s);
        aug.base.add_edge(p.b, s);
        aug.selection_pairs.insert(p);
    }
    aug.intervention_targets.insert(obs.begin(), obs.end());
    return aug;
}

Dag mutilate(const Dag& dag, VertexId target) {
    if (dag.vertex(target).kind != VertexKind::Observed)
        throw std::invalid_argument("mutilation target must be observed");
    Dag out = dag;
    for (VertexId p : std::vector<VertexId>(dag.parents(target))) out.remove_edge(p, target);
    return out;
}

Dag add_indicators(const Dag& dag, const std::set<VertexId>& targets) {
    Dag out = dag;
    for (VertexId t : targets) {
        if (dag.vertex(t).kind != VertexKind::Observed)
            throw std::invalid_argument("indicator target must be observed");
        VertexId i = out.add_vertex(VertexKind::Indicator, "I_" + dag.vertex(t).label);
        out.add_edge(i, t);
    }
    return out;
}

std::optional<VertexId> indicator_of(const Dag& dag, VertexId target) {
    for (VertexId p : dag.parents(target))
        if (dag.vertex(p).kind == VertexKind::Indicator) return p;
    return std::nullopt;
}

// ---- d-separation ----

std::set<VertexId> d_connected_set(const Dag& dag, VertexId a, const std::set<VertexId>& cond) {
    for (VertexId c : cond) (void)dag.vertex(c);
    (void)dag.vertex(a);
    auto anc = dag.ancestors(cond);
    std::size_t n = dag.num_vertices();
    // Visit states: 0 = arrived from a child (moving up), 1 = arrived from a parent (moving down).
    std::vector<char> visited(2 * n, 0);
    std::set<VertexId> reach;
    std::vector<std::pair<VertexId, int>> stack{{a, 0}};
    while (!stack.empty()) {
        auto [v, dir] = stack.back();
        stack.pop_back();
        if (visited[2 * v + dir]) continue;
        visited[2 * v + dir] = 1;
        bool in_cond = cond.count(v) > 0;
        if (!in_cond && v != a) reach.insert(v);
        if (dir == 0) {
            if (in_cond) continue;
            for (VertexId p : dag.parents(v)) stack.emplace_back(p, 0);
            for (VertexId c : dag.children(v)) stack.emplace_back(c, 1);
        } else {
            if (!in_cond)
                for (VertexId c : dag.children(v)) stack.emplace_back(c, 1);
            if (anc.count(v))
                for (VertexId p : dag.parents(v)) stack.emplace_back(p, 0);
        }
    }
    return reach;
}

bool d_separated(const Dag& dag, VertexId a, VertexId b, const std::set<VertexId>& cond) {
    (void)dag.vertex(a);
    (void)dag.vertex(b);
    if (a == b) throw std::invalid_argument("d-separation query needs distinct endpoints");
    if (cond.count(a) || cond.count(b))
        throw std::invalid_argument("d-separation endpoints must not be conditioned on");
    return d_connected_set(dag, a, cond).count(b) == 0;
}

bool is_inducing_path(const Dag& dag, const std::vector<VertexId>& path,
                      const std::set<VertexId>& latents, const std::set<VertexId>& selections) {
    if (path.size() < 2) throw std::invalid_argument("path needs at least two vertices");
    std::set<VertexId> distinct(path.begin(), path.end());
    if (distinct.size() != path.size()) throw std::invalid_argument("path repeats a vertex");
    for (std::size_t k = 0; k + 1 < path.size(); ++k)
        if (!dag.adjacent(path[k], path[k + 1])) throw std::invalid_argument("consecutive path vertices not adjacent");
    VertexId x = path.front(), y = path.back();
    for (VertexId e : {x, y})
        if (latents.count(e) || selections.count(e))
            throw std::invalid_argument("path endpoint is latent or selection");

    std::set<VertexId> targets = selections;
    targets.insert(x);
    targets.insert(y);
    for (std::size_t k = 1; k + 1 < path.size(); ++k) {
        VertexId v = path[k];
        bool collider = dag.has_edge(path[k - 1], v) && dag.has_edge(path[k + 1], v);
        if (!collider && !latents.count(v)) return false;
        if (collider) {
            bool ok = false;
            for (VertexId t : targets)
                if (dag.reaches(v, t)) ok = true;
            if (!ok) return false;
        }
    }
    return true;
}

bool selection_conditioned_dseparated(const Dag& dag, VertexId a, VertexId b,
                                      const std::set<VertexId>& cond) {
    std::set<VertexId> full = cond;
    for (VertexId s : dag.of_kind(VertexKind::Selection)) full.insert(s);
    return d_separated(dag, a, b, full);
}

bool selection_conditioned_dseparated(const AugmentedDag& aug, VertexId a, VertexId b,
                                      const std::set<VertexId>& cond) {
    return selection_conditioned_dseparated(aug.base, a, b, cond);
}

}  // namespace gisl
