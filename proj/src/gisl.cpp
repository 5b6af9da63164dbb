#include "gisl/gisl.hpp"

#include <algorithm>
#include <sstream>

#include "gisl/graph_io.hpp"
#include "gisl/parallel.hpp"

namespace gisl {

using nlohmann::json;

std::string to_string(ClassTag t) {
    switch (t) {
        case ClassTag::Causal: return "causal";
        case ClassTag::Latent: return "latent";
        case ClassTag::Selection: return "selection";
        case ClassTag::CausalAndLatent: return "causal_and_latent";
        case ClassTag::Unknown: return "unknown";
    }
    return "unknown";
}

namespace {

ClassTag class_tag_from_string(const std::string& s) {
    for (auto t : {ClassTag::Causal, ClassTag::Latent, ClassTag::Selection, ClassTag::CausalAndLatent, ClassTag::Unknown})
        if (to_string(t) == s) return t;
    throw std::invalid_argument("unknown class " + s);
}

Slot slot_from_string(const std::string& s) {
    for (auto t : {Slot::Dep, Slot::Indep, Slot::Unusable})
        if (to_string(t) == s) return t;
    throw std::invalid_argument("unknown slot " + s);
}

}  // namespace

std::string EdgeClass::str() const {
    std::string s = to_string(tag);
    if (direction) s += *direction == Direction::IToJ ? "(i->j)" : "(j->i)";
    return s;
}

EdgeClass classify_pattern(const PatternQuad& q) {
    using S = Slot;
    const S D = S::Dep, I = S::Indep;
    auto is = [&](S a, S b, S c, S d) { return q.t1 == a && q.t2 == b && q.t3 == c && q.t4 == d; };
    if (is(D, I, I, D)) return {ClassTag::Causal, Direction::IToJ};
    if (is(I, D, D, I)) return {ClassTag::Causal, Direction::JToI};
    if (is(I, D, I, D)) return {ClassTag::Latent, std::nullopt};
    if (is(D, D, D, D)) return {ClassTag::Selection, std::nullopt};
    if (is(D, D, I, D)) return {ClassTag::CausalAndLatent, Direction::IToJ};
    if (is(I, D, D, D)) return {ClassTag::CausalAndLatent, Direction::JToI};
    return {ClassTag::Unknown, std::nullopt};
}

PatternQuad swap_pair(const PatternQuad& q) {
    PatternQuad s = q;
    s.t1 = q.t3;
    s.t2 = q.t4;
    s.t3 = q.t1;
    s.t4 = q.t2;
    return s;
}

const AuditEntry* GislResult::find(VarPair p) const {
    for (const auto& e : audit)
        if (e.pair == p) return &e;
    return nullptr;
}

namespace {

bool correction_applies(ClassTag current, ClassTag found) {
    switch (current) {
        case ClassTag::CausalAndLatent:
        case ClassTag::Selection: return found == ClassTag::Causal || found == ClassTag::Latent;
        case ClassTag::Unknown: return found != ClassTag::Unknown;
        default: return false;
    }
}

bool needs_correction(const AuditEntry& e) {
    if (e.status != PairStatus::Tested) return false;
    auto t = e.final_class.tag;
    return t == ClassTag::CausalAndLatent || t == ClassTag::Selection || t == ClassTag::Unknown;
}

}  // namespace

void correct_patterns(std::vector<AuditEntry>& audit, const Skeleton& skeleton, CiBackend& backend,
                      const GislConfig& config) {
    for (;;) {
        std::vector<std::size_t> todo;
        for (std::size_t k = 0; k < audit.size(); ++k)
            if (needs_correction(audit[k])) todo.push_back(k);

        std::vector<std::vector<CorrectionAttempt>> tried(todo.size());
        std::vector<std::optional<EdgeClass>> moved(todo.size());
        parallel_for(todo.size(), config.workers, [&](std::size_t w) {
            const AuditEntry& e = audit[todo[w]];
            std::size_t i = e.pair.a, j = e.pair.b;
            std::vector<std::size_t> pool;
            for (auto v : skeleton.neighbors(i))
                if (v != j) pool.push_back(v);
            for (auto v : skeleton.neighbors(j))
                if (v != i) pool.push_back(v);
            std::sort(pool.begin(), pool.end());
            pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
            std::size_t depth = std::min(config.correction_depth, pool.size());
            for (std::size_t k = 1; k <= depth && !moved[w]; ++k) {
                for_each_subset(pool, k, [&](const std::vector<std::size_t>& sub) {
                    CorrectionAttempt a;
                    a.cond = sub;
                    a.quad = test_quad(backend, i, j, sub);
                    a.cls = classify_pattern(a.quad);
                    a.applied = correction_applies(e.final_class.tag, a.cls.tag);
                    tried[w].push_back(a);
                    if (a.applied) moved[w] = a.cls;
                    return a.applied;
                });
            }
        });

        bool changed = false;
        for (std::size_t w = 0; w < todo.size(); ++w) {
            AuditEntry& e = audit[todo[w]];
            for (auto& a : tried[w]) {
                bool seen = std::any_of(e.corrections.begin(), e.corrections.end(), [&](const CorrectionAttempt& c) {
                    return c.cond == a.cond && c.applied == a.applied;
                });
                if (!seen) e.corrections.push_back(a);
            }
            if (moved[w]) {
                e.final_class = *moved[w];
                changed = true;
            }
        }
        if (!changed) return;
    }
}

GislResult run_gisl(CiBackend& backend, const GislConfig& config) {
    GislResult r;
    r.names = backend.names();
    SkeletonConfig sc;
    sc.max_cond = config.max_cond;
    sc.workers = config.workers;
    r.skeleton = recover_skeleton(backend, sc);

    std::vector<VarPair> pairs(r.skeleton.edges.begin(), r.skeleton.edges.end());
    r.audit.resize(pairs.size());
    parallel_for(pairs.size(), config.workers, [&](std::size_t k) {
        AuditEntry& e = r.audit[k];
        e.pair = pairs[k];
        if (!backend.has_perturbation(e.pair.a) || !backend.has_perturbation(e.pair.b)) {
            e.status = PairStatus::Untested;
            e.note = "missing perturbation data for " +
                     r.names[backend.has_perturbation(e.pair.a) ? e.pair.b : e.pair.a];
            return;
        }
        e.initial = test_quad(backend, e.pair.a, e.pair.b, {});
        e.initial_class = classify_pattern(e.initial);
        e.final_class = e.initial_class;
        for (auto s : {e.initial.t1, e.initial.t2, e.initial.t3, e.initial.t4})
            if (s == Slot::Unusable) e.note = "a test could not be run; pattern treated as unknown";
    });

    correct_patterns(r.audit, r.skeleton, backend, config);

    std::vector<VertexId> verts(r.names.size());
    for (std::size_t v = 0; v < verts.size(); ++v) verts[v] = v;
    r.graph = MixedGraph(verts);
    for (const auto& e : r.audit) {
        auto [a, b] = std::pair{e.pair.a, e.pair.b};
        if (e.status == PairStatus::Untested) {
            r.graph.set_edge(a, b, EdgeMark::Circle, EdgeMark::Circle);
            continue;
        }
        const auto& c = e.final_class;
        switch (c.tag) {
            case ClassTag::Causal:
                if (c.direction == Direction::IToJ)
                    r.graph.set_edge(a, b, EdgeMark::Tail, EdgeMark::Arrow);
                else
                    r.graph.set_edge(a, b, EdgeMark::Arrow, EdgeMark::Tail);
                break;
            case ClassTag::Latent:
                r.graph.set_edge(a, b, EdgeMark::Arrow, EdgeMark::Arrow);
                r.latent.insert(e.pair);
                break;
            case ClassTag::CausalAndLatent:
                r.graph.set_edge(a, b, EdgeMark::Arrow, EdgeMark::Arrow);
                r.causal_and_latent.insert(e.pair);
                break;
            case ClassTag::Selection:
                r.graph.set_edge(a, b, EdgeMark::Tail, EdgeMark::Tail);
                r.selected.insert(e.pair);
                break;
            case ClassTag::Unknown:
                r.graph.set_edge(a, b, EdgeMark::Circle, EdgeMark::Circle);
                r.unknown.insert(e.pair);
                break;
        }
    }
    r.confounded = r.latent;
    r.confounded.insert(r.causal_and_latent.begin(), r.causal_and_latent.end());
    return r;
}

GislResult run_gisl(const DataMatrix& d0, const std::map<std::string, DataMatrix>& perturbed, const KernelCiConfig& ci,
                    const GislConfig& config) {
    KernelBackend backend(d0, perturbed, ci);
    return run_gisl(backend, config);
}

// ---- serialization ----

namespace {

json names_of(const std::vector<std::string>& names, const std::vector<std::size_t>& idx) {
    json arr = json::array();
    for (auto i : idx) arr.push_back(names.at(i));
    return arr;
}

json pairs_of(const std::vector<std::string>& names, const PairSet& ps) {
    json arr = json::array();
    for (auto p : ps) arr.push_back({names.at(p.a), names.at(p.b)});
    return arr;
}

json quad_json(const std::vector<std::string>& names, const PatternQuad& q) {
    return {{"t1", to_string(q.t1)},
            {"t2", to_string(q.t2)},
            {"t3", to_string(q.t3)},
            {"t4", to_string(q.t4)},
            {"cond", names_of(names, q.cond_used)}};
}

json class_json(const std::vector<std::string>& names, VarPair p, const EdgeClass& c) {
    json j{{"class", to_string(c.tag)}};
    if (c.direction) {
        bool fwd = *c.direction == Direction::IToJ;
        j["from"] = names.at(fwd ? p.a : p.b);
        j["to"] = names.at(fwd ? p.b : p.a);
    }
    return j;
}

std::size_t index_of(const std::vector<std::string>& names, const std::string& s) {
    auto it = std::find(names.begin(), names.end(), s);
    if (it == names.end()) throw std::invalid_argument("unknown variable " + s);
    return static_cast<std::size_t>(it - names.begin());
}

PairSet pairs_from(const std::vector<std::string>& names, const json& arr) {
    PairSet ps;
    for (const auto& p : arr) ps.insert(VarPair(index_of(names, p.at(0)), index_of(names, p.at(1))));
    return ps;
}

PatternQuad quad_from(const std::vector<std::string>& names, const json& j) {
    PatternQuad q;
    q.t1 = slot_from_string(j.at("t1"));
    q.t2 = slot_from_string(j.at("t2"));
    q.t3 = slot_from_string(j.at("t3"));
    q.t4 = slot_from_string(j.at("t4"));
    for (const auto& c : j.at("cond")) q.cond_used.push_back(index_of(names, c));
    return q;
}

EdgeClass class_from(const std::vector<std::string>& names, VarPair p, const json& j) {
    EdgeClass c;
    c.tag = class_tag_from_string(j.at("class"));
    if (j.contains("from")) c.direction = index_of(names, j.at("from")) == p.a ? Direction::IToJ : Direction::JToI;
    return c;
}

}  // namespace

json to_json(const GislResult& r) {
    json j;
    j["format"] = "gisl-result";
    j["version"] = 1;
    j["variables"] = r.names;
    j["skeleton"] = to_json(r.skeleton);
    j["graph"] = to_json(r.graph, r.names);
    j["latent_pairs"] = pairs_of(r.names, r.latent);
    j["causal_and_latent_pairs"] = json::array();
    for (auto p : r.causal_and_latent) {
        const AuditEntry* e = r.find(p);
        json item = class_json(r.names, p, e ? e->final_class : EdgeClass{});
        item["pair"] = {r.names[p.a], r.names[p.b]};
        j["causal_and_latent_pairs"].push_back(item);
    }
    j["confounded_pairs"] = pairs_of(r.names, r.confounded);
    j["selection_pairs"] = pairs_of(r.names, r.selected);
    j["unknown_pairs"] = pairs_of(r.names, r.unknown);
    j["causal_edges"] = json::array();
    for (auto [a, b] : r.causal_edges()) j["causal_edges"].push_back({r.names[a], r.names[b]});
    j["audit"] = json::array();
    for (const auto& e : r.audit) {
        json a{{"pair", {r.names[e.pair.a], r.names[e.pair.b]}},
               {"status", e.status == PairStatus::Tested ? "tested" : "untested"}};
        if (!e.note.empty()) a["note"] = e.note;
        if (e.status == PairStatus::Tested) {
            a["initial_quad"] = quad_json(r.names, e.initial);
            a["initial_class"] = class_json(r.names, e.pair, e.initial_class);
            a["corrections"] = json::array();
            for (const auto& c : e.corrections) {
                a["corrections"].push_back({{"quad", quad_json(r.names, c.quad)},
                                            {"class", class_json(r.names, e.pair, c.cls)},
                                            {"applied", c.applied}});
            }
            a["final_class"] = class_json(r.names, e.pair, e.final_class);
        }
        j["audit"].push_back(a);
    }
    return j;
}

GislResult gisl_result_from_json(const json& j) {
    if (j.value("format", "") != "gisl-result") throw std::invalid_argument("expected a gisl-result document");
    GislResult r;
    r.names = j.at("variables").get<std::vector<std::string>>();
    r.skeleton.names = r.names;
    for (const auto& e : j.at("skeleton").at("edges"))
        r.skeleton.edges.insert(VarPair(index_of(r.names, e.at(0)), index_of(r.names, e.at(1))));
    for (const auto& s : j.at("skeleton").at("sepsets")) {
        VarPair p(index_of(r.names, s.at("pair").at(0)), index_of(r.names, s.at("pair").at(1)));
        std::vector<std::size_t> set;
        for (const auto& c : s.at("set")) set.push_back(index_of(r.names, c));
        r.skeleton.sepsets[p] = set;
    }
    r.graph = mixed_from_json(j.at("graph"), r.names);
    r.latent = pairs_from(r.names, j.at("latent_pairs"));
    for (const auto& item : j.at("causal_and_latent_pairs"))
        r.causal_and_latent.insert(VarPair(index_of(r.names, item.at("pair").at(0)), index_of(r.names, item.at("pair").at(1))));
    r.confounded = pairs_from(r.names, j.at("confounded_pairs"));
    r.selected = pairs_from(r.names, j.at("selection_pairs"));
    r.unknown = pairs_from(r.names, j.at("unknown_pairs"));
    for (const auto& a : j.at("audit")) {
        AuditEntry e;
        e.pair = VarPair(index_of(r.names, a.at("pair").at(0)), index_of(r.names, a.at("pair").at(1)));
        e.status = a.at("status") == "tested" ? PairStatus::Tested : PairStatus::Untested;
        e.note = a.value("note", "");
        if (e.status == PairStatus::Tested) {
            e.initial = quad_from(r.names, a.at("initial_quad"));
            e.initial_class = class_from(r.names, e.pair, a.at("initial_class"));
            for (const auto& c : a.at("corrections")) {
                CorrectionAttempt ca;
                ca.quad = quad_from(r.names, c.at("quad"));
                ca.cond = ca.quad.cond_used;
                ca.cls = class_from(r.names, e.pair, c.at("class"));
                ca.applied = c.at("applied");
                e.corrections.push_back(ca);
            }
            e.final_class = class_from(r.names, e.pair, a.at("final_class"));
        }
        r.audit.push_back(e);
    }
    return r;
}

std::string to_dot(const GislResult& r) { return to_dot(r.graph, r.names); }

}  // namespace gisl
