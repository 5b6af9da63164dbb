#include "gisl/graph_io.hpp"

#include <sstream>
#include <stdexcept>

namespace gisl {

namespace {

Json pairs_to_json(const PairSet& ps) {
    Json arr = Json::array();
    for (auto p : ps) arr.push_back({p.a, p.b});
    return arr;
}

PairSet pairs_from_json(const Json& j) {
    PairSet out;
    for (const auto& e : j) out.insert(VarPair(e.at(0).get<VertexId>(), e.at(1).get<VertexId>()));
    return out;
}

void expect_format(const Json& j, const char* format) {
    if (!j.contains("format") || j.at("format") != format)
        throw std::invalid_argument(std::string("expected a ") + format + " document");
}

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

}  // namespace

Json to_json(const Dag& dag) {
    Json j;
    j["format"] = "gisl-dag";
    j["version"] = 1;
    j["vertices"] = Json::array();
    for (const auto& v : dag.vertices())
        j["vertices"].push_back({{"id", v.id}, {"kind", to_string(v.kind)}, {"label", v.label}});
    j["edges"] = Json::array();
    for (auto [t, h] : dag.edges()) j["edges"].push_back({t, h});
    return j;
}

Dag dag_from_json(const Json& j) {
    expect_format(j, "gisl-dag");
    Dag dag;
    for (const auto& v : j.at("vertices")) {
        VertexId id = dag.add_vertex(vertex_kind_from_string(v.at("kind")), v.at("label"));
        if (id != v.at("id").get<VertexId>()) throw std::invalid_argument("vertex ids must be dense and ordered");
    }
    for (const auto& e : j.at("edges")) dag.add_edge(e.at(0).get<VertexId>(), e.at(1).get<VertexId>());
    return dag;
}

Json to_json(const AugmentedDag& aug) {
    Json j;
    j["format"] = "gisl-augmented-dag";
    j["version"] = 1;
    j["graph"] = to_json(aug.base);
    j["confounded_pairs"] = pairs_to_json(aug.confounded_pairs);
    j["selection_pairs"] = pairs_to_json(aug.selection_pairs);
    j["intervention_targets"] = aug.intervention_targets;
    return j;
}

AugmentedDag augmented_from_json(const Json& j) {
    expect_format(j, "gisl-augmented-dag");
    AugmentedDag aug;
    aug.base = dag_from_json(j.at("graph"));
    aug.confounded_pairs = pairs_from_json(j.at("confounded_pairs"));
    aug.selection_pairs = pairs_from_json(j.at("selection_pairs"));
    for (const auto& t : j.at("intervention_targets")) aug.intervention_targets.insert(t.get<VertexId>());
    aug.validate();
    return aug;
}

Json to_json(const MixedGraph& g, const std::vector<std::string>& names) {
    Json j;
    j["format"] = "gisl-mixed-graph";
    j["version"] = 1;
    j["vertices"] = Json::array();
    for (VertexId v : g.vertices()) j["vertices"].push_back({{"id", v}, {"label", names.at(v)}});
    j["edges"] = Json::array();
    for (const auto& e : g.edges())
        j["edges"].push_back({{"a", e.a}, {"b", e.b}, {"mark_a", to_string(e.at_a)}, {"mark_b", to_string(e.at_b)}});
    return j;
}

MixedGraph mixed_from_json(const Json& j, const std::vector<std::string>& names) {
    expect_format(j, "gisl-mixed-graph");
    std::vector<VertexId> vs;
    for (const auto& v : j.at("vertices")) {
        VertexId id = v.at("id");
        if (id >= names.size() || names[id] != v.at("label").get<std::string>())
            throw std::invalid_argument("mixed graph vertex does not match variable names");
        vs.push_back(id);
    }
    MixedGraph g(vs);
    for (const auto& e : j.at("edges"))
        g.set_edge(e.at("a"), e.at("b"), edge_mark_from_string(e.at("mark_a")), edge_mark_from_string(e.at("mark_b")));
    return g;
}

std::string to_dot(const Dag& dag) {
    std::ostringstream out;
    out << "digraph G {\n";
    for (const auto& v : dag.vertices()) {
        out << "  " << v.id << " [label=" << quoted(v.label);
        switch (v.kind) {
            case VertexKind::Latent: out << ", style=dashed"; break;
            case VertexKind::Selection: out << ", shape=box"; break;
            case VertexKind::Indicator: out << ", shape=diamond"; break;
            default: break;
        }
        out << "];\n";
    }
    for (auto [t, h] : dag.edges()) out << "  " << t << " -> " << h << ";\n";
    out << "}\n";
    return out.str();
}

std::string to_dot(const MixedGraph& g, const std::vector<std::string>& names) {
    auto dot_mark = [](EdgeMark m) {
        switch (m) {
            case EdgeMark::Tail: return "none";
            case EdgeMark::Arrow: return "normal";
            case EdgeMark::Circle: return "odot";
        }
        return "none";
    };
    std::ostringstream out;
    out << "digraph G {\n";
    for (VertexId v : g.vertices()) out << "  " << v << " [label=" << quoted(names.at(v)) << "];\n";
    for (const auto& e : g.edges()) {
        out << "  " << e.a << " -> " << e.b << " [dir=both, arrowtail=" << dot_mark(e.at_a)
            << ", arrowhead=" << dot_mark(e.at_b);
        if (e.at_a == EdgeMark::Arrow && e.at_b == EdgeMark::Arrow) out << ", style=dashed, color=red";
        if (e.at_a == EdgeMark::Tail && e.at_b == EdgeMark::Tail) out << ", color=blue";
        out << "];\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace gisl
