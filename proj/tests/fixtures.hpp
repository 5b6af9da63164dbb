#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gisl/graph.hpp"

namespace fixture {

using gisl::AugmentedDag;
using gisl::VarPair;
using gisl::VertexId;
using gisl::VertexKind;

// Observed variables first (ids 0..), then one latent per confounded pair and one sink per selection pair.
inline AugmentedDag build(const std::vector<std::string>& names, const std::vector<std::pair<int, int>>& edges,
                          const std::vector<std::pair<int, int>>& confounded, const std::vector<std::pair<int, int>>& selected,
                          std::set<VertexId> targets = {}) {
    AugmentedDag aug;
    for (const auto& n : names) aug.base.add_vertex(VertexKind::Observed, n);
    for (auto [a, b] : edges) aug.base.add_edge(static_cast<VertexId>(a), static_cast<VertexId>(b));
    int k = 0;
    for (auto [a, b] : confounded) {
        VertexId l = aug.base.add_vertex(VertexKind::Latent, "L" + std::to_string(k++));
        aug.base.add_edge(l, static_cast<VertexId>(a));
        aug.base.add_edge(l, static_cast<VertexId>(b));
        aug.confounded_pairs.insert(VarPair(static_cast<VertexId>(a), static_cast<VertexId>(b)));
    }
    k = 0;
    for (auto [a, b] : selected) {
        VertexId s = aug.base.add_vertex(VertexKind::Selection, "S" + std::to_string(k++));
        aug.base.add_edge(static_cast<VertexId>(a), s);
        aug.base.add_edge(static_cast<VertexId>(b), s);
        aug.selection_pairs.insert(VarPair(static_cast<VertexId>(a), static_cast<VertexId>(b)));
    }
    if (targets.empty())
        for (VertexId v = 0; v < names.size(); ++v) targets.insert(v);
    aug.intervention_targets = targets;
    aug.validate();
    return aug;
}

}  // namespace fixture
