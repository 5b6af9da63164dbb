#pragma once

#include <map>
#include <set>

#include "gisl/backend.hpp"
#include "gisl/graph.hpp"

namespace gisl {

struct TwinGraph {
    Dag dag;
    VertexId indicator = 0;
    std::map<VertexId, VertexId> post;  // descendants of the target -> post-perturbation copy
};

// Pre- and post-perturbation copies of the target's descendants, tied by shared noise
// vertices; selection applies in both worlds.
TwinGraph twin_graph(const Dag& dag, VertexId target);

// Noise-free I_k vs X_j | cond. Conditioning sets that contain k are evaluated on the twin graph.
bool oracle_indicator_dependent(const AugmentedDag& aug, VertexId k, VertexId j, const std::set<VertexId>& cond);

PatternQuad oracle_quad(const AugmentedDag& aug, VertexId i, VertexId j, const std::set<VertexId>& extra);

// Variables are the observed vertices in id order; perturbations are the intervention targets.
class OracleBackend : public CiBackend {
public:
    explicit OracleBackend(AugmentedDag aug);

    const std::vector<std::string>& names() const override { return names_; }
    bool has_perturbation(std::size_t k) const override;
    CiVerdict observational(std::size_t i, std::size_t j, const std::vector<std::size_t>& cond) override;
    CiVerdict indicator(std::size_t k, std::size_t j, const std::vector<std::size_t>& cond) override;

    VertexId vertex(std::size_t idx) const { return observed_.at(idx); }

private:
    std::set<VertexId> to_vertices(const std::vector<std::size_t>& cond) const;

    AugmentedDag aug_;
    std::vector<VertexId> observed_;
    std::vector<std::string> names_;
};

}  // namespace gisl
