#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gisl/backend.hpp"
#include "gisl/graph.hpp"
#include "gisl/skeleton.hpp"

namespace gisl {

enum class ClassTag { Causal, Latent, Selection, CausalAndLatent, Unknown };

std::string to_string(ClassTag t);

// Direction relative to the ordered pair (i, j) the quad was computed for.
enum class Direction { IToJ, JToI };

struct EdgeClass {
    ClassTag tag = ClassTag::Unknown;
    std::optional<Direction> direction;

    bool operator==(const EdgeClass&) const = default;
    std::string str() const;
};

EdgeClass classify_pattern(const PatternQuad& quad);

// The quad of (j, i) from the quad of (i, j).
PatternQuad swap_pair(const PatternQuad& q);

struct GislConfig {
    std::size_t max_cond = 3;
    std::size_t correction_depth = 2;
    std::size_t workers = 1;
};

enum class PairStatus { Tested, Untested };

struct CorrectionAttempt {
    std::vector<std::size_t> cond;
    PatternQuad quad;
    EdgeClass cls;
    bool applied = false;
};

struct AuditEntry {
    VarPair pair;  // i = pair.a, j = pair.b
    PairStatus status = PairStatus::Tested;
    PatternQuad initial;
    EdgeClass initial_class;
    std::vector<CorrectionAttempt> corrections;
    EdgeClass final_class;
    std::string note;
};

struct GislResult {
    std::vector<std::string> names;
    Skeleton skeleton;
    MixedGraph graph;
    PairSet latent;             // pattern L
    PairSet causal_and_latent;  // pattern C & L after correction
    PairSet confounded;         // union of the two above
    PairSet selected;
    PairSet unknown;
    std::vector<AuditEntry> audit;

    std::set<DirectedEdge> causal_edges() const { return graph.directed_edges(); }
    const AuditEntry* find(VarPair p) const;
};

GislResult run_gisl(CiBackend& backend, const GislConfig& config = {});
GislResult run_gisl(const DataMatrix& d0, const std::map<std::string, DataMatrix>& perturbed,
                    const KernelCiConfig& ci, const GislConfig& config = {});

// Step 4 on an audit trail produced by Step 3; updates the final classes in place.
void correct_patterns(std::vector<AuditEntry>& audit, const Skeleton& skeleton, CiBackend& backend,
                      const GislConfig& config);

nlohmann::json to_json(const GislResult& r);
GislResult gisl_result_from_json(const nlohmann::json& j);
std::string to_dot(const GislResult& r);

}  // namespace gisl
