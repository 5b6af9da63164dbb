#include "gisl/skeleton.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>

#include "gisl/parallel.hpp"

namespace gisl {

std::vector<std::size_t> Skeleton::neighbors(std::size_t v) const {
    std::vector<std::size_t> out;
    for (auto p : edges) {
        if (p.a == v) out.push_back(p.b);
        if (p.b == v) out.push_back(p.a);
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

std::vector<std::size_t> without(std::vector<std::size_t> v, std::size_t x) {
    v.erase(std::remove(v.begin(), v.end(), x), v.end());
    return v;
}

}  // namespace

Skeleton recover_skeleton(CiBackend& backend, const SkeletonConfig& cfg) {
    Skeleton s;
    s.names = backend.names();
    const std::size_t p = s.names.size();
    for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = a + 1; b < p; ++b) s.edges.insert(VarPair(a, b));

    for (std::size_t level = 0; level <= cfg.max_cond; ++level) {
        std::vector<std::vector<std::size_t>> nb(p);
        for (std::size_t v = 0; v < p; ++v) nb[v] = s.neighbors(v);
        std::vector<VarPair> work;
        for (auto e : s.edges)
            if (nb[e.a].size() - 1 >= level || nb[e.b].size() - 1 >= level) work.push_back(e);
        if (work.empty()) break;

        std::vector<std::optional<std::vector<std::size_t>>> found(work.size());
        parallel_for(work.size(), cfg.workers, [&](std::size_t w) {
            VarPair e = work[w];
            for (auto [x, y] : {std::pair{e.a, e.b}, std::pair{e.b, e.a}}) {
                bool hit = for_each_subset(without(nb[x], y), level, [&](const std::vector<std::size_t>& sub) {
                    try {
                        if (!backend.observational(x, y, sub).dependent) {
                            found[w] = sub;
                            return true;
                        }
                    } catch (const CiError&) {
                    }
                    return false;
                });
                if (hit) return;
            }
        });
        for (std::size_t w = 0; w < work.size(); ++w) {
            if (!found[w]) continue;
            s.edges.erase(work[w]);
            s.sepsets[work[w]] = *found[w];
        }
    }
    return s;
}

Skeleton recover_skeleton(const DataMatrix& d0, double alpha, std::size_t max_cond) {
    KernelCiConfig cfg;
    cfg.alpha = alpha;
    KernelBackend backend(d0, {}, cfg);
    SkeletonConfig sc;
    sc.max_cond = max_cond;
    return recover_skeleton(backend, sc);
}

Skeleton oracle_skeleton(const AugmentedDag& aug) {
    auto obs = aug.observed();
    if (obs.size() > 20) throw std::invalid_argument("oracle skeleton is limited to 20 observed variables");
    Skeleton s;
    for (auto v : obs) s.names.push_back(aug.base.vertex(v).label);
    for (std::size_t a = 0; a < obs.size(); ++a) {
        for (std::size_t b = a + 1; b < obs.size(); ++b) {
            std::vector<std::size_t> rest;
            for (std::size_t c = 0; c < obs.size(); ++c)
                if (c != a && c != b) rest.push_back(c);
            bool separated = false;
            for (std::size_t k = 0; k <= rest.size() && !separated; ++k) {
                separated = for_each_subset(rest, k, [&](const std::vector<std::size_t>& sub) {
                    std::set<VertexId> cond;
                    for (auto c : sub) cond.insert(obs[c]);
                    if (selection_conditioned_dseparated(aug, obs[a], obs[b], cond)) {
                        s.sepsets[VarPair(a, b)] = sub;
                        return true;
                    }
                    return false;
                });
            }
            if (!separated) s.edges.insert(VarPair(a, b));
        }
    }
    return s;
}

nlohmann::json to_json(const Skeleton& s) {
    nlohmann::json j;
    j["format"] = "gisl-skeleton";
    j["version"] = 1;
    j["variables"] = s.names;
    j["edges"] = nlohmann::json::array();
    for (auto e : s.edges) j["edges"].push_back({s.names[e.a], s.names[e.b]});
    j["sepsets"] = nlohmann::json::array();
    for (const auto& [p, set] : s.sepsets) {
        std::vector<std::string> names;
        for (auto c : set) names.push_back(s.names[c]);
        j["sepsets"].push_back({{"pair", {s.names[p.a], s.names[p.b]}}, {"set", names}});
    }
    return j;
}

}  // namespace gisl
