#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "gisl/backend.hpp"
#include "gisl/graph.hpp"

namespace gisl {

struct Skeleton {
    std::vector<std::string> names;
    PairSet edges;
    std::map<VarPair, std::vector<std::size_t>> sepsets;

    bool adjacent(std::size_t a, std::size_t b) const { return edges.count(VarPair(a, b)) > 0; }
    std::vector<std::size_t> neighbors(std::size_t v) const;
};

struct SkeletonConfig {
    std::size_t max_cond = 3;
    std::size_t workers = 1;
};

Skeleton recover_skeleton(CiBackend& backend, const SkeletonConfig& cfg = {});
Skeleton recover_skeleton(const DataMatrix& d0, double alpha, std::size_t max_cond);
Skeleton oracle_skeleton(const AugmentedDag& aug);

// Calls fn(subset) for each k-subset of items in lexicographic order until fn returns true.
template <class Fn>
bool for_each_subset(const std::vector<std::size_t>& items, std::size_t k, Fn&& fn) {
    if (k > items.size()) return false;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    std::vector<std::size_t> subset(k);
    for (;;) {
        for (std::size_t i = 0; i < k; ++i) subset[i] = items[idx[i]];
        if (fn(subset)) return true;
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == items.size() - k + i - 1) --i;
        if (i == 0) return false;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

nlohmann::json to_json(const Skeleton& s);

}  // namespace gisl
