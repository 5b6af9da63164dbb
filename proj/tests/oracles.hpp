#pragma once

// Test-side reference implementations, written without the library's graph algorithms.

#include <functional>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

using Edge = std::pair<std::size_t, std::size_t>;

inline std::set<std::size_t> descendants(std::size_t n, const std::vector<Edge>& edges, std::size_t v) {
    std::set<std::size_t> out{v};
    bool grew = true;
    while (grew) {
        grew = false;
        for (auto [a, b] : edges)
            if (out.count(a) && !out.count(b)) grew = out.insert(b).second;
    }
    (void)n;
    return out;
}

// d-connection by enumerating every simple path of the skeleton.
inline bool d_connected(std::size_t n, const std::vector<Edge>& edges, std::size_t x, std::size_t y,
                        const std::set<std::size_t>& z) {
    auto has = [&](std::size_t a, std::size_t b) {
        for (auto e : edges)
            if (e.first == a && e.second == b) return true;
        return false;
    };
    std::vector<std::vector<std::size_t>> nbrs(n);
    for (auto [a, b] : edges) {
        nbrs[a].push_back(b);
        nbrs[b].push_back(a);
    }
    auto active = [&](const std::vector<std::size_t>& path) {
        for (std::size_t k = 1; k + 1 < path.size(); ++k) {
            std::size_t prev = path[k - 1], v = path[k], next = path[k + 1];
            bool collider = has(prev, v) && has(next, v);
            if (collider) {
                bool opened = false;
                for (auto d : descendants(n, edges, v)) opened = opened || z.count(d);
                if (!opened) return false;
            } else if (z.count(v)) {
                return false;
            }
        }
        return true;
    };
    std::vector<std::size_t> path{x};
    std::vector<bool> on(n, false);
    on[x] = true;
    std::function<bool(std::size_t)> dfs = [&](std::size_t u) {
        if (u == y) return active(path);
        for (auto w : nbrs[u]) {
            if (on[w]) continue;
            on[w] = true;
            path.push_back(w);
            bool found = dfs(w);
            path.pop_back();
            on[w] = false;
            if (found) return true;
        }
        return false;
    };
    return dfs(x);
}

}  // namespace oracle
