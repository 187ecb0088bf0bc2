#pragma once

// Executable constructions: the three-layer ID-matching triangle detector
// (only its last layer is ID-invariant) and the matching-oracle canonicalizer.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "idgnn/graph.hpp"
#include "idgnn/node_ids.hpp"

namespace idgnn {

// Per-node messages accumulated by the concatenation layers. Position 0 of a
// node's layer-1 message is its own ID.
struct IdList {
    std::vector<std::vector<double>> layer1;  // [own, neighbor ids...]
    std::vector<std::vector<double>> layer2;  // own layer-1 list, then neighbors' lists
};

struct TriangleNetResult {
    std::vector<long> output;  // 1 iff the node is in a triangle
    IdList intermediates;
};

// Three literal layers: (1) concat own + neighbor IDs, (2) concat neighbor
// layer-1 messages, (3) match the node's own ID against 3-hop entries,
// skipping walks that backtrack through the node itself (v -> u -> v).
inline TriangleNetResult triangle_net(const Graph& g, const IdAssignment& ids) {
    if (ids.r != 1 || ids.values.dim(0) != g.num_nodes)
        throw std::invalid_argument("triangle_net requires scalar IDs, one per node");
    const auto& vals = ids.values.data();
    for (std::size_t i = 0; i < g.num_nodes; ++i)
        for (std::size_t j = i + 1; j < g.num_nodes; ++j)
            if (vals[i] == vals[j])
                throw std::invalid_argument("triangle_net requires pairwise distinct IDs");

    auto adj = g.adjacency();
    for (auto& nb : adj) std::sort(nb.begin(), nb.end());  // fixed concat order

    TriangleNetResult res;
    auto& l1 = res.intermediates.layer1;
    auto& l2 = res.intermediates.layer2;
    l1.resize(g.num_nodes);
    for (std::size_t v = 0; v < g.num_nodes; ++v) {
        l1[v].push_back(vals[v]);
        for (auto u : adj[v]) l1[v].push_back(vals[u]);
    }
    l2.resize(g.num_nodes);
    for (std::size_t v = 0; v < g.num_nodes; ++v) {
        l2[v] = l1[v];
        for (auto u : adj[v]) l2[v].insert(l2[v].end(), l1[u].begin(), l1[u].end());
    }
    // Layer 3: v receives each neighbor u's layer-2 message; the 3-hop entries
    // are IDs of t with a walk v -> u -> w -> t. Match vals[v] among them with
    // w != v (exclude the trivial self-echo v -> u -> v -> ?).
    res.output.assign(g.num_nodes, 0);
    for (std::size_t v = 0; v < g.num_nodes; ++v) {
        for (auto u : adj[v]) {
            for (auto w : adj[u]) {
                if (w == v) continue;
                for (auto t : adj[w])
                    if (vals[t] == vals[v]) {
                        res.output[v] = 1;
                        break;
                    }
                if (res.output[v]) break;
            }
            if (res.output[v]) break;
        }
    }
    return res;
}

// Node handle for the matching oracle; opaque on purpose.
using NodeHandle = std::size_t;
using MatchingOracle = std::function<bool(NodeHandle, NodeHandle)>;

// First-occurrence replay over a fixed traversal: the k-th distinct node seen
// gets canonical ID k (1-based). The input ID values are never consulted, so
// any function composed after this is invariant to them.
inline IdAssignment canonicalize_ids(const Graph& g, const IdAssignment& ids,
                                     const MatchingOracle& oracle) {
    (void)ids;
    std::vector<NodeHandle> cache;
    std::vector<double> canon(g.num_nodes, 0.0);
    for (NodeHandle v = 0; v < g.num_nodes; ++v) {
        std::size_t found = cache.size();
        for (std::size_t i = 0; i < cache.size(); ++i)
            if (oracle(cache[i], v)) {
                found = i;
                break;
            }
        if (found == cache.size()) cache.push_back(v);
        canon[v] = static_cast<double>(found + 1);
    }
    return IdAssignment{Tensor({g.num_nodes, 1}, std::move(canon)), 1, 0};
}

inline MatchingOracle identity_oracle() {
    return [](NodeHandle a, NodeHandle b) { return a == b; };
}

}  // namespace idgnn
