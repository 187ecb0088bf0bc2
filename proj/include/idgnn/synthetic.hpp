#pragma once

// Synthetic task generators and oracles: BA graphs, isInTriangle labels,
// 1-WL color refinement, and 1-WL-indistinguishable cycle-pair datasets.

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "idgnn/graph.hpp"

namespace idgnn {

struct BAParams {
    std::size_t n = 100;
    std::size_t m = 2;
    std::uint64_t seed = 0;

    void check() const {
        if (m < 1 || m >= n) throw std::invalid_argument("BA requires 1 <= m < n");
    }
};

// Preferential attachment: seed clique on m+1 nodes, then each new node picks
// m distinct targets proportionally to degree (urn with rejection).
inline Graph generate_ba(const BAParams& p) {
    p.check();
    std::mt19937_64 rng(p.seed);
    Graph g;
    g.num_nodes = p.n;
    std::vector<std::size_t> urn;  // one entry per edge endpoint
    for (std::size_t u = 0; u + 1 <= p.m; ++u)
        for (std::size_t v = u + 1; v <= p.m; ++v) {
            g.edges.emplace_back(u, v);
            urn.push_back(u);
            urn.push_back(v);
        }
    for (std::size_t v = p.m + 1; v < p.n; ++v) {
        std::set<std::size_t> targets;
        while (targets.size() < p.m) {
            std::uniform_int_distribution<std::size_t> pick(0, urn.size() - 1);
            targets.insert(urn[pick(rng)]);
        }
        for (auto u : targets) {
            g.edges.emplace_back(std::min(u, v), std::max(u, v));
            urn.push_back(u);
            urn.push_back(v);
        }
    }
    return g;
}

// label_v = 1 iff some pair of v's neighbors is itself an edge.
inline std::vector<long> label_triangles(const Graph& g) {
    auto adj = g.adjacency();
    std::set<Edge> edge_set(g.edges.begin(), g.edges.end());
    std::vector<long> labels(g.num_nodes, 0);
    for (std::size_t v = 0; v < g.num_nodes; ++v) {
        for (std::size_t i = 0; i < adj[v].size() && !labels[v]; ++i)
            for (std::size_t j = i + 1; j < adj[v].size() && !labels[v]; ++j) {
                std::size_t a = adj[v][i], b = adj[v][j];
                if (edge_set.count({std::min(a, b), std::max(a, b)})) labels[v] = 1;
            }
    }
    return labels;
}

// ---- 1-WL color refinement -------------------------------------------------

struct WLColoring {
    std::vector<std::size_t> colors;
    std::size_t rounds = 0;

    std::map<std::size_t, std::size_t> histogram() const {
        std::map<std::size_t, std::size_t> h;
        for (auto c : colors) ++h[c];
        return h;
    }
};

// Refine (color, sorted multiset of neighbor colors) to fixpoint. New color ids
// are assigned by sorted signature order, so they are isomorphism-invariant.
inline WLColoring wl_refine(const Graph& g,
                            const std::vector<std::size_t>& initial_colors = {}) {
    auto adj = g.adjacency();
    std::vector<std::size_t> colors =
        initial_colors.empty() ? std::vector<std::size_t>(g.num_nodes, 0) : initial_colors;
    if (colors.size() != g.num_nodes)
        throw std::invalid_argument("wl_refine: initial color count mismatch");
    WLColoring out;
    for (;;) {
        using Sig = std::pair<std::size_t, std::vector<std::size_t>>;
        std::vector<Sig> sigs(g.num_nodes);
        for (std::size_t v = 0; v < g.num_nodes; ++v) {
            std::vector<std::size_t> nb;
            nb.reserve(adj[v].size());
            for (auto u : adj[v]) nb.push_back(colors[u]);
            std::sort(nb.begin(), nb.end());
            sigs[v] = {colors[v], std::move(nb)};
        }
        std::map<Sig, std::size_t> relabel;
        for (const auto& s : sigs) relabel.emplace(s, 0);
        std::size_t next = 0;
        for (auto& [sig, id] : relabel) id = next++;
        std::vector<std::size_t> refined(g.num_nodes);
        for (std::size_t v = 0; v < g.num_nodes; ++v) refined[v] = relabel.at(sigs[v]);
        if (refined == colors) break;
        colors = std::move(refined);
        ++out.rounds;
    }
    out.colors = std::move(colors);
    return out;
}

// Refine the disjoint union so colors are comparable, then compare histograms.
inline bool wl_distinguishable(const Graph& g1, const Graph& g2) {
    Graph merged;
    merged.num_nodes = g1.num_nodes + g2.num_nodes;
    merged.edges = g1.edges;
    for (auto [u, v] : g2.edges) merged.edges.emplace_back(u + g1.num_nodes, v + g1.num_nodes);
    WLColoring wc = wl_refine(merged);
    std::map<std::size_t, long> diff;
    for (std::size_t v = 0; v < g1.num_nodes; ++v) ++diff[wc.colors[v]];
    for (std::size_t v = g1.num_nodes; v < merged.num_nodes; ++v) --diff[wc.colors[v]];
    // account for unequal sizes up front
    if (g1.num_nodes != g2.num_nodes) return true;
    for (const auto& [c, d] : diff)
        if (d != 0) return true;
    return false;
}

// ---- isInTriangle dataset --------------------------------------------------

inline Graph cycle_graph(std::size_t n) {
    Graph g;
    g.num_nodes = n;
    for (std::size_t v = 0; v + 1 < n; ++v) g.edges.emplace_back(v, v + 1);
    g.edges.emplace_back(0, n - 1);
    return g;
}

struct IsTriangleConfig {
    std::size_t num_graphs = 100;  // per split
    std::size_t nodes = 100;
    std::size_t m_train = 2;
    std::size_t m_extrap = 3;
    std::size_t labeled_per_split = 500;
    double valid_fraction = 0.2;   // of the training graphs
    std::uint64_t seed = 1;
};

struct IsTriangleDatasets {
    Dataset train;   // carries train/valid split
    Dataset interp;  // fresh graphs, same m as train
    Dataset extrap;  // fresh graphs, m = m_extrap
};

// Keeps full triangle labels on `labeled_per_split` uniformly chosen nodes per
// split and masks the rest with -1.
inline Dataset build_istriangle_split(std::size_t num_graphs, std::size_t nodes, std::size_t m,
                                      std::size_t labeled_budget, std::mt19937_64& rng) {
    Dataset ds;
    ds.task_kind = TaskKind::NodeClassification;
    ds.num_classes = 2;
    for (std::size_t i = 0; i < num_graphs; ++i) {
        Graph g = generate_ba({nodes, m, rng()});
        g.node_labels = label_triangles(g);
        ds.graphs.push_back(std::move(g));
    }
    const std::size_t total = num_graphs * nodes;
    if (labeled_budget < total) {
        std::vector<std::size_t> idx(total);
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), rng);
        std::set<std::size_t> keep(idx.begin(), idx.begin() + labeled_budget);
        for (std::size_t gi = 0; gi < num_graphs; ++gi)
            for (std::size_t v = 0; v < nodes; ++v)
                if (!keep.count(gi * nodes + v)) (*ds.graphs[gi].node_labels)[v] = -1;
    }
    return ds;
}

inline IsTriangleDatasets build_istriangle_dataset(const IsTriangleConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    IsTriangleDatasets out;
    out.train = build_istriangle_split(cfg.num_graphs, cfg.nodes, cfg.m_train,
                                       cfg.labeled_per_split, rng);
    out.interp = build_istriangle_split(cfg.num_graphs, cfg.nodes, cfg.m_train,
                                        cfg.labeled_per_split, rng);
    out.extrap = build_istriangle_split(cfg.num_graphs, cfg.nodes, cfg.m_extrap,
                                        cfg.labeled_per_split, rng);
    const std::size_t nvalid =
        static_cast<std::size_t>(cfg.valid_fraction * static_cast<double>(cfg.num_graphs));
    std::vector<std::size_t> idx(cfg.num_graphs);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    out.train.valid.assign(idx.begin(), idx.begin() + nvalid);
    out.train.train.assign(idx.begin() + nvalid, idx.end());
    std::sort(out.train.valid.begin(), out.train.valid.end());
    std::sort(out.train.train.begin(), out.train.train.end());
    out.interp.test.resize(cfg.num_graphs);
    std::iota(out.interp.test.begin(), out.interp.test.end(), 0);
    out.extrap.test.resize(cfg.num_graphs);
    std::iota(out.extrap.test.begin(), out.extrap.test.end(), 0);
    return out;
}

// ---- 1-WL-hard cycle pairs (EXP surrogate) ---------------------------------

struct WlHardConfig {
    std::size_t num_pairs = 200;
    std::vector<std::size_t> sizes = {6};  // even, >= 6; one C_2k vs C_k + C_k per pair
    double valid_fraction = 0.1;
    double test_fraction = 0.2;
    std::uint64_t seed = 1;

    void check() const {
        if (sizes.empty()) throw std::invalid_argument("wl-hard needs at least one size");
        for (auto s : sizes)
            if (s < 6 || s % 2 != 0)
                throw std::invalid_argument("wl-hard sizes must be even and >= 6");
    }
};

// Binary graph classification: label 0 = single cycle C_2k, label 1 = two
// disjoint copies of C_k. Every emitted pair is checked 1-WL-indistinguishable.
inline Dataset build_wlhard_pairs(const WlHardConfig& cfg) {
    cfg.check();
    std::mt19937_64 rng(cfg.seed);
    Dataset ds;
    ds.task_kind = TaskKind::GraphClassification;
    ds.num_classes = 2;
    for (std::size_t p = 0; p < cfg.num_pairs; ++p) {
        std::uniform_int_distribution<std::size_t> pick(0, cfg.sizes.size() - 1);
        const std::size_t n = cfg.sizes[pick(rng)];
        Graph single = cycle_graph(n);
        Graph two = cycle_graph(n / 2);
        Graph second = cycle_graph(n / 2);
        for (auto [u, v] : second.edges) two.edges.emplace_back(u + n / 2, v + n / 2);
        two.num_nodes = n;
        if (wl_distinguishable(single, two))
            throw std::logic_error("wl-hard generator produced a distinguishable pair");
        single.graph_label = 0;
        two.graph_label = 1;
        ds.graphs.push_back(std::move(single));
        ds.graphs.push_back(std::move(two));
    }
    // Stratified split: pairs stay together so both classes appear evenly.
    std::vector<std::size_t> pair_idx(cfg.num_pairs);
    std::iota(pair_idx.begin(), pair_idx.end(), 0);
    std::shuffle(pair_idx.begin(), pair_idx.end(), rng);
    const std::size_t ntest = static_cast<std::size_t>(cfg.test_fraction * cfg.num_pairs);
    const std::size_t nvalid = static_cast<std::size_t>(cfg.valid_fraction * cfg.num_pairs);
    for (std::size_t i = 0; i < cfg.num_pairs; ++i) {
        auto* split = i < ntest ? &ds.test : (i < ntest + nvalid ? &ds.valid : &ds.train);
        split->push_back(2 * pair_idx[i]);
        split->push_back(2 * pair_idx[i] + 1);
    }
    for (auto* split : {&ds.train, &ds.valid, &ds.test}) std::sort(split->begin(), split->end());
    return ds;
}

}  // namespace idgnn
