#pragma once

// Graph / GraphBatch / Dataset containers, validation, batching, JSONL I/O.

#include <cstddef>
#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "idgnn/tensor.hpp"

namespace idgnn {

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Edge = std::pair<std::size_t, std::size_t>;  // stored once with u < v

struct Graph {
    std::size_t num_nodes = 0;
    std::vector<Edge> edges;
    std::optional<Tensor> features;              // n x d
    std::optional<long> graph_label;
    std::optional<std::vector<long>> node_labels;  // -1 marks an unlabeled node

    // Both directions of every undirected edge, for message passing.
    std::vector<Edge> directed_edges() const {
        std::vector<Edge> out;
        out.reserve(2 * edges.size());
        for (auto [u, v] : edges) {
            out.emplace_back(u, v);
            out.emplace_back(v, u);
        }
        return out;
    }

    std::vector<std::vector<std::size_t>> adjacency() const {
        std::vector<std::vector<std::size_t>> adj(num_nodes);
        for (auto [u, v] : edges) {
            adj[u].push_back(v);
            adj[v].push_back(u);
        }
        return adj;
    }

    void validate(std::size_t index_for_error = 0) const {
        std::set<Edge> seen;
        for (auto [u, v] : edges) {
            if (u == v)
                throw ValidationError("graph " + std::to_string(index_for_error) +
                                      ": self-loop at node " + std::to_string(u));
            std::size_t a = std::min(u, v), b = std::max(u, v);
            if (b >= num_nodes)
                throw ValidationError("graph " + std::to_string(index_for_error) +
                                      ": edge endpoint " + std::to_string(b) + " out of range");
            if (!seen.insert({a, b}).second)
                throw ValidationError("graph " + std::to_string(index_for_error) +
                                      ": duplicate edge (" + std::to_string(a) + "," +
                                      std::to_string(b) + ")");
        }
        if (features && features->dim(0) != num_nodes)
            throw ValidationError("graph " + std::to_string(index_for_error) +
                                  ": feature row count mismatch");
        if (node_labels && node_labels->size() != num_nodes)
            throw ValidationError("graph " + std::to_string(index_for_error) +
                                  ": node_labels length mismatch");
        if (graph_label && node_labels)
            throw ValidationError("graph " + std::to_string(index_for_error) +
                                  ": both graph_label and node_labels present");
    }
};

struct GraphBatch {
    std::size_t num_graphs = 0;
    std::size_t num_nodes = 0;
    std::vector<Edge> edges;                  // undirected, offsets applied
    std::optional<Tensor> features;           // merged n x d
    std::vector<std::size_t> membership;      // node -> graph index, non-decreasing
    std::vector<std::size_t> node_offsets;    // per-graph start offsets, size num_graphs+1
    std::vector<long> graph_labels;           // empty for node tasks
    std::vector<long> node_labels;            // empty for graph tasks; -1 = unlabeled

    std::vector<Edge> directed_edges() const {
        std::vector<Edge> out;
        out.reserve(2 * edges.size());
        for (auto [u, v] : edges) {
            out.emplace_back(u, v);
            out.emplace_back(v, u);
        }
        return out;
    }
};

enum class TaskKind { GraphClassification, NodeClassification };

struct Dataset {
    std::vector<Graph> graphs;
    std::vector<std::size_t> train, valid, test;
    TaskKind task_kind = TaskKind::GraphClassification;
    std::size_t num_classes = 2;

    std::vector<Graph> subset(const std::vector<std::size_t>& idx) const {
        std::vector<Graph> out;
        out.reserve(idx.size());
        for (auto i : idx) out.push_back(graphs.at(i));
        return out;
    }

    void validate() const {
        for (std::size_t i = 0; i < graphs.size(); ++i) {
            graphs[i].validate(i);
            const auto& g = graphs[i];
            if (g.graph_label && (*g.graph_label < 0 ||
                                  static_cast<std::size_t>(*g.graph_label) >= num_classes))
                throw ValidationError("graph " + std::to_string(i) + ": label out of range");
            if (g.node_labels)
                for (long l : *g.node_labels)
                    if (l >= 0 && static_cast<std::size_t>(l) >= num_classes)
                        throw ValidationError("graph " + std::to_string(i) +
                                              ": node label out of range");
        }
        std::set<std::size_t> all;
        for (const auto* split : {&train, &valid, &test})
            for (auto i : *split) {
                if (i >= graphs.size()) throw ValidationError("split index out of range");
                if (!all.insert(i).second) throw ValidationError("splits overlap");
            }
    }
};

inline GraphBatch make_batch(const std::vector<Graph>& graphs) {
    GraphBatch b;
    b.num_graphs = graphs.size();
    bool any_feat = false, all_feat = true;
    std::size_t feat_dim = 0;
    for (const auto& g : graphs) {
        if (g.features) {
            if (any_feat && g.features->dim(1) != feat_dim)
                throw ValidationError("make_batch: mixed feature dimensions");
            feat_dim = g.features->dim(1);
            any_feat = true;
        } else {
            all_feat = false;
        }
    }
    if (any_feat && !all_feat)
        throw ValidationError("make_batch: some graphs have features and some do not");

    b.node_offsets.push_back(0);
    std::vector<double> feat;
    for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
        const auto& g = graphs[gi];
        const std::size_t off = b.num_nodes;
        for (auto [u, v] : g.edges) b.edges.emplace_back(u + off, v + off);
        for (std::size_t i = 0; i < g.num_nodes; ++i) b.membership.push_back(gi);
        if (g.features)
            feat.insert(feat.end(), g.features->data().begin(), g.features->data().end());
        if (g.graph_label) b.graph_labels.push_back(*g.graph_label);
        if (g.node_labels)
            b.node_labels.insert(b.node_labels.end(), g.node_labels->begin(),
                                 g.node_labels->end());
        b.num_nodes += g.num_nodes;
        b.node_offsets.push_back(b.num_nodes);
    }
    if (any_feat) b.features = Tensor({b.num_nodes, feat_dim}, std::move(feat));
    return b;
}

inline std::vector<Graph> unbatch(const GraphBatch& b) {
    std::vector<Graph> out(b.num_graphs);
    for (std::size_t gi = 0; gi < b.num_graphs; ++gi) {
        Graph& g = out[gi];
        const std::size_t lo = b.node_offsets[gi], hi = b.node_offsets[gi + 1];
        g.num_nodes = hi - lo;
        if (b.features) {
            const std::size_t d = b.features->dim(1);
            std::vector<double> f(b.features->data().begin() + lo * d,
                                  b.features->data().begin() + hi * d);
            g.features = Tensor({g.num_nodes, d}, std::move(f));
        }
        if (!b.graph_labels.empty()) g.graph_label = b.graph_labels[gi];
        if (!b.node_labels.empty())
            g.node_labels = std::vector<long>(b.node_labels.begin() + lo,
                                              b.node_labels.begin() + hi);
    }
    for (auto [u, v] : b.edges) {
        std::size_t gi = 0;
        while (b.node_offsets[gi + 1] <= u) ++gi;
        out[gi].edges.emplace_back(u - b.node_offsets[gi], v - b.node_offsets[gi]);
    }
    return out;
}

// ---- JSONL I/O -------------------------------------------------------------
// One graph per line:
// {"num_nodes": n, "edges": [[u,v],...], "features": [[...],...]?,
//  "graph_label": int?, "node_labels": [int,...]?}

inline nlohmann::json graph_to_json(const Graph& g) {
    nlohmann::json j;
    j["num_nodes"] = g.num_nodes;
    j["edges"] = nlohmann::json::array();
    for (auto [u, v] : g.edges) j["edges"].push_back({u, v});
    if (g.features) {
        nlohmann::json rows = nlohmann::json::array();
        const std::size_t d = g.features->dim(1);
        for (std::size_t i = 0; i < g.num_nodes; ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (std::size_t k = 0; k < d; ++k) row.push_back(g.features->at(i, k));
            rows.push_back(std::move(row));
        }
        j["features"] = std::move(rows);
    }
    if (g.graph_label) j["graph_label"] = *g.graph_label;
    if (g.node_labels) j["node_labels"] = *g.node_labels;
    return j;
}

inline Graph graph_from_json(const nlohmann::json& j) {
    Graph g;
    g.num_nodes = j.at("num_nodes").get<std::size_t>();
    for (const auto& e : j.at("edges")) {
        std::size_t u = e.at(0).get<std::size_t>(), v = e.at(1).get<std::size_t>();
        g.edges.emplace_back(std::min(u, v), std::max(u, v));
    }
    if (j.contains("features")) {
        const auto& rows = j.at("features");
        std::size_t d = rows.empty() ? 0 : rows.at(0).size();
        std::vector<double> f;
        f.reserve(rows.size() * d);
        for (const auto& row : rows)
            for (const auto& v : row) f.push_back(v.get<double>());
        g.features = Tensor({rows.size(), d}, std::move(f));
    }
    if (j.contains("graph_label")) g.graph_label = j.at("graph_label").get<long>();
    if (j.contains("node_labels")) g.node_labels = j.at("node_labels").get<std::vector<long>>();
    return g;
}

inline void save_jsonl(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    for (const auto& g : ds.graphs) out << graph_to_json(g).dump() << '\n';
}

inline Dataset load_jsonl(const std::string& path,
                          TaskKind kind = TaskKind::NodeClassification,
                          std::size_t num_classes = 2) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    Dataset ds;
    ds.task_kind = kind;
    ds.num_classes = num_classes;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            ds.graphs.push_back(graph_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        ds.graphs.back().validate(ds.graphs.size() - 1);
    }
    return ds;
}

inline void save_split(const Dataset& ds, const std::string& path) {
    nlohmann::json j;
    j["train"] = ds.train;
    j["valid"] = ds.valid;
    j["test"] = ds.test;
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
}

inline void load_split(Dataset& ds, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    ds.train = j.at("train").get<std::vector<std::size_t>>();
    ds.valid = j.at("valid").get<std::vector<std::size_t>>();
    ds.test = j.at("test").get<std::vector<std::size_t>>();
}

}  // namespace idgnn
