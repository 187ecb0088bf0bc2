#pragma once

// Monte-Carlo estimation of the invariance ratio, per-epoch curves, and the
// witness function showing invariance on one graph set but not another.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include "idgnn/graph.hpp"
#include "idgnn/icon.hpp"
#include "idgnn/layers.hpp"
#include "idgnn/node_ids.hpp"

namespace idgnn {

struct InvarianceReport {
    std::vector<double> per_example;  // each in [1/L, 1]
    double mean = 0.0;
    std::size_t K = 0;
    std::string split;
};

// Max class frequency over K independent ID resamples. Node tasks average the
// per-node ratios over the example's labeled nodes. Ties break to the lowest
// class index (argmax_row already does).
inline double invariance_ratio(const Model& model, const Graph& graph, std::size_t K,
                               std::size_t id_dim, std::mt19937_64& rng,
                               IdDist dist = IdDist::Uniform) {
    if (K == 0) throw std::invalid_argument("invariance_ratio requires K >= 1");
    GraphBatch batch = make_batch({graph});
    const bool node_task = batch.graph_labels.empty();
    const std::size_t C = model.config().readout.num_classes;

    if (!node_task) {
        std::vector<std::size_t> counts(C, 0);
        for (std::size_t k = 0; k < K; ++k) {
            IdAssignment ids = sample_ids(batch.num_nodes, id_dim, rng, dist);
            ModelOutput out = model.forward(batch, ids, IdMode::Rni);
            ++counts[argmax_row(out.logits, 0)];
        }
        return static_cast<double>(*std::max_element(counts.begin(), counts.end())) /
               static_cast<double>(K);
    }

    std::vector<std::size_t> labeled;
    for (std::size_t v = 0; v < batch.num_nodes; ++v)
        if (batch.node_labels.empty() || batch.node_labels[v] >= 0) labeled.push_back(v);
    if (labeled.empty()) throw std::invalid_argument("invariance_ratio: no labeled nodes");
    std::vector<std::size_t> counts(labeled.size() * C, 0);
    for (std::size_t k = 0; k < K; ++k) {
        IdAssignment ids = sample_ids(batch.num_nodes, id_dim, rng, dist);
        ModelOutput out = model.forward(batch, ids, IdMode::Rni);
        for (std::size_t i = 0; i < labeled.size(); ++i)
            ++counts[i * C + argmax_row(out.logits, labeled[i])];
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < labeled.size(); ++i) {
        std::size_t best = 0;
        for (std::size_t c = 0; c < C; ++c) best = std::max(best, counts[i * C + c]);
        acc += static_cast<double>(best) / static_cast<double>(K);
    }
    return acc / static_cast<double>(labeled.size());
}

inline InvarianceReport invariance_report(const Model& model, const std::vector<Graph>& graphs,
                                          std::size_t K, std::size_t id_dim,
                                          std::mt19937_64& rng, const std::string& split = "",
                                          IdDist dist = IdDist::Uniform) {
    InvarianceReport rep;
    rep.K = K;
    rep.split = split;
    for (const auto& g : graphs) {
        // node-task examples whose labels are all masked carry no statistic
        if (!g.graph_label && g.node_labels &&
            std::none_of(g.node_labels->begin(), g.node_labels->end(),
                         [](long l) { return l >= 0; }))
            continue;
        rep.per_example.push_back(invariance_ratio(model, g, K, id_dim, rng, dist));
    }
    rep.mean = rep.per_example.empty()
                   ? 0.0
                   : std::accumulate(rep.per_example.begin(), rep.per_example.end(), 0.0) /
                         static_cast<double>(rep.per_example.size());
    return rep;
}

// One report per evaluation point; `snapshot` is called once per entry and the
// resulting reports form the curve.
inline std::vector<InvarianceReport> invariance_curve(
    const std::function<const Model&(std::size_t)>& snapshot, std::size_t num_points,
    const std::vector<Graph>& graphs, std::size_t K, std::size_t id_dim, std::mt19937_64& rng,
    const std::string& split = "") {
    std::vector<InvarianceReport> out;
    for (std::size_t i = 0; i < num_points; ++i)
        out.push_back(invariance_report(snapshot(i), graphs, K, id_dim, rng, split));
    return out;
}

// ---- witness: ID-invariant on S, non-invariant off S -----------------------
// On S it returns an ID-invariant graph property (even edge count here); off S
// it returns the sum of IDs, which depends on the ID values.

inline double theorem1_witness(const Graph& g, const IdAssignment& ids,
                               const std::function<bool(const Graph&)>& member_of_S) {
    if (member_of_S(g)) return g.edges.size() % 2 == 0 ? 1.0 : 0.0;
    double s = 0.0;
    for (double v : ids.values.data()) s += v;
    return s;
}

// Monte-Carlo ratio of the witness with outputs binned to 2 classes
// (threshold at n*r/2, the mean of a uniform ID sum).
inline double witness_invariance_ratio(const Graph& g,
                                       const std::function<bool(const Graph&)>& member_of_S,
                                       std::size_t K, std::size_t id_dim, std::mt19937_64& rng) {
    if (K == 0) throw std::invalid_argument("witness_invariance_ratio requires K >= 1");
    const double threshold = static_cast<double>(g.num_nodes * id_dim) / 2.0;
    std::size_t counts[2] = {0, 0};
    for (std::size_t k = 0; k < K; ++k) {
        IdAssignment ids = sample_ids(g.num_nodes, id_dim, rng);
        const double v = theorem1_witness(g, ids, member_of_S);
        ++counts[v < threshold ? 0 : 1];
    }
    return static_cast<double>(std::max(counts[0], counts[1])) / static_cast<double>(K);
}

}  // namespace idgnn
