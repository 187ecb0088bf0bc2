#pragma once

// The ICON objective: two forward passes under independent ID draws,
// task loss plus the squared-difference regularizer on H^(L).

#include <random>
#include <stdexcept>

#include "idgnn/graph.hpp"
#include "idgnn/layers.hpp"
#include "idgnn/node_ids.hpp"
#include "idgnn/tensor.hpp"

namespace idgnn {

enum class TaskLossSource { First, Average };

struct IconConfig {
    bool enabled = true;
    double lambda_reg = 1.0;
    TaskLossSource task_loss_source = TaskLossSource::First;

    void check() const {
        if (lambda_reg < 0.0) throw std::invalid_argument("lambda_reg must be non-negative");
    }
};

struct IconLossParts {
    Tensor total;
    double task = 0.0;
    double reg = 0.0;
};

inline const std::vector<long>& batch_targets(const GraphBatch& batch) {
    return batch.graph_labels.empty() ? batch.node_labels : batch.graph_labels;
}

// Two independent ID draws R1, R2 on the same batch; L = L_task + lambda * L_reg
// with L_reg = ||H1 - H2||_F^2 averaged over the graphs in the batch.
inline IconLossParts icon_step_loss(const Model& model, const GraphBatch& batch,
                                    const IconConfig& cfg, std::size_t id_dim,
                                    std::mt19937_64& rng, IdDist dist = IdDist::Uniform,
                                    bool train = true, std::mt19937_64* dropout_rng = nullptr) {
    cfg.check();
    if (!cfg.enabled) throw std::logic_error("icon_step_loss called with icon disabled");
    IdAssignment r1 = sample_ids(batch.num_nodes, id_dim, rng, dist);
    IdAssignment r2 = sample_ids(batch.num_nodes, id_dim, rng, dist);
    ModelOutput o1 = model.forward(batch, r1, IdMode::Rni, train, dropout_rng);
    ModelOutput o2 = model.forward(batch, r2, IdMode::Rni, train, dropout_rng);
    if (o1.h_final.shape() != o2.h_final.shape())
        throw std::logic_error("icon_step_loss: embedding shape mismatch between forwards");

    const auto& targets = batch_targets(batch);
    Tensor task = cross_entropy(o1.logits, targets);
    if (cfg.task_loss_source == TaskLossSource::Average)
        task = scale(add(task, cross_entropy(o2.logits, targets)), 0.5);

    Tensor reg = scale(sq_frobenius_diff(o1.h_final, o2.h_final),
                       1.0 / static_cast<double>(batch.num_graphs));
    Tensor total = add(task, scale(reg, cfg.lambda_reg));
    return {total, task.item(), reg.item()};
}

// Single forward with fresh IDs (or the constant / no-ID baselines); plain task loss.
inline Tensor rni_step_loss(const Model& model, const GraphBatch& batch, IdMode id_mode,
                            std::size_t id_dim, std::mt19937_64& rng,
                            IdDist dist = IdDist::Uniform, bool train = true,
                            std::mt19937_64* dropout_rng = nullptr) {
    std::optional<IdAssignment> ids;
    if (id_mode == IdMode::Rni) ids = sample_ids(batch.num_nodes, id_dim, rng, dist);
    ModelOutput out = model.forward(batch, ids, id_mode, train, dropout_rng);
    return cross_entropy(out.logits, batch_targets(batch));
}

}  // namespace idgnn
