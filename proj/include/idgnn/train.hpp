#pragma once

// Optimizers, the training loop, evaluation, and metric logging.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "idgnn/graph.hpp"
#include "idgnn/icon.hpp"
#include "idgnn/invariance.hpp"
#include "idgnn/layers.hpp"
#include "idgnn/node_ids.hpp"

namespace idgnn {

// ---- optimizers ------------------------------------------------------------

inline void sgd_step(const std::vector<Tensor>& params, double lr) {
    for (const auto& p : params) {
        Tensor t = p;
        if (!t.has_grad()) continue;
        auto& d = t.mutable_data();
        const auto& g = t.grad();
        for (std::size_t i = 0; i < d.size(); ++i) d[i] -= lr * g[i];
    }
}

struct AdamState {
    std::vector<std::vector<double>> m, v;
    std::size_t t = 0;

    static AdamState init(const std::vector<Tensor>& params) {
        AdamState s;
        for (const auto& p : params) {
            s.m.emplace_back(p.numel(), 0.0);
            s.v.emplace_back(p.numel(), 0.0);
        }
        return s;
    }
};

inline void adam_step(const std::vector<Tensor>& params, AdamState& state, double lr,
                      double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8) {
    if (state.m.size() != params.size()) throw DimError("adam state does not match params");
    ++state.t;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.t));
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        Tensor t = params[pi];
        if (!t.has_grad()) continue;
        if (state.m[pi].size() != t.numel()) throw DimError("adam state shape mismatch");
        auto& d = t.mutable_data();
        const auto& g = t.grad();
        for (std::size_t i = 0; i < d.size(); ++i) {
            state.m[pi][i] = beta1 * state.m[pi][i] + (1.0 - beta1) * g[i];
            state.v[pi][i] = beta2 * state.v[pi][i] + (1.0 - beta2) * g[i] * g[i];
            d[i] -= lr * (state.m[pi][i] / bc1) / (std::sqrt(state.v[pi][i] / bc2) + eps);
        }
    }
}

// ---- configuration and records ---------------------------------------------

struct TrainConfig {
    LayerKind layer_kind = LayerKind::GraphConv;
    std::string optimizer = "adam";  // adam | sgd
    double lr = 1e-3;
    std::size_t batch_size = 32;
    std::size_t epochs = 500;
    std::size_t num_layers = 3;
    std::size_t hidden_dim = 32;
    std::size_t gat_heads = 1;
    double dropout_rate = 0.1;
    IdMode id_mode = IdMode::Rni;
    std::size_t id_dim = 16;
    IdDist id_dist = IdDist::Uniform;
    IconConfig icon{false, 1.0, TaskLossSource::First};
    std::vector<std::uint64_t> seeds = {1, 2, 3};
    std::size_t eval_every = 10;
    std::size_t invariance_K = 200;
    std::size_t invariance_every = 0;  // 0 disables per-epoch invariance curves

    void check() const {
        if (lr <= 0.0) throw std::invalid_argument("lr must be positive");
        if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
        if (seeds.empty()) throw std::invalid_argument("at least one seed is required");
        if (optimizer != "adam" && optimizer != "sgd")
            throw std::invalid_argument("optimizer must be adam or sgd");
    }

    nlohmann::json to_json() const {
        return {{"layer_kind", to_string(layer_kind)},
                {"optimizer", optimizer},
                {"lr", lr},
                {"batch_size", batch_size},
                {"epochs", epochs},
                {"num_layers", num_layers},
                {"hidden_dim", hidden_dim},
                {"gat_heads", gat_heads},
                {"dropout_rate", dropout_rate},
                {"id_mode", to_string(id_mode)},
                {"id_dim", id_dim},
                {"id_dist", id_dist == IdDist::Uniform ? "uniform" : "normal"},
                {"icon",
                 {{"enabled", icon.enabled},
                  {"lambda_reg", icon.lambda_reg},
                  {"task_loss_source",
                   icon.task_loss_source == TaskLossSource::First ? "first" : "average"}}},
                {"seeds", seeds},
                {"eval_every", eval_every},
                {"invariance_K", invariance_K},
                {"invariance_every", invariance_every}};
    }

    static TrainConfig from_json(const nlohmann::json& j) {
        TrainConfig c;
        if (j.contains("layer_kind")) c.layer_kind = layer_kind_from_string(j.at("layer_kind"));
        if (j.contains("optimizer")) c.optimizer = j.at("optimizer");
        if (j.contains("lr")) c.lr = j.at("lr");
        if (j.contains("batch_size")) c.batch_size = j.at("batch_size");
        if (j.contains("epochs")) c.epochs = j.at("epochs");
        if (j.contains("num_layers")) c.num_layers = j.at("num_layers");
        if (j.contains("hidden_dim")) c.hidden_dim = j.at("hidden_dim");
        if (j.contains("gat_heads")) c.gat_heads = j.at("gat_heads");
        if (j.contains("dropout_rate")) c.dropout_rate = j.at("dropout_rate");
        if (j.contains("id_mode")) c.id_mode = id_mode_from_string(j.at("id_mode"));
        if (j.contains("id_dim")) c.id_dim = j.at("id_dim");
        if (j.contains("id_dist"))
            c.id_dist = j.at("id_dist") == "normal" ? IdDist::Normal : IdDist::Uniform;
        if (j.contains("icon")) {
            const auto& ij = j.at("icon");
            if (ij.contains("enabled")) c.icon.enabled = ij.at("enabled");
            if (ij.contains("lambda_reg")) c.icon.lambda_reg = ij.at("lambda_reg");
            if (ij.contains("task_loss_source"))
                c.icon.task_loss_source = ij.at("task_loss_source") == "average"
                                              ? TaskLossSource::Average
                                              : TaskLossSource::First;
        }
        if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        if (j.contains("eval_every")) c.eval_every = j.at("eval_every");
        if (j.contains("invariance_K")) c.invariance_K = j.at("invariance_K");
        if (j.contains("invariance_every")) c.invariance_every = j.at("invariance_every");
        return c;
    }
};

struct MetricsRow {
    std::size_t epoch = 0;
    std::string split;
    double task_metric = 0.0;
    double invariance_ratio = -1.0;  // -1 when not measured
    std::size_t K = 0;
    std::uint64_t seed = 0;
};

inline void write_metrics_csv(const std::vector<MetricsRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    out << "epoch,split,task_metric,invariance_ratio,K,seed\n";
    out.precision(12);
    for (const auto& r : rows)
        out << r.epoch << ',' << r.split << ',' << r.task_metric << ',' << r.invariance_ratio
            << ',' << r.K << ',' << r.seed << '\n';
}

struct SeedRecord {
    std::uint64_t seed = 0;
    std::vector<MetricsRow> metrics;
    std::vector<double> epoch_losses;
    double best_valid = 0.0;
    double final_test = 0.0;
    double final_train_invariance = -1.0;
    double final_test_invariance = -1.0;
    Model best_model;
    bool aborted = false;
    std::string abort_reason;
};

struct RunRecord {
    nlohmann::json config;
    std::vector<SeedRecord> per_seed;
    double test_mean = 0.0;
    double test_std = 0.0;
};

// ---- evaluation ------------------------------------------------------------

// Accuracy with IDs sampled once per example from a fixed eval seed; no dropout.
inline double evaluate(const Model& model, const std::vector<Graph>& graphs, IdMode id_mode,
                       std::size_t id_dim, std::uint64_t eval_seed,
                       IdDist dist = IdDist::Uniform) {
    if (graphs.empty()) throw std::invalid_argument("evaluate: empty split");
    std::mt19937_64 rng(eval_seed);
    std::size_t correct = 0, total = 0;
    for (const auto& g : graphs) {
        GraphBatch b = make_batch({g});
        std::optional<IdAssignment> ids;
        if (id_mode == IdMode::Rni) ids = sample_ids(b.num_nodes, id_dim, rng, dist);
        ModelOutput out = model.forward(b, ids, id_mode);
        if (!b.graph_labels.empty()) {
            if (static_cast<long>(argmax_row(out.logits, 0)) == b.graph_labels[0]) ++correct;
            ++total;
        } else {
            for (std::size_t v = 0; v < b.num_nodes; ++v) {
                if (b.node_labels[v] < 0) continue;
                if (static_cast<long>(argmax_row(out.logits, v)) == b.node_labels[v]) ++correct;
                ++total;
            }
        }
    }
    if (total == 0) throw std::invalid_argument("evaluate: split has no labels");
    return static_cast<double>(correct) / static_cast<double>(total);
}

// ---- training --------------------------------------------------------------

struct EvalSets {
    std::vector<Graph> train, valid, test;
};

inline EvalSets split_sets(const Dataset& ds, const std::optional<Dataset>& test_ds = {}) {
    EvalSets s;
    s.train = ds.subset(ds.train);
    s.valid = ds.valid.empty() ? s.train : ds.subset(ds.valid);
    if (test_ds)
        s.test = test_ds->test.empty() ? test_ds->graphs : test_ds->subset(test_ds->test);
    else if (!ds.test.empty())
        s.test = ds.subset(ds.test);
    return s;
}

inline Model clone_model(const Model& m) { return Model::from_json(m.to_json()); }

// One training run for one seed. Fully determined by (cfg, seed, data).
inline SeedRecord train_one_seed(const Dataset& ds, const TrainConfig& cfg, std::uint64_t seed,
                                 const std::optional<Dataset>& test_ds = {}) {
    cfg.check();
    EvalSets sets = split_sets(ds, test_ds);
    if (sets.train.empty()) throw std::invalid_argument("train: empty training split");

    const std::size_t feat_dim =
        sets.train.front().features ? sets.train.front().features->dim(1) : 0;
    const std::size_t in_dim = assembled_dim(feat_dim, cfg.id_mode, cfg.id_dim);
    const PoolKind pool =
        ds.task_kind == TaskKind::GraphClassification ? PoolKind::Sum : PoolKind::None;
    ModelConfig mc = ModelConfig::uniform(cfg.layer_kind, in_dim, cfg.hidden_dim, cfg.num_layers,
                                          ds.num_classes, pool, cfg.dropout_rate, cfg.gat_heads);

    std::mt19937_64 init_rng(seed);
    std::mt19937_64 id_rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::mt19937_64 shuffle_rng(seed ^ 0xc2b2ae3d27d4eb4full);
    std::mt19937_64 dropout_rng(seed ^ 0x165667b19e3779f9ull);
    const std::uint64_t eval_seed = seed ^ 0x27d4eb2f165667c5ull;

    Model model = Model::init(mc, init_rng);
    auto params = model.parameters();
    AdamState adam = AdamState::init(params);

    SeedRecord rec;
    rec.seed = seed;
    rec.best_valid = -1.0;

    std::vector<std::size_t> order(sets.train.size());
    std::iota(order.begin(), order.end(), 0);

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        double epoch_loss = 0.0;
        std::size_t steps = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            std::vector<Graph> chunk;
            for (std::size_t i = start; i < std::min(start + cfg.batch_size, order.size()); ++i)
                chunk.push_back(sets.train[order[i]]);
            GraphBatch batch = make_batch(chunk);
            for (auto& p : params) p.zero_grad();
            Tensor loss;
            if (cfg.icon.enabled) {
                IconLossParts parts = icon_step_loss(model, batch, cfg.icon, cfg.id_dim, id_rng,
                                                     cfg.id_dist, true, &dropout_rng);
                loss = parts.total;
            } else {
                loss = rni_step_loss(model, batch, cfg.id_mode, cfg.id_dim, id_rng, cfg.id_dist,
                                     true, &dropout_rng);
            }
            if (!std::isfinite(loss.item())) {
                rec.aborted = true;
                rec.abort_reason = "non-finite loss at epoch " + std::to_string(epoch);
                rec.best_model = clone_model(model);
                return rec;
            }
            loss.backward();
            if (cfg.optimizer == "adam")
                adam_step(params, adam, cfg.lr);
            else
                sgd_step(params, cfg.lr);
            epoch_loss += loss.item();
            ++steps;
        }
        rec.epoch_losses.push_back(epoch_loss / static_cast<double>(steps));

        const bool eval_now = epoch % cfg.eval_every == 0 || epoch == cfg.epochs;
        if (eval_now) {
            double inv_train = -1.0, inv_test = -1.0;
            std::size_t inv_K = 0;
            if (cfg.invariance_every > 0 && epoch % cfg.invariance_every == 0 &&
                cfg.id_mode == IdMode::Rni) {
                std::mt19937_64 inv_rng(eval_seed ^ epoch);
                inv_K = cfg.invariance_K;
                inv_train = invariance_report(model, sets.train, inv_K, cfg.id_dim, inv_rng,
                                              "train", cfg.id_dist)
                                .mean;
                if (!sets.test.empty())
                    inv_test = invariance_report(model, sets.test, inv_K, cfg.id_dim, inv_rng,
                                                 "test", cfg.id_dist)
                                   .mean;
            }
            const double train_acc =
                evaluate(model, sets.train, cfg.id_mode, cfg.id_dim, eval_seed, cfg.id_dist);
            const double valid_acc =
                evaluate(model, sets.valid, cfg.id_mode, cfg.id_dim, eval_seed, cfg.id_dist);
            rec.metrics.push_back({epoch, "train", train_acc, inv_train, inv_K, seed});
            rec.metrics.push_back({epoch, "valid", valid_acc, -1.0, 0, seed});
            if (!sets.test.empty()) {
                const double test_acc =
                    evaluate(model, sets.test, cfg.id_mode, cfg.id_dim, eval_seed, cfg.id_dist);
                rec.metrics.push_back({epoch, "test", test_acc, inv_test, inv_K, seed});
            }
            if (valid_acc > rec.best_valid) {
                rec.best_valid = valid_acc;
                rec.best_model = clone_model(model);
            }
        }
    }
    if (rec.best_valid < 0.0) rec.best_model = clone_model(model);
    if (!sets.test.empty())
        rec.final_test =
            evaluate(rec.best_model, sets.test, cfg.id_mode, cfg.id_dim, eval_seed, cfg.id_dist);
    return rec;
}

inline RunRecord train(const Dataset& ds, const TrainConfig& cfg,
                       const std::optional<Dataset>& test_ds = {}) {
    RunRecord run;
    run.config = cfg.to_json();
    std::vector<double> tests;
    for (auto s : cfg.seeds) {
        run.per_seed.push_back(train_one_seed(ds, cfg, s, test_ds));
        tests.push_back(run.per_seed.back().final_test);
    }
    const double n = static_cast<double>(tests.size());
    run.test_mean = std::accumulate(tests.begin(), tests.end(), 0.0) / n;
    double var = 0.0;
    for (double t : tests) var += (t - run.test_mean) * (t - run.test_mean);
    run.test_std = std::sqrt(var / n);
    return run;
}

// The hyperparameter grid used for model selection.
inline std::vector<TrainConfig> grid_cells(const TrainConfig& base) {
    std::vector<TrainConfig> out;
    for (double lr : {1e-3, 5e-4})
        for (std::size_t batch : {std::size_t{32}, std::size_t{64}})
            for (std::size_t layers : {std::size_t{3}, std::size_t{5}})
                for (std::size_t hidden : {std::size_t{32}, std::size_t{64}}) {
                    TrainConfig c = base;
                    c.lr = lr;
                    c.batch_size = batch;
                    c.num_layers = layers;
                    c.hidden_dim = hidden;
                    out.push_back(c);
                }
    return out;
}

}  // namespace idgnn
