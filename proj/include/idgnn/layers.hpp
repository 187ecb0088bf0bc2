#pragma once

// GraphConv / GIN / GAT message-passing layers, readout heads, and the model
// stack H^(l+1) = layer_l(H^(l); G).

#include <cmath>
#include <fstream>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "idgnn/graph.hpp"
#include "idgnn/node_ids.hpp"
#include "idgnn/tensor.hpp"

namespace idgnn {

enum class LayerKind { GraphConv, GIN, GAT };
enum class PoolKind { Sum, Mean, None };

inline LayerKind layer_kind_from_string(const std::string& s) {
    if (s == "graphconv") return LayerKind::GraphConv;
    if (s == "gin") return LayerKind::GIN;
    if (s == "gat") return LayerKind::GAT;
    throw std::invalid_argument("unknown layer kind: " + s);
}

inline std::string to_string(LayerKind k) {
    switch (k) {
        case LayerKind::GraphConv: return "graphconv";
        case LayerKind::GIN: return "gin";
        case LayerKind::GAT: return "gat";
    }
    return "?";
}

struct LayerConfig {
    LayerKind kind = LayerKind::GraphConv;
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;
    std::size_t gat_heads = 1;      // GAT only; out_dim must divide evenly
    double dropout_rate = 0.1;
    bool apply_activation = true;   // relu on the layer output (GraphConv/GAT)

    void check() const {
        if (in_dim == 0 || out_dim == 0) throw std::invalid_argument("layer dims must be positive");
        if (dropout_rate < 0.0 || dropout_rate >= 1.0)
            throw std::invalid_argument("dropout_rate must lie in [0,1)");
        if (kind == LayerKind::GAT && (gat_heads < 1 || out_dim % gat_heads != 0))
            throw std::invalid_argument("gat_heads must be >= 1 and divide out_dim");
    }
};

inline Tensor glorot_uniform(std::size_t fan_in, std::size_t fan_out, std::mt19937_64& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> uni(-limit, limit);
    std::vector<double> w(fan_in * fan_out);
    for (auto& x : w) x = uni(rng);
    return Tensor({fan_in, fan_out}, std::move(w), true);
}

struct Layer {
    LayerConfig cfg;
    std::vector<Tensor> params;

    static Layer init(const LayerConfig& cfg, std::mt19937_64& rng) {
        cfg.check();
        Layer l;
        l.cfg = cfg;
        switch (cfg.kind) {
            case LayerKind::GraphConv:
                // W1 (self), W2 (neighbors), b
                l.params = {glorot_uniform(cfg.in_dim, cfg.out_dim, rng),
                            glorot_uniform(cfg.in_dim, cfg.out_dim, rng),
                            Tensor::zeros({1, cfg.out_dim}, true)};
                break;
            case LayerKind::GIN:
                // eps, then a 2-layer MLP with hidden = out_dim
                l.params = {Tensor({1, 1}, {0.0}, true),
                            glorot_uniform(cfg.in_dim, cfg.out_dim, rng),
                            Tensor::zeros({1, cfg.out_dim}, true),
                            glorot_uniform(cfg.out_dim, cfg.out_dim, rng),
                            Tensor::zeros({1, cfg.out_dim}, true)};
                break;
            case LayerKind::GAT:
                // per head: W, a_src, a_dst
                for (std::size_t h = 0; h < cfg.gat_heads; ++h) {
                    const std::size_t hd = cfg.out_dim / cfg.gat_heads;
                    l.params.push_back(glorot_uniform(cfg.in_dim, hd, rng));
                    l.params.push_back(glorot_uniform(hd, 1, rng));
                    l.params.push_back(glorot_uniform(hd, 1, rng));
                }
                break;
        }
        return l;
    }

    Tensor forward(const Tensor& h, const std::vector<Edge>& directed_edges,
                   std::size_t num_nodes) const {
        if (h.dim(1) != cfg.in_dim)
            throw DimError("layer input dim " + std::to_string(h.dim(1)) + " != configured " +
                           std::to_string(cfg.in_dim));
        switch (cfg.kind) {
            case LayerKind::GraphConv: {
                Tensor agg = segment_sum(h, directed_edges);
                Tensor out = add(add(matmul(h, params[0]), matmul(agg, params[1])), params[2]);
                return cfg.apply_activation ? relu(out) : out;
            }
            case LayerKind::GIN: {
                const Tensor& eps = params[0];
                Tensor agg = segment_sum(h, directed_edges);
                // (1 + eps) * h_v + sum_u h_u, eps a learnable scalar
                Tensor eps_col = matmul(Tensor::full({num_nodes, 1}, 1.0), eps);
                Tensor mixed = add(add(h, mul(h, eps_col)), agg);
                Tensor hid = relu(add(matmul(mixed, params[1]), params[2]));
                return add(matmul(hid, params[3]), params[4]);
            }
            case LayerKind::GAT:
                return gat_forward(h, directed_edges, num_nodes);
        }
        throw std::logic_error("unreachable");
    }

private:
    Tensor gat_forward(const Tensor& h, const std::vector<Edge>& directed_edges,
                       std::size_t num_nodes) const {
        // attention edges = neighbors plus a self-loop per node
        std::vector<std::size_t> src, dst;
        src.reserve(directed_edges.size() + num_nodes);
        for (auto [u, v] : directed_edges) {
            src.push_back(u);
            dst.push_back(v);
        }
        for (std::size_t v = 0; v < num_nodes; ++v) {
            src.push_back(v);
            dst.push_back(v);
        }
        std::vector<Tensor> heads;
        for (std::size_t head = 0; head < cfg.gat_heads; ++head) {
            const Tensor& W = params[3 * head + 0];
            const Tensor& a_src = params[3 * head + 1];
            const Tensor& a_dst = params[3 * head + 2];
            Tensor wh = matmul(h, W);
            Tensor s_src = matmul(wh, a_src);  // n x 1
            Tensor s_dst = matmul(wh, a_dst);
            Tensor score = leaky_relu(add(gather_rows(s_src, src), gather_rows(s_dst, dst)), 0.2);
            Tensor alpha = softmax_over_segments(score, dst);
            Tensor msgs = mul(gather_rows(wh, src), alpha);
            heads.push_back(sum_pool(msgs, dst, num_nodes));
        }
        Tensor out = heads.size() == 1 ? heads[0] : concat(heads, 1);
        return cfg.apply_activation ? relu(out) : out;
    }
};

struct ReadoutConfig {
    PoolKind pool = PoolKind::Sum;  // None for node tasks
    std::size_t in_dim = 0;
    std::size_t num_classes = 2;
};

struct ModelConfig {
    std::vector<LayerConfig> layers;
    ReadoutConfig readout;

    void check() const {
        if (layers.empty()) throw std::invalid_argument("model needs at least one layer");
        for (std::size_t i = 0; i + 1 < layers.size(); ++i)
            if (layers[i].out_dim != layers[i + 1].in_dim)
                throw std::invalid_argument("layer dims do not chain at layer " +
                                            std::to_string(i + 1));
        if (readout.in_dim != layers.back().out_dim)
            throw std::invalid_argument("readout input dim must equal last layer out_dim");
    }

    // Uniform stack of `num_layers` layers of one kind.
    static ModelConfig uniform(LayerKind kind, std::size_t in_dim, std::size_t hidden,
                               std::size_t num_layers, std::size_t num_classes, PoolKind pool,
                               double dropout_rate = 0.1, std::size_t gat_heads = 1) {
        ModelConfig mc;
        for (std::size_t i = 0; i < num_layers; ++i) {
            LayerConfig lc;
            lc.kind = kind;
            lc.in_dim = i == 0 ? in_dim : hidden;
            lc.out_dim = hidden;
            lc.gat_heads = kind == LayerKind::GAT ? gat_heads : 1;
            lc.dropout_rate = dropout_rate;
            mc.layers.push_back(lc);
        }
        mc.readout = {pool, hidden, num_classes};
        return mc;
    }
};

struct ModelOutput {
    Tensor h_final;  // pre-readout node embeddings H^(L)
    Tensor logits;   // per-graph (pooled) or per-node
};

class Model {
public:
    Model() = default;

    static Model init(const ModelConfig& cfg, std::mt19937_64& rng) {
        cfg.check();
        Model m;
        m.cfg_ = cfg;
        for (const auto& lc : cfg.layers) m.layers_.push_back(Layer::init(lc, rng));
        m.readout_w_ = glorot_uniform(cfg.readout.in_dim, cfg.readout.num_classes, rng);
        m.readout_b_ = Tensor::zeros({1, cfg.readout.num_classes}, true);
        return m;
    }

    const ModelConfig& config() const { return cfg_; }

    std::vector<Tensor> parameters() const {
        std::vector<Tensor> out;
        for (const auto& l : layers_) out.insert(out.end(), l.params.begin(), l.params.end());
        out.push_back(readout_w_);
        out.push_back(readout_b_);
        return out;
    }

    ModelOutput forward(const GraphBatch& batch, const std::optional<IdAssignment>& ids,
                        IdMode id_mode, bool train = false,
                        std::mt19937_64* dropout_rng = nullptr) const {
        Tensor h = assemble_input(batch.features, ids, id_mode, batch.num_nodes);
        if (h.dim(1) != cfg_.layers.front().in_dim)
            throw DimError("assembled input dim " + std::to_string(h.dim(1)) +
                           " != model input dim " + std::to_string(cfg_.layers.front().in_dim));
        const auto directed = batch.directed_edges();
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            h = layers_[i].forward(h, directed, batch.num_nodes);
            const bool last = i + 1 == layers_.size();
            if (!last && train && dropout_rng && layers_[i].cfg.dropout_rate > 0.0)
                h = dropout(h, layers_[i].cfg.dropout_rate, true, *dropout_rng);
        }
        Tensor pooled = h;
        switch (cfg_.readout.pool) {
            case PoolKind::Sum: pooled = sum_pool(h, batch.membership, batch.num_graphs); break;
            case PoolKind::Mean: pooled = mean_pool(h, batch.membership, batch.num_graphs); break;
            case PoolKind::None: break;
        }
        Tensor logits = add(matmul(pooled, readout_w_), readout_b_);
        return {h, logits};
    }

    // ---- checkpoint (versioned JSON) ---------------------------------------
    static constexpr const char* kMagic = "idgnn-checkpoint-v1";

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["magic"] = kMagic;
        j["layers"] = nlohmann::json::array();
        for (const auto& l : layers_) {
            nlohmann::json lj;
            lj["kind"] = to_string(l.cfg.kind);
            lj["in_dim"] = l.cfg.in_dim;
            lj["out_dim"] = l.cfg.out_dim;
            lj["gat_heads"] = l.cfg.gat_heads;
            lj["dropout_rate"] = l.cfg.dropout_rate;
            lj["params"] = nlohmann::json::array();
            for (const auto& p : l.params) {
                lj["params"].push_back({{"shape", p.shape()}, {"data", p.data()}});
            }
            j["layers"].push_back(std::move(lj));
        }
        j["readout"] = {{"pool", cfg_.readout.pool == PoolKind::Sum
                                     ? "sum"
                                     : (cfg_.readout.pool == PoolKind::Mean ? "mean" : "none")},
                        {"in_dim", cfg_.readout.in_dim},
                        {"num_classes", cfg_.readout.num_classes},
                        {"w", {{"shape", readout_w_.shape()}, {"data", readout_w_.data()}}},
                        {"b", {{"shape", readout_b_.shape()}, {"data", readout_b_.data()}}}};
    return j;
    }

    static Model from_json(const nlohmann::json& j) {
        if (!j.contains("magic") || j.at("magic") != kMagic)
            throw ParseError("not an idgnn checkpoint (bad magic)");
        Model m;
        auto load_tensor = [](const nlohmann::json& tj) {
            return Tensor(tj.at("shape").get<Shape>(), tj.at("data").get<std::vector<double>>(),
                          true);
        };
        for (const auto& lj : j.at("layers")) {
            Layer l;
            l.cfg.kind = layer_kind_from_string(lj.at("kind"));
            l.cfg.in_dim = lj.at("in_dim");
            l.cfg.out_dim = lj.at("out_dim");
            l.cfg.gat_heads = lj.at("gat_heads");
            l.cfg.dropout_rate = lj.at("dropout_rate");
            for (const auto& pj : lj.at("params")) l.params.push_back(load_tensor(pj));
            m.layers_.push_back(std::move(l));
            m.cfg_.layers.push_back(m.layers_.back().cfg);
        }
        const auto& rj = j.at("readout");
        const std::string pool = rj.at("pool");
        m.cfg_.readout.pool = pool == "sum" ? PoolKind::Sum
                                            : (pool == "mean" ? PoolKind::Mean : PoolKind::None);
        m.cfg_.readout.in_dim = rj.at("in_dim");
        m.cfg_.readout.num_classes = rj.at("num_classes");
        m.readout_w_ = load_tensor(rj.at("w"));
        m.readout_b_ = load_tensor(rj.at("b"));
        return m;
    }

    void save(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw ParseError("cannot open " + path + " for writing");
        out << to_json().dump() << '\n';
    }

    static Model load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ParseError("cannot open " + path);
        nlohmann::json j;
        in >> j;
        return from_json(j);
    }

private:
    ModelConfig cfg_;
    std::vector<Layer> layers_;
    Tensor readout_w_, readout_b_;
};

}  // namespace idgnn
