#include <doctest.h>

#include <random>

#include "gradcheck.hpp"
#include "idgnn/icon.hpp"
#include "idgnn/synthetic.hpp"

using namespace idgnn;
using idgnn::testing::gradcheck;

namespace {

Dataset tiny_node_dataset(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Dataset ds;
    ds.task_kind = TaskKind::NodeClassification;
    ds.num_classes = 2;
    for (int i = 0; i < 3; ++i) {
        Graph g = generate_ba({8, 2, rng()});
        g.node_labels = label_triangles(g);
        ds.graphs.push_back(std::move(g));
    }
    return ds;
}

// zero out the first-layer weight rows that read the ID columns
void blind_to_ids(Model& model, std::size_t feat_dim, std::size_t id_dim) {
    auto params = model.parameters();
    // first-layer weights have in_dim = feat_dim + id_dim rows
    for (auto& p : params) {
        if (p.shape().size() == 2 && p.dim(0) == feat_dim + id_dim) {
            auto& d = p.mutable_data();
            const std::size_t cols = p.dim(1);
            for (std::size_t r = feat_dim; r < feat_dim + id_dim; ++r)
                for (std::size_t c = 0; c < cols; ++c) d[r * cols + c] = 0.0;
        }
    }
}

}  // namespace

TEST_CASE("ID-blind model has exactly zero regularizer") {
    std::mt19937_64 rng(1);
    Dataset ds = tiny_node_dataset(4);
    const std::size_t id_dim = 3;
    ModelConfig mc =
        ModelConfig::uniform(LayerKind::GraphConv, 1 + id_dim, 4, 2, 2, PoolKind::None, 0.0);
    Model model = Model::init(mc, rng);
    blind_to_ids(model, 1, id_dim);
    GraphBatch batch = make_batch(ds.graphs);
    std::mt19937_64 id_rng(9);
    IconLossParts parts = icon_step_loss(model, batch, {true, 1.0, TaskLossSource::First},
                                         id_dim, id_rng, IdDist::Uniform, false);
    CHECK(parts.reg == 0.0);
}

TEST_CASE("closed-form oracle: 1-layer linear model reading only ID columns") {
    // edgeless 2-node graph, feature column zeroed by W, identity on IDs:
    // L_reg = ||(I1 - I2) w||^2 for the first-layer weight w on the ID column.
    Graph g;
    g.num_nodes = 2;
    g.node_labels = std::vector<long>{0, 1};
    GraphBatch batch = make_batch({g});
    std::mt19937_64 rng(2);
    ModelConfig mc = ModelConfig::uniform(LayerKind::GraphConv, 2, 2, 1, 2, PoolKind::None, 0.0);
    mc.layers[0].apply_activation = false;
    Model model = Model::init(mc, rng);
    auto params = model.parameters();
    // W1 = [[0,0],[w0,w1]] so output = I * [w0,w1]; W2 irrelevant (no edges); b = 0
    const double w0 = 0.7, w1 = -0.3;
    params[0].mutable_data() = {0, 0, w0, w1};
    params[2].mutable_data() = {0, 0};

    const std::uint64_t seed = 1234;
    std::mt19937_64 id_rng(seed);
    IdAssignment i1 = sample_ids(2, 1, id_rng);
    IdAssignment i2 = sample_ids(2, 1, id_rng);
    std::mt19937_64 id_rng2(seed);
    IconLossParts parts = icon_step_loss(model, batch, {true, 1.0, TaskLossSource::First}, 1,
                                         id_rng2, IdDist::Uniform, false);
    double expect = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
        const double d = i1.values.data()[i] - i2.values.data()[i];
        expect += d * d * (w0 * w0 + w1 * w1);
    }
    CHECK(parts.reg == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("regularizer is symmetric and non-negative") {
    std::mt19937_64 rng(3);
    Dataset ds = tiny_node_dataset(5);
    ModelConfig mc = ModelConfig::uniform(LayerKind::GIN, 1 + 2, 4, 2, 2, PoolKind::None, 0.0);
    Model model = Model::init(mc, rng);
    GraphBatch batch = make_batch(ds.graphs);
    for (int t = 0; t < 5; ++t) {
        std::mt19937_64 a(100 + t);
        IconLossParts p = icon_step_loss(model, batch, {true, 1.0, TaskLossSource::First}, 2, a,
                                         IdDist::Uniform, false);
        CHECK(p.reg >= 0.0);
    }
}

TEST_CASE("icon gradient passes finite-difference check through both forwards") {
    std::mt19937_64 rng(6);
    Dataset ds = tiny_node_dataset(7);
    ModelConfig mc = ModelConfig::uniform(LayerKind::GraphConv, 3, 3, 2, 2, PoolKind::None, 0.0);
    Model model = Model::init(mc, rng);
    GraphBatch batch = make_batch(ds.graphs);
    std::vector<Tensor> leaves = model.parameters();
    const std::uint64_t seed = 55;
    auto forward = [&] {
        std::mt19937_64 id_rng(seed);  // same ID draws every call
        IconLossParts p = icon_step_loss(model, batch, {true, 0.5, TaskLossSource::Average}, 2,
                                         id_rng, IdDist::Uniform, false);
        return p.total;
    };
    auto res = gradcheck(forward, leaves);
    CHECK(res.ok);
}

TEST_CASE("lambda=0 with first-source matches rni loss under the same ID seed") {
    std::mt19937_64 rng(8);
    Dataset ds = tiny_node_dataset(9);
    ModelConfig mc = ModelConfig::uniform(LayerKind::GraphConv, 3, 4, 2, 2, PoolKind::None, 0.0);
    Model model = Model::init(mc, rng);
    GraphBatch batch = make_batch(ds.graphs);
    std::mt19937_64 a(77), b(77);
    IconLossParts icon = icon_step_loss(model, batch, {true, 0.0, TaskLossSource::First}, 2, a,
                                        IdDist::Uniform, false);
    Tensor rni = rni_step_loss(model, batch, IdMode::Rni, 2, b, IdDist::Uniform, false);
    CHECK(icon.task == doctest::Approx(rni.item()).epsilon(1e-15));
    CHECK(icon.total.item() == doctest::Approx(rni.item()).epsilon(1e-15));
}

TEST_CASE("rni loss is deterministic given the seed") {
    std::mt19937_64 rng(10);
    Dataset ds = tiny_node_dataset(11);
    ModelConfig mc = ModelConfig::uniform(LayerKind::GIN, 4, 4, 2, 2, PoolKind::None, 0.0);
    Model model = Model::init(mc, rng);
    GraphBatch batch = make_batch(ds.graphs);
    std::mt19937_64 a(5), b(5);
    Tensor l1 = rni_step_loss(model, batch, IdMode::Rni, 3, a, IdDist::Uniform, false);
    Tensor l2 = rni_step_loss(model, batch, IdMode::Rni, 3, b, IdDist::Uniform, false);
    CHECK(l1.item() == l2.item());
}

TEST_CASE("uniform-logit model on an all-same-label batch gives ln(num_classes)") {
    Graph g;
    g.num_nodes = 3;
    g.node_labels = std::vector<long>{1, 1, 1};
    GraphBatch batch = make_batch({g});
    std::mt19937_64 rng(1);
    ModelConfig mc = ModelConfig::uniform(LayerKind::GraphConv, 1, 2, 1, 2, PoolKind::None, 0.0);
    Model model = Model::init(mc, rng);
    for (auto& p : model.parameters()) p.mutable_data().assign(p.numel(), 0.0);
    std::mt19937_64 id_rng(2);
    Tensor loss = rni_step_loss(model, batch, IdMode::None, 0, id_rng, IdDist::Uniform, false);
    CHECK(loss.item() == doctest::Approx(std::log(2.0)));
}

TEST_CASE("disabled icon config is a contract violation") {
    std::mt19937_64 rng(1);
    Dataset ds = tiny_node_dataset(2);
    ModelConfig mc = ModelConfig::uniform(LayerKind::GraphConv, 3, 2, 1, 2, PoolKind::None, 0.0);
    Model model = Model::init(mc, rng);
    GraphBatch batch = make_batch(ds.graphs);
    std::mt19937_64 id_rng(1);
    CHECK_THROWS_AS(icon_step_loss(model, batch, {false, 1.0, TaskLossSource::First}, 2, id_rng),
                    std::logic_error);
}
