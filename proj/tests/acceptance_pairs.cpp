// Acceptance on the 1-WL-indistinguishable cycle-pair task: the constant-
// feature ceiling, the accuracy gained from random IDs, and the convergence
// speedup from the consistency regularizer.

#include <algorithm>
#include <cstdio>
#include <random>
#include <sstream>

#include "idgnn/icon.hpp"
#include "idgnn/synthetic.hpp"
#include "idgnn/train.hpp"

using namespace idgnn;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
    std::printf("criterion %d (%s): %s  [%s]\n", id, name.c_str(), ok ? "PASS" : "FAIL",
                detail.c_str());
    if (!ok) ++failures;
}

// First epoch whose test accuracy reaches `threshold` and holds it for the
// next `window` consecutive evaluations; epochs+1 when never sustained. A
// fixed window rather than "until the end" keeps the statistic stable under
// single-draw evaluation noise.
std::size_t first_sustained_epoch(const SeedRecord& rec, double threshold, std::size_t window,
                                  std::size_t epochs) {
    std::vector<std::pair<std::size_t, double>> test_curve;
    for (const auto& row : rec.metrics)
        if (row.split == "test") test_curve.emplace_back(row.epoch, row.task_metric);
    for (std::size_t i = 0; i + window <= test_curve.size(); ++i) {
        bool held = true;
        for (std::size_t j = i; j < i + window; ++j)
            held = held && test_curve[j].second >= threshold;
        if (held) return test_curve[i].first;
    }
    return epochs + 1;
}

double median3(std::vector<std::size_t> v) {
    std::sort(v.begin(), v.end());
    return static_cast<double>(v[v.size() / 2]);
}

}  // namespace

int main() {
    WlHardConfig gen_cfg;
    gen_cfg.num_pairs = 100;
    gen_cfg.sizes = {6};
    gen_cfg.seed = 21;
    Dataset ds = build_wlhard_pairs(gen_cfg);

    // (3a) with constant inputs, sum-pooled embeddings of each pair coincide
    std::mt19937_64 mrng(31);
    ModelConfig mc =
        ModelConfig::uniform(LayerKind::GIN, assembled_dim(0, IdMode::Constant, 0), 64, 3, 2,
                             PoolKind::Sum, 0.0);
    Model probe = Model::init(mc, mrng);
    double max_gap = 0.0;
    for (std::size_t p = 0; p < ds.graphs.size(); p += 2) {
        Tensor pooled[2];
        for (int side = 0; side < 2; ++side) {
            GraphBatch b = make_batch({ds.graphs[p + side]});
            ModelOutput out = probe.forward(b, std::nullopt, IdMode::Constant);
            pooled[side] = sum_pool(out.h_final, b.membership, 1);
        }
        for (std::size_t c = 0; c < pooled[0].numel(); ++c)
            max_gap = std::max(max_gap,
                               std::abs(pooled[0].data()[c] - pooled[1].data()[c]));
    }
    const bool ceiling_embed_ok = max_gap < 1e-6;

    TrainConfig base;
    base.layer_kind = LayerKind::GIN;
    base.epochs = 1000;
    base.eval_every = 10;
    base.batch_size = 32;
    base.num_layers = 3;
    base.hidden_dim = 64;
    base.dropout_rate = 0.0;
    base.id_dim = 2;
    base.seeds = {1, 2, 3};

    // (3b) constant features stay at chance (500 epochs suffice to show it)
    TrainConfig const_cfg = base;
    const_cfg.id_mode = IdMode::Constant;
    const_cfg.epochs = 500;
    RunRecord const_run = train(ds, const_cfg);

    // (3c) random IDs and the regularized variant break the ceiling
    TrainConfig rni_cfg = base;
    rni_cfg.id_mode = IdMode::Rni;
    RunRecord rni_run = train(ds, rni_cfg);

    TrainConfig icon_cfg = rni_cfg;
    icon_cfg.icon = {true, 0.03, TaskLossSource::Average};
    RunRecord icon_run = train(ds, icon_cfg);

    const bool ceiling_train_ok = const_run.test_mean <= 0.55;
    const bool rni_ok = rni_run.test_mean >= 0.95;
    const bool icon_ok = icon_run.test_mean >= 0.95;
    {
        std::ostringstream d;
        d.precision(4);
        d << "pair embedding gap " << max_gap << "; const acc " << const_run.test_mean
          << " (<=0.55), rni acc " << rni_run.test_mean << " (>=0.95), reg acc "
          << icon_run.test_mean << " (>=0.95)";
        report(3, "constant-feature ceiling vs random IDs",
               ceiling_embed_ok && ceiling_train_ok && rni_ok && icon_ok, d.str());
    }

    // (4) the regularizer reaches sustained 95% test accuracy sooner
    const std::size_t window = 5;
    std::vector<std::size_t> rni_epochs, icon_epochs;
    for (const auto& rec : rni_run.per_seed)
        rni_epochs.push_back(first_sustained_epoch(rec, 0.95, window, base.epochs));
    for (const auto& rec : icon_run.per_seed)
        icon_epochs.push_back(first_sustained_epoch(rec, 0.95, window, base.epochs));
    const double rni_med = median3(rni_epochs);
    const double icon_med = median3(icon_epochs);
    {
        std::ostringstream d;
        d << "median sustained-95% epoch (window of " << window << " evals): regularized "
          << icon_med << " vs plain-ID " << rni_med;
        report(4, "faster convergence with the regularizer", icon_med < rni_med, d.str());
    }
    return failures == 0 ? 0 : 1;
}
