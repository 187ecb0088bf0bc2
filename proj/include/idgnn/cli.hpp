#pragma once

// Command-line entry point: dataset generation, training, invariance
// evaluation, construction verification, and curve export.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "idgnn/constructive.hpp"
#include "idgnn/graph.hpp"
#include "idgnn/invariance.hpp"
#include "idgnn/svg.hpp"
#include "idgnn/synthetic.hpp"
#include "idgnn/train.hpp"

namespace idgnn::cli {

namespace fs = std::filesystem;

inline std::uint64_t fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::uint64_t h = 1469598103934665603ull;
    char c;
    while (in.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

struct Provenance {
    fs::path out_dir;
    nlohmann::json doc;

    void start(const std::string& command, const nlohmann::json& config) {
        doc["command"] = command;
        doc["config"] = config;
        doc["status"] = "running";
        write();
    }
    void finish(const std::vector<std::string>& artifacts) {
        doc["status"] = "done";
        doc["artifacts"] = nlohmann::json::object();
        for (const auto& a : artifacts) {
            std::ostringstream hex;
            hex << std::hex << fnv1a_file((out_dir / a).string());
            doc["artifacts"][a] = hex.str();
        }
        write();
    }
    void write() const {
        std::ofstream out(out_dir / "provenance.json");
        out << doc.dump(2) << '\n';
    }
};

inline std::uint64_t effective_seed(std::uint64_t flag_seed) {
    if (const char* env = std::getenv("IDGNN_SEED")) return std::strtoull(env, nullptr, 10);
    return flag_seed;
}

// ---- subcommand bodies -----------------------------------------------------

inline int cmd_gen_istriangle(const IsTriangleConfig& cfg, const std::string& out) {
    fs::create_directories(out);
    Provenance prov{out, {}};
    prov.start("gen-istriangle",
               {{"num_graphs", cfg.num_graphs},
                {"nodes", cfg.nodes},
                {"m_train", cfg.m_train},
                {"m_extrap", cfg.m_extrap},
                {"labeled_per_split", cfg.labeled_per_split},
                {"seed", cfg.seed}});
    IsTriangleDatasets ds = build_istriangle_dataset(cfg);
    save_jsonl(ds.train, (fs::path(out) / "train.jsonl").string());
    save_split(ds.train, (fs::path(out) / "split.json").string());
    save_jsonl(ds.interp, (fs::path(out) / "interp.jsonl").string());
    save_jsonl(ds.extrap, (fs::path(out) / "extrap.jsonl").string());
    prov.finish({"train.jsonl", "split.json", "interp.jsonl", "extrap.jsonl"});
    std::cout << "wrote " << cfg.num_graphs << " graphs per split to " << out << "\n";
    return 0;
}

inline int cmd_gen_wlhard(const WlHardConfig& cfg, const std::string& out) {
    fs::create_directories(out);
    Provenance prov{out, {}};
    prov.start("gen-wlhard", {{"num_pairs", cfg.num_pairs},
                              {"sizes", cfg.sizes},
                              {"valid_fraction", cfg.valid_fraction},
                              {"test_fraction", cfg.test_fraction},
                              {"seed", cfg.seed}});
    Dataset ds = build_wlhard_pairs(cfg);
    save_jsonl(ds, (fs::path(out) / "pairs.jsonl").string());
    save_split(ds, (fs::path(out) / "split.json").string());
    prov.finish({"pairs.jsonl", "split.json"});
    std::cout << "wrote " << ds.graphs.size() << " graphs to " << out << "\n";
    return 0;
}

struct TrainCliOptions {
    std::string config_path;
    std::string data_dir;
    std::string task = "istriangle";  // istriangle | wlhard
    std::string out = "run";
};

inline int cmd_train(const TrainCliOptions& opt) {
    std::ifstream cf(opt.config_path);
    if (!cf) throw ParseError("cannot open config " + opt.config_path);
    nlohmann::json cj;
    cf >> cj;
    TrainConfig cfg = TrainConfig::from_json(cj);
    cfg.check();
    fs::create_directories(opt.out);
    Provenance prov{opt.out, {}};
    prov.start("train", cfg.to_json());

    Dataset train_ds;
    std::optional<Dataset> test_ds;
    std::optional<Dataset> extrap_ds;
    if (opt.task == "istriangle") {
        train_ds = load_jsonl((fs::path(opt.data_dir) / "train.jsonl").string(),
                              TaskKind::NodeClassification, 2);
        load_split(train_ds, (fs::path(opt.data_dir) / "split.json").string());
        Dataset interp = load_jsonl((fs::path(opt.data_dir) / "interp.jsonl").string(),
                                    TaskKind::NodeClassification, 2);
        interp.test.resize(interp.graphs.size());
        std::iota(interp.test.begin(), interp.test.end(), 0);
        test_ds = std::move(interp);
        if (fs::exists(fs::path(opt.data_dir) / "extrap.jsonl")) {
            Dataset ex = load_jsonl((fs::path(opt.data_dir) / "extrap.jsonl").string(),
                                    TaskKind::NodeClassification, 2);
            ex.test.resize(ex.graphs.size());
            std::iota(ex.test.begin(), ex.test.end(), 0);
            extrap_ds = std::move(ex);
        }
    } else if (opt.task == "wlhard") {
        train_ds = load_jsonl((fs::path(opt.data_dir) / "pairs.jsonl").string(),
                              TaskKind::GraphClassification, 2);
        load_split(train_ds, (fs::path(opt.data_dir) / "split.json").string());
    } else {
        throw std::invalid_argument("unknown task: " + opt.task);
    }
    train_ds.validate();

    RunRecord run = train(train_ds, cfg, test_ds);
    std::vector<MetricsRow> all_rows;
    for (const auto& rec : run.per_seed)
        all_rows.insert(all_rows.end(), rec.metrics.begin(), rec.metrics.end());
    write_metrics_csv(all_rows, (fs::path(opt.out) / "metrics.csv").string());
    run.per_seed.front().best_model.save((fs::path(opt.out) / "checkpoint.json").string());

    nlohmann::json results;
    results["test_mean"] = run.test_mean;
    results["test_std"] = run.test_std;
    for (const auto& rec : run.per_seed) {
        nlohmann::json rj = {{"seed", rec.seed},
                             {"best_valid", rec.best_valid},
                             {"final_test", rec.final_test},
                             {"aborted", rec.aborted}};
        if (extrap_ds) {
            const std::uint64_t eval_seed = rec.seed ^ 0x27d4eb2f165667c5ull;
            rj["final_extrap"] = evaluate(rec.best_model, extrap_ds->graphs, cfg.id_mode,
                                          cfg.id_dim, eval_seed, cfg.id_dist);
        }
        results["seeds"].push_back(std::move(rj));
    }
    {
        std::ofstream out(fs::path(opt.out) / "results.json");
        out << results.dump(2) << '\n';
    }
    prov.finish({"metrics.csv", "checkpoint.json", "results.json"});
    std::cout << "test accuracy " << run.test_mean << " +/- " << run.test_std << "\n";
    return 0;
}

struct EvalInvarianceOptions {
    std::string checkpoint;
    std::string data;
    std::string task = "istriangle";
    std::size_t K = 200;
    std::size_t id_dim = 16;
    std::uint64_t seed = 1;
    std::string out = "invariance";
};

inline int cmd_eval_invariance(const EvalInvarianceOptions& opt) {
    Model model = Model::load(opt.checkpoint);
    Dataset ds = load_jsonl(opt.data,
                            opt.task == "wlhard" ? TaskKind::GraphClassification
                                                 : TaskKind::NodeClassification,
                            2);
    fs::create_directories(opt.out);
    Provenance prov{opt.out, {}};
    prov.start("eval-invariance", {{"checkpoint", opt.checkpoint},
                                   {"data", opt.data},
                                   {"K", opt.K},
                                   {"id_dim", opt.id_dim},
                                   {"seed", opt.seed}});
    std::mt19937_64 rng(effective_seed(opt.seed));
    InvarianceReport rep = invariance_report(model, ds.graphs, opt.K, opt.id_dim, rng, "eval");
    std::vector<MetricsRow> rows;
    for (std::size_t i = 0; i < rep.per_example.size(); ++i)
        rows.push_back({i, "eval", 0.0, rep.per_example[i], opt.K, effective_seed(opt.seed)});
    write_metrics_csv(rows, (fs::path(opt.out) / "invariance.csv").string());
    prov.finish({"invariance.csv"});
    std::cout << "mean invariance ratio " << rep.mean << " (K=" << opt.K << ")\n";
    return 0;
}

inline int cmd_verify_theorem3(std::size_t num_graphs, std::uint64_t seed,
                               std::size_t resamples) {
    std::mt19937_64 rng(effective_seed(seed));
    std::size_t agree = 0;
    bool invariant = true;
    for (std::size_t t = 0; t < num_graphs; ++t) {
        std::uniform_int_distribution<std::size_t> nn(4, 50);
        Graph g = generate_ba({nn(rng), 2, rng()});
        auto expect = label_triangles(g);
        IdAssignment first = sample_ids(g.num_nodes, 1, rng);
        auto base = triangle_net(g, first).output;
        bool ok = base == expect;
        for (std::size_t r = 0; ok && r + 1 < resamples; ++r) {
            IdAssignment ids = sample_ids(g.num_nodes, 1, rng);
            if (triangle_net(g, ids).output != base) {
                invariant = false;
                break;
            }
        }
        agree += ok;
    }
    std::cout << agree << "/" << num_graphs << " agree; "
              << (invariant ? "invariant" : "NOT invariant") << " under " << resamples
              << " resamples\n";
    return (agree == num_graphs && invariant) ? 0 : 1;
}

inline int cmd_verify_wl(const std::string& pairs_path) {
    Dataset ds = load_jsonl(pairs_path, TaskKind::GraphClassification, 2);
    if (ds.graphs.size() % 2 != 0) throw ValidationError("pair file must hold an even count");
    std::size_t ok = 0;
    for (std::size_t p = 0; p < ds.graphs.size(); p += 2)
        ok += !wl_distinguishable(ds.graphs[p], ds.graphs[p + 1]);
    std::cout << ok << "/" << ds.graphs.size() / 2 << " pairs 1-WL-indistinguishable\n";
    return ok == ds.graphs.size() / 2 ? 0 : 1;
}

inline int cmd_export_curves(const std::vector<std::string>& metrics_csvs,
                             const std::string& out) {
    fs::create_directories(out);
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b"};
    std::vector<Series> acc_series, inv_series;
    std::size_t color = 0;
    std::ostringstream summary;
    summary << "file,split,final_task_metric,final_invariance_ratio\n";
    for (const auto& path : metrics_csvs) {
        auto rows = read_metrics_csv(path);
        std::map<std::string, Series> acc_by_split, inv_by_split;
        for (const auto& r : rows) {
            const std::string label = fs::path(path).stem().string() + ":" + r.split;
            acc_by_split[r.split].label = label;
            acc_by_split[r.split].points.emplace_back(static_cast<double>(r.epoch),
                                                      r.task_metric);
            if (r.invariance_ratio >= 0.0) {
                inv_by_split[r.split].label = label;
                inv_by_split[r.split].points.emplace_back(static_cast<double>(r.epoch),
                                                          r.invariance_ratio);
            }
        }
        for (auto& [split, s] : acc_by_split) {
            s.color = palette[color % 6];
            summary << fs::path(path).filename().string() << ',' << split << ','
                    << s.points.back().second << ',';
            auto it = inv_by_split.find(split);
            summary << (it != inv_by_split.end() ? std::to_string(it->second.points.back().second)
                                                 : std::string("n/a"))
                    << '\n';
            acc_series.push_back(std::move(s));
            ++color;
        }
        for (auto& [split, s] : inv_by_split) {
            s.color = palette[color % 6];
            inv_series.push_back(std::move(s));
            ++color;
        }
    }
    if (acc_series.empty()) {
        std::cerr << "warning: no data points in input CSVs; nothing plotted\n";
    } else {
        SvgPlotOptions opt;
        opt.title = "task metric vs epoch";
        opt.y_label = "accuracy";
        write_svg_plot(acc_series, opt, (fs::path(out) / "task_metric.svg").string());
        if (!inv_series.empty()) {
            SvgPlotOptions iopt;
            iopt.title = "invariance ratio vs epoch";
            iopt.y_label = "invariance ratio";
            write_svg_plot(inv_series, iopt, (fs::path(out) / "invariance.svg").string());
        }
    }
    std::ofstream sf(fs::path(out) / "summary.csv");
    sf << summary.str();
    return 0;
}

// ---- argv wiring -----------------------------------------------------------

inline int run(int argc, const char* const* argv) {
    CLI::App app{"random-node-identifier GNN toolkit"};
    app.require_subcommand(1);

    IsTriangleConfig it_cfg;
    std::string it_out = "data/istriangle";
    auto* gen_it = app.add_subcommand("gen-istriangle",
                                      "generate the isInTriangle BA datasets");
    gen_it->add_option("--graphs", it_cfg.num_graphs, "graphs per split");
    gen_it->add_option("--nodes", it_cfg.nodes, "nodes per graph");
    gen_it->add_option("--m-train", it_cfg.m_train, "BA attachment count for train/interp");
    gen_it->add_option("--m-extrap", it_cfg.m_extrap, "BA attachment count for extrapolation");
    gen_it->add_option("--labeled", it_cfg.labeled_per_split, "labeled-node budget per split");
    gen_it->add_option("--seed", it_cfg.seed, "generator seed");
    gen_it->add_option("--out", it_out, "output directory");

    WlHardConfig wl_cfg;
    std::string wl_out = "data/wlhard";
    std::vector<std::size_t> wl_sizes;
    auto* gen_wl = app.add_subcommand("gen-wlhard",
                                      "generate 1-WL-indistinguishable cycle pairs");
    gen_wl->add_option("--pairs", wl_cfg.num_pairs, "number of pairs");
    gen_wl->add_option("--sizes", wl_sizes, "even cycle sizes >= 6 (space separated)");
    gen_wl->add_option("--seed", wl_cfg.seed, "generator seed");
    gen_wl->add_option("--out", wl_out, "output directory");

    TrainCliOptions tr;
    auto* train_cmd = app.add_subcommand("train", "train a model from a JSON config");
    train_cmd->add_option("--config", tr.config_path, "TrainConfig JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    train_cmd->add_option("--data", tr.data_dir, "dataset directory")->required();
    train_cmd->add_option("--task", tr.task, "istriangle | wlhard");
    train_cmd->add_option("--out", tr.out, "output directory");

    EvalInvarianceOptions ev;
    auto* eval_cmd = app.add_subcommand("eval-invariance",
                                        "Monte-Carlo invariance ratio of a checkpoint");
    eval_cmd->add_option("--checkpoint", ev.checkpoint, "model checkpoint")->required();
    eval_cmd->add_option("--data", ev.data, "JSONL dataset")->required();
    eval_cmd->add_option("--task", ev.task, "istriangle | wlhard");
    eval_cmd->add_option("--K", ev.K, "resample count");
    eval_cmd->add_option("--id-dim", ev.id_dim, "ID dimension");
    eval_cmd->add_option("--seed", ev.seed, "RNG seed");
    eval_cmd->add_option("--out", ev.out, "output directory");

    std::size_t t3_graphs = 100, t3_resamples = 50;
    std::uint64_t t3_seed = 3;
    auto* t3_cmd = app.add_subcommand("verify-theorem3",
                                      "check the 3-layer ID-matching triangle detector");
    t3_cmd->add_option("--graphs", t3_graphs, "number of random BA graphs");
    t3_cmd->add_option("--seed", t3_seed, "RNG seed");
    t3_cmd->add_option("--resamples", t3_resamples, "ID resamples per graph");

    std::string wl_pairs_path;
    auto* vwl_cmd = app.add_subcommand("verify-wl",
                                       "re-check 1-WL indistinguishability of a pair file");
    vwl_cmd->add_option("--pairs", wl_pairs_path, "pairs JSONL")->required();

    std::vector<std::string> curve_inputs;
    std::string curve_out = "curves";
    auto* exp_cmd = app.add_subcommand("export-curves", "render metric CSVs as SVG plots");
    exp_cmd->add_option("--metrics", curve_inputs, "metrics CSV files")->required();
    exp_cmd->add_option("--out", curve_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage problems exit 2
    }

    try {
        if (gen_it->parsed()) {
            it_cfg.seed = effective_seed(it_cfg.seed);
            return cmd_gen_istriangle(it_cfg, it_out);
        }
        if (gen_wl->parsed()) {
            if (!wl_sizes.empty()) wl_cfg.sizes = wl_sizes;
            wl_cfg.seed = effective_seed(wl_cfg.seed);
            return cmd_gen_wlhard(wl_cfg, wl_out);
        }
        if (train_cmd->parsed()) return cmd_train(tr);
        if (eval_cmd->parsed()) return cmd_eval_invariance(ev);
        if (t3_cmd->parsed()) return cmd_verify_theorem3(t3_graphs, t3_seed, t3_resamples);
        if (vwl_cmd->parsed()) return cmd_verify_wl(wl_pairs_path);
        if (exp_cmd->parsed()) return cmd_export_curves(curve_inputs, curve_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace idgnn::cli
