#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include "idgnn/cli.hpp"

using namespace idgnn;
namespace fs = std::filesystem;

namespace {

int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "idgnn");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    return cli::run(static_cast<int>(argv.size()), argv.data());
}

fs::path tmp_dir(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("idgnn_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("missing or unknown subcommand exits 2") {
    CHECK(run_cli({}) == 2);
    CHECK(run_cli({"frobnicate"}) == 2);
}

TEST_CASE("train with a missing config file exits 2") {
    CHECK(run_cli({"train", "--config", "/nonexistent/cfg.json", "--data", "x"}) == 2);
}

TEST_CASE("gen-istriangle writes loadable splits and a finished provenance record") {
    fs::path out = tmp_dir("gen_it");
    CHECK(run_cli({"gen-istriangle", "--graphs", "4", "--nodes", "20", "--labeled", "30",
                   "--seed", "5", "--out", out.string()}) == 0);
    for (const char* f : {"train.jsonl", "split.json", "interp.jsonl", "extrap.jsonl",
                          "provenance.json"})
        CHECK(fs::exists(out / f));
    Dataset ds = load_jsonl((out / "train.jsonl").string(), TaskKind::NodeClassification, 2);
    load_split(ds, (out / "split.json").string());
    ds.validate();
    CHECK(ds.graphs.size() == 4);
    nlohmann::json prov;
    std::ifstream(out / "provenance.json") >> prov;
    CHECK(prov["status"] == "done");
    CHECK(prov["artifacts"].size() == 4);
}

TEST_CASE("gen-wlhard output passes verify-wl") {
    fs::path out = tmp_dir("gen_wl");
    CHECK(run_cli({"gen-wlhard", "--pairs", "6", "--sizes", "6", "8", "--seed", "2", "--out",
                   out.string()}) == 0);
    CHECK(run_cli({"verify-wl", "--pairs", (out / "pairs.jsonl").string()}) == 0);
}

TEST_CASE("verify-theorem3 passes on random graphs") {
    CHECK(run_cli({"verify-theorem3", "--graphs", "10", "--resamples", "5", "--seed", "4"}) == 0);
}

TEST_CASE("IDGNN_SEED overrides the --seed flag") {
    fs::path a = tmp_dir("seed_a"), b = tmp_dir("seed_b");
    setenv("IDGNN_SEED", "123", 1);
    CHECK(run_cli({"gen-wlhard", "--pairs", "3", "--seed", "1", "--out", a.string()}) == 0);
    CHECK(run_cli({"gen-wlhard", "--pairs", "3", "--seed", "999", "--out", b.string()}) == 0);
    unsetenv("IDGNN_SEED");
    CHECK(cli::fnv1a_file((a / "pairs.jsonl").string()) ==
          cli::fnv1a_file((b / "pairs.jsonl").string()));
}

TEST_CASE("train then eval-invariance round-trips through the filesystem") {
    fs::path data = tmp_dir("train_data"), run = tmp_dir("train_run"), inv = tmp_dir("train_inv");
    REQUIRE(run_cli({"gen-istriangle", "--graphs", "6", "--nodes", "15", "--labeled", "20",
                     "--seed", "9", "--out", data.string()}) == 0);
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.eval_every = 1;
    cfg.batch_size = 4;
    cfg.hidden_dim = 8;
    cfg.num_layers = 2;
    cfg.id_dim = 4;
    cfg.seeds = {1};
    fs::path cfg_path = data / "cfg.json";
    {
        std::ofstream out(cfg_path);
        out << cfg.to_json().dump();
    }
    CHECK(run_cli({"train", "--config", cfg_path.string(), "--data", data.string(), "--task",
                   "istriangle", "--out", run.string()}) == 0);
    for (const char* f : {"metrics.csv", "checkpoint.json", "results.json", "provenance.json"})
        CHECK(fs::exists(run / f));
    nlohmann::json results;
    std::ifstream(run / "results.json") >> results;
    CHECK(results.contains("test_mean"));
    CHECK(results["seeds"][0].contains("final_extrap"));

    CHECK(run_cli({"eval-invariance", "--checkpoint", (run / "checkpoint.json").string(),
                   "--data", (data / "interp.jsonl").string(), "--K", "5", "--id-dim", "4",
                   "--out", inv.string()}) == 0);
    CHECK(fs::exists(inv / "invariance.csv"));
    auto rows = read_metrics_csv((inv / "invariance.csv").string());
    // one row per example that carries at least one labeled node
    CHECK(rows.size() >= 1);
    CHECK(rows.size() <= 6);
    for (const auto& r : rows) {
        CHECK(r.invariance_ratio >= 0.5);
        CHECK(r.invariance_ratio <= 1.0);
        CHECK(r.K == 5);
    }
}

TEST_CASE("export-curves renders SVGs and a summary table") {
    fs::path out = tmp_dir("curves");
    fs::path csv = out / "metrics.csv";
    write_metrics_csv({{1, "train", 0.5, 0.8, 10, 1},
                       {2, "train", 0.7, 0.9, 10, 1},
                       {2, "valid", 0.6, -1.0, 0, 1}},
                      csv.string());
    CHECK(run_cli({"export-curves", "--metrics", csv.string(), "--out", out.string()}) == 0);
    CHECK(fs::exists(out / "task_metric.svg"));
    CHECK(fs::exists(out / "invariance.svg"));
    CHECK(fs::exists(out / "summary.csv"));
    std::ifstream svg(out / "task_metric.svg");
    std::string body((std::istreambuf_iterator<char>(svg)), std::istreambuf_iterator<char>());
    CHECK(body.find("<svg") != std::string::npos);
    CHECK(body.find("polyline") != std::string::npos);
}

TEST_CASE("export-curves on an empty CSV warns but exits 0") {
    fs::path out = tmp_dir("curves_empty");
    fs::path csv = out / "empty.csv";
    write_metrics_csv({}, csv.string());
    CHECK(run_cli({"export-curves", "--metrics", csv.string(), "--out", out.string()}) == 0);
}
