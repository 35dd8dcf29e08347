#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "glassboost/bench.hpp"
#include "glassboost/io.hpp"
#include "glassboost/synth.hpp"

using namespace glassboost;

namespace {

BenchConfig fast_config() {
  BenchConfig cfg;
  cfg.seed = 7;
  cfg.ebm.outer_rounds = 100;
  cfg.selector.boruta_max_iterations = 10;
  cfg.selector.forest_params.n_trees = 50;
  cfg.selector.boosted_params.n_trees = 80;
  cfg.selector.adaboost_params.n_trees = 60;
  return cfg;
}

BenchDataset small_synth(std::uint64_t seed, std::size_t rows = 500) {
  SynthConfig scfg;
  scfg.rows = rows;
  scfg.seed = seed;
  BenchDataset d;
  d.name = "synth";
  d.target = "target";
  d.data = synth_dataset(scfg);
  return d;
}

}  // namespace

TEST_CASE("default pipeline matrix has the full 14 rows") {
  const auto p = default_pipelines();
  REQUIRE(p.size() == 14);
  CHECK(p[0] == "plain");
  CHECK(p[1] == "plain_top20");
  for (std::size_t i = 0; i < selector_names().size(); ++i) {
    CHECK(p[2 + i] == "ensemble1:" + selector_names()[i]);
  }
  CHECK(p[11] == "pool_a");
  CHECK(p[12] == "pool_b");
  CHECK(p[13] == "altered");
}

TEST_CASE("run_benchmark produces one healthy row per pipeline") {
  BenchConfig cfg = fast_config();
  const BenchReport report = run_benchmark({small_synth(3)}, cfg);
  REQUIRE(report.rows.size() == 14);
  for (const auto& row : report.rows) {
    CAPTURE(row.pipeline, row.error);
    CHECK(row.ok);
    CHECK(row.dataset == "synth");
    CHECK(row.result.eval.f1 >= 0.0);
    CHECK(row.result.eval.n_features >= 1);
    CHECK(!row.result.manifest.empty());
  }
}

TEST_CASE("an explicitly empty pipeline list runs nothing") {
  BenchConfig cfg = fast_config();
  cfg.pipelines = std::vector<std::string>{};
  const BenchReport report = run_benchmark({small_synth(3)}, cfg);
  CHECK(report.rows.empty());
}

TEST_CASE("row failures are recorded and the run continues") {
  BenchConfig cfg = fast_config();
  cfg.pipelines = std::vector<std::string>{"plain", "no_such_pipeline", "altered"};
  const BenchReport report = run_benchmark({small_synth(5)}, cfg);
  REQUIRE(report.rows.size() == 3);
  CHECK(report.rows[0].ok);
  CHECK_FALSE(report.rows[1].ok);
  CHECK_THAT(report.rows[1].error,
             Catch::Matchers::ContainsSubstring("unknown pipeline"));
  CHECK(report.rows[2].ok);
}

TEST_CASE("an unloadable dataset fails every row but not the run") {
  BenchConfig cfg = fast_config();
  cfg.pipelines = std::vector<std::string>{"plain", "altered"};
  BenchDataset missing;
  missing.name = "gone";
  missing.path = "no_such_file.csv";
  const BenchReport report = run_benchmark({missing, small_synth(5)}, cfg);
  REQUIRE(report.rows.size() == 4);
  CHECK_FALSE(report.rows[0].ok);
  CHECK_FALSE(report.rows[1].ok);
  CHECK(report.rows[2].ok);
  CHECK(report.rows[3].ok);
}

TEST_CASE("benchmark JSON is identical across runs once timings are stripped") {
  BenchConfig cfg = fast_config();
  cfg.pipelines = std::vector<std::string>{"plain", "ensemble1:xgboost",
                                           "pool_b", "altered"};
  const BenchReport a = run_benchmark({small_synth(9)}, cfg);
  const BenchReport b = run_benchmark({small_synth(9)}, cfg);
  CHECK(io::without_timing(io::to_json(a)) == io::without_timing(io::to_json(b)));
}

TEST_CASE("emit_report writes json, markdown, csv and per-model dumps") {
  namespace fs = std::filesystem;
  const std::string out_dir = "test_bench_out";
  fs::remove_all(out_dir);

  BenchConfig cfg = fast_config();
  cfg.pipelines = std::vector<std::string>{"plain", "ensemble1:correlation"};
  const BenchReport report = run_benchmark({small_synth(11)}, cfg);
  io::emit_report(report, out_dir);

  CHECK(fs::exists(out_dir + "/report.json"));
  CHECK(fs::exists(out_dir + "/report.csv"));
  CHECK(fs::exists(out_dir + "/model_0.json"));
  CHECK(fs::exists(out_dir + "/model_1.json"));

  std::ifstream md_in(out_dir + "/report.md");
  std::string md((std::istreambuf_iterator<char>(md_in)),
                 std::istreambuf_iterator<char>());
  CHECK_THAT(md, Catch::Matchers::ContainsSubstring("# Feat"));
  CHECK_THAT(md, Catch::Matchers::ContainsSubstring("F1"));
  CHECK_THAT(md, Catch::Matchers::ContainsSubstring("Accuracy"));
  CHECK_THAT(md, Catch::Matchers::ContainsSubstring("Time (sec)"));
  CHECK_THAT(md, Catch::Matchers::ContainsSubstring("Occurrence"));

  // The canonical JSON agrees with the rendered CSV row count.
  const io::json j = io::load_json_file(out_dir + "/report.json");
  CHECK(j.at("rows").size() == report.rows.size());
  std::ifstream csv_in(out_dir + "/report.csv");
  std::string line;
  std::size_t lines = 0;
  while (std::getline(csv_in, line)) ++lines;
  CHECK(lines == report.rows.size() + 1);

  // The per-model dump round-trips into a working model.
  const AdditiveModel model =
      io::model_from_json(io::load_json_file(out_dir + "/model_0.json"));
  CHECK(model.n_features() == report.rows[0].result.model.n_features());
  CHECK(model.intercept == report.rows[0].result.model.intercept);

  CHECK_THROWS_AS(io::emit_report(BenchReport{}, out_dir), Error);
  fs::remove_all(out_dir);
}

TEST_CASE("model JSON round trip preserves predictions exactly") {
  SynthConfig scfg;
  scfg.rows = 400;
  scfg.seed = 13;
  auto [ds, rep] = preprocess(synth_dataset(scfg));
  EbmParams params;
  params.outer_rounds = 80;
  const AdditiveModel model = fit_ebm(bin(ds), params);
  const AdditiveModel back = io::model_from_json(io::to_json(model));
  const auto pa = model.predict(ds);
  const auto pb = back.predict(ds);
  REQUIRE(pa.size() == pb.size());
  for (std::size_t r = 0; r < pa.size(); ++r) CHECK(pa[r] == pb[r]);
  REQUIRE(back.importances.size() == model.importances.size());
  for (std::size_t i = 0; i < model.importances.size(); ++i) {
    CHECK(back.importances[i].importance == model.importances[i].importance);
  }
}

TEST_CASE("tree ensemble and selector output JSON round trips") {
  SynthConfig scfg;
  scfg.rows = 300;
  scfg.seed = 17;
  auto [ds, rep] = preprocess(synth_dataset(scfg));
  BinnedDataset bd = bin(ds);
  TreeParams tp = TreeParams::boosted_defaults();
  tp.n_trees = 20;
  const TreeEnsemble ens = fit_ensemble(bd, EnsembleMode::gradient_boosted, tp);
  const TreeEnsemble back = io::tree_ensemble_from_json(io::to_json(ens));
  for (std::size_t r = 0; r < bd.n_rows(); r += 7) {
    CHECK(back.raw_score(bd, r) == ens.raw_score(bd, r));
  }

  SelectorOutput sel = run_selector("correlation", ds, SelectorConfig{});
  const SelectorOutput sel_back = io::selector_output_from_json(io::to_json(sel));
  CHECK(sel_back.selector == sel.selector);
  CHECK(sel_back.selected == sel.selected);
  REQUIRE(sel_back.scores.size() == sel.scores.size());
  for (std::size_t f = 0; f < sel.scores.size(); ++f) {
    CHECK(sel_back.scores[f].score == sel.scores[f].score);
    CHECK(sel_back.scores[f].rank == sel.scores[f].rank);
  }

  const PreprocessReport rep_back =
      io::preprocess_report_from_json(io::to_json(rep));
  CHECK(rep_back.feature_names == rep.feature_names);
  CHECK(rep_back.imputed_cells == rep.imputed_cells);
  for (std::size_t f = 0; f < rep.scaling_params.size(); ++f) {
    CHECK(rep_back.scaling_params[f].mean == rep.scaling_params[f].mean);
    CHECK(rep_back.scaling_params[f].stddev == rep.scaling_params[f].stddev);
  }
}
