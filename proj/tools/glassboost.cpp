#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "glassboost/bench.hpp"
#include "glassboost/common.hpp"
#include "glassboost/dataset.hpp"
#include "glassboost/diagnostics.hpp"
#include "glassboost/ebm.hpp"
#include "glassboost/ensemble.hpp"
#include "glassboost/io.hpp"
#include "glassboost/metrics.hpp"
#include "glassboost/selectors.hpp"
#include "glassboost/synth.hpp"

namespace gb = glassboost;
using nlohmann::json;

namespace {

std::uint64_t default_seed() {
  if (const char* env = std::getenv("GLASSBOOST_SEED")) {
    try {
      return std::stoull(env);
    } catch (...) {
      throw gb::Error("GLASSBOOST_SEED is not an integer");
    }
  }
  return 0;
}

// Config-file merge: JSON keys fill in whatever was not given as a flag.
// Flags always win.
template <class T>
void cfg(const json& j, const char* key, CLI::App* app, const std::string& flag,
         T& var) {
  if (j.contains(key) && app->count(flag) == 0) var = j.at(key).get<T>();
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  return gb::io::load_json_file(path);
}

struct DataArgs {
  std::string path;
  std::string target = "target";
  double split_ratio = 0.7;
  std::string config_path;
};

void add_data_flags(CLI::App* cmd, DataArgs& a) {
  cmd->add_option("--data", a.path, "Input CSV path")->required(false);
  cmd->add_option("--target", a.target, "Target column name")
      ->capture_default_str();
  cmd->add_option("--split-ratio", a.split_ratio,
                  "Train fraction of the stratified split (70:30 default)")
      ->capture_default_str();
  cmd->add_option("--config", a.config_path,
                  "JSON config file; explicit flags override it");
}

void merge_data_flags(const json& j, CLI::App* cmd, DataArgs& a) {
  cfg(j, "data", cmd, "--data", a.path);
  cfg(j, "target", cmd, "--target", a.target);
  cfg(j, "split_ratio", cmd, "--split-ratio", a.split_ratio);
  if (a.path.empty()) throw gb::Error("no input data (--data or config)");
}

struct LoadedSplit {
  gb::Dataset train;
  gb::Dataset test;
};

LoadedSplit load_and_split(const DataArgs& a, std::uint64_t seed) {
  const gb::Dataset raw = gb::load_csv(a.path, a.target);
  gb::SplitPair sp = gb::split(raw, a.split_ratio, seed);
  auto [train, prep] = gb::preprocess(sp.train);
  auto [test, test_prep] = gb::preprocess(sp.test, &prep);
  (void)test_prep;
  return LoadedSplit{std::move(train), std::move(test)};
}

void add_ebm_flags(CLI::App* cmd, gb::EbmParams& p) {
  cmd->add_option("--learning-rate", p.learning_rate, "Boosting learning rate")
      ->capture_default_str();
  cmd->add_option("--outer-rounds", p.outer_rounds, "Max boosting rounds")
      ->capture_default_str();
  cmd->add_option("--n-interactions", p.n_interactions,
                  "Pairwise interaction terms to learn")
      ->capture_default_str();
  cmd->add_option("--validation-fraction", p.validation_fraction,
                  "Early-stopping carve-out fraction")
      ->capture_default_str();
  cmd->add_option("--patience", p.early_stop_patience,
                  "Early-stopping patience in rounds")
      ->capture_default_str();
}

void merge_ebm_flags(const json& j, CLI::App* cmd, gb::EbmParams& p) {
  cfg(j, "learning_rate", cmd, "--learning-rate", p.learning_rate);
  cfg(j, "outer_rounds", cmd, "--outer-rounds", p.outer_rounds);
  cfg(j, "n_interactions", cmd, "--n-interactions", p.n_interactions);
  cfg(j, "validation_fraction", cmd, "--validation-fraction",
      p.validation_fraction);
  cfg(j, "patience", cmd, "--patience", p.early_stop_patience);
}

void add_selector_flags(CLI::App* cmd, gb::SelectorConfig& c) {
  cmd->add_option("--importance-cutoff", c.importance_cutoff,
                  "Normalized importance cutoff for selection")
      ->capture_default_str();
  cmd->add_option("--correlation-cutoff", c.correlation_cutoff,
                  "Pairwise correlation pruning cutoff")
      ->capture_default_str();
  cmd->add_option("--vif-threshold", c.vif_threshold,
                  "Variance inflation factor removal threshold")
      ->capture_default_str();
  cmd->add_option("--variance-threshold", c.variance_threshold,
                  "Minimum pre-scaling variance")
      ->capture_default_str();
  cmd->add_option("--max-bins", c.max_bins, "Histogram bins per feature")
      ->capture_default_str();
}

void merge_selector_flags(const json& j, CLI::App* cmd, gb::SelectorConfig& c) {
  cfg(j, "importance_cutoff", cmd, "--importance-cutoff", c.importance_cutoff);
  cfg(j, "correlation_cutoff", cmd, "--correlation-cutoff",
      c.correlation_cutoff);
  cfg(j, "vif_threshold", cmd, "--vif-threshold", c.vif_threshold);
  cfg(j, "variance_threshold", cmd, "--variance-threshold",
      c.variance_threshold);
  cfg(j, "max_bins", cmd, "--max-bins", c.max_bins);
}

void print_manifest(const json& manifest) {
  std::cout << manifest.dump(2) << "\n";
}

json data_manifest(const DataArgs& a, std::uint64_t seed) {
  return {{"data", a.path},
          {"target", a.target},
          {"split_ratio", a.split_ratio},
          {"seed", seed}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"glassboost: explainable boosting with cross-feature selection"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = default_seed();
  app.add_option("--seed", seed,
                 "Global RNG seed (env GLASSBOOST_SEED as fallback)")
      ->capture_default_str();

  // --- synth ---
  gb::SynthConfig synth_cfg;
  std::string synth_out = "synth.csv";
  auto* synth = app.add_subcommand("synth", "Emit a planted synthetic CSV");
  synth->add_option("-o,--out", synth_out, "Output CSV path")
      ->capture_default_str();
  synth->add_option("--rows", synth_cfg.rows, "Rows")->capture_default_str();
  synth->add_option("--informative", synth_cfg.informative,
                    "Informative features")
      ->capture_default_str();
  synth->add_option("--redundant", synth_cfg.redundant,
                    "Correlated redundant copies")
      ->capture_default_str();
  synth->add_option("--noise", synth_cfg.noise, "Pure-noise features")
      ->capture_default_str();
  synth->add_option("--rho", synth_cfg.rho,
                    "Correlation of each copy with its source")
      ->capture_default_str();
  synth->add_option("--imbalance", synth_cfg.imbalance,
                    "Negatives per positive")
      ->capture_default_str();
  synth->add_option("--main-coef", synth_cfg.main_coef, "Main-effect size")
      ->capture_default_str();
  synth->add_option("--interaction-coef", synth_cfg.interaction_coef,
                    "Interaction-effect size")
      ->capture_default_str();

  // --- select ---
  DataArgs select_data;
  std::string select_name;
  std::string select_out;
  gb::SelectorConfig select_cfg;
  auto* select = app.add_subcommand(
      "select", "Run one cross-feature selector and dump its output");
  select
      ->add_option("--selector", select_name,
                   "One of: " + [] {
                     std::string s;
                     for (const auto& n : gb::selector_names()) {
                       if (!s.empty()) s += ", ";
                       s += n;
                     }
                     return s;
                   }())
      ->required();
  select->add_option("-o,--out", select_out, "Output JSON path (default stdout)");
  add_data_flags(select, select_data);
  add_selector_flags(select, select_cfg);

  // --- train ---
  DataArgs train_data;
  std::string train_out = "model.json";
  gb::EbmParams train_ebm;
  auto* train = app.add_subcommand("train", "Fit a plain EBM and dump the model");
  train->add_option("-o,--out", train_out, "Output model JSON path")
      ->capture_default_str();
  add_data_flags(train, train_data);
  add_ebm_flags(train, train_ebm);

  // --- pipeline ---
  DataArgs pipe_data;
  std::string pipe_kind;
  std::string pipe_selector = "xgboost";
  std::string pipe_out;
  gb::SelectorConfig pipe_sel_cfg;
  gb::EbmParams pipe_ebm;
  gb::PoolConfig pool_cfg;
  gb::AlteredEbmConfig altered_cfg;
  bool pool_borda = false;
  auto* pipe = app.add_subcommand(
      "pipeline", "Run a full selection+EBM pipeline and dump the result");
  pipe->add_option("--kind", pipe_kind, "ensemble1 | pool-a | pool-b | altered")
      ->required()
      ->check(CLI::IsMember({"ensemble1", "pool-a", "pool-b", "altered"}));
  pipe->add_option("--selector", pipe_selector,
                   "Selector for ensemble1 (or 'identity' for plain EBM)")
      ->capture_default_str();
  pipe->add_option("-o,--out", pipe_out, "Output JSON path (default stdout)");
  pipe->add_option("-K,--k-min-overlap", pool_cfg.k_min_overlap,
                   "Pool A: minimum selector overlap K")
      ->capture_default_str();
  pipe->add_option("-P,--top-p", pool_cfg.top_p,
                   "Pool B: per-selector top-P features")
      ->capture_default_str();
  pipe->add_flag("--borda", pool_borda, "Pool B: Borda aggregation mode");
  pipe->add_option("-M,--importance-threshold", altered_cfg.importance_threshold,
                   "Altered EBM: main-importance keep threshold M")
      ->capture_default_str();
  add_data_flags(pipe, pipe_data);
  add_selector_flags(pipe, pipe_sel_cfg);
  add_ebm_flags(pipe, pipe_ebm);

  // --- audit ---
  std::string audit_path;
  std::string audit_out;
  auto* audit = app.add_subcommand(
      "audit", "Dominance and spurious-interaction audits of an importance dump");
  audit
      ->add_option("--importances", audit_path,
                   "Model JSON or {\"terms\": [...]} importance dump")
      ->required();
  audit->add_option("-o,--out", audit_out, "Output JSON path (default stdout)");

  // --- bench ---
  std::string bench_config_path;
  std::string bench_out_dir = "bench_out";
  DataArgs bench_data;
  auto* bench = app.add_subcommand(
      "bench", "Full benchmark matrix over all pipelines, with report files");
  bench->add_option("--config", bench_config_path,
                    "JSON config: datasets, pipelines, params");
  bench->add_option("--out", bench_out_dir, "Report output directory")
      ->capture_default_str();
  bench->add_option("--data", bench_data.path, "Single dataset CSV (no config)");
  bench->add_option("--target", bench_data.target, "Target column name")
      ->capture_default_str();
  bench->add_option("--split-ratio", bench_data.split_ratio,
                    "Train fraction (70:30 default)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*synth) {
      synth_cfg.seed = seed;
      const gb::Dataset ds = gb::synth_dataset(synth_cfg);
      gb::write_csv(ds, synth_out);
      print_manifest({{"command", "synth"},
                      {"out", synth_out},
                      {"rows", synth_cfg.rows},
                      {"informative", synth_cfg.informative},
                      {"redundant", synth_cfg.redundant},
                      {"noise", synth_cfg.noise},
                      {"rho", synth_cfg.rho},
                      {"imbalance", synth_cfg.imbalance},
                      {"main_coef", synth_cfg.main_coef},
                      {"interaction_coef", synth_cfg.interaction_coef},
                      {"seed", seed}});
    } else if (*select) {
      const json j = load_config(select_data.config_path);
      merge_data_flags(j, select, select_data);
      merge_selector_flags(j, select, select_cfg);
      select_cfg.seed = seed;
      const LoadedSplit ls = load_and_split(select_data, seed);
      const gb::SelectorOutput out =
          gb::run_selector(select_name, ls.train, select_cfg);
      json result = gb::io::to_json(out);
      result["feature_names"] = ls.train.feature_names;
      if (select_out.empty()) {
        std::cout << result.dump(2) << "\n";
      } else {
        gb::io::write_json_file(result, select_out);
      }
      json manifest = data_manifest(select_data, seed);
      manifest["command"] = "select";
      manifest["selector"] = select_name;
      manifest["params"] = out.params;
      print_manifest(manifest);
    } else if (*train) {
      const json j = load_config(train_data.config_path);
      merge_data_flags(j, train, train_data);
      merge_ebm_flags(j, train, train_ebm);
      train_ebm.seed = seed;
      const LoadedSplit ls = load_and_split(train_data, seed);
      const auto t0 = std::chrono::steady_clock::now();
      const gb::AdditiveModel model = gb::fit_ebm(gb::bin(ls.train), train_ebm);
      const double fit_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
      gb::io::write_json_file(gb::io::to_json(model), train_out);
      json manifest = data_manifest(train_data, seed);
      manifest["command"] = "train";
      manifest["out"] = train_out;
      manifest["learning_rate"] = train_ebm.learning_rate;
      manifest["outer_rounds"] = train_ebm.outer_rounds;
      manifest["n_interactions"] = train_ebm.n_interactions;
      manifest["eval"] =
          gb::io::to_json(gb::evaluate(model, ls.test, fit_seconds));
      print_manifest(manifest);
    } else if (*pipe) {
      const json j = load_config(pipe_data.config_path);
      merge_data_flags(j, pipe, pipe_data);
      merge_selector_flags(j, pipe, pipe_sel_cfg);
      merge_ebm_flags(j, pipe, pipe_ebm);
      cfg(j, "k_min_overlap", pipe, "--k-min-overlap", pool_cfg.k_min_overlap);
      cfg(j, "top_p", pipe, "--top-p", pool_cfg.top_p);
      cfg(j, "importance_threshold", pipe, "--importance-threshold",
          altered_cfg.importance_threshold);
      pipe_sel_cfg.seed = seed;
      pipe_ebm.seed = seed;
      pool_cfg.use_borda = pool_borda;
      const LoadedSplit ls = load_and_split(pipe_data, seed);

      gb::PipelineResult res;
      if (pipe_kind == "ensemble1") {
        res = gb::ensemble1(ls.train, ls.test, pipe_selector, pipe_sel_cfg,
                            pipe_ebm);
      } else if (pipe_kind == "altered") {
        res = gb::altered_ebm(ls.train, ls.test, altered_cfg, pipe_ebm);
      } else {
        std::vector<gb::SelectorOutput> outs;
        for (const auto& name : gb::selector_names()) {
          outs.push_back(gb::run_selector(name, ls.train, pipe_sel_cfg));
        }
        res = gb::pool_pipeline(ls.train, ls.test, outs, pool_cfg,
                                pipe_kind == "pool-a", pipe_ebm);
      }
      res.manifest.update(data_manifest(pipe_data, seed));
      if (pipe_out.empty()) {
        std::cout << gb::io::to_json(res).dump(2) << "\n";
      } else {
        gb::io::write_json_file(gb::io::to_json(res), pipe_out);
      }
      print_manifest(res.manifest);
    } else if (*audit) {
      const json j = gb::io::load_json_file(audit_path);
      const std::vector<gb::AuditTerm> terms = gb::io::audit_terms_from_json(
          j.contains("importances") ? j.at("importances") : j);
      const gb::DominanceReport dom = gb::dominance_report(terms);
      const gb::SpuriousReport spur = gb::spurious_report(terms);
      const json result = {{"dominance", gb::io::to_json(dom)},
                           {"spurious", gb::io::to_json(spur)}};
      if (audit_out.empty()) {
        std::cout << result.dump(2) << "\n";
      } else {
        gb::io::write_json_file(result, audit_out);
      }
      for (const auto& line : dom.summary) std::cout << line << "\n";
      print_manifest({{"command", "audit"},
                      {"importances", audit_path},
                      {"terms", terms.size()},
                      {"dominance_flags", dom.flagged.size()},
                      {"spurious_count", spur.count}});
    } else if (*bench) {
      const json j = load_config(bench_config_path);
      gb::BenchConfig cfg_b;
      cfg_b.seed = seed;
      if (j.contains("seed") && app.count("--seed") == 0) {
        cfg_b.seed = j.at("seed").get<std::uint64_t>();
      }
      if (j.contains("pipelines")) {
        cfg_b.pipelines = j.at("pipelines").get<std::vector<std::string>>();
      }
      if (j.contains("split_ratio")) {
        cfg_b.split_ratio = j.at("split_ratio").get<double>();
      }
      if (bench->count("--split-ratio")) {
        cfg_b.split_ratio = bench_data.split_ratio;
      }
      if (j.contains("k_min_overlap")) {
        cfg_b.pool.k_min_overlap = j.at("k_min_overlap").get<int>();
      }
      if (j.contains("top_p")) cfg_b.pool.top_p = j.at("top_p").get<int>();
      if (j.contains("importance_threshold")) {
        cfg_b.altered.importance_threshold =
            j.at("importance_threshold").get<double>();
      }
      if (j.contains("outer_rounds")) {
        cfg_b.ebm.outer_rounds = j.at("outer_rounds").get<int>();
      }
      if (j.contains("n_interactions")) {
        cfg_b.ebm.n_interactions = j.at("n_interactions").get<int>();
      }
      cfg_b.selector.seed = cfg_b.seed;
      cfg_b.ebm.seed = cfg_b.seed;

      std::vector<gb::BenchDataset> datasets;
      if (j.contains("datasets")) {
        for (const auto& jd : j.at("datasets")) {
          gb::BenchDataset d;
          d.name = jd.at("name").get<std::string>();
          d.path = jd.at("path").get<std::string>();
          d.target = jd.value("target", "target");
          datasets.push_back(std::move(d));
        }
      }
      if (!bench_data.path.empty()) {
        gb::BenchDataset d;
        d.name = bench_data.path;
        d.path = bench_data.path;
        d.target = bench_data.target;
        datasets.push_back(std::move(d));
      }
      if (datasets.empty()) {
        throw gb::Error("bench: no datasets (use --data or a config file)");
      }

      const gb::BenchReport report = gb::run_benchmark(datasets, cfg_b);
      gb::io::emit_report(report, bench_out_dir);
      json manifest = report.environment;
      manifest["command"] = "bench";
      manifest["out"] = bench_out_dir;
      manifest["rows"] = report.rows.size();
      int failed = 0;
      for (const auto& r : report.rows) failed += r.ok ? 0 : 1;
      manifest["failed_rows"] = failed;
      print_manifest(manifest);
    }
  } catch (const gb::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
