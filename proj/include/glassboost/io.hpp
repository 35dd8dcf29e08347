#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "glassboost/common.hpp"
#include "glassboost/dataset.hpp"
#include "glassboost/diagnostics.hpp"
#include "glassboost/ebm.hpp"
#include "glassboost/ensemble.hpp"
#include "glassboost/metrics.hpp"
#include "glassboost/selectors.hpp"
#include "glassboost/trees.hpp"

namespace glassboost::io {

using nlohmann::json;

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path);
  json j;
  in >> j;
  return j;
}

inline void write_json_file(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

// --- preprocess report ---

inline json to_json(const PreprocessReport& rep) {
  json j;
  j["feature_names"] = rep.feature_names;
  j["imputed_cells"] = rep.imputed_cells;
  j["category_maps"] = json::array();
  for (const auto& m : rep.category_maps) j["category_maps"].push_back(m);
  j["scaling_params"] = json::array();
  for (const auto& sp : rep.scaling_params) {
    j["scaling_params"].push_back(
        {{"scaled", sp.scaled}, {"mean", sp.mean}, {"stddev", sp.stddev}});
  }
  return j;
}

inline PreprocessReport preprocess_report_from_json(const json& j) {
  PreprocessReport rep;
  rep.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  rep.imputed_cells = j.at("imputed_cells").get<std::vector<std::int64_t>>();
  for (const auto& m : j.at("category_maps")) {
    rep.category_maps.push_back(m.get<std::map<std::string, int>>());
  }
  for (const auto& sp : j.at("scaling_params")) {
    rep.scaling_params.push_back(ScalingParams{
        sp.at("scaled").get<bool>(), sp.at("mean").get<double>(),
        sp.at("stddev").get<double>()});
  }
  return rep;
}

// --- binning schema ---

inline json to_json(const FeatureBinning& fb) {
  return {{"name", fb.name},
          {"kind", fb.kind == FeatureKind::numeric ? "numeric" : "categorical"},
          {"edges", fb.edges},
          {"n_bins", fb.n_bins}};
}

inline FeatureBinning feature_binning_from_json(const json& j) {
  FeatureBinning fb;
  fb.name = j.at("name").get<std::string>();
  fb.kind = j.at("kind").get<std::string>() == "numeric"
                ? FeatureKind::numeric
                : FeatureKind::categorical;
  fb.edges = j.at("edges").get<std::vector<double>>();
  fb.n_bins = j.at("n_bins").get<int>();
  return fb;
}

// --- tree ensemble (flattened nodes, explicit child ids) ---

inline json to_json(const TreeEnsemble& ens) {
  json j;
  j["mode"] = ens.mode == EnsembleMode::random_forest ? "random_forest"
              : ens.mode == EnsembleMode::gradient_boosted
                  ? "gradient_boosted"
                  : "adaboost";
  j["base_score"] = ens.base_score;
  j["n_features"] = ens.n_features;
  j["tree_weights"] = ens.tree_weights;
  j["trees"] = json::array();
  for (const auto& tree : ens.trees) {
    json nodes = json::array();
    for (const auto& nd : tree.nodes) {
      nodes.push_back({{"split_feature", nd.split_feature},
                       {"split_bin", nd.split_bin},
                       {"left", nd.left},
                       {"right", nd.right},
                       {"leaf_value", nd.leaf_value},
                       {"cover", nd.cover},
                       {"gain", nd.gain}});
    }
    j["trees"].push_back({{"nodes", nodes}});
  }
  return j;
}

inline TreeEnsemble tree_ensemble_from_json(const json& j) {
  TreeEnsemble ens;
  const std::string mode = j.at("mode").get<std::string>();
  ens.mode = mode == "random_forest"      ? EnsembleMode::random_forest
             : mode == "gradient_boosted" ? EnsembleMode::gradient_boosted
                                          : EnsembleMode::adaboost;
  ens.base_score = j.at("base_score").get<double>();
  ens.n_features = j.at("n_features").get<std::size_t>();
  ens.tree_weights = j.at("tree_weights").get<std::vector<double>>();
  for (const auto& jt : j.at("trees")) {
    Tree tree;
    for (const auto& jn : jt.at("nodes")) {
      TreeNode nd;
      nd.split_feature = jn.at("split_feature").get<int>();
      nd.split_bin = jn.at("split_bin").get<int>();
      nd.left = jn.at("left").get<int>();
      nd.right = jn.at("right").get<int>();
      nd.leaf_value = jn.at("leaf_value").get<double>();
      nd.cover = jn.at("cover").get<double>();
      nd.gain = jn.at("gain").get<double>();
      tree.nodes.push_back(nd);
    }
    ens.trees.push_back(std::move(tree));
  }
  return ens;
}

// --- audit terms: the interchange schema for importance dumps ---
// {"terms": [{"term": "f" | ["a","b"], "kind": "main"|"pair",
//             "importance": x}, ...]}

inline json to_json(const std::vector<AuditTerm>& terms) {
  json arr = json::array();
  for (const auto& t : terms) {
    json jt;
    if (t.is_pair()) {
      jt["term"] = t.features;
      jt["kind"] = "pair";
    } else {
      jt["term"] = t.features[0];
      jt["kind"] = "main";
    }
    jt["importance"] = t.importance;
    arr.push_back(jt);
  }
  return {{"terms", arr}};
}

inline std::vector<AuditTerm> audit_terms_from_json(const json& j) {
  const json& arr = j.is_array() ? j : j.at("terms");
  std::vector<AuditTerm> terms;
  for (const auto& jt : arr) {
    AuditTerm t;
    const json& term = jt.at("term");
    if (term.is_array()) {
      t.features = term.get<std::vector<std::string>>();
    } else {
      const std::string s = term.get<std::string>();
      const auto pos = s.find(" x ");
      if (jt.value("kind", "main") == "pair" && pos != std::string::npos) {
        t.features = {s.substr(0, pos), s.substr(pos + 3)};
      } else {
        t.features = {s};
      }
    }
    if (t.features.empty() || t.features.size() > 2) {
      throw Error("audit term must have 1 or 2 features");
    }
    t.importance = jt.at("importance").get<double>();
    terms.push_back(std::move(t));
  }
  return terms;
}

// --- additive model ---

inline json to_json(const AdditiveModel& model) {
  json j;
  j["intercept"] = model.intercept;
  j["link"] = "logit";
  j["schema"] = json::array();
  for (const auto& fb : model.schema) j["schema"].push_back(to_json(fb));
  j["main_terms"] = model.main_terms;
  j["pair_terms"] = json::array();
  for (const auto& pt : model.pair_terms) {
    j["pair_terms"].push_back(
        {{"f_i", pt.f_i}, {"f_j", pt.f_j}, {"grid", pt.grid}});
  }
  j["pair_bin_maps"] = model.pair_bin_maps;
  j["pair_bins"] = model.pair_bins;
  j["bin_fractions"] = model.bin_fractions;
  j["importances"] = to_json(audit_terms(model));
  return j;
}

inline AdditiveModel model_from_json(const json& j) {
  AdditiveModel model;
  model.intercept = j.at("intercept").get<double>();
  for (const auto& fb : j.at("schema")) {
    model.schema.push_back(feature_binning_from_json(fb));
  }
  model.main_terms =
      j.at("main_terms").get<std::vector<std::vector<double>>>();
  for (const auto& jp : j.at("pair_terms")) {
    PairTerm pt;
    pt.f_i = jp.at("f_i").get<int>();
    pt.f_j = jp.at("f_j").get<int>();
    pt.grid = jp.at("grid").get<std::vector<double>>();
    model.pair_terms.push_back(std::move(pt));
  }
  model.pair_bin_maps =
      j.at("pair_bin_maps").get<std::vector<std::vector<int>>>();
  model.pair_bins = j.at("pair_bins").get<std::vector<int>>();
  model.bin_fractions =
      j.at("bin_fractions").get<std::vector<std::vector<double>>>();
  // Rebuild structured importances from the dump.
  const auto terms = audit_terms_from_json(j.at("importances"));
  std::map<std::string, int> index;
  for (std::size_t f = 0; f < model.schema.size(); ++f) {
    index[model.schema[f].name] = static_cast<int>(f);
  }
  std::vector<TermImportance> tis;
  for (const auto& t : terms) {
    TermImportance ti;
    ti.is_pair = t.is_pair();
    ti.f_i = index.at(t.features[0]);
    ti.f_j = t.is_pair() ? index.at(t.features[1]) : -1;
    ti.importance = t.importance;
    tis.push_back(ti);
  }
  std::vector<int> order(tis.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return tis[a].importance > tis[b].importance;
  });
  for (std::size_t i = 0; i < order.size(); ++i) tis[order[i]].rank = (int)i + 1;
  model.importances = std::move(tis);
  return model;
}

// --- selector output ---

inline json to_json(const SelectorOutput& out) {
  json j;
  j["selector"] = out.selector;
  j["params"] = out.params;
  j["runtime_s"] = out.runtime_s;
  j["scores"] = json::array();
  for (const auto& fs : out.scores) {
    j["scores"].push_back(
        {{"feature", fs.feature}, {"score", fs.score}, {"rank", fs.rank}});
  }
  j["selected"] = out.selected;
  return j;
}

inline SelectorOutput selector_output_from_json(const json& j) {
  SelectorOutput out;
  out.selector = j.at("selector").get<std::string>();
  out.params = j.at("params").get<std::map<std::string, double>>();
  out.runtime_s = j.value("runtime_s", 0.0);
  for (const auto& js : j.at("scores")) {
    out.scores.push_back(FeatureScore{js.at("feature").get<int>(),
                                      js.at("score").get<double>(),
                                      js.at("rank").get<int>()});
  }
  out.selected = j.at("selected").get<std::vector<int>>();
  return out;
}

// --- reports ---

inline json to_json(const EvalResult& e) {
  return {{"f1", e.f1},
          {"accuracy", e.accuracy},
          {"fit_seconds", e.fit_seconds},
          {"n_features", e.n_features},
          {"threshold", e.threshold},
          {"confusion",
           {{"tp", e.confusion.tp},
            {"fp", e.confusion.fp},
            {"tn", e.confusion.tn},
            {"fn", e.confusion.fn}}}};
}

inline json to_json(const DominanceReport& rep) {
  json j;
  j["top_pairs"] = json::array();
  for (const auto& p : rep.top_pairs) {
    j["top_pairs"].push_back(
        {{"term", p.features}, {"importance", p.importance}});
  }
  j["occurrences"] = rep.occurrences;
  j["flagged"] = rep.flagged;
  j["summary"] = rep.summary;
  return j;
}

inline json to_json(const SpuriousReport& rep) {
  json j;
  j["noisy_set"] = rep.noisy_set;
  j["count"] = rep.count;
  j["flags"] = json::array();
  for (const auto& f : rep.flags) {
    j["flags"].push_back({{"pair", f.pair.features},
                          {"pair_importance", f.pair.importance},
                          {"noisy_member", f.noisy_member}});
  }
  return j;
}

inline json to_json(const PipelineResult& res) {
  json j;
  j["pipeline"] = res.pipeline;
  j["selected_features"] = res.selected_features;
  j["eval"] = to_json(res.eval);
  j["importance"] = to_json(res.importance);
  j["dominance"] = to_json(res.dominance);
  j["spurious"] = to_json(res.spurious);
  j["manifest"] = res.manifest;
  j["model"] = to_json(res.model);
  return j;
}

}  // namespace glassboost::io
