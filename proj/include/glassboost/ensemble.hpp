#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "glassboost/common.hpp"
#include "glassboost/dataset.hpp"
#include "glassboost/diagnostics.hpp"
#include "glassboost/ebm.hpp"
#include "glassboost/metrics.hpp"
#include "glassboost/selectors.hpp"

namespace glassboost {

struct PoolConfig {
  int k_min_overlap = 4;  // K: minimum number of selector pools
  int top_p = 3;          // P: per-selector top features merged into pool B
  // Pool B aggregation-score mode: Borda count over selector rankings.
  // 0 = match the union-mode pool size.
  int borda_top = 0;
  bool use_borda = false;
};

struct AlteredEbmConfig {
  double importance_threshold = 0.05;  // M, on sum-normalized importances
  enum class Comparison { both, either };
  Comparison comparison = Comparison::both;
};

struct PipelineResult {
  std::string pipeline;
  std::vector<std::string> selected_features;
  std::vector<int> selected_ids;  // into the input dataset's feature order
  AdditiveModel model;
  EvalResult eval;
  std::vector<AuditTerm> importance;
  DominanceReport dominance;
  SpuriousReport spurious;
  nlohmann::json manifest;
};

namespace detail {

inline PipelineResult fit_and_eval(const std::string& pipeline,
                                   const Dataset& train, const Dataset& test,
                                   const std::vector<int>& feature_ids,
                                   const EbmParams& ebm_params,
                                   nlohmann::json manifest,
                                   const std::vector<std::pair<int, int>>*
                                       interaction_whitelist = nullptr) {
  if (feature_ids.empty()) throw Error("empty feature pool");
  std::vector<int> ids = feature_ids;
  std::sort(ids.begin(), ids.end());  // model keeps original feature order

  const Dataset train_sub = train.select_features(ids);
  const Dataset test_sub = test.select_features(ids);
  const BinnedDataset bd = bin(train_sub);

  const auto t0 = std::chrono::steady_clock::now();
  PipelineResult res;
  res.model = fit_ebm(bd, ebm_params, interaction_whitelist);
  const double fit_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  res.pipeline = pipeline;
  res.selected_ids = ids;
  res.selected_features = train_sub.feature_names;
  res.eval = evaluate(res.model, test_sub, fit_seconds);
  res.importance = audit_terms(res.model);
  res.dominance = dominance_report(res.importance);
  res.spurious = spurious_report(res.importance);
  res.manifest = std::move(manifest);
  res.manifest["pipeline"] = pipeline;
  res.manifest["n_features"] = ids.size();
  res.manifest["ebm"] = {{"learning_rate", ebm_params.learning_rate},
                         {"outer_rounds", ebm_params.outer_rounds},
                         {"n_interactions", ebm_params.n_interactions},
                         {"validation_fraction", ebm_params.validation_fraction},
                         {"early_stop_patience", ebm_params.early_stop_patience},
                         {"seed", ebm_params.seed}};
  return res;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Ensemble 1: one cross-selector feeding the EBM
// ---------------------------------------------------------------------------

inline PipelineResult ensemble1(const Dataset& train, const Dataset& test,
                                const std::string& selector_name,
                                const SelectorConfig& sel_config,
                                const EbmParams& ebm_params) {
  std::vector<int> ids;
  nlohmann::json manifest;
  if (selector_name == "identity") {
    ids.resize(train.n_features());
    std::iota(ids.begin(), ids.end(), 0);
    manifest["selector"] = {{"name", "identity"}};
  } else {
    const SelectorOutput sel = run_selector(selector_name, train, sel_config);
    if (sel.selected.empty()) throw Error("empty feature pool");
    ids = sel.selected;
    manifest["selector"] = {{"name", sel.selector},
                            {"params", sel.params},
                            {"runtime_s", sel.runtime_s},
                            {"seed", sel_config.seed}};
  }
  return detail::fit_and_eval("ensemble1(" + selector_name + ")", train, test,
                              ids, ebm_params, std::move(manifest));
}

// ---------------------------------------------------------------------------
// Ensemble 2 pooling
// ---------------------------------------------------------------------------

// Pool A: features appearing in at least K selector subsets, ordered by
// occurrence count descending then feature id.
inline std::vector<int> pool_a(const std::vector<SelectorOutput>& outputs,
                               const PoolConfig& config) {
  if (outputs.empty()) throw Error("pool_a: no selector outputs");
  if (config.k_min_overlap < 1 ||
      config.k_min_overlap > static_cast<int>(outputs.size())) {
    throw Error("pool_a: K out of range");
  }
  std::map<int, int> counts;
  for (const auto& out : outputs) {
    for (int f : out.selected) ++counts[f];
  }
  std::vector<int> pool;
  for (const auto& [f, c] : counts) {
    if (c >= config.k_min_overlap) pool.push_back(f);
  }
  std::sort(pool.begin(), pool.end(), [&](int a, int b) {
    if (counts[a] != counts[b]) return counts[a] > counts[b];
    return a < b;
  });
  if (pool.empty()) {
    std::cerr << "warning: pool A is empty at K=" << config.k_min_overlap << "\n";
  }
  return pool;
}

// Pool B, union mode: deduplicated union of each selector's top-P features.
// Borda mode: global top features by sum over selectors of (m - rank).
inline std::vector<int> pool_b(const std::vector<SelectorOutput>& outputs,
                               const PoolConfig& config) {
  if (outputs.empty()) throw Error("pool_b: no selector outputs");
  if (config.top_p < 1) throw Error("pool_b: P must be >= 1");

  std::vector<int> union_pool;
  {
    std::map<int, int> best_rank;  // for ordering the union deterministically
    for (const auto& out : outputs) {
      const int p = std::min<int>(config.top_p, out.selected.size());
      for (int i = 0; i < p; ++i) {
        const int f = out.selected[i];
        auto it = best_rank.find(f);
        if (it == best_rank.end() || i < it->second) best_rank[f] = i;
      }
    }
    for (const auto& [f, r] : best_rank) union_pool.push_back(f);
    std::sort(union_pool.begin(), union_pool.end(), [&](int a, int b) {
      if (best_rank[a] != best_rank[b]) return best_rank[a] < best_rank[b];
      return a < b;
    });
  }
  if (!config.use_borda) return union_pool;

  std::map<int, double> borda;
  for (const auto& out : outputs) {
    const double m = static_cast<double>(out.scores.size());
    for (const auto& fs : out.scores) {
      borda[fs.feature] += m - fs.rank;
    }
  }
  std::vector<int> all;
  for (const auto& [f, s] : borda) all.push_back(f);
  std::sort(all.begin(), all.end(), [&](int a, int b) {
    if (borda[a] != borda[b]) return borda[a] > borda[b];
    return a < b;
  });
  const std::size_t take = config.borda_top > 0
                               ? static_cast<std::size_t>(config.borda_top)
                               : union_pool.size();
  if (all.size() > take) all.resize(take);
  return all;
}

inline PipelineResult pool_pipeline(const Dataset& train, const Dataset& test,
                                    const std::vector<SelectorOutput>& outputs,
                                    const PoolConfig& config, bool pool_is_a,
                                    const EbmParams& ebm_params) {
  const std::vector<int> ids =
      pool_is_a ? pool_a(outputs, config) : pool_b(outputs, config);
  nlohmann::json manifest;
  manifest["pool"] = {{"kind", pool_is_a ? "A" : "B"},
                      {"k_min_overlap", config.k_min_overlap},
                      {"top_p", config.top_p},
                      {"mode", (!pool_is_a && config.use_borda) ? "borda"
                                                                : "union"}};
  std::vector<std::string> selector_list;
  for (const auto& out : outputs) selector_list.push_back(out.selector);
  manifest["pool"]["selectors"] = selector_list;
  return detail::fit_and_eval(pool_is_a ? "pool_a" : "pool_b", train, test, ids,
                              ebm_params, std::move(manifest));
}

// ---------------------------------------------------------------------------
// Altered EBM: EBM as its own preselector plus rank-based pair pruning
// ---------------------------------------------------------------------------

inline PipelineResult altered_ebm(const Dataset& train, const Dataset& test,
                                  const AlteredEbmConfig& config,
                                  const EbmParams& ebm_params) {
  if (config.importance_threshold < 0) {
    throw Error("altered_ebm: threshold must be >= 0");
  }
  // Step 1: full EBM, keep features whose sum-normalized main importance
  // clears M.
  const BinnedDataset full_bd = bin(train);
  const AdditiveModel pre = fit_ebm(full_bd, ebm_params);

  double total = 0.0;
  for (const auto& ti : pre.importances) total += ti.importance;
  if (total <= 0) total = 1.0;

  std::vector<int> kept;
  std::vector<bool> is_kept(train.n_features(), false);
  for (const auto& ti : pre.importances) {
    if (!ti.is_pair && ti.importance / total >= config.importance_threshold) {
      kept.push_back(ti.f_i);
      is_kept[ti.f_i] = true;
    }
  }
  std::sort(kept.begin(), kept.end());
  if (kept.empty()) throw Error("threshold eliminates all features");

  // Step 2: drop pairs not out-ranked by their constituent mains.
  std::map<int, int> main_rank;
  for (const auto& ti : pre.importances) {
    if (!ti.is_pair) main_rank[ti.f_i] = ti.rank;
  }
  std::vector<std::pair<int, int>> surviving_pairs;
  for (const auto& ti : pre.importances) {
    if (!ti.is_pair) continue;
    const bool i_better = main_rank[ti.f_i] < ti.rank;
    const bool j_better = main_rank[ti.f_j] < ti.rank;
    const bool keep = config.comparison == AlteredEbmConfig::Comparison::both
                          ? (i_better && j_better)
                          : (i_better || j_better);
    if (keep && is_kept[ti.f_i] && is_kept[ti.f_j]) {
      surviving_pairs.emplace_back(ti.f_i, ti.f_j);
    }
  }

  // Step 3: refit on surviving features; surviving pairs are the interaction
  // candidate whitelist, re-indexed into the reduced feature order.
  std::map<int, int> new_index;
  for (std::size_t i = 0; i < kept.size(); ++i) new_index[kept[i]] = (int)i;
  std::vector<std::pair<int, int>> whitelist;
  for (const auto& [i, j] : surviving_pairs) {
    whitelist.emplace_back(new_index[i], new_index[j]);
  }

  nlohmann::json manifest;
  manifest["altered"] = {
      {"importance_threshold", config.importance_threshold},
      {"comparison",
       config.comparison == AlteredEbmConfig::Comparison::both ? "both"
                                                               : "either"},
      {"surviving_pairs", whitelist.size()}};
  return detail::fit_and_eval("altered_ebm", train, test, kept, ebm_params,
                              std::move(manifest), &whitelist);
}

}  // namespace glassboost
