#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "glassboost/common.hpp"
#include "glassboost/dataset.hpp"
#include "glassboost/shap.hpp"
#include "glassboost/trees.hpp"

namespace glassboost {

inline TreeParams screening_boosted_defaults() {
  TreeParams p;
  p.n_trees = 50;
  p.max_depth = 3;
  return p;
}

struct SelectorConfig {
  double importance_cutoff = 0.02;
  double correlation_cutoff = 0.7;
  double vif_threshold = 10.0;
  double variance_threshold = 0.0;  // applied to pre-scaling variances
  int boruta_max_iterations = 100;
  double boruta_p_value = 0.05;
  int boruta_trees = 64;
  int boruta_depth = 8;
  int permutation_repeats = 5;
  double permutation_validation_fraction = 0.3;
  int shap_max_rows = 2000;  // row cap for mean |SHAP| scoring
  int max_bins = 256;
  TreeParams forest_params = TreeParams::forest_defaults();
  // Screening trees are kept short and few: deep, long boosted runs chase
  // residual noise and smear gain importance across uninformative features,
  // which defeats the relative-importance cutoff.
  TreeParams boosted_params = screening_boosted_defaults();
  TreeParams adaboost_params = TreeParams::adaboost_defaults();
  std::uint64_t seed = 0;
};

struct SelectorOutput {
  std::string selector;
  std::vector<FeatureScore> scores;  // over all input features
  std::vector<int> selected;         // descending score, ties ascending id
  std::map<std::string, double> params;
  double runtime_s = 0.0;
};

namespace detail {

inline std::vector<int> select_sorted(const std::vector<FeatureScore>& scores,
                                      const std::vector<bool>& keep) {
  std::vector<int> ids;
  for (std::size_t f = 0; f < scores.size(); ++f) {
    if (keep[f]) ids.push_back(static_cast<int>(f));
  }
  std::sort(ids.begin(), ids.end(), [&](int a, int b) {
    if (scores[a].score != scores[b].score) {
      return scores[a].score > scores[b].score;
    }
    return a < b;
  });
  return ids;
}

inline std::vector<int> select_by_cutoff(const std::vector<FeatureScore>& scores,
                                         double cutoff) {
  std::vector<bool> keep(scores.size());
  for (std::size_t f = 0; f < scores.size(); ++f) {
    keep[f] = scores[f].score >= cutoff;
  }
  return select_sorted(scores, keep);
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0 || syy <= 0) return 0.0;  // zero-variance convention
  return sxy / std::sqrt(sxx * syy);
}

// Least-squares R^2 of column `target_col` regressed (with intercept) on the
// other listed columns. Normal equations with partial-pivot elimination;
// a singular system reports R^2 = 1 (perfect collinearity).
inline double regression_r2(const Dataset& ds, const std::vector<int>& cols,
                            int target_col) {
  const std::size_t n = ds.n_rows();
  std::vector<const std::vector<double>*> xs;
  for (int c : cols) {
    if (c != target_col) xs.push_back(&ds.columns[c]);
  }
  const auto& yv = ds.columns[target_col];
  const std::size_t k = xs.size() + 1;  // + intercept

  std::vector<std::vector<double>> a(k, std::vector<double>(k + 1, 0.0));
  for (std::size_t r = 0; r < n; ++r) {
    std::vector<double> row(k);
    row[0] = 1.0;
    for (std::size_t j = 0; j < xs.size(); ++j) row[j + 1] = (*xs[j])[r];
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) a[i][j] += row[i] * row[j];
      a[i][k] += row[i] * yv[r];
    }
  }
  std::vector<double> beta(k, 0.0);
  bool singular = false;
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t piv = col;
    for (std::size_t i = col + 1; i < k; ++i) {
      if (std::fabs(a[i][col]) > std::fabs(a[piv][col])) piv = i;
    }
    if (std::fabs(a[piv][col]) < 1e-10) {
      singular = true;
      break;
    }
    std::swap(a[col], a[piv]);
    for (std::size_t i = 0; i < k; ++i) {
      if (i == col) continue;
      const double factor = a[i][col] / a[col][col];
      for (std::size_t j = col; j <= k; ++j) a[i][j] -= factor * a[col][j];
    }
  }
  double sst = 0.0, ssr = 0.0;
  double my = 0.0;
  for (double v : yv) my += v;
  my /= n;
  if (singular) return 1.0 - 1e-12;
  for (std::size_t i = 0; i < k; ++i) beta[i] = a[i][k] / a[i][i];
  for (std::size_t r = 0; r < n; ++r) {
    double pred = beta[0];
    for (std::size_t j = 0; j < xs.size(); ++j) pred += beta[j + 1] * (*xs[j])[r];
    ssr += (yv[r] - pred) * (yv[r] - pred);
    sst += (yv[r] - my) * (yv[r] - my);
  }
  if (sst <= 0) return 0.0;
  return std::clamp(1.0 - ssr / sst, 0.0, 1.0 - 1e-12);
}

// P(X >= hits) and P(X <= hits) for X ~ Binomial(n, 1/2).
inline std::pair<double, double> binomial_tails(int n, int hits) {
  std::vector<long double> logc(n + 1);
  for (int k = 1; k <= n; ++k) {
    logc[k] = logc[k - 1] + std::log((long double)(n - k + 1)) -
              std::log((long double)k);
  }
  const long double ln2n = n * std::log(2.0L);
  long double hi = 0.0L, lo = 0.0L;
  for (int k = 0; k <= n; ++k) {
    const long double p = std::exp(logc[k] - ln2n);
    if (k >= hits) hi += p;
    if (k <= hits) lo += p;
  }
  return {static_cast<double>(hi), static_cast<double>(lo)};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Filter-family selectors
// ---------------------------------------------------------------------------

inline SelectorOutput correlation_select(const Dataset& train,
                                         const SelectorConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!train.preprocessed) throw Error("correlation_select: preprocess first");
  const std::size_t m = train.n_features();
  if (m < 1) throw Error("correlation_select: no features");

  std::vector<double> yd(train.target.begin(), train.target.end());
  std::vector<double> raw(m);
  for (std::size_t f = 0; f < m; ++f) {
    raw[f] = std::fabs(detail::pearson(train.columns[f], yd));
  }
  SelectorOutput out;
  out.selector = "correlation";
  out.scores = rank_scores(raw);

  // Redundancy pruning: visit offending pairs in descending |rho| and drop
  // the member with the weaker target correlation.
  struct Offender {
    int a, b;
    double rho;
  };
  std::vector<Offender> pairs;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double rho =
          std::fabs(detail::pearson(train.columns[i], train.columns[j]));
      if (rho > config.correlation_cutoff) {
        pairs.push_back(Offender{static_cast<int>(i), static_cast<int>(j), rho});
      }
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Offender& a, const Offender& b) {
    if (a.rho != b.rho) return a.rho > b.rho;
    if (a.a != b.a) return a.a < b.a;
    return a.b < b.b;
  });
  std::vector<bool> alive(m, true);
  for (const auto& p : pairs) {
    if (!alive[p.a] || !alive[p.b]) continue;
    int drop;
    if (raw[p.a] != raw[p.b]) {
      drop = raw[p.a] < raw[p.b] ? p.a : p.b;
    } else {
      drop = std::max(p.a, p.b);
    }
    alive[drop] = false;
  }
  out.selected = detail::select_sorted(out.scores, alive);
  out.params = {{"correlation_cutoff", config.correlation_cutoff}};
  out.runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return out;
}

inline SelectorOutput vif_select(const Dataset& train,
                                 const SelectorConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!train.preprocessed) throw Error("vif_select: preprocess first");
  const std::size_t m = train.n_features();
  if (m < 2) throw Error("vif_select: need at least 2 features");

  std::vector<int> survivors(m);
  std::iota(survivors.begin(), survivors.end(), 0);
  std::vector<double> vif_final(m, 0.0);

  while (survivors.size() >= 2) {
    double max_vif = 0.0;
    int worst = -1;
    for (int f : survivors) {
      const double r2 = detail::regression_r2(train, survivors, f);
      const double v = 1.0 / (1.0 - r2);
      vif_final[f] = v;
      if (v > max_vif || (v == max_vif && f > worst)) {
        max_vif = v;
        worst = f;
      }
    }
    if (max_vif <= config.vif_threshold) break;
    survivors.erase(std::find(survivors.begin(), survivors.end(), worst));
  }

  std::vector<double> raw(m, 0.0);
  std::vector<bool> alive(m, false);
  for (int f : survivors) {
    raw[f] = 1.0 / vif_final[f];
    alive[f] = true;
  }
  SelectorOutput out;
  out.selector = "vif";
  out.scores = rank_scores(raw);
  out.selected = detail::select_sorted(out.scores, alive);
  out.params = {{"vif_threshold", config.vif_threshold}};
  out.runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return out;
}

inline SelectorOutput variance_select(const Dataset& train,
                                      const SelectorConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!train.preprocessed) throw Error("variance_select: preprocess first");
  const std::size_t m = train.n_features();
  const std::size_t n = train.n_rows();

  std::vector<double> raw(m, 0.0);
  for (std::size_t f = 0; f < m; ++f) {
    // Sample variance of pre-scaling (post-imputation) values.
    const ScalingParams sp =
        train.prep ? train.prep->scaling_params[f] : ScalingParams{};
    double mean = 0.0;
    std::vector<double> vals(n);
    for (std::size_t r = 0; r < n; ++r) {
      vals[r] = sp.scaled ? train.columns[f][r] * sp.stddev + sp.mean
                          : train.columns[f][r];
      mean += vals[r];
    }
    mean /= n;
    double acc = 0.0;
    for (double v : vals) acc += (v - mean) * (v - mean);
    raw[f] = n > 1 ? acc / (n - 1) : 0.0;
  }
  SelectorOutput out;
  out.selector = "variance_threshold";
  out.scores = rank_scores(raw);
  std::vector<bool> keep(m);
  for (std::size_t f = 0; f < m; ++f) {
    keep[f] = raw[f] > config.variance_threshold;
  }
  out.selected = detail::select_sorted(out.scores, keep);
  if (out.selected.empty()) {
    std::cerr << "warning: variance_threshold " << config.variance_threshold
              << " removes every feature\n";
  }
  out.params = {{"variance_threshold", config.variance_threshold}};
  out.runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return out;
}

inline SelectorOutput boruta_select(const Dataset& train,
                                    const SelectorConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!train.preprocessed) throw Error("boruta_select: preprocess first");
  if (config.boruta_max_iterations < 1) throw Error("boruta: no iterations");
  const std::size_t m = train.n_features();
  if (m < 1) throw Error("boruta_select: no features");

  const BinnedDataset base = bin(train, config.max_bins);
  Rng rng(config.seed);

  std::vector<int> hits(m, 0);
  enum class State { tentative, confirmed, rejected };
  std::vector<State> state(m, State::tentative);
  int iterations = 0;

  for (int it = 0; it < config.boruta_max_iterations; ++it) {
    // Shadow features: shuffled copies of every real feature.
    BinnedDataset ext = base;
    ext.schema.reserve(2 * m);
    ext.bin_index.reserve(2 * m);
    for (std::size_t f = 0; f < m; ++f) {
      ext.schema.push_back(base.schema[f]);
      ext.schema.back().name += "__shadow";
      std::vector<std::uint16_t> col = base.bin_index[f];
      shuffle_vec(col, rng);
      ext.bin_index.push_back(std::move(col));
    }
    TreeParams tp;
    tp.n_trees = config.boruta_trees;
    tp.max_depth = config.boruta_depth;
    tp.seed = rng();
    const TreeEnsemble forest = fit_ensemble(ext, EnsembleMode::random_forest, tp);
    const auto mdi = impurity_importance(forest, ImpurityKind::mdi);
    double shadow_max = 0.0;
    for (std::size_t f = m; f < 2 * m; ++f) {
      shadow_max = std::max(shadow_max, mdi[f].score);
    }
    for (std::size_t f = 0; f < m; ++f) {
      if (mdi[f].score > shadow_max) ++hits[f];
    }
    ++iterations;

    // Two-sided binomial test against p = 1/2.
    bool undecided = false;
    for (std::size_t f = 0; f < m; ++f) {
      const auto [hi, lo] = detail::binomial_tails(iterations, hits[f]);
      if (hi <= config.boruta_p_value / 2) state[f] = State::confirmed;
      else if (lo <= config.boruta_p_value / 2) state[f] = State::rejected;
      else {
        state[f] = State::tentative;
        undecided = true;
      }
    }
    if (!undecided) break;
  }

  std::vector<double> raw(m);
  std::vector<bool> keep(m);
  for (std::size_t f = 0; f < m; ++f) {
    raw[f] = static_cast<double>(hits[f]) / iterations;
    keep[f] = state[f] != State::rejected;  // confirmed or tentative
  }
  SelectorOutput out;
  out.selector = "boruta";
  out.scores = rank_scores(raw);
  out.selected = detail::select_sorted(out.scores, keep);
  out.params = {{"max_iterations", (double)config.boruta_max_iterations},
                {"p_value", config.boruta_p_value},
                {"iterations_run", (double)iterations},
                {"trees", (double)config.boruta_trees}};
  out.runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return out;
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& selector_names() {
  static const std::vector<std::string> names = {
      "shap",        "adaboost", "xgboost",
      "random_forest", "correlation", "vif",
      "variance_threshold", "permutation", "boruta"};
  return names;
}

inline SelectorOutput run_selector(const std::string& name,
                                   const Dataset& train,
                                   const SelectorConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!train.preprocessed) throw Error("run_selector: preprocess first");

  auto finish = [&](SelectorOutput out) {
    out.runtime_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return out;
  };
  auto model_based = [&](const std::string& sel,
                         std::vector<FeatureScore> scores,
                         std::map<std::string, double> params) {
    SelectorOutput out;
    out.selector = sel;
    out.scores = std::move(scores);
    out.selected = detail::select_by_cutoff(out.scores, config.importance_cutoff);
    out.params = std::move(params);
    out.params["importance_cutoff"] = config.importance_cutoff;
    return finish(std::move(out));
  };

  if (name == "shap") {
    BinnedDataset bd = bin(train, config.max_bins);
    TreeParams tp = config.boosted_params;
    tp.seed = config.seed;
    const TreeEnsemble ens = fit_ensemble(bd, EnsembleMode::gradient_boosted, tp);
    // Score on a deterministic, evenly strided row subset when large.
    BinnedDataset rows = bd;
    const std::size_t cap = static_cast<std::size_t>(config.shap_max_rows);
    if (bd.n_rows() > cap && cap > 0) {
      std::vector<std::size_t> keep;
      const double stride = static_cast<double>(bd.n_rows()) / cap;
      for (std::size_t i = 0; i < cap; ++i) {
        keep.push_back(static_cast<std::size_t>(i * stride));
      }
      rows.bin_index.assign(bd.n_features(), {});
      Dataset sub = bd.source->select_rows(keep);
      rows = bin_with_schema(sub, bd.schema);
    }
    const ShapResult shap = tree_shap(ens, rows);
    return model_based("shap", shap.scores,
                       {{"n_trees", (double)tp.n_trees},
                        {"max_depth", (double)tp.max_depth},
                        {"learning_rate", tp.learning_rate}});
  }
  if (name == "xgboost") {
    BinnedDataset bd = bin(train, config.max_bins);
    TreeParams tp = config.boosted_params;
    tp.seed = config.seed;
    const TreeEnsemble ens = fit_ensemble(bd, EnsembleMode::gradient_boosted, tp);
    return model_based("xgboost", impurity_importance(ens, ImpurityKind::gain),
                       {{"n_trees", (double)tp.n_trees},
                        {"max_depth", (double)tp.max_depth},
                        {"learning_rate", tp.learning_rate}});
  }
  if (name == "adaboost") {
    BinnedDataset bd = bin(train, config.max_bins);
    TreeParams tp = config.adaboost_params;
    tp.seed = config.seed;
    const TreeEnsemble ens = fit_ensemble(bd, EnsembleMode::adaboost, tp);
    return model_based("adaboost", impurity_importance(ens, ImpurityKind::gain),
                       {{"n_stumps", (double)tp.n_trees}});
  }
  if (name == "random_forest") {
    BinnedDataset bd = bin(train, config.max_bins);
    TreeParams tp = config.forest_params;
    tp.seed = config.seed;
    const TreeEnsemble ens = fit_ensemble(bd, EnsembleMode::random_forest, tp);
    return model_based("random_forest",
                       impurity_importance(ens, ImpurityKind::mdi),
                       {{"n_trees", (double)tp.n_trees},
                        {"max_depth", (double)tp.max_depth}});
  }
  if (name == "permutation" || name == "permutation_importance") {
    // Forest fit on a sub-train carve-out, permutation within the held-out
    // validation fold.
    const SplitPair sp =
        split(train, 1.0 - config.permutation_validation_fraction, config.seed);
    BinnedDataset fit_bd = bin(sp.train, config.max_bins);
    BinnedDataset val_bd = bin_with_schema(sp.test, fit_bd.schema);
    TreeParams tp = config.forest_params;
    tp.seed = config.seed;
    const TreeEnsemble ens = fit_ensemble(fit_bd, EnsembleMode::random_forest, tp);
    return model_based(
        "permutation",
        permutation_importance(ens, val_bd, config.permutation_repeats,
                               config.seed + 1),
        {{"repeats", (double)config.permutation_repeats},
         {"validation_fraction", config.permutation_validation_fraction}});
  }
  if (name == "correlation") return finish(correlation_select(train, config));
  if (name == "vif") return finish(vif_select(train, config));
  if (name == "variance_threshold") {
    return finish(variance_select(train, config));
  }
  if (name == "boruta") return finish(boruta_select(train, config));
  throw Error("unknown selector: " + name);
}

}  // namespace glassboost
