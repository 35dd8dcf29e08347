#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "glassboost/common.hpp"
#include "glassboost/dataset.hpp"

namespace glassboost {

struct TreeNode {
  int split_feature = -1;  // -1 marks a leaf
  int split_bin = 0;       // go left if bin_index <= split_bin
  int left = -1;
  int right = -1;
  double leaf_value = 0.0;
  double cover = 0.0;  // training rows reaching this node
  double gain = 0.0;   // impurity / loss reduction of the split

  bool is_leaf() const { return split_feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;  // node 0 is the root

  double predict(const BinnedDataset& bd, std::size_t row) const {
    int id = 0;
    while (!nodes[id].is_leaf()) {
      const TreeNode& nd = nodes[id];
      id = (bd.bin_index[nd.split_feature][row] <= nd.split_bin) ? nd.left
                                                                 : nd.right;
    }
    return nodes[id].leaf_value;
  }

  // Cover-weighted expectation of the leaf values.
  double expected_value() const {
    double total = 0.0, weight = 0.0;
    for (const auto& nd : nodes) {
      if (nd.is_leaf()) {
        total += nd.cover * nd.leaf_value;
        weight += nd.cover;
      }
    }
    return weight > 0 ? total / weight : 0.0;
  }
};

enum class EnsembleMode { random_forest, gradient_boosted, adaboost };

struct TreeParams {
  int n_trees = 300;
  int max_depth = 6;
  double learning_rate = 0.1;
  double subsample = 1.0;
  double lambda = 1.0;  // L2 on gradient-boosted leaf values
  std::uint64_t seed = 0;

  static TreeParams forest_defaults() {
    TreeParams p;
    p.n_trees = 200;
    p.max_depth = 12;
    return p;
  }
  static TreeParams boosted_defaults() { return TreeParams{}; }
  static TreeParams adaboost_defaults() {
    TreeParams p;
    p.n_trees = 200;
    p.max_depth = 1;
    return p;
  }
};

struct TreeEnsemble {
  std::vector<Tree> trees;
  std::vector<double> tree_weights;
  EnsembleMode mode = EnsembleMode::gradient_boosted;
  double base_score = 0.0;
  std::size_t n_features = 0;

  // Pre-link score. random_forest averages leaf probabilities,
  // gradient_boosted accumulates shrunk log-odds steps on top of the base,
  // adaboost sums alpha-weighted {-1,+1} votes.
  double raw_score(const BinnedDataset& bd, std::size_t row) const {
    if (trees.empty()) return base_score;
    if (mode == EnsembleMode::random_forest) {
      double s = 0.0;
      for (const auto& t : trees) s += t.predict(bd, row);
      return s / static_cast<double>(trees.size());
    }
    double s = base_score;
    for (std::size_t t = 0; t < trees.size(); ++t) {
      s += tree_weights[t] * trees[t].predict(bd, row);
    }
    return s;
  }

  double predict_proba(const BinnedDataset& bd, std::size_t row) const {
    const double raw = raw_score(bd, row);
    switch (mode) {
      case EnsembleMode::random_forest:
        return std::clamp(raw, 0.0, 1.0);
      case EnsembleMode::gradient_boosted:
        return sigmoid(raw);
      case EnsembleMode::adaboost:
        return sigmoid(2.0 * raw);
    }
    return 0.5;
  }

  int predict_label(const BinnedDataset& bd, std::size_t row) const {
    return predict_proba(bd, row) > 0.5 ? 1 : 0;
  }

  // Per-tree weight as it enters raw_score; used by SHAP.
  double effective_weight(std::size_t t) const {
    if (mode == EnsembleMode::random_forest) {
      return 1.0 / static_cast<double>(trees.size());
    }
    return tree_weights[t];
  }
};

struct FeatureScore {
  int feature = 0;
  double score = 0.0;
  int rank = 0;  // 1 = most important
};

// Descending score, ties broken by ascending feature id.
inline std::vector<FeatureScore> rank_scores(const std::vector<double>& raw) {
  std::vector<FeatureScore> out(raw.size());
  std::vector<int> order(raw.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (raw[a] != raw[b]) return raw[a] > raw[b];
    return a < b;
  });
  for (std::size_t i = 0; i < order.size(); ++i) {
    out[order[i]] = FeatureScore{order[i], raw[order[i]],
                                 static_cast<int>(i) + 1};
  }
  return out;
}

inline void normalize_scores(std::vector<double>& raw) {
  double total = 0.0;
  for (double v : raw) total += v;
  if (total > 0) {
    for (double& v : raw) v /= total;
  }
}

// ---------------------------------------------------------------------------
// Tree growing
// ---------------------------------------------------------------------------

namespace detail {

struct SplitCandidate {
  int feature = -1;
  int bin = -1;
  double gain = 0.0;
};

inline double gini_impurity(double w0, double w1) {
  const double w = w0 + w1;
  if (w <= 0) return 0.0;
  const double p = w1 / w;
  return 2.0 * p * (1.0 - p);
}

// Grows one Gini classification tree on a (possibly bootstrapped) row set.
// `feature_pool` restricts candidate features per split when non-negative.
class GiniTreeGrower {
 public:
  GiniTreeGrower(const BinnedDataset& bd, int max_depth, int features_per_split,
                 Rng& rng)
      : bd_(bd),
        max_depth_(max_depth),
        features_per_split_(features_per_split),
        rng_(rng) {}

  Tree grow(const std::vector<std::uint32_t>& rows) {
    tree_.nodes.clear();
    grow_node(rows, 0);
    return std::move(tree_);
  }

 private:
  int grow_node(const std::vector<std::uint32_t>& rows, int depth) {
    const auto& y = bd_.target();
    double w1 = 0.0;
    for (auto r : rows) w1 += y[r];
    const double w0 = static_cast<double>(rows.size()) - w1;

    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    tree_.nodes[id].cover = static_cast<double>(rows.size());
    tree_.nodes[id].leaf_value = rows.empty() ? 0.0 : w1 / rows.size();
    if (depth >= max_depth_ || rows.size() < 2 || w1 == 0.0 || w0 == 0.0) {
      return id;
    }

    SplitCandidate best = find_split(rows, w0, w1);
    if (best.feature < 0) return id;

    std::vector<std::uint32_t> left_rows, right_rows;
    const auto& bins = bd_.bin_index[best.feature];
    for (auto r : rows) {
      (bins[r] <= best.bin ? left_rows : right_rows).push_back(r);
    }
    tree_.nodes[id].split_feature = best.feature;
    tree_.nodes[id].split_bin = best.bin;
    tree_.nodes[id].gain = best.gain;
    const int l = grow_node(left_rows, depth + 1);
    tree_.nodes[id].left = l;
    const int r = grow_node(right_rows, depth + 1);
    tree_.nodes[id].right = r;
    return id;
  }

  SplitCandidate find_split(const std::vector<std::uint32_t>& rows, double w0,
                            double w1) {
    const auto& y = bd_.target();
    const double n = w0 + w1;
    const double parent = n * gini_impurity(w0, w1);

    std::vector<int> features(bd_.n_features());
    std::iota(features.begin(), features.end(), 0);
    if (features_per_split_ > 0 &&
        features_per_split_ < static_cast<int>(features.size())) {
      // Partial Fisher-Yates; first k entries are the sampled candidates.
      for (int i = 0; i < features_per_split_; ++i) {
        std::size_t j = i + rand_index(rng_, features.size() - i);
        std::swap(features[i], features[j]);
      }
      features.resize(features_per_split_);
      std::sort(features.begin(), features.end());  // deterministic tie-break
    }

    SplitCandidate best;
    std::vector<double> h0, h1;
    for (int f : features) {
      const int nbins = bd_.bins(f);
      if (nbins < 2) continue;
      h0.assign(nbins, 0.0);
      h1.assign(nbins, 0.0);
      const auto& bins = bd_.bin_index[f];
      for (auto r : rows) {
        (y[r] ? h1 : h0)[bins[r]] += 1.0;
      }
      double l0 = 0.0, l1 = 0.0;
      for (int b = 0; b < nbins - 1; ++b) {
        l0 += h0[b];
        l1 += h1[b];
        const double nl = l0 + l1, nr = n - nl;
        if (nl <= 0 || nr <= 0) continue;
        const double gain = parent - nl * gini_impurity(l0, l1) -
                            nr * gini_impurity(w0 - l0, w1 - l1);
        if (gain > best.gain + 1e-12) {
          best = SplitCandidate{f, b, gain};
        }
      }
    }
    if (best.gain <= 1e-12) best.feature = -1;
    return best;
  }

  const BinnedDataset& bd_;
  Tree tree_;
  int max_depth_;
  int features_per_split_;
  Rng& rng_;
};

// One second-order regression tree on (gradient, hessian) pairs.
class GradientTreeGrower {
 public:
  GradientTreeGrower(const BinnedDataset& bd, const std::vector<double>& grad,
                     const std::vector<double>& hess, int max_depth,
                     double lambda)
      : bd_(bd), grad_(grad), hess_(hess), max_depth_(max_depth),
        lambda_(lambda) {}

  Tree grow(const std::vector<std::uint32_t>& rows) {
    tree_.nodes.clear();
    grow_node(rows, 0);
    return std::move(tree_);
  }

 private:
  double leaf_value(double g, double h) const { return -g / (h + lambda_); }
  double score(double g, double h) const { return g * g / (h + lambda_); }

  int grow_node(const std::vector<std::uint32_t>& rows, int depth) {
    double g = 0.0, h = 0.0;
    for (auto r : rows) {
      g += grad_[r];
      h += hess_[r];
    }
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    tree_.nodes[id].cover = static_cast<double>(rows.size());
    tree_.nodes[id].leaf_value = leaf_value(g, h);
    if (depth >= max_depth_ || rows.size() < 2) return id;

    SplitCandidate best;
    std::vector<double> hg, hh;
    for (std::size_t f = 0; f < bd_.n_features(); ++f) {
      const int nbins = bd_.bins(f);
      if (nbins < 2) continue;
      hg.assign(nbins, 0.0);
      hh.assign(nbins, 0.0);
      const auto& bins = bd_.bin_index[f];
      for (auto r : rows) {
        hg[bins[r]] += grad_[r];
        hh[bins[r]] += hess_[r];
      }
      double gl = 0.0, hl = 0.0;
      double cl = 0.0;
      std::vector<double> hc(nbins, 0.0);
      for (auto r : rows) hc[bins[r]] += 1.0;
      for (int b = 0; b < nbins - 1; ++b) {
        gl += hg[b];
        hl += hh[b];
        cl += hc[b];
        if (cl <= 0 || cl >= static_cast<double>(rows.size())) continue;
        const double gain =
            0.5 * (score(gl, hl) + score(g - gl, h - hl) - score(g, h));
        if (gain > best.gain + 1e-12) {
          best = SplitCandidate{static_cast<int>(f), b, gain};
        }
      }
    }
    if (best.gain <= 1e-12) return id;

    std::vector<std::uint32_t> left_rows, right_rows;
    const auto& bins = bd_.bin_index[best.feature];
    for (auto r : rows) {
      (bins[r] <= best.bin ? left_rows : right_rows).push_back(r);
    }
    tree_.nodes[id].split_feature = best.feature;
    tree_.nodes[id].split_bin = best.bin;
    tree_.nodes[id].gain = best.gain;
    const int l = grow_node(left_rows, depth + 1);
    tree_.nodes[id].left = l;
    const int r = grow_node(right_rows, depth + 1);
    tree_.nodes[id].right = r;
    return id;
  }

  const BinnedDataset& bd_;
  const std::vector<double>& grad_;
  const std::vector<double>& hess_;
  Tree tree_;
  int max_depth_;
  double lambda_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// fit_ensemble
// ---------------------------------------------------------------------------

inline TreeEnsemble fit_ensemble(const BinnedDataset& bd, EnsembleMode mode,
                                 const TreeParams& params) {
  if (bd.n_rows() == 0) throw Error("fit_ensemble: empty data");
  if (params.n_trees < 0) throw Error("fit_ensemble: n_trees < 0");
  if (params.max_depth < 1) throw Error("fit_ensemble: max_depth < 1");
  if (params.learning_rate <= 0) throw Error("fit_ensemble: learning_rate <= 0");
  if (!(params.subsample > 0 && params.subsample <= 1.0)) {
    throw Error("fit_ensemble: subsample out of (0,1]");
  }

  const std::size_t n = bd.n_rows();
  const auto& y = bd.target();
  double base_rate = 0.0;
  for (int v : y) base_rate += v;
  base_rate /= static_cast<double>(n);
  base_rate = std::clamp(base_rate, 1e-12, 1.0 - 1e-12);

  TreeEnsemble ens;
  ens.mode = mode;
  ens.n_features = bd.n_features();
  Rng rng(params.seed);

  if (mode == EnsembleMode::random_forest) {
    ens.base_score = base_rate;
    const int k = std::max(
        1, static_cast<int>(std::lround(std::sqrt((double)bd.n_features()))));
    for (int t = 0; t < params.n_trees; ++t) {
      std::vector<std::uint32_t> rows(n);
      for (std::size_t i = 0; i < n; ++i) {
        rows[i] = static_cast<std::uint32_t>(rand_index(rng, n));
      }
      detail::GiniTreeGrower grower(bd, params.max_depth, k, rng);
      ens.trees.push_back(grower.grow(rows));
      ens.tree_weights.push_back(1.0);
    }
    return ens;
  }

  if (mode == EnsembleMode::gradient_boosted) {
    ens.base_score = logit(base_rate);
    std::vector<double> raw(n, ens.base_score), grad(n), hess(n);
    std::vector<std::uint32_t> all_rows(n);
    std::iota(all_rows.begin(), all_rows.end(), 0);
    for (int t = 0; t < params.n_trees; ++t) {
      for (std::size_t i = 0; i < n; ++i) {
        const double p = sigmoid(raw[i]);
        grad[i] = p - y[i];
        hess[i] = std::max(p * (1.0 - p), 1e-16);
      }
      std::vector<std::uint32_t> rows;
      if (params.subsample < 1.0) {
        std::vector<std::uint32_t> shuffled = all_rows;
        shuffle_vec(shuffled, rng);
        const auto k_rows = std::max<std::size_t>(
            1, static_cast<std::size_t>(params.subsample * n));
        rows.assign(shuffled.begin(), shuffled.begin() + k_rows);
        std::sort(rows.begin(), rows.end());
      } else {
        rows = all_rows;
      }
      detail::GradientTreeGrower grower(bd, grad, hess, params.max_depth,
                                        params.lambda);
      Tree tree = grower.grow(rows);
      for (std::size_t i = 0; i < n; ++i) {
        raw[i] += params.learning_rate * tree.predict(bd, i);
      }
      ens.trees.push_back(std::move(tree));
      ens.tree_weights.push_back(params.learning_rate);
    }
    return ens;
  }

  // SAMME boosted stumps. Halts when no stump beats weighted error 0.5.
  ens.base_score = 0.0;
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  for (int t = 0; t < params.n_trees; ++t) {
    // Best weighted stump over all (feature, bin) thresholds, each side
    // labelled by weighted majority.
    int best_f = -1, best_b = -1;
    double best_err = 0.5;
    int best_left_label = 0, best_right_label = 1;
    double best_gain = 0.0;
    std::vector<double> wp, wn;
    double tot_p = 0.0, tot_n = 0.0;
    for (std::size_t i = 0; i < n; ++i) (y[i] ? tot_p : tot_n) += w[i];
    const double parent_gini = detail::gini_impurity(tot_n, tot_p);
    for (std::size_t f = 0; f < bd.n_features(); ++f) {
      const int nbins = bd.bins(f);
      if (nbins < 2) continue;
      wp.assign(nbins, 0.0);
      wn.assign(nbins, 0.0);
      const auto& bins = bd.bin_index[f];
      for (std::size_t i = 0; i < n; ++i) {
        (y[i] ? wp : wn)[bins[i]] += w[i];
      }
      double lp = 0.0, ln = 0.0;
      for (int b = 0; b < nbins - 1; ++b) {
        lp += wp[b];
        ln += wn[b];
        const double rp = tot_p - lp, rn = tot_n - ln;
        const int ll = lp >= ln ? 1 : 0;
        const int rl = rp >= rn ? 1 : 0;
        const double err = (ll ? ln : lp) + (rl ? rn : rp);
        if (err < best_err - 1e-12) {
          best_err = err;
          best_f = static_cast<int>(f);
          best_b = b;
          best_left_label = ll;
          best_right_label = rl;
          const double wl = lp + ln, wr = rp + rn;
          best_gain = parent_gini - wl * detail::gini_impurity(ln, lp) -
                      wr * detail::gini_impurity(rn, rp);
        }
      }
    }
    if (best_f < 0) break;  // weighted error >= 0.5 everywhere

    const double eps = std::max(best_err, 1e-12);
    const double alpha = std::log((1.0 - eps) / eps);
    Tree tree;
    tree.nodes.resize(3);
    tree.nodes[0].split_feature = best_f;
    tree.nodes[0].split_bin = best_b;
    tree.nodes[0].left = 1;
    tree.nodes[0].right = 2;
    tree.nodes[0].cover = static_cast<double>(n);
    tree.nodes[0].gain = best_gain;
    tree.nodes[1].leaf_value = best_left_label ? 1.0 : -1.0;
    tree.nodes[2].leaf_value = best_right_label ? 1.0 : -1.0;
    double cl = 0.0;
    const auto& bins = bd.bin_index[best_f];
    for (std::size_t i = 0; i < n; ++i) {
      if (bins[i] <= best_b) cl += 1.0;
    }
    tree.nodes[1].cover = cl;
    tree.nodes[2].cover = static_cast<double>(n) - cl;

    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const int pred = (bins[i] <= best_b) ? best_left_label : best_right_label;
      if (pred != y[i]) w[i] *= std::exp(alpha);
      norm += w[i];
    }
    for (auto& wi : w) wi /= norm;

    ens.trees.push_back(std::move(tree));
    ens.tree_weights.push_back(alpha);
  }
  return ens;
}

// ---------------------------------------------------------------------------
// Impurity importances (MDI / gain)
// ---------------------------------------------------------------------------

enum class ImpurityKind { mdi, gain };

inline std::vector<FeatureScore> impurity_importance(const TreeEnsemble& ens,
                                                     ImpurityKind kind) {
  std::vector<double> raw(ens.n_features, 0.0);
  for (std::size_t t = 0; t < ens.trees.size(); ++t) {
    const double w = (ens.mode == EnsembleMode::adaboost &&
                      kind == ImpurityKind::gain)
                         ? std::max(ens.tree_weights[t], 0.0)
                         : 1.0;
    for (const auto& nd : ens.trees[t].nodes) {
      if (!nd.is_leaf()) raw[nd.split_feature] += w * nd.gain;
    }
  }
  normalize_scores(raw);
  return rank_scores(raw);
}

// ---------------------------------------------------------------------------
// Permutation importance (mean decrease in accuracy)
// ---------------------------------------------------------------------------

inline std::vector<FeatureScore> permutation_importance(
    const TreeEnsemble& ens, const BinnedDataset& validation, int repeats,
    std::uint64_t seed) {
  if (validation.n_rows() == 0) throw Error("permutation: empty validation");
  if (repeats < 1) throw Error("permutation: repeats < 1");

  const std::size_t n = validation.n_rows();
  const auto& y = validation.target();
  auto error_of = [&](const BinnedDataset& bd) {
    std::size_t wrong = 0;
    for (std::size_t r = 0; r < n; ++r) {
      wrong += (ens.predict_label(bd, r) != y[r]);
    }
    return static_cast<double>(wrong) / static_cast<double>(n);
  };
  const double baseline = error_of(validation);

  Rng rng(seed);
  BinnedDataset scratch = validation;
  std::vector<double> raw(validation.n_features(), 0.0);
  for (std::size_t f = 0; f < validation.n_features(); ++f) {
    double delta_sum = 0.0;
    for (int rep = 0; rep < repeats; ++rep) {
      scratch.bin_index[f] = validation.bin_index[f];
      shuffle_vec(scratch.bin_index[f], rng);
      delta_sum += error_of(scratch) - baseline;
    }
    scratch.bin_index[f] = validation.bin_index[f];
    raw[f] = std::max(delta_sum / repeats, 0.0);
  }
  normalize_scores(raw);
  return rank_scores(raw);
}

}  // namespace glassboost
