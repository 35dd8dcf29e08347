#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "glassboost/common.hpp"
#include "glassboost/dataset.hpp"
#include "glassboost/trees.hpp"

namespace glassboost {

struct ShapResult {
  std::vector<std::vector<double>> phi;  // per row, per feature
  double base_value = 0.0;
  std::vector<FeatureScore> scores;  // mean |phi| per feature, normalized
};

namespace detail {

struct PathElement {
  int feature_index = -1;
  double zero_fraction = 0.0;
  double one_fraction = 0.0;
  double pweight = 0.0;
};

inline void extend_path(PathElement* path, int depth, double zero_fraction,
                        double one_fraction, int feature_index) {
  path[depth].feature_index = feature_index;
  path[depth].zero_fraction = zero_fraction;
  path[depth].one_fraction = one_fraction;
  path[depth].pweight = (depth == 0) ? 1.0 : 0.0;
  for (int i = depth - 1; i >= 0; --i) {
    path[i + 1].pweight +=
        one_fraction * path[i].pweight * (i + 1) / static_cast<double>(depth + 1);
    path[i].pweight =
        zero_fraction * path[i].pweight * (depth - i) /
        static_cast<double>(depth + 1);
  }
}

inline void unwind_path(PathElement* path, int depth, int index) {
  const double one_fraction = path[index].one_fraction;
  const double zero_fraction = path[index].zero_fraction;
  double next_one_portion = path[depth].pweight;
  for (int i = depth - 1; i >= 0; --i) {
    if (one_fraction != 0) {
      const double tmp = path[i].pweight;
      path[i].pweight =
          next_one_portion * (depth + 1) / static_cast<double>((i + 1) * one_fraction);
      next_one_portion =
          tmp - path[i].pweight * zero_fraction * (depth - i) /
                    static_cast<double>(depth + 1);
    } else {
      path[i].pweight =
          path[i].pweight * (depth + 1) /
          static_cast<double>(zero_fraction * (depth - i));
    }
  }
  for (int i = index; i < depth; ++i) {
    path[i].feature_index = path[i + 1].feature_index;
    path[i].zero_fraction = path[i + 1].zero_fraction;
    path[i].one_fraction = path[i + 1].one_fraction;
  }
}

inline double unwound_path_sum(const PathElement* path, int depth, int index) {
  const double one_fraction = path[index].one_fraction;
  const double zero_fraction = path[index].zero_fraction;
  double next_one_portion = path[depth].pweight;
  double total = 0.0;
  if (one_fraction != 0) {
    for (int i = depth - 1; i >= 0; --i) {
      const double tmp = next_one_portion / static_cast<double>((i + 1) * one_fraction);
      total += tmp;
      next_one_portion = path[i].pweight - tmp * zero_fraction * (depth - i);
    }
  } else {
    for (int i = depth - 1; i >= 0; --i) {
      total += path[i].pweight / (zero_fraction * (depth - i));
    }
  }
  return total * (depth + 1);
}

inline void tree_shap_recurse(const Tree& tree, const BinnedDataset& bd,
                              std::size_t row, double* phi, int node,
                              int depth, PathElement* parent_path,
                              double parent_zero_fraction,
                              double parent_one_fraction,
                              int parent_feature_index) {
  PathElement* path = parent_path + depth + 1;
  std::copy(parent_path, parent_path + depth + 1, path);
  extend_path(path, depth, parent_zero_fraction, parent_one_fraction,
              parent_feature_index);

  const TreeNode& nd = tree.nodes[node];
  if (nd.is_leaf()) {
    for (int i = 1; i <= depth; ++i) {
      const double w = unwound_path_sum(path, depth, i);
      const PathElement& el = path[i];
      phi[el.feature_index] +=
          w * (el.one_fraction - el.zero_fraction) * nd.leaf_value;
    }
    return;
  }

  const int f = nd.split_feature;
  const bool goes_left = bd.bin_index[f][row] <= nd.split_bin;
  const int hot = goes_left ? nd.left : nd.right;
  const int cold = goes_left ? nd.right : nd.left;
  const double hot_zero_fraction = tree.nodes[hot].cover / nd.cover;
  const double cold_zero_fraction = tree.nodes[cold].cover / nd.cover;
  double incoming_zero_fraction = 1.0;
  double incoming_one_fraction = 1.0;

  // If this feature already appears on the path, undo the earlier split.
  int index = 0;
  for (; index <= depth; ++index) {
    if (path[index].feature_index == f) break;
  }
  if (index != depth + 1) {
    incoming_zero_fraction = path[index].zero_fraction;
    incoming_one_fraction = path[index].one_fraction;
    unwind_path(path, depth, index);
    depth -= 1;
  }

  tree_shap_recurse(tree, bd, row, phi, hot, depth + 1, path,
                    hot_zero_fraction * incoming_zero_fraction,
                    incoming_one_fraction, f);
  tree_shap_recurse(tree, bd, row, phi, cold, depth + 1, path,
                    cold_zero_fraction * incoming_zero_fraction, 0.0, f);
}

inline int tree_max_depth(const Tree& tree, int node = 0, int depth = 0) {
  if (tree.nodes[node].is_leaf()) return depth;
  return std::max(tree_max_depth(tree, tree.nodes[node].left, depth + 1),
                  tree_max_depth(tree, tree.nodes[node].right, depth + 1));
}

}  // namespace detail

// Path-dependent TreeSHAP. Satisfies local accuracy:
// base_value + sum(phi) == raw_score for every row.
inline ShapResult tree_shap(const TreeEnsemble& ens, const BinnedDataset& bd) {
  const std::size_t n = bd.n_rows();
  const std::size_t m = ens.n_features;
  ShapResult res;
  res.phi.assign(n, std::vector<double>(m, 0.0));

  if (ens.trees.empty()) {
    res.base_value = ens.base_score;
  } else {
    res.base_value =
        (ens.mode == EnsembleMode::random_forest) ? 0.0 : ens.base_score;
    for (std::size_t t = 0; t < ens.trees.size(); ++t) {
      res.base_value += ens.effective_weight(t) * ens.trees[t].expected_value();
    }
  }

  std::vector<double> phi_tree(m);
  for (std::size_t t = 0; t < ens.trees.size(); ++t) {
    const Tree& tree = ens.trees[t];
    const double w = ens.effective_weight(t);
    const int d = detail::tree_max_depth(tree) + 2;
    std::vector<detail::PathElement> path_store((d * (d + 1)) / 2 + d);
    for (std::size_t r = 0; r < n; ++r) {
      std::fill(phi_tree.begin(), phi_tree.end(), 0.0);
      detail::tree_shap_recurse(tree, bd, r, phi_tree.data(), 0, 0,
                                path_store.data(), 1.0, 1.0, -1);
      for (std::size_t f = 0; f < m; ++f) res.phi[r][f] += w * phi_tree[f];
    }
  }

  std::vector<double> mean_abs(m, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t f = 0; f < m; ++f) mean_abs[f] += std::fabs(res.phi[r][f]);
  }
  for (auto& v : mean_abs) v /= static_cast<double>(std::max<std::size_t>(n, 1));
  normalize_scores(mean_abs);
  res.scores = rank_scores(mean_abs);
  return res;
}

}  // namespace glassboost
