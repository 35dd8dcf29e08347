#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "glassboost/common.hpp"
#include "glassboost/dataset.hpp"

namespace glassboost {

struct EbmParams {
  double learning_rate = 0.01;
  int outer_rounds = 5000;
  int inner_tree_leaves = 3;  // per-feature histogram regressor size
  int n_interactions = 10;
  double validation_fraction = 0.15;
  int early_stop_patience = 50;
  int pair_bins = 32;  // coarse resolution for pair grids
  double hessian_floor = 1e-6;
  std::uint64_t seed = 0;

  void validate() const {
    if (learning_rate <= 0) throw Error("ebm: learning_rate must be > 0");
    if (n_interactions < 0) throw Error("ebm: n_interactions must be >= 0");
    if (outer_rounds < 0) throw Error("ebm: outer_rounds must be >= 0");
    if (inner_tree_leaves < 1 || inner_tree_leaves > 3) {
      throw Error("ebm: inner_tree_leaves must be 1..3");
    }
    if (validation_fraction < 0 || validation_fraction >= 1) {
      throw Error("ebm: validation_fraction out of [0,1)");
    }
    if (pair_bins < 2) throw Error("ebm: pair_bins must be >= 2");
  }
};

struct PairTerm {
  int f_i = 0;
  int f_j = 0;                // f_i < f_j, indices into model features
  std::vector<double> grid;   // pair_bins_i x pair_bins_j, row-major
};

struct TermImportance {
  bool is_pair = false;
  int f_i = 0;
  int f_j = -1;  // -1 for main terms
  double importance = 0.0;
  int rank = 0;  // 1-based over mains and pairs jointly
};

struct TermContribution {
  bool is_pair = false;
  int f_i = 0;
  int f_j = -1;
  double value = 0.0;
};

struct RowExplanation {
  double intercept = 0.0;
  std::vector<TermContribution> terms;

  double total() const {
    double s = intercept;
    for (const auto& t : terms) s += t.value;
    return s;
  }
};

struct PairScore {
  int f_i = 0;
  int f_j = 0;
  double score = 0.0;
};

struct AdditiveModel {
  double intercept = 0.0;
  std::vector<FeatureBinning> schema;              // model feature scope
  std::vector<std::vector<double>> main_terms;     // per feature, per bin
  std::vector<PairTerm> pair_terms;
  std::vector<std::vector<int>> pair_bin_maps;     // fine bin -> coarse bin
  std::vector<int> pair_bins;                      // coarse bins per feature
  std::vector<std::vector<double>> bin_fractions;  // training bin distribution
  std::vector<TermImportance> importances;         // filled by fit

  std::size_t n_features() const { return schema.size(); }

  int bin_of(std::size_t f, double value) const { return schema[f].bin_of(value); }

  double main_contribution(std::size_t f, int b) const {
    if (b < 0) return 0.0;  // unseen categorical level
    return main_terms[f][b];
  }

  double pair_contribution(const PairTerm& pt, int bi, int bj) const {
    if (bi < 0 || bj < 0) return 0.0;
    const int ci = pair_bin_maps[pt.f_i][bi];
    const int cj = pair_bin_maps[pt.f_j][bj];
    return pt.grid[ci * pair_bins[pt.f_j] + cj];
  }

  double raw_score_bins(const std::vector<int>& bins) const {
    double s = intercept;
    for (std::size_t f = 0; f < n_features(); ++f) {
      s += main_contribution(f, bins[f]);
    }
    for (const auto& pt : pair_terms) {
      s += pair_contribution(pt, bins[pt.f_i], bins[pt.f_j]);
    }
    return s;
  }

  std::vector<int> bins_of_row(const Dataset& ds, std::size_t row) const {
    std::vector<int> bins(n_features());
    for (std::size_t f = 0; f < n_features(); ++f) {
      bins[f] = bin_of(f, ds.columns[f][row]);
    }
    return bins;
  }

  void check_conforms(const Dataset& ds) const {
    if (ds.n_features() != n_features()) {
      throw Error("model/dataset feature count mismatch");
    }
    for (std::size_t f = 0; f < n_features(); ++f) {
      if (ds.feature_names[f] != schema[f].name) {
        throw Error("model/dataset feature mismatch: " + ds.feature_names[f]);
      }
    }
  }

  double raw_score(const Dataset& ds, std::size_t row) const {
    return raw_score_bins(bins_of_row(ds, row));
  }

  double predict_proba(const Dataset& ds, std::size_t row) const {
    return sigmoid(raw_score(ds, row));
  }

  std::vector<double> predict(const Dataset& ds) const {
    check_conforms(ds);
    std::vector<double> out(ds.n_rows());
    for (std::size_t r = 0; r < ds.n_rows(); ++r) out[r] = predict_proba(ds, r);
    return out;
  }

  RowExplanation explain_row_bins(const std::vector<int>& bins) const {
    RowExplanation ex;
    ex.intercept = intercept;
    for (std::size_t f = 0; f < n_features(); ++f) {
      ex.terms.push_back(TermContribution{false, static_cast<int>(f), -1,
                                          main_contribution(f, bins[f])});
    }
    for (const auto& pt : pair_terms) {
      ex.terms.push_back(
          TermContribution{true, pt.f_i, pt.f_j,
                           pair_contribution(pt, bins[pt.f_i], bins[pt.f_j])});
    }
    return ex;
  }

  RowExplanation explain_row(const Dataset& ds, std::size_t row) const {
    return explain_row_bins(bins_of_row(ds, row));
  }
};

// ---------------------------------------------------------------------------
// Internals
// ---------------------------------------------------------------------------

namespace detail {

// Groups fine bins into <= coarse contiguous bins of roughly equal mass.
inline std::vector<int> coarse_bin_map(const std::vector<double>& fractions,
                                       int coarse) {
  const int nbins = static_cast<int>(fractions.size());
  std::vector<int> map(nbins, 0);
  if (nbins <= coarse) {
    std::iota(map.begin(), map.end(), 0);
    return map;
  }
  double cum = 0.0;
  int group = 0;
  const double per_group = 1.0 / coarse;
  for (int b = 0; b < nbins; ++b) {
    map[b] = std::min(group, coarse - 1);
    cum += fractions[b];
    while (cum >= per_group * (group + 1) && group < coarse - 1) ++group;
  }
  return map;
}

// Fits a <=3-leaf histogram regressor to per-bin (G, H) sums and writes the
// Newton step of each leaf into `delta` (same length as G).
inline void fit_1d_update(const std::vector<double>& g,
                          const std::vector<double>& h, int max_leaves,
                          double floor, std::vector<double>& delta) {
  const int nbins = static_cast<int>(g.size());
  delta.assign(nbins, 0.0);
  auto value = [&](double gs, double hs) { return -gs / (hs + floor); };
  auto score = [&](double gs, double hs) { return gs * gs / (hs + floor); };

  double gt = 0.0, ht = 0.0;
  for (int b = 0; b < nbins; ++b) {
    gt += g[b];
    ht += h[b];
  }
  if (nbins < 2 || max_leaves < 2) {
    std::fill(delta.begin(), delta.end(), value(gt, ht));
    return;
  }

  // Best single split.
  std::vector<double> pg(nbins + 1, 0.0), ph(nbins + 1, 0.0);
  for (int b = 0; b < nbins; ++b) {
    pg[b + 1] = pg[b] + g[b];
    ph[b + 1] = ph[b] + h[b];
  }
  auto seg_g = [&](int lo, int hi) { return pg[hi] - pg[lo]; };  // [lo, hi)
  auto seg_h = [&](int lo, int hi) { return ph[hi] - ph[lo]; };
  auto best_cut = [&](int lo, int hi, int& cut) {
    double best = -1.0;
    cut = -1;
    const double sg = seg_g(lo, hi), sh = seg_h(lo, hi);
    for (int c = lo + 1; c < hi; ++c) {
      const double gain = score(seg_g(lo, c), seg_h(lo, c)) +
                          score(seg_g(c, hi), seg_h(c, hi)) - score(sg, sh);
      if (gain > best + 1e-15) {
        best = gain;
        cut = c;
      }
    }
    return best;
  };

  int c1 = -1;
  best_cut(0, nbins, c1);
  if (c1 < 0) {
    std::fill(delta.begin(), delta.end(), value(gt, ht));
    return;
  }
  std::vector<int> cuts{c1};
  if (max_leaves >= 3) {
    int cl = -1, cr = -1;
    const double gl = best_cut(0, c1, cl);
    const double gr = best_cut(c1, nbins, cr);
    if (cl >= 0 && (cr < 0 || gl >= gr)) cuts.push_back(cl);
    else if (cr >= 0) cuts.push_back(cr);
  }
  std::sort(cuts.begin(), cuts.end());
  int lo = 0;
  for (std::size_t i = 0; i <= cuts.size(); ++i) {
    const int hi = (i < cuts.size()) ? cuts[i] : nbins;
    const double v = value(seg_g(lo, hi), seg_h(lo, hi));
    for (int b = lo; b < hi; ++b) delta[b] = v;
    lo = hi;
  }
}

// Best single axis-aligned 2D cut: gain of fitting Newton constants in the
// four quadrants of (ci, cj) versus one constant for the whole grid.
inline double fit_2d_update(const std::vector<double>& g,
                            const std::vector<double>& h, int bi, int bj,
                            double floor, std::vector<double>* delta) {
  auto score = [&](double gs, double hs) { return gs * gs / (hs + floor); };
  // Inclusive 2D prefix sums.
  std::vector<double> pg((bi + 1) * (bj + 1), 0.0), ph((bi + 1) * (bj + 1), 0.0);
  auto at = [&](std::vector<double>& p, int i, int j) -> double& {
    return p[i * (bj + 1) + j];
  };
  for (int i = 0; i < bi; ++i) {
    for (int j = 0; j < bj; ++j) {
      at(pg, i + 1, j + 1) = g[i * bj + j] + at(pg, i, j + 1) +
                             at(pg, i + 1, j) - at(pg, i, j);
      at(ph, i + 1, j + 1) = h[i * bj + j] + at(ph, i, j + 1) +
                             at(ph, i + 1, j) - at(ph, i, j);
    }
  }
  auto rect = [&](std::vector<double>& p, int i0, int i1, int j0, int j1) {
    return at(p, i1, j1) - at(p, i0, j1) - at(p, i1, j0) + at(p, i0, j0);
  };
  const double gt = at(pg, bi, bj), ht = at(ph, bi, bj);
  const double base = score(gt, ht);

  double best_gain = 0.0;
  int best_ci = -1, best_cj = -1;
  for (int ci = 1; ci < bi; ++ci) {
    for (int cj = 1; cj < bj; ++cj) {
      double s = 0.0;
      s += score(rect(pg, 0, ci, 0, cj), rect(ph, 0, ci, 0, cj));
      s += score(rect(pg, 0, ci, cj, bj), rect(ph, 0, ci, cj, bj));
      s += score(rect(pg, ci, bi, 0, cj), rect(ph, ci, bi, 0, cj));
      s += score(rect(pg, ci, bi, cj, bj), rect(ph, ci, bi, cj, bj));
      const double gain = 0.5 * (s - base);
      if (gain > best_gain + 1e-15) {
        best_gain = gain;
        best_ci = ci;
        best_cj = cj;
      }
    }
  }
  if (delta) {
    delta->assign(bi * bj, 0.0);
    if (best_ci < 0) return best_gain;
    for (int q = 0; q < 4; ++q) {
      const int i0 = (q < 2) ? 0 : best_ci, i1 = (q < 2) ? best_ci : bi;
      const int j0 = (q % 2 == 0) ? 0 : best_cj, j1 = (q % 2 == 0) ? best_cj : bj;
      const double v =
          -rect(pg, i0, i1, j0, j1) / (rect(ph, i0, i1, j0, j1) + floor);
      for (int i = i0; i < i1; ++i) {
        for (int j = j0; j < j1; ++j) (*delta)[i * bj + j] = v;
      }
    }
  }
  return best_gain;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Interaction detection (residual screening)
// ---------------------------------------------------------------------------

// Scores every feature pair by the loss reduction of the best single 2D cut
// fit to the model's residual gradients, and returns the top_k descending
// (ties by ascending pair id). `candidates` restricts the search when given.
inline std::vector<PairScore> detect_interactions(
    const AdditiveModel& model, const BinnedDataset& data, int top_k,
    const std::vector<std::pair<int, int>>* candidates = nullptr,
    double hessian_floor = 1e-6) {
  const std::size_t m = data.n_features();
  if (m < 2 || top_k <= 0) return {};

  const std::size_t n = data.n_rows();
  const auto& y = data.target();
  std::vector<double> grad(n), hess(n);
  for (std::size_t r = 0; r < n; ++r) {
    double s = model.intercept;
    for (std::size_t f = 0; f < m; ++f) {
      s += model.main_terms[f][data.bin_index[f][r]];
    }
    for (const auto& pt : model.pair_terms) {
      s += model.pair_contribution(pt, data.bin_index[pt.f_i][r],
                                   data.bin_index[pt.f_j][r]);
    }
    const double p = sigmoid(s);
    grad[r] = p - y[r];
    hess[r] = std::max(p * (1.0 - p), 1e-16);
  }

  std::vector<std::pair<int, int>> pairs;
  if (candidates) {
    pairs = *candidates;
  } else {
    for (std::size_t i = 0; i + 1 < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
      }
    }
  }

  std::vector<PairScore> scored;
  std::vector<double> g2d, h2d;
  for (const auto& [i, j] : pairs) {
    const int bi = model.pair_bins[i], bj = model.pair_bins[j];
    g2d.assign(bi * bj, 0.0);
    h2d.assign(bi * bj, 0.0);
    const auto& map_i = model.pair_bin_maps[i];
    const auto& map_j = model.pair_bin_maps[j];
    for (std::size_t r = 0; r < n; ++r) {
      const int cell =
          map_i[data.bin_index[i][r]] * bj + map_j[data.bin_index[j][r]];
      g2d[cell] += grad[r];
      h2d[cell] += hess[r];
    }
    const double score =
        detail::fit_2d_update(g2d, h2d, bi, bj, hessian_floor, nullptr);
    scored.push_back(PairScore{i, j, score});
  }
  std::sort(scored.begin(), scored.end(), [](const PairScore& a,
                                             const PairScore& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.f_i != b.f_i) return a.f_i < b.f_i;
    return a.f_j < b.f_j;
  });
  if (static_cast<int>(scored.size()) > top_k) scored.resize(top_k);
  return scored;
}

// ---------------------------------------------------------------------------
// Term importances
// ---------------------------------------------------------------------------

inline std::vector<TermImportance> term_importance(const AdditiveModel& model,
                                                   const BinnedDataset& train) {
  const std::size_t n = train.n_rows();
  std::vector<TermImportance> terms;
  for (std::size_t f = 0; f < model.n_features(); ++f) {
    double acc = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      acc += std::fabs(model.main_terms[f][train.bin_index[f][r]]);
    }
    terms.push_back(TermImportance{false, static_cast<int>(f), -1, acc / n, 0});
  }
  for (const auto& pt : model.pair_terms) {
    double acc = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      acc += std::fabs(model.pair_contribution(pt, train.bin_index[pt.f_i][r],
                                               train.bin_index[pt.f_j][r]));
    }
    terms.push_back(TermImportance{true, pt.f_i, pt.f_j, acc / n, 0});
  }
  // Joint ranking: descending importance, ties mains-first then ascending ids.
  std::vector<int> order(terms.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (terms[a].importance != terms[b].importance) {
      return terms[a].importance > terms[b].importance;
    }
    if (terms[a].is_pair != terms[b].is_pair) return !terms[a].is_pair;
    if (terms[a].f_i != terms[b].f_i) return terms[a].f_i < terms[b].f_i;
    return terms[a].f_j < terms[b].f_j;
  });
  for (std::size_t i = 0; i < order.size(); ++i) {
    terms[order[i]].rank = static_cast<int>(i) + 1;
  }
  return terms;
}

// ---------------------------------------------------------------------------
// fit_ebm: cyclic single-feature boosting + pair stage
// ---------------------------------------------------------------------------

inline AdditiveModel fit_ebm(
    const BinnedDataset& train, const EbmParams& params,
    const std::vector<std::pair<int, int>>* interaction_whitelist = nullptr,
    bool reverse_feature_order = false) {
  params.validate();
  if (train.n_rows() == 0) throw Error("fit_ebm: empty data");

  const std::size_t n = train.n_rows();
  const std::size_t m = train.n_features();
  const auto& y = train.target();

  AdditiveModel model;
  model.schema = train.schema;
  model.main_terms.resize(m);
  model.bin_fractions.resize(m);
  model.pair_bin_maps.resize(m);
  model.pair_bins.resize(m);
  for (std::size_t f = 0; f < m; ++f) {
    const int nb = train.bins(f);
    model.main_terms[f].assign(nb, 0.0);
    std::vector<double> frac(nb, 0.0);
    for (std::size_t r = 0; r < n; ++r) frac[train.bin_index[f][r]] += 1.0;
    for (auto& v : frac) v /= static_cast<double>(n);
    model.bin_fractions[f] = std::move(frac);
    model.pair_bin_maps[f] =
        detail::coarse_bin_map(model.bin_fractions[f], params.pair_bins);
    model.pair_bins[f] = model.pair_bin_maps[f].empty()
                             ? 1
                             : model.pair_bin_maps[f].back() + 1;
  }

  double base_rate = 0.0;
  for (int v : y) base_rate += v;
  base_rate = std::clamp(base_rate / n, 1e-12, 1.0 - 1e-12);
  model.intercept = logit(base_rate);

  // Internal validation carve-out (stratified) for early stopping.
  std::vector<std::uint32_t> boost_rows, valid_rows;
  {
    Rng rng(params.seed);
    std::vector<std::uint32_t> idx0, idx1;
    for (std::size_t r = 0; r < n; ++r) {
      (y[r] ? idx1 : idx0).push_back(static_cast<std::uint32_t>(r));
    }
    for (auto* cls : {&idx0, &idx1}) {
      shuffle_vec(*cls, rng);
      auto n_valid = static_cast<std::size_t>(
          std::llround(params.validation_fraction * cls->size()));
      if (n_valid >= cls->size()) n_valid = cls->size() - 1;
      valid_rows.insert(valid_rows.end(), cls->begin(), cls->begin() + n_valid);
      boost_rows.insert(boost_rows.end(), cls->begin() + n_valid, cls->end());
    }
    std::sort(boost_rows.begin(), boost_rows.end());
    std::sort(valid_rows.begin(), valid_rows.end());
  }
  const bool use_early_stop =
      params.early_stop_patience > 0 && valid_rows.size() >= 2;

  std::vector<double> raw(n, model.intercept);
  auto valid_logloss = [&]() {
    double ll = 0.0;
    for (auto r : valid_rows) {
      const double p = std::clamp(sigmoid(raw[r]), 1e-12, 1.0 - 1e-12);
      ll -= y[r] ? std::log(p) : std::log(1.0 - p);
    }
    return valid_rows.empty() ? 0.0 : ll / valid_rows.size();
  };

  std::vector<int> visit_order(m);
  std::iota(visit_order.begin(), visit_order.end(), 0);
  if (reverse_feature_order) {
    std::reverse(visit_order.begin(), visit_order.end());
  }

  // --- Stage 1: cyclic boosting of main effects ---
  {
    std::vector<double> g, h, delta;
    double best_loss = valid_logloss();
    auto best_mains = model.main_terms;
    int since_best = 0;
    for (int round = 0; round < params.outer_rounds; ++round) {
      for (int f : visit_order) {
        const int nb = train.bins(f);
        g.assign(nb, 0.0);
        h.assign(nb, 0.0);
        const auto& bins = train.bin_index[f];
        for (auto r : boost_rows) {
          const double p = sigmoid(raw[r]);
          g[bins[r]] += p - y[r];
          h[bins[r]] += std::max(p * (1.0 - p), 1e-16);
        }
        detail::fit_1d_update(g, h, params.inner_tree_leaves,
                              params.hessian_floor, delta);
        auto& term = model.main_terms[f];
        for (int b = 0; b < nb; ++b) term[b] += params.learning_rate * delta[b];
        for (std::size_t r = 0; r < n; ++r) {
          raw[r] += params.learning_rate * delta[bins[r]];
        }
      }
      if (use_early_stop) {
        const double loss = valid_logloss();
        if (loss < best_loss - 1e-9) {
          best_loss = loss;
          best_mains = model.main_terms;
          since_best = 0;
        } else if (++since_best >= params.early_stop_patience) {
          break;
        }
      }
    }
    if (use_early_stop && params.outer_rounds > 0) {
      model.main_terms = best_mains;
      for (std::size_t r = 0; r < n; ++r) {
        double s = model.intercept;
        for (std::size_t f = 0; f < m; ++f) {
          s += model.main_terms[f][train.bin_index[f][r]];
        }
        raw[r] = s;
      }
    }
  }

  // --- Stage 2: select pairs on stage-1 residuals ---
  std::vector<PairScore> chosen;
  if (params.n_interactions > 0 && m >= 2 && params.outer_rounds > 0) {
    chosen = detect_interactions(model, train, params.n_interactions,
                                 interaction_whitelist, params.hessian_floor);
  }
  for (const auto& ps : chosen) {
    PairTerm pt;
    pt.f_i = ps.f_i;
    pt.f_j = ps.f_j;
    pt.grid.assign(model.pair_bins[ps.f_i] * model.pair_bins[ps.f_j], 0.0);
    model.pair_terms.push_back(std::move(pt));
  }

  // --- Stage 3: cyclic boosting over selected pairs ---
  if (!model.pair_terms.empty()) {
    std::vector<double> g2d, h2d, delta;
    double best_loss = valid_logloss();
    auto best_pairs = model.pair_terms;
    int since_best = 0;
    for (int round = 0; round < params.outer_rounds; ++round) {
      for (auto& pt : model.pair_terms) {
        const int bi = model.pair_bins[pt.f_i], bj = model.pair_bins[pt.f_j];
        g2d.assign(bi * bj, 0.0);
        h2d.assign(bi * bj, 0.0);
        const auto& map_i = model.pair_bin_maps[pt.f_i];
        const auto& map_j = model.pair_bin_maps[pt.f_j];
        const auto& bins_i = train.bin_index[pt.f_i];
        const auto& bins_j = train.bin_index[pt.f_j];
        for (auto r : boost_rows) {
          const double p = sigmoid(raw[r]);
          const int cell = map_i[bins_i[r]] * bj + map_j[bins_j[r]];
          g2d[cell] += p - y[r];
          h2d[cell] += std::max(p * (1.0 - p), 1e-16);
        }
        detail::fit_2d_update(g2d, h2d, bi, bj, params.hessian_floor, &delta);
        for (int c = 0; c < bi * bj; ++c) {
          pt.grid[c] += params.learning_rate * delta[c];
        }
        for (std::size_t r = 0; r < n; ++r) {
          const int cell = map_i[bins_i[r]] * bj + map_j[bins_j[r]];
          raw[r] += params.learning_rate * delta[cell];
        }
      }
      if (use_early_stop) {
        const double loss = valid_logloss();
        if (loss < best_loss - 1e-9) {
          best_loss = loss;
          best_pairs = model.pair_terms;
          since_best = 0;
        } else if (++since_best >= params.early_stop_patience) {
          break;
        }
      }
    }
    if (use_early_stop) model.pair_terms = best_pairs;
  }

  // --- Centering: fold training-weighted term means into the intercept ---
  for (std::size_t f = 0; f < m; ++f) {
    double mean = 0.0;
    for (std::size_t b = 0; b < model.main_terms[f].size(); ++b) {
      mean += model.bin_fractions[f][b] * model.main_terms[f][b];
    }
    for (auto& v : model.main_terms[f]) v -= mean;
    model.intercept += mean;
  }
  for (auto& pt : model.pair_terms) {
    const int bj = model.pair_bins[pt.f_j];
    const auto& map_i = model.pair_bin_maps[pt.f_i];
    const auto& map_j = model.pair_bin_maps[pt.f_j];
    std::vector<double> joint(pt.grid.size(), 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      joint[map_i[train.bin_index[pt.f_i][r]] * bj +
            map_j[train.bin_index[pt.f_j][r]]] += 1.0;
    }
    double mean = 0.0;
    for (std::size_t c = 0; c < pt.grid.size(); ++c) {
      mean += (joint[c] / n) * pt.grid[c];
    }
    for (auto& v : pt.grid) v -= mean;
    model.intercept += mean;
  }

  model.importances = term_importance(model, train);
  return model;
}

}  // namespace glassboost
