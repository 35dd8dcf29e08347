#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "glassboost/common.hpp"
#include "glassboost/dataset.hpp"

namespace glassboost {

// Planted benchmark generator: informative signal features, correlated
// redundant copies, and pure-noise columns, with a configurable class
// imbalance. The first informative feature carries its signal only through
// an interaction with the second, which is what lets a full-feature additive
// model manufacture spurious interaction terms around the copies.
struct SynthConfig {
  std::size_t rows = 5000;
  int informative = 2;
  int redundant = 3;       // copies, cycling over the informative features
  int noise = 5;
  double rho = 0.95;       // correlation of each copy with its source
  double imbalance = 9.0;  // negatives per positive
  double main_coef = 2.0;  // main effect of informative features 1..k-1
  double interaction_coef = 0.9;
  std::uint64_t seed = 7;

  void validate() const {
    if (rows < 10) throw Error("synth: rows must be >= 10");
    if (informative < 1) throw Error("synth: informative must be >= 1");
    if (redundant < 0 || noise < 0) throw Error("synth: negative feature count");
    if (!(rho >= 0 && rho <= 1)) throw Error("synth: rho out of [0,1]");
    if (imbalance <= 0) throw Error("synth: imbalance must be > 0");
  }
};

inline Dataset synth_dataset(const SynthConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.rows;
  Rng rng(cfg.seed);

  Dataset ds;
  auto add_feature = [&](const std::string& name, std::vector<double> col) {
    ds.feature_names.push_back(name);
    ds.feature_kinds.push_back(FeatureKind::numeric);
    ds.columns.push_back(std::move(col));
    ds.raw_levels.emplace_back();
  };

  std::vector<std::vector<double>> inf(cfg.informative);
  for (int j = 0; j < cfg.informative; ++j) {
    inf[j].resize(n);
    for (auto& v : inf[j]) v = rand_normal(rng);
    add_feature("inf_" + std::to_string(j), inf[j]);
  }
  const double tail = std::sqrt(std::max(0.0, 1.0 - cfg.rho * cfg.rho));
  for (int j = 0; j < cfg.redundant; ++j) {
    const int src = j % cfg.informative;
    std::vector<double> col(n);
    for (std::size_t r = 0; r < n; ++r) {
      col[r] = cfg.rho * inf[src][r] + tail * rand_normal(rng);
    }
    add_feature("red_" + std::to_string(j), std::move(col));
  }
  for (int j = 0; j < cfg.noise; ++j) {
    std::vector<double> col(n);
    for (auto& v : col) v = rand_normal(rng);
    add_feature("noise_" + std::to_string(j), std::move(col));
  }

  // Linear score without intercept. inf_0 enters only through the
  // interaction, so its marginal main effect is zero.
  std::vector<double> score(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (int j = 1; j < cfg.informative; ++j) {
      score[r] += cfg.main_coef * inf[j][r];
    }
    if (cfg.informative >= 2) {
      score[r] += cfg.interaction_coef * inf[1][r] * (inf[0][r] > 0 ? 1.0 : -1.0);
    } else {
      score[r] += cfg.main_coef * inf[0][r];
    }
  }

  // Calibrate the intercept so the expected positive rate hits the target.
  const double target_rate = 1.0 / (1.0 + cfg.imbalance);
  double lo = -30.0, hi = 30.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    double rate = 0.0;
    for (double s : score) rate += sigmoid(s + mid);
    rate /= static_cast<double>(n);
    (rate < target_rate ? lo : hi) = mid;
  }
  const double intercept = 0.5 * (lo + hi);

  ds.target.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    ds.target[r] = rand_unit(rng) < sigmoid(score[r] + intercept) ? 1 : 0;
  }
  // Guarantee both classes at tiny sample sizes.
  bool has0 = false, has1 = false;
  for (int y : ds.target) (y ? has1 : has0) = true;
  if (!has0) ds.target[0] = 0;
  if (!has1) ds.target[0] = 1;
  return ds;
}

inline void write_csv(const Dataset& ds, const std::string& path,
                      const std::string& target_name = "target") {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path);
  for (const auto& name : ds.feature_names) out << name << ",";
  out << target_name << "\n";
  out.precision(17);
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    for (std::size_t f = 0; f < ds.n_features(); ++f) {
      const double v = ds.columns[f][r];
      if (std::isnan(v)) {
        // empty field = missing
      } else {
        out << v;
      }
      out << ",";
    }
    out << ds.target[r] << "\n";
  }
}

}  // namespace glassboost
