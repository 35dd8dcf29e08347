#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "glassboost/common.hpp"
#include "glassboost/dataset.hpp"
#include "glassboost/selectors.hpp"
#include "glassboost/synth.hpp"

using namespace glassboost;

namespace {

Dataset prepped_synth(std::size_t rows, std::uint64_t seed,
                      double imbalance = 3.0) {
  SynthConfig cfg;
  cfg.rows = rows;
  cfg.seed = seed;
  cfg.imbalance = imbalance;
  auto [ds, rep] = preprocess(synth_dataset(cfg));
  return ds;
}

Dataset make_numeric(const std::vector<std::string>& names,
                     std::vector<std::vector<double>> cols,
                     std::vector<int> target) {
  Dataset ds;
  ds.feature_names = names;
  ds.feature_kinds.assign(names.size(), FeatureKind::numeric);
  ds.columns = std::move(cols);
  ds.raw_levels.resize(names.size());
  ds.target = std::move(target);
  auto [out, rep] = preprocess(ds);
  return out;
}

// Independent oracle for VIF: diagonal of the inverse correlation matrix,
// computed with a plain Gauss-Jordan inversion.
std::vector<double> vif_oracle(const Dataset& ds) {
  const std::size_t m = ds.n_features();
  std::vector<std::vector<double>> r(m, std::vector<double>(2 * m, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      r[i][j] = detail::pearson(ds.columns[i], ds.columns[j]);
    }
    r[i][m + i] = 1.0;
  }
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t piv = col;
    for (std::size_t i = col + 1; i < m; ++i) {
      if (std::fabs(r[i][col]) > std::fabs(r[piv][col])) piv = i;
    }
    std::swap(r[col], r[piv]);
    const double d = r[col][col];
    for (auto& v : r[col]) v /= d;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == col) continue;
      const double factor = r[i][col];
      for (std::size_t j = 0; j < 2 * m; ++j) r[i][j] -= factor * r[col][j];
    }
  }
  std::vector<double> vif(m);
  for (std::size_t i = 0; i < m; ++i) vif[i] = r[i][m + i];
  return vif;
}

}  // namespace

TEST_CASE("run_selector rejects unknown names and raw datasets") {
  Dataset ds = prepped_synth(100, 1);
  CHECK_THROWS_WITH(run_selector("mrmr", ds, SelectorConfig{}),
                    Catch::Matchers::ContainsSubstring("unknown selector"));
  SynthConfig cfg;
  cfg.rows = 100;
  Dataset raw = synth_dataset(cfg);
  CHECK_THROWS_AS(run_selector("xgboost", raw, SelectorConfig{}), Error);
}

TEST_CASE("all nine selectors produce well-formed, deterministic output") {
  Dataset ds = prepped_synth(600, 19);
  SelectorConfig config;
  config.boruta_max_iterations = 25;
  config.seed = 5;
  for (const auto& name : selector_names()) {
    CAPTURE(name);
    SelectorOutput a = run_selector(name, ds, config);
    SelectorOutput b = run_selector(name, ds, config);
    CHECK(a.selector == name);
    REQUIRE(a.scores.size() == ds.n_features());
    CHECK(!a.params.empty());
    CHECK(a.runtime_s >= 0.0);
    // Determinism (runtime aside).
    REQUIRE(b.selected == a.selected);
    for (std::size_t f = 0; f < a.scores.size(); ++f) {
      CHECK(a.scores[f].feature == static_cast<int>(f));
      CHECK(a.scores[f].score == b.scores[f].score);
    }
    // Selected order: descending score, ties by ascending id.
    for (std::size_t i = 1; i < a.selected.size(); ++i) {
      const auto& prev = a.scores[a.selected[i - 1]];
      const auto& cur = a.scores[a.selected[i]];
      const bool ordered = prev.score > cur.score ||
                           (prev.score == cur.score &&
                            prev.feature < cur.feature);
      CHECK(ordered);
    }
  }
}

TEST_CASE("model-based selectors find the planted signal and drop noise") {
  Dataset ds = prepped_synth(2000, 23);
  SelectorConfig config;
  config.seed = 1;
  for (const std::string name :
       {"shap", "xgboost", "adaboost", "random_forest", "permutation"}) {
    CAPTURE(name);
    SelectorOutput out = run_selector(name, ds, config);
    REQUIRE(!out.selected.empty());
    // The strong main effect (inf_1, id 1) survives every cutoff.
    CHECK(std::find(out.selected.begin(), out.selected.end(), 1) !=
          out.selected.end());
    double total = 0.0;
    for (const auto& fs : out.scores) total += fs.score;
    CHECK(total == Catch::Approx(1.0).margin(1e-9));
    // Signal dwarfs every pure-noise feature (ids 5..9).
    double max_noise = 0.0;
    for (int f = 5; f < 10; ++f) max_noise = std::max(max_noise, out.scores[f].score);
    CHECK(out.scores[1].score > 2.0 * max_noise);
  }

  // The cutoff is applied mechanically: raising it must shrink the pool.
  SelectorConfig strict = config;
  strict.importance_cutoff = 0.09;
  SelectorOutput strict_out = run_selector("xgboost", ds, strict);
  SelectorOutput loose_out = run_selector("xgboost", ds, config);
  CHECK(strict_out.selected.size() < loose_out.selected.size());
  for (int f : strict_out.selected) {
    CHECK(strict_out.scores[f].score >= 0.09);
  }
}

TEST_CASE("correlation selector scores |pearson| and prunes redundant copies") {
  // x0 carries signal; x1 is an exact copy; x2 is independent noise.
  Rng rng(99);
  std::vector<double> x0(400), x2(400);
  std::vector<int> y(400);
  for (std::size_t i = 0; i < 400; ++i) {
    x0[i] = rand_normal(rng);
    x2[i] = rand_normal(rng);
    y[i] = x0[i] + 0.5 * rand_normal(rng) > 0 ? 1 : 0;
  }
  Dataset ds = make_numeric({"x0", "x1", "x2"}, {x0, x0, x2}, y);
  SelectorConfig config;
  SelectorOutput out = run_selector("correlation", ds, config);

  std::vector<double> yd(y.begin(), y.end());
  for (int f = 0; f < 3; ++f) {
    CHECK(out.scores[f].score ==
          Catch::Approx(std::fabs(detail::pearson(ds.columns[f], yd))));
  }
  // The duplicate pair is perfectly correlated; exactly one member dies and
  // by the tie rule it is the higher id.
  CHECK(out.selected == std::vector<int>{0, 2});
}

TEST_CASE("correlation selector applies no importance cutoff") {
  // A nearly target-independent feature must still be selected.
  Rng rng(7);
  std::vector<double> sig(500), junk(500);
  std::vector<int> y(500);
  for (std::size_t i = 0; i < 500; ++i) {
    sig[i] = rand_normal(rng);
    junk[i] = rand_normal(rng);
    y[i] = sig[i] > 0 ? 1 : 0;
  }
  Dataset ds = make_numeric({"sig", "junk"}, {sig, junk}, y);
  SelectorOutput out = run_selector("correlation", ds, SelectorConfig{});
  CHECK(out.selected.size() == 2);
}

TEST_CASE("vif scores match the inverse-correlation-matrix oracle") {
  // Correlated but below threshold: nothing is removed, so the reported
  // scores are exactly 1/VIF over the full feature set.
  Rng rng(11);
  const std::size_t n = 800;
  std::vector<std::vector<double>> cols(4, std::vector<double>(n));
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double shared = rand_normal(rng);
    for (int f = 0; f < 4; ++f) {
      cols[f][i] = 0.6 * shared + 0.8 * rand_normal(rng);
    }
    y[i] = cols[0][i] > 0 ? 1 : 0;
  }
  Dataset ds = make_numeric({"a", "b", "c", "d"}, cols, y);
  SelectorOutput out = run_selector("vif", ds, SelectorConfig{});
  const std::vector<double> oracle = vif_oracle(ds);
  REQUIRE(out.selected.size() == 4);
  for (int f = 0; f < 4; ++f) {
    CHECK(oracle[f] > 1.0);
    CHECK(oracle[f] < 10.0);
    CHECK(out.scores[f].score == Catch::Approx(1.0 / oracle[f]).epsilon(1e-6));
  }
}

TEST_CASE("vif removes an exact linear combination, highest id on ties") {
  Rng rng(13);
  const std::size_t n = 500;
  std::vector<double> x1(n), x2(n), x3(n);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x1[i] = rand_normal(rng);
    x2[i] = rand_normal(rng);
    x3[i] = x1[i] + x2[i];
    y[i] = x1[i] > 0 ? 1 : 0;
  }
  Dataset ds = make_numeric({"x1", "x2", "x3"}, {x1, x2, x3}, y);
  SelectorOutput out = run_selector("vif", ds, SelectorConfig{});
  // All three start at the singular ceiling; the tie removes x3 (id 2),
  // after which x1 and x2 are nearly independent and stay.
  CHECK(out.selected == std::vector<int>{0, 1});
}

TEST_CASE("variance threshold drops constants and reports pre-scaling variance") {
  Rng rng(17);
  const std::size_t n = 300;
  std::vector<double> wide(n), constant(n, 3.0);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    wide[i] = 10.0 * rand_normal(rng);
    y[i] = wide[i] > 0 ? 1 : 0;
  }
  Dataset ds = make_numeric({"wide", "flat"}, {wide, constant}, y);
  SelectorOutput out = run_selector("variance_threshold", ds, SelectorConfig{});
  CHECK(out.selected == std::vector<int>{0});

  // The score is the sample variance of the original values, not of the
  // z-scored ones (which would be ~1 for every feature).
  double mean = 0.0;
  for (double v : wide) mean += v;
  mean /= n;
  double acc = 0.0;
  for (double v : wide) acc += (v - mean) * (v - mean);
  CHECK(out.scores[0].score == Catch::Approx(acc / (n - 1)));
  CHECK(out.scores[1].score == 0.0);
}

TEST_CASE("boruta confirms signal, rejects pure noise") {
  Dataset ds = prepped_synth(1200, 29, 2.0);
  SelectorConfig config;
  config.boruta_max_iterations = 30;
  config.seed = 3;
  SelectorOutput out = run_selector("boruta", ds, config);
  // The strong main effect must be kept, hitting above shadow-max nearly
  // every iteration.
  CHECK(std::find(out.selected.begin(), out.selected.end(), 1) !=
        out.selected.end());
  CHECK(out.scores[1].score > 0.9);
  // At least some pure-noise features (ids 5..9) are rejected.
  std::size_t kept_noise = 0;
  for (int f : out.selected) kept_noise += (f >= 5);
  CHECK(kept_noise < 5);
  CHECK(out.params.at("iterations_run") >= 1.0);

  config.boruta_max_iterations = 0;
  CHECK_THROWS_WITH(run_selector("boruta", ds, config),
                    Catch::Matchers::ContainsSubstring("no iterations"));
}

TEST_CASE("binomial tail probabilities are exact for small n") {
  auto [hi, lo] = detail::binomial_tails(5, 5);
  CHECK(hi == Catch::Approx(1.0 / 32.0));
  CHECK(lo == Catch::Approx(1.0));
  auto [hi2, lo2] = detail::binomial_tails(4, 2);
  CHECK(hi2 == Catch::Approx(11.0 / 16.0));
  CHECK(lo2 == Catch::Approx(11.0 / 16.0));
}

TEST_CASE("permutation accepts its long-form alias") {
  Dataset ds = prepped_synth(400, 37);
  SelectorConfig config;
  config.seed = 2;
  SelectorOutput a = run_selector("permutation", ds, config);
  SelectorOutput b = run_selector("permutation_importance", ds, config);
  CHECK(a.selected == b.selected);
  CHECK(a.selector == "permutation");
}
