#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "glassboost/common.hpp"
#include "glassboost/dataset.hpp"
#include "glassboost/synth.hpp"

using namespace glassboost;

namespace {

std::string write_temp_csv(const std::string& body) {
  static int counter = 0;
  const std::string path =
      "test_dataset_tmp_" + std::to_string(counter++) + ".csv";
  std::ofstream out(path, std::ios::binary);
  out << body;
  return path;
}

}  // namespace

TEST_CASE("load_csv basic numeric file with missing cells") {
  const auto path = write_temp_csv(
      "a,b,target\n"
      "1.5,x,1\n"
      ",y,0\n"
      "2.5,x,0\n");
  Dataset ds = load_csv(path, "target");
  REQUIRE(ds.n_features() == 2);
  REQUIRE(ds.n_rows() == 3);
  CHECK(ds.feature_kinds[0] == FeatureKind::numeric);
  CHECK(ds.feature_kinds[1] == FeatureKind::categorical);
  CHECK(ds.columns[0][0] == 1.5);
  CHECK(std::isnan(ds.columns[0][1]));
  CHECK(ds.raw_levels[1] == std::vector<std::string>{"x", "y", "x"});
  CHECK(ds.target == std::vector<int>{1, 0, 0});
  std::remove(path.c_str());
}

TEST_CASE("load_csv handles quoted fields, CRLF and embedded separators") {
  const auto path = write_temp_csv(
      "name,v,target\r\n"
      "\"a,b\",1,yes\r\n"
      "\"say \"\"hi\"\"\",2,no\r\n"
      "plain,3,no\r\n");
  Dataset ds = load_csv(path, "target");
  REQUIRE(ds.n_rows() == 3);
  CHECK(ds.raw_levels[0][0] == "a,b");
  CHECK(ds.raw_levels[0][1] == "say \"hi\"");
  // Lexicographic mapping for non-numeric targets: "no" -> 0, "yes" -> 1.
  CHECK(ds.target == std::vector<int>{1, 0, 0});
  std::remove(path.c_str());
}

TEST_CASE("load_csv numeric target labels map by numeric order") {
  const auto path = write_temp_csv(
      "a,target\n"
      "1,10\n"
      "2,2\n"
      "3,10\n");
  Dataset ds = load_csv(path, "target");
  CHECK(ds.target == std::vector<int>{1, 0, 1});
  std::remove(path.c_str());
}

TEST_CASE("load_csv error cases") {
  CHECK_THROWS_AS(load_csv("does_not_exist.csv", "y"), Error);

  auto p1 = write_temp_csv("a,b\n1,2\n");
  CHECK_THROWS_WITH(load_csv(p1, "target"),
                    Catch::Matchers::ContainsSubstring("missing target"));
  std::remove(p1.c_str());

  auto p2 = write_temp_csv("a,target\n1,1\n2,1\n");
  CHECK_THROWS_WITH(load_csv(p2, "target"),
                    Catch::Matchers::ContainsSubstring("single-class"));
  std::remove(p2.c_str());

  auto p3 = write_temp_csv("a,target\n1,0,9\n2,1\n");
  CHECK_THROWS_WITH(load_csv(p3, "target"),
                    Catch::Matchers::ContainsSubstring("ragged"));
  std::remove(p3.c_str());

  auto p4 = write_temp_csv("a,a,target\n1,2,0\n3,4,1\n");
  CHECK_THROWS_WITH(load_csv(p4, "target"),
                    Catch::Matchers::ContainsSubstring("duplicate"));
  std::remove(p4.c_str());

  auto p5 = write_temp_csv("a,target\n1,0\n2,1\n3,2\n");
  CHECK_THROWS_WITH(load_csv(p5, "target"),
                    Catch::Matchers::ContainsSubstring("distinct values"));
  std::remove(p5.c_str());
}

TEST_CASE("preprocess imputes -9999 before scaling and uses training stats") {
  Dataset ds;
  ds.feature_names = {"x"};
  ds.feature_kinds = {FeatureKind::numeric};
  ds.columns = {{1.0, 2.0, 3.0, std::numeric_limits<double>::quiet_NaN()}};
  ds.raw_levels = {{}};
  ds.target = {0, 1, 0, 1};

  auto [out, rep] = preprocess(ds);
  CHECK(rep.imputed_cells[0] == 1);
  REQUIRE(rep.scaling_params[0].scaled);
  // Stats come from the non-missing cells only: mean 2, population stddev.
  const double mean = 2.0;
  const double sd = std::sqrt((1.0 + 0.0 + 1.0) / 3.0);
  CHECK(out.columns[0][0] == Catch::Approx((1.0 - mean) / sd));
  // The missing cell is imputed with -9999 first, then z-scored.
  CHECK(out.columns[0][3] ==
        Catch::Approx((kMissingImputeValue - mean) / sd));
  CHECK(out.preprocessed);

  // Idempotence: preprocessing a preprocessed dataset is the identity.
  auto [out2, rep2] = preprocess(out);
  CHECK(out2.columns[0] == out.columns[0]);

  // Applying the fitted report to new data reuses the training stats.
  Dataset fresh = ds;
  fresh.columns[0] = {10.0, 20.0, 30.0, 40.0};
  auto [applied, rep3] = preprocess(fresh, &rep);
  CHECK(applied.columns[0][0] == Catch::Approx((10.0 - mean) / sd));
}

TEST_CASE("preprocess encodes categoricals by descending frequency") {
  Dataset ds;
  ds.feature_names = {"c"};
  ds.feature_kinds = {FeatureKind::categorical};
  ds.columns = {std::vector<double>(6, 0.0)};
  ds.raw_levels = {{"b", "a", "b", "", "b", "a"}};
  ds.target = {0, 1, 0, 1, 0, 1};

  auto [out, rep] = preprocess(ds);
  // b appears 3x -> 0, a 2x -> 1, "" 1x -> 2 (missing is its own level).
  CHECK(rep.category_maps[0].at("b") == 0);
  CHECK(rep.category_maps[0].at("a") == 1);
  CHECK(rep.category_maps[0].at("") == 2);
  CHECK(out.columns[0] == std::vector<double>{0, 1, 0, 2, 0, 1});
  CHECK(rep.imputed_cells[0] == 1);

  // Unseen level in new data maps to -1.
  Dataset fresh = ds;
  fresh.raw_levels[0] = {"z", "a", "b", "b", "a", "z"};
  auto [applied, rep2] = preprocess(fresh, &rep);
  CHECK(applied.columns[0][0] == -1.0);
}

TEST_CASE("preprocess leaves constant columns unscaled") {
  Dataset ds;
  ds.feature_names = {"k"};
  ds.feature_kinds = {FeatureKind::numeric};
  ds.columns = {{5.0, 5.0, 5.0}};
  ds.raw_levels = {{}};
  ds.target = {0, 1, 0};
  auto [out, rep] = preprocess(ds);
  CHECK_FALSE(rep.scaling_params[0].scaled);
  CHECK(out.columns[0] == std::vector<double>{5.0, 5.0, 5.0});
}

TEST_CASE("split is stratified within one row per class and deterministic") {
  SynthConfig cfg;
  cfg.rows = 1003;
  cfg.seed = 11;
  Dataset ds = synth_dataset(cfg);

  std::size_t n1 = 0;
  for (int y : ds.target) n1 += y;
  const std::size_t n0 = ds.n_rows() - n1;

  SplitPair sp = split(ds, 0.7, 5);
  std::size_t t1 = 0;
  for (int y : sp.train.target) t1 += y;
  const std::size_t t0 = sp.train.n_rows() - t1;
  CHECK(std::llabs(static_cast<long long>(t0) - std::llround(0.7 * n0)) <= 1);
  CHECK(std::llabs(static_cast<long long>(t1) - std::llround(0.7 * n1)) <= 1);
  CHECK(sp.train.n_rows() + sp.test.n_rows() == ds.n_rows());

  // Partition: row indices are disjoint and cover everything.
  std::vector<std::size_t> all = sp.train_rows;
  all.insert(all.end(), sp.test_rows.begin(), sp.test_rows.end());
  std::sort(all.begin(), all.end());
  for (std::size_t r = 0; r < all.size(); ++r) CHECK(all[r] == r);

  // Same seed, same split; different seed, different split.
  SplitPair sp2 = split(ds, 0.7, 5);
  CHECK(sp2.train_rows == sp.train_rows);
  SplitPair sp3 = split(ds, 0.7, 6);
  CHECK(sp3.train_rows != sp.train_rows);
}

TEST_CASE("split refuses to empty a class") {
  Dataset ds;
  ds.feature_names = {"x"};
  ds.feature_kinds = {FeatureKind::numeric};
  ds.columns = {{1, 2, 3, 4, 5, 6, 7, 8}};
  ds.raw_levels = {{}};
  ds.target = {0, 0, 0, 0, 0, 0, 0, 1};
  CHECK_THROWS_WITH(split(ds, 0.3, 0),
                    Catch::Matchers::ContainsSubstring("0 rows"));
  CHECK_THROWS_AS(split(ds, 1.5, 0), Error);
}

TEST_CASE("quantile binning matches a brute-force bin_of scan") {
  SynthConfig cfg;
  cfg.rows = 500;
  cfg.seed = 21;
  auto [ds, rep] = preprocess(synth_dataset(cfg));
  BinnedDataset bd = bin(ds, 16);
  for (std::size_t j = 0; j < ds.n_features(); ++j) {
    const auto& fb = bd.schema[j];
    REQUIRE(fb.n_bins == static_cast<int>(fb.edges.size()) + 1);
    for (std::size_t e = 1; e < fb.edges.size(); ++e) {
      CHECK(fb.edges[e - 1] < fb.edges[e]);
    }
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
      const double v = ds.columns[j][r];
      int expected = 0;
      for (double edge : fb.edges) {
        if (v > edge) ++expected;
      }
      CHECK(bd.bin_index[j][r] == expected);
    }
  }
}

TEST_CASE("binning is invariant under strictly increasing transforms") {
  SynthConfig cfg;
  cfg.rows = 300;
  cfg.seed = 9;
  auto [ds, rep] = preprocess(synth_dataset(cfg));
  BinnedDataset bd = bin(ds, 32);

  Dataset warped = ds;
  for (auto& col : warped.columns) {
    for (auto& v : col) v = std::atan(v) * 3.0 + 0.1 * v;
  }
  BinnedDataset bd2 = bin(warped, 32);
  // Edges move but every row lands in the same bin: binning is rank-based.
  CHECK(bd2.bin_index == bd.bin_index);
}

TEST_CASE("bin_with_schema reuses edges and clamps unseen categories") {
  SynthConfig cfg;
  cfg.rows = 400;
  cfg.seed = 3;
  Dataset raw = synth_dataset(cfg);
  SplitPair sp = split(raw, 0.7, 1);
  auto [train, rep] = preprocess(sp.train);
  auto [test, rep2] = preprocess(sp.test, &rep);
  BinnedDataset bt = bin(train);
  BinnedDataset be = bin_with_schema(test, bt.schema);
  REQUIRE(be.n_rows() == test.n_rows());
  for (std::size_t j = 0; j < test.n_features(); ++j) {
    for (std::size_t r = 0; r < test.n_rows(); ++r) {
      const int b = bt.schema[j].bin_of(test.columns[j][r]);
      CHECK(be.bin_index[j][r] == (b < 0 ? 0 : b));
    }
  }
}

TEST_CASE("select_features keeps metadata aligned and validates ids") {
  SynthConfig cfg;
  cfg.rows = 50;
  cfg.seed = 2;
  auto [ds, rep] = preprocess(synth_dataset(cfg));
  Dataset sub = ds.select_features({3, 0});
  REQUIRE(sub.n_features() == 2);
  CHECK(sub.feature_names[0] == ds.feature_names[3]);
  CHECK(sub.columns[1] == ds.columns[0]);
  CHECK(sub.prep->scaling_params[0].mean == ds.prep->scaling_params[3].mean);
  CHECK_THROWS_AS(ds.select_features({99}), Error);
}
