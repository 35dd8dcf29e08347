#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "glassboost/common.hpp"

namespace glassboost {

enum class FeatureKind { numeric, categorical };

constexpr double kMissingImputeValue = -9999.0;

struct ScalingParams {
  bool scaled = false;  // false for categorical and zero-variance columns
  double mean = 0.0;
  double stddev = 1.0;
};

struct PreprocessReport {
  std::vector<std::string> feature_names;
  std::vector<std::int64_t> imputed_cells;                  // per feature
  std::vector<std::map<std::string, int>> category_maps;    // empty for numeric
  std::vector<ScalingParams> scaling_params;
};

struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<FeatureKind> feature_kinds;
  // Numeric values or categorical codes; NaN marks a missing cell until
  // preprocess() resolves it.
  std::vector<std::vector<double>> columns;
  // Raw string levels for categorical features prior to encoding.
  std::vector<std::vector<std::string>> raw_levels;
  std::vector<int> target;
  bool preprocessed = false;
  std::shared_ptr<const PreprocessReport> prep;

  std::size_t n_rows() const { return target.size(); }
  std::size_t n_features() const { return feature_names.size(); }

  int feature_index(const std::string& name) const {
    for (std::size_t j = 0; j < feature_names.size(); ++j) {
      if (feature_names[j] == name) return static_cast<int>(j);
    }
    return -1;
  }

  Dataset select_features(const std::vector<int>& ids) const {
    Dataset out;
    out.target = target;
    out.preprocessed = preprocessed;
    for (int id : ids) {
      if (id < 0 || id >= static_cast<int>(n_features())) {
        throw Error("select_features: feature id out of range");
      }
      out.feature_names.push_back(feature_names[id]);
      out.feature_kinds.push_back(feature_kinds[id]);
      out.columns.push_back(columns[id]);
      out.raw_levels.push_back(raw_levels.empty() ? std::vector<std::string>{}
                                                  : raw_levels[id]);
    }
    if (preprocessed && prep) {
      auto r = std::make_shared<PreprocessReport>();
      for (int id : ids) {
        r->feature_names.push_back(prep->feature_names[id]);
        r->imputed_cells.push_back(prep->imputed_cells[id]);
        r->category_maps.push_back(prep->category_maps[id]);
        r->scaling_params.push_back(prep->scaling_params[id]);
      }
      out.prep = r;
    }
    return out;
  }

  Dataset select_rows(const std::vector<std::size_t>& rows) const {
    Dataset out;
    out.feature_names = feature_names;
    out.feature_kinds = feature_kinds;
    out.preprocessed = preprocessed;
    out.prep = prep;
    out.columns.resize(n_features());
    out.raw_levels.resize(n_features());
    for (std::size_t j = 0; j < n_features(); ++j) {
      out.columns[j].reserve(rows.size());
      for (std::size_t r : rows) out.columns[j].push_back(columns[j][r]);
      if (j < raw_levels.size() && !raw_levels[j].empty()) {
        out.raw_levels[j].reserve(rows.size());
        for (std::size_t r : rows) out.raw_levels[j].push_back(raw_levels[j][r]);
      }
    }
    out.target.reserve(rows.size());
    for (std::size_t r : rows) out.target.push_back(target[r]);
    return out;
  }

  void check_valid() const {
    if (feature_names.size() != columns.size() ||
        feature_names.size() != feature_kinds.size()) {
      throw Error("Dataset: inconsistent feature metadata");
    }
    for (const auto& col : columns) {
      if (col.size() != n_rows()) throw Error("Dataset: ragged columns");
    }
    bool has0 = false, has1 = false;
    for (int y : target) {
      if (y == 0) has0 = true;
      else if (y == 1) has1 = true;
      else throw Error("Dataset: target must be 0/1");
    }
    if (!has0 || !has1) throw Error("single-class target");
  }
};

struct SplitPair {
  Dataset train;
  Dataset test;
  std::uint64_t seed = 0;
  double ratio = 0.0;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
};

// ---------------------------------------------------------------------------
// CSV ingestion
// ---------------------------------------------------------------------------

namespace detail {

inline bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* begin = s.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  while (end && *end == ' ') ++end;
  return end == begin + s.size();
}

// One RFC-4180 record; returns false at EOF. Handles quoted fields with
// embedded commas/newlines and doubled quotes.
inline bool read_csv_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  int c;
  while ((c = in.get()) != EOF) {
    any = true;
    char ch = static_cast<char>(c);
    if (in_quotes) {
      if (ch == '"') {
        if (in.peek() == '"') {
          field.push_back('"');
          in.get();
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"') {
      in_quotes = true;
    } else if (ch == ',') {
      fields.push_back(field);
      field.clear();
    } else if (ch == '\r') {
      // swallow; CRLF handled at '\n'
    } else if (ch == '\n') {
      fields.push_back(field);
      return true;
    } else {
      field.push_back(ch);
    }
  }
  if (!any) return false;
  fields.push_back(field);
  return true;
}

}  // namespace detail

inline Dataset load_csv(const std::string& path, const std::string& target_name) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);

  std::vector<std::string> header;
  if (!detail::read_csv_record(in, header) || header.empty()) {
    throw Error("empty CSV: " + path);
  }
  int target_col = -1;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == target_name) target_col = static_cast<int>(j);
  }
  if (target_col < 0) throw Error("missing target column: " + target_name);

  std::vector<std::vector<std::string>> cells(header.size());
  std::vector<std::string> rec;
  while (detail::read_csv_record(in, rec)) {
    if (rec.size() == 1 && rec[0].empty()) continue;  // trailing blank line
    if (rec.size() != header.size()) {
      throw Error("ragged row in " + path + ": expected " +
                  std::to_string(header.size()) + " fields, got " +
                  std::to_string(rec.size()));
    }
    for (std::size_t j = 0; j < rec.size(); ++j) cells[j].push_back(rec[j]);
  }
  const std::size_t n = cells[0].size();
  if (n == 0) throw Error("CSV has no data rows: " + path);

  // Target: exactly two distinct non-empty values, mapped to 0/1.
  std::map<std::string, int> target_levels;
  for (const auto& v : cells[target_col]) {
    if (v.empty()) throw Error("missing value in target column");
    target_levels.emplace(v, 0);
  }
  if (target_levels.size() == 1) throw Error("single-class target");
  if (target_levels.size() != 2) {
    throw Error("target column has " + std::to_string(target_levels.size()) +
                " distinct values, expected 2");
  }
  {
    // Numeric pair ordered by value, otherwise lexicographic (map order).
    auto it = target_levels.begin();
    const std::string a = it->first, b = std::next(it)->first;
    double da, db;
    if (detail::parse_double(a, da) && detail::parse_double(b, db) && db < da) {
      target_levels[b] = 0;
      target_levels[a] = 1;
    } else {
      target_levels[a] = 0;
      target_levels[b] = 1;
    }
  }

  Dataset ds;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (static_cast<int>(j) == target_col) continue;
    bool numeric = true;
    double tmp;
    for (const auto& v : cells[j]) {
      if (!v.empty() && !detail::parse_double(v, tmp)) {
        numeric = false;
        break;
      }
    }
    ds.feature_names.push_back(header[j]);
    ds.feature_kinds.push_back(numeric ? FeatureKind::numeric
                                       : FeatureKind::categorical);
    std::vector<double> col(n, std::numeric_limits<double>::quiet_NaN());
    std::vector<std::string> levels;
    if (numeric) {
      for (std::size_t r = 0; r < n; ++r) {
        if (!cells[j][r].empty()) detail::parse_double(cells[j][r], col[r]);
      }
    } else {
      levels = cells[j];  // empty string = missing, kept as its own level
    }
    ds.columns.push_back(std::move(col));
    ds.raw_levels.push_back(std::move(levels));
  }
  ds.target.reserve(n);
  for (const auto& v : cells[target_col]) ds.target.push_back(target_levels[v]);
  ds.check_valid();

  std::map<std::string, int> name_check;
  for (const auto& nm : ds.feature_names) {
    if (nm.empty()) throw Error("empty feature name in header");
    if (++name_check[nm] > 1) throw Error("duplicate feature name: " + nm);
  }
  return ds;
}

// ---------------------------------------------------------------------------
// Preprocessing: -9999 imputation, frequency-ordinal encoding, z-scoring
// ---------------------------------------------------------------------------

inline std::pair<Dataset, PreprocessReport> preprocess(
    const Dataset& ds, const PreprocessReport* fit_report = nullptr) {
  if (ds.n_rows() == 0) throw Error("empty dataset");
  if (ds.preprocessed) return {ds, *ds.prep};  // idempotent

  if (fit_report && fit_report->feature_names != ds.feature_names) {
    throw Error("preprocess: fit_report feature mismatch");
  }

  Dataset out = ds;
  PreprocessReport rep;
  rep.feature_names = ds.feature_names;
  rep.imputed_cells.assign(ds.n_features(), 0);
  rep.category_maps.resize(ds.n_features());
  rep.scaling_params.resize(ds.n_features());

  const std::size_t n = ds.n_rows();
  for (std::size_t j = 0; j < ds.n_features(); ++j) {
    if (ds.feature_kinds[j] == FeatureKind::categorical) {
      const auto& levels = ds.raw_levels[j];
      std::map<std::string, int>& codes = rep.category_maps[j];
      if (fit_report) {
        codes = fit_report->category_maps[j];
      } else {
        std::map<std::string, std::size_t> freq;
        for (const auto& v : levels) ++freq[v];
        // Descending frequency, ties by level name for determinism.
        std::vector<std::pair<std::string, std::size_t>> order(freq.begin(),
                                                               freq.end());
        std::stable_sort(order.begin(), order.end(),
                         [](const auto& a, const auto& b) {
                           return a.second > b.second;
                         });
        int next = 0;
        for (const auto& [lvl, cnt] : order) codes[lvl] = next++;
      }
      auto& col = out.columns[j];
      for (std::size_t r = 0; r < n; ++r) {
        if (levels[r].empty()) ++rep.imputed_cells[j];
        auto it = codes.find(levels[r]);
        col[r] = (it == codes.end()) ? -1.0 : static_cast<double>(it->second);
      }
      out.raw_levels[j].clear();
    } else {
      auto& col = out.columns[j];
      ScalingParams sp;
      if (fit_report) {
        sp = fit_report->scaling_params[j];
      } else {
        double sum = 0.0, sum2 = 0.0;
        std::size_t cnt = 0;
        for (double v : col) {
          if (!std::isnan(v)) {
            sum += v;
            sum2 += v * v;
            ++cnt;
          }
        }
        if (cnt > 0) {
          sp.mean = sum / cnt;
          double var = sum2 / cnt - sp.mean * sp.mean;
          if (var > 1e-24) {
            sp.stddev = std::sqrt(var);
            sp.scaled = true;
          } else {
            sp = ScalingParams{false, 0.0, 1.0};  // constant column: unscaled
          }
        }
      }
      for (std::size_t r = 0; r < n; ++r) {
        if (std::isnan(col[r])) {
          col[r] = kMissingImputeValue;
          ++rep.imputed_cells[j];
        }
        if (sp.scaled) col[r] = (col[r] - sp.mean) / sp.stddev;
      }
      rep.scaling_params[j] = sp;
    }
  }
  if (fit_report) {
    rep.category_maps = fit_report->category_maps;
    rep.scaling_params = fit_report->scaling_params;
  }
  out.preprocessed = true;
  out.prep = std::make_shared<PreprocessReport>(rep);
  return {out, rep};
}

// ---------------------------------------------------------------------------
// Deterministic stratified split
// ---------------------------------------------------------------------------

inline SplitPair split(const Dataset& ds, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw Error("split ratio out of (0,1)");
  if (ds.n_rows() < 2) throw Error("split: need at least 2 rows");

  std::vector<std::size_t> idx0, idx1;
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    (ds.target[r] == 0 ? idx0 : idx1).push_back(r);
  }
  Rng rng(seed);
  std::vector<std::size_t> train_rows, test_rows;
  for (auto* cls : {&idx0, &idx1}) {
    shuffle_vec(*cls, rng);
    const auto n_c = cls->size();
    const auto n_train = static_cast<std::size_t>(std::llround(ratio * n_c));
    if (n_train == 0 || n_train == n_c) {
      throw Error("split leaves a class with 0 rows");
    }
    train_rows.insert(train_rows.end(), cls->begin(), cls->begin() + n_train);
    test_rows.insert(test_rows.end(), cls->begin() + n_train, cls->end());
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());

  SplitPair sp;
  sp.train = ds.select_rows(train_rows);
  sp.test = ds.select_rows(test_rows);
  sp.seed = seed;
  sp.ratio = ratio;
  sp.train_rows = std::move(train_rows);
  sp.test_rows = std::move(test_rows);
  return sp;
}

// ---------------------------------------------------------------------------
// Quantile binning
// ---------------------------------------------------------------------------

struct FeatureBinning {
  std::string name;
  FeatureKind kind = FeatureKind::numeric;
  std::vector<double> edges;  // numeric only, strictly increasing
  int n_bins = 1;

  int bin_of(double value) const {
    if (kind == FeatureKind::categorical) {
      int code = static_cast<int>(value);
      if (code < 0 || code >= n_bins) return -1;  // unseen level
      return code;
    }
    return static_cast<int>(
        std::upper_bound(edges.begin(), edges.end(), value) - edges.begin());
  }
};

struct BinnedDataset {
  std::vector<FeatureBinning> schema;
  // Per feature, per row. uint16 bounds max_bins at 65535.
  std::vector<std::vector<std::uint16_t>> bin_index;
  std::shared_ptr<const Dataset> source;

  std::size_t n_rows() const { return source ? source->n_rows() : 0; }
  std::size_t n_features() const { return schema.size(); }
  int bins(std::size_t f) const { return schema[f].n_bins; }
  const std::vector<int>& target() const { return source->target; }
};

inline BinnedDataset bin(const Dataset& ds, int max_bins = 256) {
  if (max_bins < 2) throw Error("bin: max_bins must be >= 2");
  if (max_bins > 65535) throw Error("bin: max_bins too large");
  if (!ds.preprocessed) throw Error("bin: dataset must be preprocessed first");

  BinnedDataset bd;
  bd.source = std::make_shared<Dataset>(ds);
  bd.schema.resize(ds.n_features());
  bd.bin_index.resize(ds.n_features());
  const std::size_t n = ds.n_rows();

  for (std::size_t j = 0; j < ds.n_features(); ++j) {
    FeatureBinning& fb = bd.schema[j];
    fb.name = ds.feature_names[j];
    fb.kind = ds.feature_kinds[j];
    auto& bins = bd.bin_index[j];
    bins.resize(n);
    if (fb.kind == FeatureKind::categorical) {
      int max_code = 0;
      for (double v : ds.columns[j]) max_code = std::max(max_code, (int)v);
      fb.n_bins = max_code + 1;
      for (std::size_t r = 0; r < n; ++r) {
        int code = static_cast<int>(ds.columns[j][r]);
        bins[r] = static_cast<std::uint16_t>(code < 0 ? 0 : code);
      }
    } else {
      std::vector<double> sorted = ds.columns[j];
      std::sort(sorted.begin(), sorted.end());
      std::size_t last_pos = 0;
      for (int k = 1; k < max_bins; ++k) {
        const std::size_t p = (static_cast<std::size_t>(k) * n) / max_bins;
        if (p == 0 || p >= n || p == last_pos) continue;
        if (sorted[p - 1] < sorted[p]) {
          fb.edges.push_back(0.5 * (sorted[p - 1] + sorted[p]));
          last_pos = p;
        }
      }
      fb.n_bins = static_cast<int>(fb.edges.size()) + 1;
      for (std::size_t r = 0; r < n; ++r) {
        bins[r] = static_cast<std::uint16_t>(fb.bin_of(ds.columns[j][r]));
      }
    }
  }
  return bd;
}

// Bin an already-preprocessed dataset with a previously fitted schema.
inline BinnedDataset bin_with_schema(const Dataset& ds,
                                     const std::vector<FeatureBinning>& schema) {
  if (ds.n_features() != schema.size()) {
    throw Error("bin_with_schema: feature count mismatch");
  }
  BinnedDataset bd;
  bd.source = std::make_shared<Dataset>(ds);
  bd.schema = schema;
  bd.bin_index.resize(ds.n_features());
  for (std::size_t j = 0; j < ds.n_features(); ++j) {
    auto& bins = bd.bin_index[j];
    bins.resize(ds.n_rows());
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
      int b = schema[j].bin_of(ds.columns[j][r]);
      bins[r] = static_cast<std::uint16_t>(b < 0 ? 0 : b);
    }
  }
  return bd;
}

}  // namespace glassboost
