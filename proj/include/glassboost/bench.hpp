#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "glassboost/common.hpp"
#include "glassboost/dataset.hpp"
#include "glassboost/ensemble.hpp"
#include "glassboost/io.hpp"
#include "glassboost/metrics.hpp"
#include "glassboost/selectors.hpp"

namespace glassboost {

struct BenchDataset {
  std::string name;
  std::string path;    // CSV on disk; ignored when data is preloaded
  std::string target;
  Dataset data;        // optional preloaded dataset (empty = load from path)

  bool preloaded() const { return !data.columns.empty(); }
};

struct BenchConfig {
  // Unset = the default 14-row matrix; an explicit empty list runs nothing.
  std::optional<std::vector<std::string>> pipelines;
  double split_ratio = 0.7;
  SelectorConfig selector;
  EbmParams ebm;
  PoolConfig pool;
  AlteredEbmConfig altered;
  std::uint64_t seed = 0;
  int plain_top_k = 20;
};

struct BenchRow {
  std::string dataset;
  std::string pipeline;
  bool ok = false;
  std::string error;
  PipelineResult result;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  nlohmann::json environment;
};

// The full matrix mirrored by the benchmark: two plain baselines, one row
// per cross-selector, both pools, and the altered model.
inline std::vector<std::string> default_pipelines() {
  std::vector<std::string> rows = {"plain", "plain_top20"};
  for (const auto& name : selector_names()) rows.push_back("ensemble1:" + name);
  rows.push_back("pool_a");
  rows.push_back("pool_b");
  rows.push_back("altered");
  return rows;
}

namespace detail {

// Plain EBM restricted to its own top-k features by main-term importance.
inline PipelineResult plain_top_k(const Dataset& train, const Dataset& test,
                                  int k, const EbmParams& ebm_params) {
  const AdditiveModel full = fit_ebm(bin(train), ebm_params);
  std::vector<std::pair<double, int>> mains;
  for (const auto& ti : full.importances) {
    if (!ti.is_pair) mains.emplace_back(ti.importance, ti.f_i);
  }
  std::sort(mains.begin(), mains.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  if (static_cast<int>(mains.size()) > k) mains.resize(k);
  std::vector<int> ids;
  for (const auto& [imp, f] : mains) ids.push_back(f);
  nlohmann::json manifest;
  manifest["plain_top_k"] = k;
  return fit_and_eval("plain_top" + std::to_string(k), train, test, ids,
                      ebm_params, std::move(manifest));
}

}  // namespace detail

inline BenchRow run_bench_row(const std::string& dataset_name,
                              const std::string& pipeline,
                              const Dataset& train, const Dataset& test,
                              const std::vector<SelectorOutput>& selector_outs,
                              const BenchConfig& cfg) {
  BenchRow row;
  row.dataset = dataset_name;
  row.pipeline = pipeline;
  try {
    if (pipeline == "plain") {
      row.result = ensemble1(train, test, "identity", cfg.selector, cfg.ebm);
      row.result.pipeline = "plain";
    } else if (pipeline == "plain_top20" || pipeline == "plain_topk") {
      row.result = detail::plain_top_k(train, test, cfg.plain_top_k, cfg.ebm);
    } else if (pipeline.rfind("ensemble1:", 0) == 0) {
      row.result = ensemble1(train, test, pipeline.substr(10), cfg.selector,
                             cfg.ebm);
    } else if (pipeline == "pool_a" || pipeline == "pool_b") {
      row.result = pool_pipeline(train, test, selector_outs, cfg.pool,
                                 pipeline == "pool_a", cfg.ebm);
    } else if (pipeline == "altered") {
      row.result = altered_ebm(train, test, cfg.altered, cfg.ebm);
    } else {
      throw Error("unknown pipeline: " + pipeline);
    }
    row.ok = true;
  } catch (const std::exception& ex) {
    row.ok = false;
    row.error = ex.what();
  }
  return row;
}

inline BenchReport run_benchmark(const std::vector<BenchDataset>& datasets,
                                 const BenchConfig& cfg) {
  const std::vector<std::string> pipelines =
      cfg.pipelines ? *cfg.pipelines : default_pipelines();

  BenchReport report;
  report.environment = {{"seed", cfg.seed},
                        {"split_ratio", cfg.split_ratio},
                        {"pipelines", pipelines},
                        {"plain_top_k", cfg.plain_top_k},
                        {"pool",
                         {{"k_min_overlap", cfg.pool.k_min_overlap},
                          {"top_p", cfg.pool.top_p},
                          {"mode", cfg.pool.use_borda ? "borda" : "union"}}},
                        {"altered_threshold", cfg.altered.importance_threshold}};

  for (const auto& spec : datasets) {
    Dataset raw;
    try {
      raw = spec.preloaded() ? spec.data : load_csv(spec.path, spec.target);
    } catch (const std::exception& ex) {
      for (const auto& p : pipelines) {
        BenchRow row;
        row.dataset = spec.name;
        row.pipeline = p;
        row.error = ex.what();
        report.rows.push_back(std::move(row));
      }
      continue;
    }

    SplitPair sp = split(raw, cfg.split_ratio, cfg.seed);
    auto [train, prep] = preprocess(sp.train);
    auto [test, test_prep] = preprocess(sp.test, &prep);
    (void)test_prep;

    // Pools consume every selector's subset; compute each once per dataset.
    bool need_pools = false;
    for (const auto& p : pipelines) {
      if (p == "pool_a" || p == "pool_b") need_pools = true;
    }
    std::vector<SelectorOutput> selector_outs;
    if (need_pools) {
      for (const auto& name : selector_names()) {
        selector_outs.push_back(run_selector(name, train, cfg.selector));
      }
    }

    for (const auto& p : pipelines) {
      report.rows.push_back(
          run_bench_row(spec.name, p, train, test, selector_outs, cfg));
    }
  }
  return report;
}

namespace io {

inline json to_json(const BenchRow& row) {
  json j;
  j["dataset"] = row.dataset;
  j["pipeline"] = row.pipeline;
  j["ok"] = row.ok;
  if (!row.ok) {
    j["error"] = row.error;
    return j;
  }
  j["selected_features"] = row.result.selected_features;
  j["eval"] = to_json(row.result.eval);
  j["importance"] = to_json(row.result.importance);
  j["dominance"] = to_json(row.result.dominance);
  j["spurious"] = to_json(row.result.spurious);
  j["manifest"] = row.result.manifest;
  return j;
}

inline json to_json(const BenchReport& report) {
  json j;
  j["environment"] = report.environment;
  j["rows"] = json::array();
  for (const auto& row : report.rows) j["rows"].push_back(to_json(row));
  return j;
}

// Strips wall-clock fields so two runs can be compared for determinism.
inline json without_timing(json j) {
  if (j.is_object()) {
    j.erase("fit_seconds");
    j.erase("runtime_s");
    for (auto& [key, value] : j.items()) value = without_timing(value);
  } else if (j.is_array()) {
    for (auto& value : j) value = without_timing(value);
  }
  return j;
}

namespace detail {

inline std::string fmt(double v, int prec = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(prec) << v;
  return os.str();
}

inline std::string join(const std::vector<std::string>& parts,
                        const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += "\"";
  return out;
}

}  // namespace detail

inline std::string report_markdown(const BenchReport& report) {
  std::ostringstream md;
  md << "# Benchmark report\n";

  std::vector<std::string> dataset_order;
  for (const auto& row : report.rows) {
    if (std::find(dataset_order.begin(), dataset_order.end(), row.dataset) ==
        dataset_order.end()) {
      dataset_order.push_back(row.dataset);
    }
  }

  for (const auto& ds : dataset_order) {
    md << "\n## " << ds << "\n";

    md << "\n### Performance\n\n";
    md << "| Pipeline | # Feat | F1 | Accuracy | Time (sec) |\n";
    md << "|---|---|---|---|---|\n";
    for (const auto& row : report.rows) {
      if (row.dataset != ds) continue;
      if (!row.ok) {
        md << "| " << row.pipeline << " | failed: " << row.error
           << " | | | |\n";
        continue;
      }
      const auto& e = row.result.eval;
      md << "| " << row.pipeline << " | " << e.n_features << " | "
         << detail::fmt(e.f1) << " | " << detail::fmt(e.accuracy) << " | "
         << detail::fmt(e.fit_seconds, 2) << " |\n";
    }

    md << "\n### Dominance and spurious interactions\n\n";
    md << "| Pipeline | Dominance | Spurious |\n";
    md << "|---|---|---|\n";
    for (const auto& row : report.rows) {
      if (row.dataset != ds) continue;
      if (!row.ok) {
        md << "| " << row.pipeline << " | failed | failed |\n";
        continue;
      }
      const auto& dom = row.result.dominance;
      const std::string cell =
          dom.summary.empty() ? "-" : detail::join(dom.summary, "; ");
      const int spurious = row.result.spurious.count;
      md << "| " << row.pipeline << " | " << cell << " | "
         << (spurious > 0 ? std::to_string(spurious) : std::string("")) << " |\n";
    }

    md << "\n### Top 5 interactions\n";
    for (const auto& row : report.rows) {
      if (row.dataset != ds || !row.ok) continue;
      md << "\n**" << row.pipeline << "**\n\n";
      if (row.result.dominance.top_pairs.empty()) {
        md << "(no interaction terms)\n";
        continue;
      }
      for (const auto& p : row.result.dominance.top_pairs) {
        md << "- " << detail::join(p.features, " x ") << ": "
           << detail::fmt(p.importance, 6) << "\n";
      }
    }
  }
  return md.str();
}

inline std::string report_csv(const BenchReport& report) {
  std::ostringstream csv;
  csv << "dataset,pipeline,ok,n_features,f1,accuracy,time_sec,"
         "dominance_max_occurrence,spurious_count,error\n";
  for (const auto& row : report.rows) {
    csv << detail::csv_quote(row.dataset) << ","
        << detail::csv_quote(row.pipeline) << "," << (row.ok ? 1 : 0) << ",";
    if (row.ok) {
      const auto& e = row.result.eval;
      csv << e.n_features << "," << detail::fmt(e.f1) << ","
          << detail::fmt(e.accuracy) << "," << detail::fmt(e.fit_seconds, 2)
          << "," << row.result.dominance.max_occurrence() << ","
          << row.result.spurious.count << ",";
    } else {
      csv << ",,,,,," << detail::csv_quote(row.error);
    }
    csv << "\n";
  }
  return csv.str();
}

inline void emit_report(const BenchReport& report, const std::string& out_dir) {
  if (report.rows.empty()) throw Error("emit_report: empty report");
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error("cannot create directory: " + out_dir);

  write_json_file(to_json(report), out_dir + "/report.json");

  std::ofstream md(out_dir + "/report.md");
  if (!md) throw Error("cannot write file: " + out_dir + "/report.md");
  md << report_markdown(report);

  std::ofstream csv(out_dir + "/report.csv");
  if (!csv) throw Error("cannot write file: " + out_dir + "/report.csv");
  csv << report_csv(report);

  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    if (!report.rows[i].ok) continue;
    write_json_file(to_json(report.rows[i].result.model),
                    out_dir + "/model_" + std::to_string(i) + ".json");
  }
}

}  // namespace io
}  // namespace glassboost
