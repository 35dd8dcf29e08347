#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "glassboost/common.hpp"
#include "glassboost/ebm.hpp"

namespace glassboost {

// Importance record the auditors operate on. Feature names keep the audits
// usable for imported term-importance dumps as well as native models.
struct AuditTerm {
  std::vector<std::string> features;  // 1 name = main term, 2 = pair term
  double importance = 0.0;

  bool is_pair() const { return features.size() == 2; }
};

inline std::vector<AuditTerm> audit_terms(const AdditiveModel& model) {
  std::vector<AuditTerm> out;
  for (const auto& ti : model.importances) {
    AuditTerm t;
    t.features.push_back(model.schema[ti.f_i].name);
    if (ti.is_pair) t.features.push_back(model.schema[ti.f_j].name);
    t.importance = ti.importance;
    out.push_back(std::move(t));
  }
  return out;
}

struct DominanceReport {
  std::vector<AuditTerm> top_pairs;            // top 5 interactions
  std::map<std::string, int> occurrences;      // per feature, over top_pairs
  std::vector<std::string> flagged;            // occurrence count > 1
  std::vector<std::string> summary;            // "<n> feature x <c> Occurrence"

  int max_occurrence() const {
    int mx = 0;
    for (const auto& [name, c] : occurrences) mx = std::max(mx, c);
    return mx;
  }
};

struct SpuriousFlag {
  AuditTerm pair;
  std::string noisy_member;
};

struct SpuriousReport {
  std::vector<std::string> noisy_set;  // bottom decile of main importances
  std::vector<SpuriousFlag> flags;
  int count = 0;
};

namespace detail {

inline bool term_id_less(const AuditTerm& a, const AuditTerm& b) {
  return a.features < b.features;
}

inline std::vector<AuditTerm> sorted_pairs_desc(const std::vector<AuditTerm>& terms) {
  std::vector<AuditTerm> pairs;
  for (const auto& t : terms) {
    if (t.is_pair()) pairs.push_back(t);
  }
  std::sort(pairs.begin(), pairs.end(), [](const AuditTerm& a, const AuditTerm& b) {
    if (a.importance != b.importance) return a.importance > b.importance;
    return term_id_less(a, b);
  });
  return pairs;
}

// Nearest-rank percentile: value of the ceil(q * n)-th smallest (1-based).
inline double nearest_rank(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  std::size_t k = static_cast<std::size_t>(
      std::ceil(q * static_cast<double>(values.size())));
  if (k < 1) k = 1;
  if (k > values.size()) k = values.size();
  return values[k - 1];
}

}  // namespace detail

inline DominanceReport dominance_report(const std::vector<AuditTerm>& terms) {
  DominanceReport rep;
  auto pairs = detail::sorted_pairs_desc(terms);
  if (pairs.size() > 5) pairs.resize(5);
  rep.top_pairs = pairs;
  for (const auto& p : rep.top_pairs) {
    for (const auto& f : p.features) ++rep.occurrences[f];
  }
  for (const auto& [name, c] : rep.occurrences) {
    if (c > 1) rep.flagged.push_back(name);
  }
  std::sort(rep.flagged.begin(), rep.flagged.end(),
            [&](const std::string& a, const std::string& b) {
              if (rep.occurrences[a] != rep.occurrences[b]) {
                return rep.occurrences[a] > rep.occurrences[b];
              }
              return a < b;
            });
  // Table-style cells: group flagged features by occurrence count.
  std::map<int, int, std::greater<int>> by_count;
  for (const auto& f : rep.flagged) ++by_count[rep.occurrences[f]];
  for (const auto& [count, n_features] : by_count) {
    rep.summary.push_back(std::to_string(n_features) + " feature x " +
                          std::to_string(count) + " Occurrence");
  }
  return rep;
}

inline SpuriousReport spurious_report(const std::vector<AuditTerm>& terms) {
  std::map<std::string, double> mains;
  std::vector<double> main_vals, all_vals;
  for (const auto& t : terms) {
    if (!t.is_pair()) {
      mains[t.features[0]] = t.importance;
      main_vals.push_back(t.importance);
    }
    all_vals.push_back(t.importance);
  }
  for (const auto& t : terms) {
    if (!t.is_pair()) continue;
    for (const auto& f : t.features) {
      if (!mains.count(f)) throw Error("unhoused main effect: " + f);
    }
  }

  SpuriousReport rep;
  if (main_vals.empty()) return rep;
  const double noisy_cutoff = detail::nearest_rank(main_vals, 0.10);
  const double top_cutoff = detail::nearest_rank(all_vals, 0.90);
  for (const auto& [name, imp] : mains) {
    if (imp <= noisy_cutoff) rep.noisy_set.push_back(name);
  }
  std::sort(rep.noisy_set.begin(), rep.noisy_set.end(),
            [&](const std::string& a, const std::string& b) {
              if (mains[a] != mains[b]) return mains[a] < mains[b];
              return a < b;
            });

  std::vector<AuditTerm> pairs = detail::sorted_pairs_desc(terms);
  for (const auto& p : pairs) {
    if (p.importance < top_cutoff) continue;
    for (const auto& f : p.features) {
      if (mains[f] <= noisy_cutoff) {
        rep.flags.push_back(SpuriousFlag{p, f});
      }
    }
  }
  rep.count = static_cast<int>(rep.flags.size());
  return rep;
}

}  // namespace glassboost
