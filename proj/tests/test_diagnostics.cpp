#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "glassboost/common.hpp"
#include "glassboost/diagnostics.hpp"
#include "glassboost/ebm.hpp"
#include "glassboost/io.hpp"
#include "glassboost/synth.hpp"

using namespace glassboost;

#ifndef FIXTURE_DIR
#define FIXTURE_DIR "tests/fixtures"
#endif

namespace {

AuditTerm main_term(const std::string& name, double imp) {
  return AuditTerm{{name}, imp};
}

AuditTerm pair_term(const std::string& a, const std::string& b, double imp) {
  return AuditTerm{{a, b}, imp};
}

std::vector<AuditTerm> load_fixture(const std::string& file) {
  return io::audit_terms_from_json(
      io::load_json_file(std::string(FIXTURE_DIR) + "/" + file));
}

}  // namespace

TEST_CASE("nearest-rank percentile picks the ceil(q*n)-th smallest") {
  std::vector<double> v{10, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  CHECK(detail::nearest_rank(v, 0.10) == 1.0);
  CHECK(detail::nearest_rank(v, 0.90) == 9.0);
  CHECK(detail::nearest_rank({5, 1, 3, 2, 4}, 0.5) == 3.0);
  CHECK(detail::nearest_rank({42}, 0.1) == 42.0);
  CHECK(detail::nearest_rank({42}, 0.9) == 42.0);
}

TEST_CASE("dominance report on the single-dominator fixture") {
  const auto terms = load_fixture("lending_plain_interactions.json");
  const DominanceReport rep = dominance_report(terms);

  REQUIRE(rep.top_pairs.size() == 5);
  CHECK(rep.top_pairs[0].importance == 0.40439605400365486);
  CHECK(rep.top_pairs[4].importance == 0.22985082930677306);
  // Every top-5 pair contains the dominating feature.
  for (const auto& p : rep.top_pairs) {
    CHECK(std::find(p.features.begin(), p.features.end(), "recoveries") !=
          p.features.end());
  }
  CHECK(rep.occurrences.at("recoveries") == 5);
  CHECK(rep.flagged == std::vector<std::string>{"recoveries"});
  CHECK(rep.max_occurrence() == 5);
  REQUIRE(!rep.summary.empty());
  CHECK(rep.summary[0] == "1 feature x 5 Occurrence");
}

TEST_CASE("dominance report on the reduced-interaction fixture") {
  const auto terms = load_fixture("lending_selected_interactions.json");
  const DominanceReport rep = dominance_report(terms);
  CHECK(rep.max_occurrence() == 2);
  CHECK(rep.flagged.size() == 3);  // total_rec_prncp, loan_amnt, last_pymnt_amnt
  CHECK(rep.summary[0] == "3 feature x 2 Occurrence");
}

TEST_CASE("dominance occurrences match a brute-force recount on random terms") {
  Rng rng(404);
  for (int trial = 0; trial < 60; ++trial) {
    const int n_feat = 4 + static_cast<int>(rand_index(rng, 6));
    std::vector<AuditTerm> terms;
    for (int f = 0; f < n_feat; ++f) {
      terms.push_back(main_term("f" + std::to_string(f), rand_unit(rng)));
    }
    const int n_pairs = static_cast<int>(rand_index(rng, 9));
    for (int p = 0; p < n_pairs; ++p) {
      const int a = static_cast<int>(rand_index(rng, n_feat));
      int b = static_cast<int>(rand_index(rng, n_feat - 1));
      if (b >= a) ++b;
      terms.push_back(pair_term("f" + std::to_string(std::min(a, b)),
                                "f" + std::to_string(std::max(a, b)),
                                rand_unit(rng)));
    }
    const DominanceReport rep = dominance_report(terms);
    CHECK(rep.top_pairs.size() == std::min<std::size_t>(n_pairs, 5));
    // Recount from top_pairs.
    std::map<std::string, int> counts;
    for (const auto& p : rep.top_pairs) {
      for (const auto& f : p.features) ++counts[f];
    }
    CHECK(counts == rep.occurrences);
    for (const auto& [name, c] : counts) {
      const bool flagged = std::find(rep.flagged.begin(), rep.flagged.end(),
                                     name) != rep.flagged.end();
      CHECK(flagged == (c > 1));
    }
    // Top pairs really are the maximal pair importances.
    double cutoff = rep.top_pairs.empty()
                        ? 0.0
                        : rep.top_pairs.back().importance;
    for (const auto& t : terms) {
      if (t.is_pair() && t.importance > cutoff) {
        bool found = false;
        for (const auto& p : rep.top_pairs) {
          if (p.features == t.features && p.importance == t.importance) {
            found = true;
          }
        }
        CHECK(found);
      }
    }
  }
}

TEST_CASE("reports are invariant under positive rescaling of importances") {
  const auto terms = load_fixture("lending_plain_interactions.json");
  std::vector<AuditTerm> scaled = terms;
  for (auto& t : scaled) t.importance *= 37.5;

  const DominanceReport da = dominance_report(terms);
  const DominanceReport db = dominance_report(scaled);
  CHECK(da.occurrences == db.occurrences);
  CHECK(da.flagged == db.flagged);
  CHECK(da.summary == db.summary);

  const SpuriousReport sa = spurious_report(terms);
  const SpuriousReport sb = spurious_report(scaled);
  CHECK(sa.noisy_set == sb.noisy_set);
  CHECK(sa.count == sb.count);
}

TEST_CASE("spurious report flags noisy mains inside top-decile pairs") {
  // 10 mains: noisy cutoff is the single smallest (ceil(0.1*10) = 1st).
  std::vector<AuditTerm> terms;
  for (int f = 0; f < 10; ++f) {
    terms.push_back(main_term("f" + std::to_string(f), 0.1 + 0.1 * f));
  }
  // 10 pairs; with 20 terms the top decile keeps importance >= the 18th
  // smallest. Give the strongest pair the noisy feature f0.
  terms.push_back(pair_term("f0", "f9", 5.0));
  for (int p = 0; p < 9; ++p) {
    terms.push_back(pair_term("f1", "f" + std::to_string(2 + (p % 7)),
                              0.01 + 0.001 * p));
  }
  const SpuriousReport rep = spurious_report(terms);
  CHECK(rep.noisy_set == std::vector<std::string>{"f0"});
  REQUIRE(rep.count == 1);
  CHECK(rep.flags[0].noisy_member == "f0");
  CHECK(rep.flags[0].pair.importance == 5.0);

  // Same setup with the strong pair over healthy mains: no flags.
  std::vector<AuditTerm> clean = terms;
  clean[10] = pair_term("f8", "f9", 5.0);
  CHECK(spurious_report(clean).count == 0);
}

TEST_CASE("spurious report rejects pairs over unknown mains") {
  std::vector<AuditTerm> terms = {main_term("a", 1.0), main_term("b", 0.5),
                                  pair_term("a", "ghost", 2.0)};
  CHECK_THROWS_WITH(spurious_report(terms),
                    Catch::Matchers::ContainsSubstring("unhoused main"));
}

TEST_CASE("audit_terms carries model term names and importances") {
  SynthConfig cfg;
  cfg.rows = 500;
  cfg.seed = 8;
  auto [ds, rep] = preprocess(synth_dataset(cfg));
  EbmParams params;
  params.outer_rounds = 100;
  AdditiveModel model = fit_ebm(bin(ds), params);
  const auto terms = audit_terms(model);
  REQUIRE(terms.size() == model.importances.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& ti = model.importances[i];
    CHECK(terms[i].importance == ti.importance);
    CHECK(terms[i].is_pair() == ti.is_pair);
    CHECK(terms[i].features[0] == model.schema[ti.f_i].name);
    if (ti.is_pair) CHECK(terms[i].features[1] == model.schema[ti.f_j].name);
  }
}

TEST_CASE("audit terms survive a JSON round trip") {
  const auto terms = load_fixture("lending_plain_interactions.json");
  const auto back = io::audit_terms_from_json(io::to_json(terms));
  REQUIRE(back.size() == terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    CHECK(back[i].features == terms[i].features);
    CHECK(back[i].importance == terms[i].importance);
  }
}

TEST_CASE("audit parser accepts 'a x b' pair strings") {
  io::json j = {{"terms",
                 {{{"term", "alpha x beta"}, {"kind", "pair"},
                   {"importance", 0.5}},
                  {{"term", "gamma"}, {"importance", 0.25}}}}};
  const auto terms = io::audit_terms_from_json(j);
  REQUIRE(terms.size() == 2);
  CHECK(terms[0].features == std::vector<std::string>{"alpha", "beta"});
  CHECK(terms[1].features == std::vector<std::string>{"gamma"});
}
