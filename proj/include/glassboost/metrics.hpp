#pragma once

#include <cstdint>
#include <iostream>
#include <vector>

#include "glassboost/common.hpp"
#include "glassboost/dataset.hpp"
#include "glassboost/ebm.hpp"

namespace glassboost {

struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;

  std::int64_t total() const { return tp + fp + tn + fn; }
};

inline double f1_score(const ConfusionCounts& c) {
  const std::int64_t denom = 2 * c.tp + c.fp + c.fn;
  if (denom == 0) {
    std::cerr << "warning: F1 undefined (no positives anywhere), reporting 0\n";
    return 0.0;
  }
  return 2.0 * c.tp / static_cast<double>(denom);
}

inline double accuracy_score(const ConfusionCounts& c) {
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

struct EvalResult {
  double f1 = 0.0;
  double accuracy = 0.0;
  double fit_seconds = 0.0;
  int n_features = 0;
  ConfusionCounts confusion;
  double threshold = 0.5;
};

// Hard labels at the decision threshold; F1 on the positive class (label 1).
inline EvalResult evaluate(const AdditiveModel& model, const Dataset& test,
                           double fit_seconds, double threshold = 0.5) {
  test.check_valid();
  EvalResult res;
  res.threshold = threshold;
  res.n_features = static_cast<int>(model.n_features());
  res.fit_seconds = fit_seconds;
  const std::vector<double> probs = model.predict(test);
  for (std::size_t r = 0; r < test.n_rows(); ++r) {
    const int label = probs[r] > threshold ? 1 : 0;
    if (label == 1) {
      (test.target[r] == 1 ? res.confusion.tp : res.confusion.fp)++;
    } else {
      (test.target[r] == 0 ? res.confusion.tn : res.confusion.fn)++;
    }
  }
  res.f1 = f1_score(res.confusion);
  res.accuracy = accuracy_score(res.confusion);
  return res;
}

}  // namespace glassboost
