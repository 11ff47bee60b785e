#pragma once

#include <string>
#include <vector>

namespace erg::metrics {

// Scores are fractions in [0, 1]; report writers format them as needed.
struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct ConfusionCounts {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  long tn = 0;

  long total() const { return tp + fp + fn + tn; }
};

// A partition of mention identifiers into disjoint clusters.
using Clustering = std::vector<std::vector<std::string>>;

ConfusionCounts confusion(const std::vector<int>& predictions,
                          const std::vector<int>& golds);

// P = TP/(TP+FP) with 0 when the denominator is 0 (same for R); F1 is the
// harmonic mean, 0 when P + R = 0.
Prf prf_from_counts(const ConfusionCounts& c);
Prf prf_bias(const std::vector<int>& predictions, const std::vector<int>& golds);

// Unweighted mean of per-class P/R/F1. A class absent from both gold and
// predictions contributes (0, 0, 0).
Prf macro_prf(const std::vector<ConfusionCounts>& per_class);

Prf muc(const Clustering& gold, const Clustering& pred);
Prf b_cubed(const Clustering& gold, const Clustering& pred);
Prf ceaf_e(const Clustering& gold, const Clustering& pred);
// P and R are the means of the per-link-class values; F1 is the mean of the
// two per-class F1s (not the harmonic mean of P and R).
Prf blanc(const Clustering& gold, const Clustering& pred);

// Maximum-total-similarity one-to-one assignment on a square matrix;
// returns the column matched to each row.
std::vector<std::size_t> hungarian_max(const std::vector<std::vector<double>>& sim);

std::string format_percent(double fraction);  // two decimals, e.g. "20.34"
std::string format_fraction(double fraction); // two decimals, e.g. "0.67"

}  // namespace erg::metrics
