#include "erg/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

namespace erg::metrics {

namespace {

double safe_div(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

double harmonic(double p, double r) {
  return (p + r) == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

// 0/0 -> 1 covers the all-singleton MUC and the degenerate CEAF sides; the
// perfect-iff-equal invariant is preserved because a 1 from 0/0 on one side
// pairs with a genuine 0 on the other side whenever the partitions differ.
double ratio_or_one(double num, double den) { return den == 0.0 ? 1.0 : num / den; }

std::map<std::string, std::size_t> mention_index(const Clustering& clustering,
                                                 const char* which) {
  std::map<std::string, std::size_t> index;
  for (std::size_t c = 0; c < clustering.size(); ++c) {
    if (clustering[c].empty()) {
      throw std::invalid_argument(std::string(which) + ": empty cluster");
    }
    for (const auto& m : clustering[c]) {
      if (!index.emplace(m, c).second) {
        throw std::invalid_argument(std::string(which) + ": mention '" + m +
                                    "' appears in two clusters");
      }
    }
  }
  return index;
}

void check_same_universe(const std::map<std::string, std::size_t>& a,
                         const std::map<std::string, std::size_t>& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("mention universes differ in size: " +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()));
  }
  for (const auto& [m, _] : a) {
    if (b.find(m) == b.end()) {
      throw std::invalid_argument("mention '" + m + "' missing from one clustering");
    }
  }
}

}  // namespace

ConfusionCounts confusion(const std::vector<int>& predictions,
                          const std::vector<int>& golds) {
  if (predictions.size() != golds.size()) {
    throw std::invalid_argument("confusion: " + std::to_string(predictions.size()) +
                                " predictions vs " + std::to_string(golds.size()) +
                                " golds");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const bool p = predictions[i] != 0;
    const bool g = golds[i] != 0;
    if (p && g) ++c.tp;
    else if (p && !g) ++c.fp;
    else if (!p && g) ++c.fn;
    else ++c.tn;
  }
  return c;
}

Prf prf_from_counts(const ConfusionCounts& c) {
  Prf out;
  out.precision = safe_div(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fp));
  out.recall = safe_div(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fn));
  out.f1 = harmonic(out.precision, out.recall);
  return out;
}

Prf prf_bias(const std::vector<int>& predictions, const std::vector<int>& golds) {
  return prf_from_counts(confusion(predictions, golds));
}

Prf macro_prf(const std::vector<ConfusionCounts>& per_class) {
  if (per_class.size() < 2) {
    throw std::invalid_argument("macro_prf: need at least 2 classes");
  }
  Prf sum;
  for (const auto& c : per_class) {
    const Prf p = prf_from_counts(c);
    sum.precision += p.precision;
    sum.recall += p.recall;
    sum.f1 += p.f1;
  }
  const double n = static_cast<double>(per_class.size());
  return Prf{sum.precision / n, sum.recall / n, sum.f1 / n};
}

Prf muc(const Clustering& gold, const Clustering& pred) {
  const auto gold_of = mention_index(gold, "gold");
  const auto pred_of = mention_index(pred, "pred");
  check_same_universe(gold_of, pred_of);

  const auto link_score = [](const Clustering& base,
                             const std::map<std::string, std::size_t>& other) {
    double num = 0.0;
    double den = 0.0;
    for (const auto& cluster : base) {
      std::set<std::size_t> parts;
      for (const auto& m : cluster) {
        parts.insert(other.at(m));
      }
      num += static_cast<double>(cluster.size() - parts.size());
      den += static_cast<double>(cluster.size() - 1);
    }
    return ratio_or_one(num, den);
  };

  Prf out;
  out.recall = link_score(gold, pred_of);
  out.precision = link_score(pred, gold_of);
  out.f1 = harmonic(out.precision, out.recall);
  return out;
}

Prf b_cubed(const Clustering& gold, const Clustering& pred) {
  const auto gold_of = mention_index(gold, "gold");
  const auto pred_of = mention_index(pred, "pred");
  check_same_universe(gold_of, pred_of);

  double precision = 0.0;
  double recall = 0.0;
  std::size_t mentions = 0;
  for (const auto& cluster : gold) {
    for (const auto& m : cluster) {
      const auto& pred_cluster = pred[pred_of.at(m)];
      std::size_t overlap = 0;
      for (const auto& other : pred_cluster) {
        if (gold_of.at(other) == gold_of.at(m)) {
          ++overlap;
        }
      }
      precision += static_cast<double>(overlap) / static_cast<double>(pred_cluster.size());
      recall += static_cast<double>(overlap) / static_cast<double>(cluster.size());
      ++mentions;
    }
  }
  if (mentions == 0) {
    throw std::invalid_argument("b_cubed: empty mention universe");
  }
  Prf out;
  out.precision = precision / static_cast<double>(mentions);
  out.recall = recall / static_cast<double>(mentions);
  out.f1 = harmonic(out.precision, out.recall);
  return out;
}

Prf ceaf_e(const Clustering& gold, const Clustering& pred) {
  const auto gold_of = mention_index(gold, "gold");
  const auto pred_of = mention_index(pred, "pred");
  check_same_universe(gold_of, pred_of);

  const std::size_t n = std::max(gold.size(), pred.size());
  std::vector<std::vector<double>> sim(n, std::vector<double>(n, 0.0));
  for (std::size_t g = 0; g < gold.size(); ++g) {
    for (std::size_t p = 0; p < pred.size(); ++p) {
      std::size_t overlap = 0;
      for (const auto& m : gold[g]) {
        if (pred_of.at(m) == p) {
          ++overlap;
        }
      }
      sim[g][p] = 2.0 * static_cast<double>(overlap) /
                  static_cast<double>(gold[g].size() + pred[p].size());
    }
  }
  const auto assignment = hungarian_max(sim);
  double total = 0.0;
  for (std::size_t g = 0; g < n; ++g) {
    total += sim[g][assignment[g]];
  }
  Prf out;
  out.recall = ratio_or_one(total, static_cast<double>(gold.size()));
  out.precision = ratio_or_one(total, static_cast<double>(pred.size()));
  out.f1 = harmonic(out.precision, out.recall);
  return out;
}

Prf blanc(const Clustering& gold, const Clustering& pred) {
  const auto gold_of = mention_index(gold, "gold");
  const auto pred_of = mention_index(pred, "pred");
  check_same_universe(gold_of, pred_of);

  std::vector<std::string> mentions;
  mentions.reserve(gold_of.size());
  for (const auto& [m, _] : gold_of) {
    mentions.push_back(m);
  }

  // Count agreement over all unordered mention pairs, split by gold/pred
  // coreference-vs-not.
  long coref_gold = 0, coref_pred = 0, coref_both = 0;
  long non_gold = 0, non_pred = 0, non_both = 0;
  for (std::size_t i = 0; i < mentions.size(); ++i) {
    for (std::size_t j = i + 1; j < mentions.size(); ++j) {
      const bool g = gold_of.at(mentions[i]) == gold_of.at(mentions[j]);
      const bool p = pred_of.at(mentions[i]) == pred_of.at(mentions[j]);
      coref_gold += g;
      coref_pred += p;
      coref_both += g && p;
      non_gold += !g;
      non_pred += !p;
      non_both += !g && !p;
    }
  }

  // Per-class conventions: a class empty on both sides is scored perfect; a
  // class empty on exactly one side scores 0.
  const auto class_prf = [](long both, long in_gold, long in_pred) {
    Prf s;
    if (in_gold == 0 && in_pred == 0) {
      s.precision = s.recall = s.f1 = 1.0;
      return s;
    }
    s.precision = in_pred == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(in_pred);
    s.recall = in_gold == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(in_gold);
    s.f1 = harmonic(s.precision, s.recall);
    return s;
  };

  const Prf coref = class_prf(coref_both, coref_gold, coref_pred);
  const Prf non = class_prf(non_both, non_gold, non_pred);
  Prf out;
  out.precision = 0.5 * (coref.precision + non.precision);
  out.recall = 0.5 * (coref.recall + non.recall);
  out.f1 = 0.5 * (coref.f1 + non.f1);
  return out;
}

std::vector<std::size_t> hungarian_max(const std::vector<std::vector<double>>& sim) {
  const std::size_t n = sim.size();
  for (const auto& row : sim) {
    if (row.size() != n) {
      throw std::invalid_argument("hungarian_max: matrix not square");
    }
  }
  if (n == 0) {
    return {};
  }

  // Potential-based assignment on negated similarities (minimization form).
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> matched_row(n + 1, 0);  // column -> row (1-based, 0 = free)
  std::vector<std::size_t> way(n + 1, 0);

  for (std::size_t i = 1; i <= n; ++i) {
    matched_row[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = matched_row[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = -sim[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[matched_row[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (matched_row[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      matched_row[j0] = matched_row[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> result(n, 0);
  for (std::size_t j = 1; j <= n; ++j) {
    if (matched_row[j] > 0) {
      result[matched_row[j] - 1] = j - 1;
    }
  }
  return result;
}

std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", fraction * 100.0);
  return buf;
}

std::string format_fraction(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", fraction);
  return buf;
}

}  // namespace erg::metrics
