#include "flowlabel/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace flowlabel {

namespace {

template <typename T>
ConfusionMatrix confusion_impl(const std::vector<int>& y_true, const std::vector<T>& y_pred) {
  if (y_true.size() != y_pred.size())
    throw std::invalid_argument("confusion: " + std::to_string(y_true.size()) +
                                " truths vs " + std::to_string(y_pred.size()) +
                                " predictions");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    int t = y_true[i];
    int p = static_cast<int>(y_pred[i]);
    if ((t != 0 && t != 1) || (p != 0 && p != 1))
      throw std::invalid_argument("confusion: non-binary value at row " + std::to_string(i));
    if (t == 1)
      (p == 1 ? cm.tp : cm.fn)++;
    else
      (p == 1 ? cm.fp : cm.tn)++;
  }
  return cm;
}

double xlogx(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

double lchoose2(std::uint64_t n) {
  return n < 2 ? 0.0 : static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
}

}  // namespace

ConfusionMatrix confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
  return confusion_impl(y_true, y_pred);
}

ConfusionMatrix confusion(const std::vector<int>& y_true,
                          const std::vector<std::uint8_t>& y_pred) {
  return confusion_impl(y_true, y_pred);
}

ClassificationReport classification_report(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw std::invalid_argument("classification_report: empty matrix");
  ClassificationReport r;
  auto tp = static_cast<double>(cm.tp), fn = static_cast<double>(cm.fn);
  auto fp = static_cast<double>(cm.fp), tn = static_cast<double>(cm.tn);

  auto ratio = [&r](double num, double den, const char* name) {
    if (den == 0.0) {
      r.degenerate.push_back(name);
      return 0.0;
    }
    return num / den;
  };

  r.accuracy = (tp + tn) / (tp + tn + fp + fn);
  r.precision = ratio(tp, tp + fp, "precision");
  r.recall = ratio(tp, tp + fn, "recall");
  r.f1 = ratio(2.0 * r.precision * r.recall, r.precision + r.recall, "f1");
  r.far = ratio(fp, tn + fp, "far");
  r.specificity = ratio(tn, tn + fp, "specificity");
  double denom2 = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  r.mcc = ratio(tp * tn - fp * fn, std::sqrt(denom2), "mcc");
  return r;
}

ClusteringReport clustering_report_from_counts(
    const std::array<std::array<std::uint64_t, 2>, 2>& counts) {
  std::uint64_t n_u = counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
  if (n_u == 0) throw std::invalid_argument("clustering_report: empty input");
  double n = static_cast<double>(n_u);

  std::array<std::uint64_t, 2> a{counts[0][0] + counts[0][1],
                                 counts[1][0] + counts[1][1]};  // true marginals
  std::array<std::uint64_t, 2> b{counts[0][0] + counts[1][0],
                                 counts[0][1] + counts[1][1]};  // pred marginals

  double h_true = 0.0, h_pred = 0.0;
  for (int i = 0; i < 2; ++i) h_true -= xlogx(static_cast<double>(a[i]) / n);
  for (int j = 0; j < 2; ++j) h_pred -= xlogx(static_cast<double>(b[j]) / n);

  // H(pred|true) = -sum_ij (nij/n) log(nij / ai)
  double h_pred_given_true = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      if (counts[i][j] > 0)
        h_pred_given_true -= static_cast<double>(counts[i][j]) / n *
                             std::log(static_cast<double>(counts[i][j]) /
                                      static_cast<double>(a[i]));

  ClusteringReport r;
  r.homogeneity =
      h_true == 0.0 ? 1.0 : std::clamp(1.0 - h_pred_given_true / h_true, 0.0, 1.0);
  r.completeness =
      h_pred == 0.0 ? 1.0 : std::clamp(1.0 - h_pred_given_true / h_pred, 0.0, 1.0);
  double hc = r.homogeneity + r.completeness;
  r.v_measure = hc == 0.0 ? 0.0 : 2.0 * r.homogeneity * r.completeness / hc;

  // ARI: pair counting with hypergeometric expectation.
  double sum_cells = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) sum_cells += lchoose2(counts[i][j]);
  double sum_a = lchoose2(a[0]) + lchoose2(a[1]);
  double sum_b = lchoose2(b[0]) + lchoose2(b[1]);
  double total_pairs = lchoose2(n_u);
  double expected = total_pairs == 0.0 ? 0.0 : sum_a * sum_b / total_pairs;
  double max_index = 0.5 * (sum_a + sum_b);
  r.ari = max_index == expected ? (sum_cells == expected ? 1.0 : 0.0)
                                : (sum_cells - expected) / (max_index - expected);

  // AMI: (MI - E[MI]) / (avg(H_true, H_pred) - E[MI]), permutation model.
  double mi = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      if (counts[i][j] > 0) {
        double nij = static_cast<double>(counts[i][j]);
        mi += nij / n *
              std::log(n * nij / (static_cast<double>(a[i]) * static_cast<double>(b[j])));
      }

  double emi = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      double ai = static_cast<double>(a[i]), bj = static_cast<double>(b[j]);
      if (a[i] == 0 || b[j] == 0) continue;
      std::uint64_t lo = a[i] + b[j] > n_u ? a[i] + b[j] - n_u : 0;
      if (lo == 0) lo = 1;  // nij = 0 contributes nothing
      std::uint64_t hi = std::min(a[i], b[j]);
      for (std::uint64_t nij_u = lo; nij_u <= hi; ++nij_u) {
        double nij = static_cast<double>(nij_u);
        // hypergeometric P(nij) via log-gammas
        double logp = std::lgamma(ai + 1) + std::lgamma(bj + 1) + std::lgamma(n - ai + 1) +
                      std::lgamma(n - bj + 1) - std::lgamma(n + 1) - std::lgamma(nij + 1) -
                      std::lgamma(ai - nij + 1) - std::lgamma(bj - nij + 1) -
                      std::lgamma(n - ai - bj + nij + 1);
        emi += std::exp(logp) * (nij / n) * std::log(n * nij / (ai * bj));
      }
    }

  double denom = 0.5 * (h_true + h_pred) - emi;
  if (std::abs(denom) < 1e-15)
    r.ami = mi - emi == 0.0 ? 1.0 : 0.0;
  else
    r.ami = (mi - emi) / denom;
  return r;
}

namespace {

template <typename T>
ClusteringReport clustering_report_impl(const std::vector<int>& y_true,
                                        const std::vector<T>& y_pred) {
  if (y_true.size() != y_pred.size())
    throw std::invalid_argument("clustering_report: " + std::to_string(y_true.size()) +
                                " truths vs " + std::to_string(y_pred.size()) +
                                " predictions");
  if (y_true.empty()) throw std::invalid_argument("clustering_report: empty input");
  std::array<std::array<std::uint64_t, 2>, 2> counts{};
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    int t = y_true[i];
    int p = static_cast<int>(y_pred[i]);
    if ((t != 0 && t != 1) || (p != 0 && p != 1))
      throw std::invalid_argument("clustering_report: non-binary value at row " +
                                  std::to_string(i));
    counts[t][p]++;
  }
  return clustering_report_from_counts(counts);
}

}  // namespace

ClusteringReport clustering_report(const std::vector<int>& y_true,
                                   const std::vector<int>& y_pred) {
  return clustering_report_impl(y_true, y_pred);
}

ClusteringReport clustering_report(const std::vector<int>& y_true,
                                   const std::vector<std::uint8_t>& y_pred) {
  return clustering_report_impl(y_true, y_pred);
}

namespace {

// Rows sorted by score descending, tied scores collapsed into one step.
// Returns (score, positives, negatives) per distinct score.
struct SweepStep {
  double score;
  std::uint64_t pos;
  std::uint64_t neg;
};

std::vector<SweepStep> threshold_sweep(const std::vector<int>& y_true,
                                       const std::vector<double>& scores) {
  if (y_true.size() != scores.size())
    throw std::invalid_argument("curve: " + std::to_string(y_true.size()) + " truths vs " +
                                std::to_string(scores.size()) + " scores");
  if (y_true.empty()) throw std::invalid_argument("curve: empty input");
  std::vector<std::size_t> order(y_true.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&scores](std::size_t i, std::size_t j) {
    return scores[i] > scores[j];
  });

  std::vector<SweepStep> steps;
  for (std::size_t k = 0; k < order.size(); ++k) {
    std::size_t i = order[k];
    if (!std::isfinite(scores[i]))
      throw std::invalid_argument("curve: non-finite score at row " + std::to_string(i));
    if (y_true[i] != 0 && y_true[i] != 1)
      throw std::invalid_argument("curve: non-binary label at row " + std::to_string(i));
    if (steps.empty() || steps.back().score != scores[i])
      steps.push_back({scores[i], 0, 0});
    if (y_true[i] == 1)
      steps.back().pos++;
    else
      steps.back().neg++;
  }
  return steps;
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  double area = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i)
    area += (x[i] - x[i - 1]) * (y[i] + y[i - 1]) / 2.0;
  return area;
}

}  // namespace

CurveData roc_curve(const std::vector<int>& y_true, const std::vector<double>& scores) {
  auto steps = threshold_sweep(y_true, scores);
  std::uint64_t total_pos = 0, total_neg = 0;
  for (const auto& s : steps) {
    total_pos += s.pos;
    total_neg += s.neg;
  }
  if (total_pos == 0 || total_neg == 0)
    throw std::invalid_argument("roc_curve: need both classes present");

  CurveData c;
  c.kind = CurveKind::Roc;
  c.x.push_back(0.0);
  c.y.push_back(0.0);
  std::uint64_t tp = 0, fp = 0;
  for (const auto& s : steps) {
    tp += s.pos;
    fp += s.neg;
    c.x.push_back(static_cast<double>(fp) / static_cast<double>(total_neg));
    c.y.push_back(static_cast<double>(tp) / static_cast<double>(total_pos));
  }
  c.auc = trapezoid(c.x, c.y);
  return c;
}

CurveData pr_curve(const std::vector<int>& y_true, const std::vector<double>& scores) {
  auto steps = threshold_sweep(y_true, scores);
  std::uint64_t total_pos = 0;
  for (const auto& s : steps) total_pos += s.pos;
  if (total_pos == 0) throw std::invalid_argument("pr_curve: no positive samples");

  CurveData c;
  c.kind = CurveKind::Pr;
  // anchor: recall 0 at precision 1
  c.x.push_back(0.0);
  c.y.push_back(1.0);
  std::uint64_t tp = 0, fp = 0;
  for (const auto& s : steps) {
    tp += s.pos;
    fp += s.neg;
    c.x.push_back(static_cast<double>(tp) / static_cast<double>(total_pos));
    c.y.push_back(static_cast<double>(tp) / static_cast<double>(tp + fp));
  }
  c.auc = trapezoid(c.x, c.y);
  return c;
}

double curve_auc(const CurveData& curve) { return trapezoid(curve.x, curve.y); }

}  // namespace flowlabel
