#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace flowlabel {

// Positive class = 1 = malicious.
struct ConfusionMatrix {
  std::uint64_t tp = 0, fn = 0, fp = 0, tn = 0;

  std::uint64_t total() const { return tp + fn + fp + tn; }
};

ConfusionMatrix confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred);
ConfusionMatrix confusion(const std::vector<int>& y_true,
                          const std::vector<std::uint8_t>& y_pred);

struct ClassificationReport {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double far = 0.0;  // false alarm rate FP/(TN+FP)
  double specificity = 0.0;
  double mcc = 0.0;
  // Metrics whose denominator was zero; their value is reported as 0.
  std::vector<std::string> degenerate;
};

ClassificationReport classification_report(const ConfusionMatrix& cm);

struct ClusteringReport {
  double homogeneity = 0.0;
  double completeness = 0.0;
  double v_measure = 0.0;
  double ari = 0.0;
  double ami = 0.0;
};

// Binary-partition agreement measures. Homogeneity and completeness both use
// H(pred|true) in the numerator (clipped to [0,1]); ARI by pair counting with
// hypergeometric expectation; AMI under the permutation model with
// average-entropy normalisation. Entropies in natural log.
ClusteringReport clustering_report(const std::vector<int>& y_true,
                                   const std::vector<int>& y_pred);
ClusteringReport clustering_report(const std::vector<int>& y_true,
                                   const std::vector<std::uint8_t>& y_pred);

// counts[t][p]: rows with true label t predicted as p.
ClusteringReport clustering_report_from_counts(const std::array<std::array<std::uint64_t, 2>, 2>& counts);

enum class CurveKind { Roc, Pr };

struct CurveData {
  std::vector<double> x;  // ROC: FPR; PR: recall
  std::vector<double> y;  // ROC: TPR; PR: precision
  double auc = 0.0;       // trapezoid rule
  CurveKind kind = CurveKind::Roc;
};

// Threshold sweep over the distinct scores, descending, tied scores grouped.
CurveData roc_curve(const std::vector<int>& y_true, const std::vector<double>& scores);
CurveData pr_curve(const std::vector<int>& y_true, const std::vector<double>& scores);

double curve_auc(const CurveData& curve);

}  // namespace flowlabel
