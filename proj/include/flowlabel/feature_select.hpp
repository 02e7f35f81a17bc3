#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flowlabel/dataset.hpp"

namespace flowlabel {

// Pearson correlation, population convention; 0 when either side has zero
// variance.
double pearson_cof(const std::vector<double>& x, const std::vector<double>& y);
double pearson_cof(const std::vector<double>& x, const std::vector<int>& labels);

// One cof per feature column against the label vector.
std::vector<double> correlation_scores(const FeatureMatrix& X, const std::vector<int>& labels);

// Indices with |cof| strictly above delta.
std::vector<std::size_t> select_by_correlation(const FeatureMatrix& X,
                                               const std::vector<int>& labels, double delta);

struct LassoFit {
  std::vector<double> beta;
  double intercept = 0.0;  // mean residual, not part of the penalised objective
  double alpha = 0.0;
  int iterations = 0;  // full coordinate sweeps used
  bool converged = false;
};

// Minimises sum_i (y_i - sum_j beta_j x_ij)^2 + alpha * sum_j |beta_j| by
// cyclic coordinate descent with soft-thresholding. Note the objective is
// unnormalised (no 1/2n), so the per-coordinate threshold is alpha/2.
LassoFit lasso_fit(const FeatureMatrix& X, const std::vector<double>& y, double alpha,
                   double tol = 1e-6, int max_sweeps = 1000);

struct CvResult {
  std::vector<double> alpha_grid;
  std::vector<double> mean_loss;  // mean held-out squared error per alpha
  double best_alpha = 0.0;
};

// Inclusive grid start, start+step, ..., stop.
std::vector<double> make_alpha_grid(double start, double stop, double step);

// Seeded k-fold CV over the alpha grid; ties in loss resolve toward the
// larger alpha (sparser model).
CvResult cross_validate_alpha(const FeatureMatrix& X, const std::vector<double>& y,
                              const std::vector<double>& grid, std::size_t k,
                              std::uint64_t seed);

// Indices with |beta| above the zero tolerance.
std::vector<std::size_t> select_by_lasso(const LassoFit& fit, double zero_tol = 1e-8);

enum class Provenance { Correlation, Lasso, Both };

const char* provenance_name(Provenance p);

struct SelectedFeature {
  std::size_t index = 0;
  std::string name;
  Provenance provenance = Provenance::Correlation;
  double cof = 0.0;
  double beta = 0.0;
};

struct FeatureSet {
  std::vector<SelectedFeature> features;  // ascending by index
  double delta = 0.0;
  double alpha = 0.0;

  std::vector<std::size_t> indices() const;
  bool contains(std::size_t index) const;
};

struct SelectOptions {
  double delta = 0.4;
  double alpha_start = 0.1;
  double alpha_stop = 8.0;
  double alpha_step = 0.01;
  std::size_t cv_folds = 10;
  std::uint64_t seed = 0;
};

// Union of the correlation-selected and lasso-selected features, with
// per-feature provenance.
FeatureSet select_features(const FeatureMatrix& X, const std::vector<int>& labels,
                           const SelectOptions& opts = {});

// 1 - selected/total.
double feature_reduction_rate(std::size_t selected, std::size_t total);

}  // namespace flowlabel
