#include "flowlabel/feature_select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "flowlabel/rng.hpp"

namespace flowlabel {

namespace {

double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

// Cyclic coordinate descent on the quadratic form:
//   minimize  beta'G beta - 2 c'beta + alpha*|beta|_1
// which is the lasso objective up to a constant, with G = X'X and c = X'y.
// s tracks G*beta across calls so warm starts are cheap.
struct CdState {
  std::vector<double> beta;
  std::vector<double> s;  // G * beta

  void resize(std::size_t d) {
    beta.assign(d, 0.0);
    s.assign(d, 0.0);
  }
};

int coordinate_descent(const std::vector<double>& G, const std::vector<double>& c,
                       std::size_t d, double alpha, double tol, int max_sweeps,
                       CdState& st, bool& converged) {
  converged = false;
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    double max_delta = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      double gjj = G[j * d + j];
      double old = st.beta[j];
      double nb;
      if (gjj <= 0.0) {
        nb = 0.0;  // zero-variance column
      } else {
        double z = c[j] - (st.s[j] - gjj * old);
        nb = soft_threshold(z, alpha / 2.0) / gjj;
      }
      double delta = nb - old;
      if (delta != 0.0) {
        st.beta[j] = nb;
        const double* Gcol = G.data() + j * d;  // G symmetric: row j == column j
        for (std::size_t k = 0; k < d; ++k) st.s[k] += Gcol[k] * delta;
        max_delta = std::max(max_delta, std::abs(delta));
      }
    }
    if (max_delta < tol) {
      converged = true;
      ++sweep;
      break;
    }
  }
  return sweep;
}

void check_finite(const FeatureMatrix& X, const std::vector<double>& y) {
  for (const auto& col : X.cols)
    for (double v : col)
      if (!std::isfinite(v)) throw std::invalid_argument("lasso: non-finite feature value");
  for (double v : y)
    if (!std::isfinite(v)) throw std::invalid_argument("lasso: non-finite target value");
}

std::vector<double> gram(const FeatureMatrix& X) {
  std::size_t d = X.n_cols();
  std::vector<double> G(d * d, 0.0);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = j; k < d; ++k) {
      double dot =
          std::inner_product(X.cols[j].begin(), X.cols[j].end(), X.cols[k].begin(), 0.0);
      G[j * d + k] = dot;
      G[k * d + j] = dot;
    }
  return G;
}

std::vector<double> xty(const FeatureMatrix& X, const std::vector<double>& y) {
  std::size_t d = X.n_cols();
  std::vector<double> c(d, 0.0);
  for (std::size_t j = 0; j < d; ++j)
    c[j] = std::inner_product(X.cols[j].begin(), X.cols[j].end(), y.begin(), 0.0);
  return c;
}

}  // namespace

double pearson_cof(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("pearson_cof: " + std::to_string(x.size()) + " vs " +
                                std::to_string(y.size()) + " values");
  if (x.size() < 2) throw std::invalid_argument("pearson_cof: need at least 2 values");
  double n = static_cast<double>(x.size());
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double cov = 0.0, vx = 0.0, vy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    cov += dx * dy;
    vx += dx * dx;
    vy += dy * dy;
  }
  if (vx == 0.0 || vy == 0.0) return 0.0;
  return cov / std::sqrt(vx * vy);
}

double pearson_cof(const std::vector<double>& x, const std::vector<int>& labels) {
  std::vector<double> y(labels.begin(), labels.end());
  return pearson_cof(x, y);
}

std::vector<double> correlation_scores(const FeatureMatrix& X, const std::vector<int>& labels) {
  std::vector<double> y(labels.begin(), labels.end());
  std::vector<double> out;
  out.reserve(X.n_cols());
  for (const auto& col : X.cols) out.push_back(pearson_cof(col, y));
  return out;
}

std::vector<std::size_t> select_by_correlation(const FeatureMatrix& X,
                                               const std::vector<int>& labels, double delta) {
  auto scores = correlation_scores(X, labels);
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < scores.size(); ++j)
    if (std::abs(scores[j]) > delta) out.push_back(j);
  return out;
}

LassoFit lasso_fit(const FeatureMatrix& X, const std::vector<double>& y, double alpha,
                   double tol, int max_sweeps) {
  if (alpha < 0.0) throw std::invalid_argument("lasso: alpha must be nonnegative");
  if (X.n_rows() != y.size())
    throw std::invalid_argument("lasso: " + std::to_string(X.n_rows()) + " rows vs " +
                                std::to_string(y.size()) + " targets");
  if (X.n_cols() == 0 || X.n_rows() == 0) throw std::invalid_argument("lasso: empty matrix");
  check_finite(X, y);

  std::size_t d = X.n_cols();
  auto G = gram(X);
  auto c = xty(X, y);

  CdState st;
  st.resize(d);
  LassoFit fit;
  fit.alpha = alpha;
  fit.iterations = coordinate_descent(G, c, d, alpha, tol, max_sweeps, st, fit.converged);
  fit.beta = st.beta;

  double mean_resid = std::accumulate(y.begin(), y.end(), 0.0);
  for (std::size_t j = 0; j < d; ++j)
    if (fit.beta[j] != 0.0)
      mean_resid -= fit.beta[j] * std::accumulate(X.cols[j].begin(), X.cols[j].end(), 0.0);
  fit.intercept = mean_resid / static_cast<double>(y.size());
  return fit;
}

std::vector<double> make_alpha_grid(double start, double stop, double step) {
  if (step <= 0.0) throw std::invalid_argument("alpha grid: step must be positive");
  std::vector<double> grid;
  for (int i = 0;; ++i) {
    double v = start + step * i;
    if (v > stop + step * 0.5) break;
    grid.push_back(v);
  }
  return grid;
}

CvResult cross_validate_alpha(const FeatureMatrix& X, const std::vector<double>& y,
                              const std::vector<double>& grid, std::size_t k,
                              std::uint64_t seed) {
  std::size_t n = X.n_rows(), d = X.n_cols();
  if (k < 2) throw std::invalid_argument("cross-validation: need at least 2 folds");
  if (k > n)
    throw std::invalid_argument("cross-validation: " + std::to_string(k) + " folds for " +
                                std::to_string(n) + " rows");
  if (grid.empty()) throw std::invalid_argument("cross-validation: empty alpha grid");
  if (y.size() != n) throw std::invalid_argument("cross-validation: label length mismatch");
  check_finite(X, y);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);

  auto G_full = gram(X);
  auto c_full = xty(X, y);
  std::vector<double> colsum_full(d, 0.0);
  for (std::size_t j = 0; j < d; ++j)
    colsum_full[j] = std::accumulate(X.cols[j].begin(), X.cols[j].end(), 0.0);
  double ysum_full = std::accumulate(y.begin(), y.end(), 0.0);

  // grid evaluated in descending alpha order so each fold's solution warm
  // starts the next (support only grows as alpha shrinks)
  std::vector<std::size_t> desc(grid.size());
  std::iota(desc.begin(), desc.end(), 0);
  std::sort(desc.begin(), desc.end(),
            [&grid](std::size_t a, std::size_t b) { return grid[a] > grid[b]; });

  std::vector<double> total_se(grid.size(), 0.0);

  std::size_t fold_start = 0;
  for (std::size_t f = 0; f < k; ++f) {
    std::size_t fold_size = n / k + (f < n % k ? 1 : 0);
    std::vector<std::size_t> held(order.begin() + fold_start,
                                  order.begin() + fold_start + fold_size);
    fold_start += fold_size;

    // training-fold Gram by subtracting the held-out rows
    auto G = G_full;
    auto c = c_full;
    auto colsum = colsum_full;
    double ysum = ysum_full;
    for (std::size_t i : held) {
      for (std::size_t a = 0; a < d; ++a) {
        double xa = X.cols[a][i];
        c[a] -= xa * y[i];
        colsum[a] -= xa;
        for (std::size_t b = 0; b < d; ++b) G[a * d + b] -= xa * X.cols[b][i];
      }
      ysum -= y[i];
    }
    double n_train = static_cast<double>(n - fold_size);

    CdState st;
    st.resize(d);
    for (std::size_t gi : desc) {
      bool conv;
      coordinate_descent(G, c, d, grid[gi], 1e-6, 1000, st, conv);

      double dot_colsum = 0.0;
      std::vector<std::size_t> support;
      for (std::size_t j = 0; j < d; ++j)
        if (st.beta[j] != 0.0) {
          support.push_back(j);
          dot_colsum += st.beta[j] * colsum[j];
        }
      double intercept = (ysum - dot_colsum) / n_train;

      double se = 0.0;
      for (std::size_t i : held) {
        double pred = intercept;
        for (std::size_t j : support) pred += st.beta[j] * X.cols[j][i];
        double e = y[i] - pred;
        se += e * e;
      }
      total_se[gi] += se;
    }
  }

  CvResult result;
  result.alpha_grid = grid;
  result.mean_loss.resize(grid.size());
  for (std::size_t gi = 0; gi < grid.size(); ++gi)
    result.mean_loss[gi] = total_se[gi] / static_cast<double>(n);

  // ties resolve toward the larger alpha: scan descending, replace only on
  // strictly smaller loss
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t gi : desc)
    if (result.mean_loss[gi] < best) {
      best = result.mean_loss[gi];
      result.best_alpha = grid[gi];
    }
  return result;
}

std::vector<std::size_t> select_by_lasso(const LassoFit& fit, double zero_tol) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < fit.beta.size(); ++j)
    if (std::abs(fit.beta[j]) >= zero_tol) out.push_back(j);
  return out;
}

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::Correlation: return "correlation";
    case Provenance::Lasso: return "lasso";
    case Provenance::Both: return "both";
  }
  return "?";
}

std::vector<std::size_t> FeatureSet::indices() const {
  std::vector<std::size_t> out;
  out.reserve(features.size());
  for (const auto& f : features) out.push_back(f.index);
  return out;
}

bool FeatureSet::contains(std::size_t index) const {
  for (const auto& f : features)
    if (f.index == index) return true;
  return false;
}

FeatureSet select_features(const FeatureMatrix& X, const std::vector<int>& labels,
                           const SelectOptions& opts) {
  if (!X.n_cols() || !X.n_rows()) throw std::invalid_argument("select_features: empty matrix");
  if (labels.size() != X.n_rows())
    throw std::invalid_argument("select_features: label length mismatch");

  auto scores = correlation_scores(X, labels);
  std::vector<double> y(labels.begin(), labels.end());
  auto grid = make_alpha_grid(opts.alpha_start, opts.alpha_stop, opts.alpha_step);
  auto cv = cross_validate_alpha(X, y, grid, opts.cv_folds, opts.seed);
  auto fit = lasso_fit(X, y, cv.best_alpha);

  auto sf2 = select_by_lasso(fit);
  FeatureSet fs;
  fs.delta = opts.delta;
  fs.alpha = cv.best_alpha;
  for (std::size_t j = 0; j < X.n_cols(); ++j) {
    bool by_cof = std::abs(scores[j]) > opts.delta;
    bool by_lasso = std::binary_search(sf2.begin(), sf2.end(), j);
    if (!by_cof && !by_lasso) continue;
    SelectedFeature f;
    f.index = j;
    f.name = j < X.names.size() ? X.names[j] : "c" + std::to_string(j);
    f.provenance = by_cof && by_lasso ? Provenance::Both
                   : by_cof           ? Provenance::Correlation
                                      : Provenance::Lasso;
    f.cof = scores[j];
    f.beta = fit.beta[j];
    fs.features.push_back(std::move(f));
  }
  return fs;
}

double feature_reduction_rate(std::size_t selected, std::size_t total) {
  if (total == 0) throw std::invalid_argument("feature_reduction_rate: zero total");
  return 1.0 - static_cast<double>(selected) / static_cast<double>(total);
}

}  // namespace flowlabel
