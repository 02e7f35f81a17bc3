#include "flowlabel/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "flowlabel/rng.hpp"

namespace flowlabel {

namespace {

double sq_dist(const double* a, const double* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double diff = a[j] - b[j];
    s += diff * diff;
  }
  return s;
}

void check_finite(const RowMatrix& X, const char* who) {
  for (double v : X.data)
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(who) + ": non-finite data");
}

// squared distances to the nearest of the two centroids, plus the winner
void assign_two(const RowMatrix& X, const std::vector<double>& centroids,
                std::vector<std::uint8_t>& label, std::vector<double>* nearest_sq) {
  std::size_t d = X.d;
  for (std::size_t i = 0; i < X.n; ++i) {
    double d0 = sq_dist(X.row(i), centroids.data(), d);
    double d1 = sq_dist(X.row(i), centroids.data() + d, d);
    label[i] = d1 < d0 ? 1 : 0;  // tie -> 0
    if (nearest_sq) (*nearest_sq)[i] = std::min(d0, d1);
  }
}

// kmeans++ for k = 2
std::vector<double> kmeanspp_init(const RowMatrix& X, Rng& rng) {
  std::size_t d = X.d;
  std::vector<double> centroids(2 * d);
  std::size_t first = rng.uniform_index(X.n);
  std::copy(X.row(first), X.row(first) + d, centroids.begin());

  std::vector<double> dist2(X.n);
  double total = 0.0;
  for (std::size_t i = 0; i < X.n; ++i) {
    dist2[i] = sq_dist(X.row(i), centroids.data(), d);
    total += dist2[i];
  }
  std::size_t second = rng.uniform_index(X.n);
  if (total > 0.0) {
    double u = rng.uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < X.n; ++i) {
      acc += dist2[i];
      if (u < acc) {
        second = i;
        break;
      }
    }
  }
  std::copy(X.row(second), X.row(second) + d, centroids.begin() + d);
  return centroids;
}

// farthest point from the surviving centroid; ties to the lowest index
std::size_t farthest_point(const RowMatrix& X, const double* from) {
  std::size_t best = 0;
  double best_d = -1.0;
  for (std::size_t i = 0; i < X.n; ++i) {
    double dd = sq_dist(X.row(i), from, X.d);
    if (dd > best_d) {
      best_d = dd;
      best = i;
    }
  }
  return best;
}

KMeansModel mbk_fit_once(const RowMatrix& X, const MbkParams& params, Rng& rng) {
  std::size_t d = X.d, n = X.n;
  KMeansModel model;
  model.dim = d;
  model.params = params;
  model.centroids = kmeanspp_init(X, rng);
  model.update_counts.assign(2, 0);

  bool full_batch = params.batch_size >= n;
  std::vector<std::size_t> batch(full_batch ? n : params.batch_size);
  if (full_batch) std::iota(batch.begin(), batch.end(), 0);

  for (std::size_t iter = 0; iter < params.max_iters; ++iter) {
    if (!full_batch)
      for (auto& b : batch) b = rng.uniform_index(n);
    for (std::size_t i : batch) {
      const double* x = X.row(i);
      double d0 = sq_dist(x, model.centroids.data(), d);
      double d1 = sq_dist(x, model.centroids.data() + d, d);
      std::size_t c = d1 < d0 ? 1 : 0;
      double* ctr = model.centroids.data() + c * d;
      double eta = 1.0 / static_cast<double>(++model.update_counts[c]);
      for (std::size_t j = 0; j < d; ++j) ctr[j] += eta * (x[j] - ctr[j]);
    }
    for (std::size_t c = 0; c < 2; ++c)
      if (model.update_counts[c] == 0) {
        // empty cluster: re-seed at the point farthest from the other centroid
        std::size_t far = farthest_point(X, model.centroids.data() + (1 - c) * d);
        std::copy(X.row(far), X.row(far) + d, model.centroids.begin() + c * d);
      }
  }
  return model;
}

}  // namespace

KMeansModel mbk_fit(const RowMatrix& X, const MbkParams& params) {
  if (X.n < 2) throw std::invalid_argument("mbk_fit: need at least 2 rows");
  if (X.d == 0) throw std::invalid_argument("mbk_fit: zero-dimensional data");
  check_finite(X, "mbk_fit");

  Rng base(params.seed);
  KMeansModel best;
  double best_inertia = kInf;
  for (std::size_t r = 0; r < std::max<std::size_t>(params.n_init, 1); ++r) {
    Rng rng = base.fork(r);
    KMeansModel model = mbk_fit_once(X, params, rng);
    double inertia = kmeans_inertia(model, X);
    if (inertia < best_inertia) {
      best_inertia = inertia;
      best = std::move(model);
    }
  }
  return best;
}

BinaryAssignment mbk_predict(const KMeansModel& model, const RowMatrix& X) {
  if (X.d != model.dim)
    throw std::invalid_argument("mbk_predict: data dim " + std::to_string(X.d) +
                                " vs model dim " + std::to_string(model.dim));
  BinaryAssignment a;
  a.source = "kmeans";
  a.labels.resize(X.n);
  assign_two(X, model.centroids, a.labels, nullptr);
  return a;
}

double kmeans_inertia(const KMeansModel& model, const RowMatrix& X) {
  std::vector<std::uint8_t> label(X.n);
  std::vector<double> nearest(X.n);
  assign_two(X, model.centroids, label, &nearest);
  return std::accumulate(nearest.begin(), nearest.end(), 0.0);
}

FcmModel fcm_fit(const RowMatrix& X, const FcmParams& params) {
  if (params.fuzzifier <= 1.0)
    throw std::invalid_argument("fcm_fit: fuzzifier must be > 1");
  if (X.n < 2) throw std::invalid_argument("fcm_fit: need at least 2 rows");
  check_finite(X, "fcm_fit");

  std::size_t n = X.n, d = X.d;
  double m = params.fuzzifier;
  Rng rng(params.seed);

  FcmModel model;
  model.dim = d;
  model.params = params;
  model.membership.resize(n * 2);
  model.centroids.assign(2 * d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double u = rng.uniform();
    model.membership[i * 2] = u;
    model.membership[i * 2 + 1] = 1.0 - u;
  }

  std::vector<double> dist2(n * 2);
  for (std::size_t iter = 0; iter < params.max_iters; ++iter) {
    // centroid step
    for (std::size_t c = 0; c < 2; ++c) {
      double wsum = 0.0;
      std::vector<double> acc(d, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        double w = std::pow(model.membership[i * 2 + c], m);
        wsum += w;
        const double* x = X.row(i);
        for (std::size_t j = 0; j < d; ++j) acc[j] += w * x[j];
      }
      double* ctr = model.centroids.data() + c * d;
      if (wsum > 0.0)
        for (std::size_t j = 0; j < d; ++j) ctr[j] = acc[j] / wsum;
    }

    // membership step
    double exponent = 2.0 / (m - 1.0);
    double max_change = 0.0, objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double* x = X.row(i);
      double d0 = sq_dist(x, model.centroids.data(), d);
      double d1 = sq_dist(x, model.centroids.data() + d, d);
      dist2[i * 2] = d0;
      dist2[i * 2 + 1] = d1;
      double u0;
      if (d0 == 0.0 && d1 == 0.0)
        u0 = 0.5;
      else if (d0 == 0.0)
        u0 = 1.0;
      else if (d1 == 0.0)
        u0 = 0.0;
      else
        u0 = 1.0 / (1.0 + std::pow(d0 / d1, exponent / 2.0));  // (d0/d1)^(1/(m-1))
      double u1 = 1.0 - u0;
      max_change = std::max({max_change, std::abs(u0 - model.membership[i * 2]),
                             std::abs(u1 - model.membership[i * 2 + 1])});
      model.membership[i * 2] = u0;
      model.membership[i * 2 + 1] = u1;
      objective += std::pow(u0, m) * d0 + std::pow(u1, m) * d1;
    }
    model.objective_trace.push_back(objective);
    model.iterations = iter + 1;
    if (max_change < params.tol) break;
  }

  // malicious side: the centroid farther from the bulk of the data
  std::vector<double> mean(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* x = X.row(i);
    for (std::size_t j = 0; j < d; ++j) mean[j] += x[j];
  }
  for (std::size_t j = 0; j < d; ++j) mean[j] /= static_cast<double>(n);
  double m0 = sq_dist(model.centroids.data(), mean.data(), d);
  double m1 = sq_dist(model.centroids.data() + d, mean.data(), d);
  model.malicious_cluster = m0 > m1 ? 0 : 1;
  return model;
}

FcmPrediction fcm_predict(const FcmModel& model, const RowMatrix& X) {
  if (X.d != model.dim)
    throw std::invalid_argument("fcm_predict: data dim " + std::to_string(X.d) +
                                " vs model dim " + std::to_string(model.dim));
  double m = model.params.fuzzifier;
  double exponent = 1.0 / (m - 1.0);
  FcmPrediction pred;
  pred.assignment.source = "fcm";
  pred.assignment.aligned = true;
  pred.assignment.labels.resize(X.n);
  pred.malicious_score.resize(X.n);
  std::size_t mal = static_cast<std::size_t>(model.malicious_cluster);

  for (std::size_t i = 0; i < X.n; ++i) {
    const double* x = X.row(i);
    double dm = sq_dist(x, model.centroids.data() + mal * model.dim, model.dim);
    double db = sq_dist(x, model.centroids.data() + (1 - mal) * model.dim, model.dim);
    double u;
    if (dm == 0.0 && db == 0.0)
      u = 0.5;
    else if (dm == 0.0)
      u = 1.0;
    else if (db == 0.0)
      u = 0.0;
    else
      u = 1.0 / (1.0 + std::pow(dm / db, exponent));
    pred.malicious_score[i] = u;
    pred.assignment.labels[i] = u > 0.5 ? 1 : 0;
  }
  return pred;
}

OpticsResult optics_run(const RowMatrix& X, const OpticsParams& params) {
  if (params.min_pts < 2) throw std::invalid_argument("optics_run: min_pts must be >= 2");
  if (X.n < params.min_pts)
    throw std::invalid_argument("optics_run: " + std::to_string(X.n) + " rows for min_pts " +
                                std::to_string(params.min_pts));
  check_finite(X, "optics_run");

  std::size_t n = X.n;
  double eps2 = params.epsilon == kInf ? kInf : params.epsilon * params.epsilon;

  OpticsResult res;
  res.params = params;
  res.reachability.assign(n, kInf);
  res.core_distance.assign(n, kInf);
  res.cluster_id.assign(n, -1);
  res.ordering.reserve(n);

  std::vector<bool> processed(n, false);
  std::vector<double> dist2(n);

  // core distance of p: distance to its min_pts-th neighbour, the point
  // itself included; undefined (inf) when the epsilon ball is too empty
  auto process = [&](std::size_t p) {
    processed[p] = true;
    res.ordering.push_back(p);
    const double* xp = X.row(p);
    std::size_t within = 0;
    for (std::size_t o = 0; o < n; ++o) {
      dist2[o] = sq_dist(xp, X.row(o), X.d);
      if (dist2[o] <= eps2) ++within;
    }
    if (within >= params.min_pts) {
      std::vector<double> nd;
      nd.reserve(within);
      for (std::size_t o = 0; o < n; ++o)
        if (dist2[o] <= eps2) nd.push_back(dist2[o]);
      std::nth_element(nd.begin(), nd.begin() + (params.min_pts - 1), nd.end());
      res.core_distance[p] = std::sqrt(nd[params.min_pts - 1]);
      // relax reachability of every unprocessed neighbour
      for (std::size_t o = 0; o < n; ++o) {
        if (processed[o] || dist2[o] > eps2) continue;
        double r = std::max(res.core_distance[p], std::sqrt(dist2[o]));
        if (r < res.reachability[o]) res.reachability[o] = r;
      }
    }
  };

  for (std::size_t start = 0; start < n; ++start) {
    if (processed[start]) continue;
    process(start);
    while (true) {
      // next: unprocessed point with the smallest reachability, then index
      std::size_t next = n;
      for (std::size_t o = 0; o < n; ++o) {
        if (processed[o] || res.reachability[o] == kInf) continue;
        if (next == n || res.reachability[o] < res.reachability[next]) next = o;
      }
      if (next == n) break;
      process(next);
    }
  }
  return res;
}

double default_reachability_threshold(const OpticsResult& result, double quantile) {
  std::vector<double> finite;
  for (double r : result.reachability)
    if (r != kInf) finite.push_back(r);
  if (finite.empty()) return kInf;
  std::sort(finite.begin(), finite.end());
  // nearest-rank quantile
  std::size_t rank = static_cast<std::size_t>(
      std::ceil(quantile * static_cast<double>(finite.size())));
  if (rank == 0) rank = 1;
  if (rank > finite.size()) rank = finite.size();
  return finite[rank - 1];
}

BinaryAssignment optics_binarize(OpticsResult& result, double threshold,
                                 std::vector<std::string>* warnings) {
  std::size_t n = result.ordering.size();
  BinaryAssignment a;
  a.source = "optics";
  a.labels.assign(n, 0);

  bool any_finite = false;
  for (double r : result.reachability)
    if (r != kInf) {
      any_finite = true;
      break;
    }
  if (!any_finite) {
    if (warnings)
      warnings->push_back("optics: all reachabilities infinite, treating data as one cluster");
    std::fill(result.cluster_id.begin(), result.cluster_id.end(), 0);
    std::fill(a.labels.begin(), a.labels.end(), 1);
    return a;
  }

  // reachability-cutoff walk over the ordering: a point above the cutoff
  // starts a new cluster when its own core distance is within the cutoff,
  // otherwise it is noise
  int current = -1, next_id = 0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = result.ordering[k];
    if (result.reachability[p] > threshold) {
      if (result.core_distance[p] <= threshold) {
        current = next_id++;
        result.cluster_id[p] = current;
      } else {
        result.cluster_id[p] = -1;
        current = -1;
      }
    } else {
      result.cluster_id[p] = current;  // continues the open cluster; -1 = noise run
    }
  }

  std::map<int, std::size_t> sizes;
  for (int id : result.cluster_id)
    if (id >= 0) sizes[id]++;

  if (sizes.empty()) {
    if (warnings) warnings->push_back("optics: no cluster survived the cutoff, all noise");
    return a;  // everything on the non-cluster side
  }
  int largest = sizes.begin()->first;
  for (const auto& [id, sz] : sizes)
    if (sz > sizes[largest]) largest = id;
  if (sizes.size() == 1 && sizes[largest] == n && warnings)
    warnings->push_back("optics: single cluster covers every row (no density split)");

  for (std::size_t i = 0; i < n; ++i)
    if (result.cluster_id[i] == largest) a.labels[i] = 1;
  return a;
}

BinaryAssignment optics_binary(const RowMatrix& X, const OpticsParams& params,
                               double quantile, std::size_t subsample, std::uint64_t seed,
                               std::vector<std::string>* warnings) {
  if (subsample == 0 || subsample >= X.n) {
    OpticsResult res = optics_run(X, params);
    return optics_binarize(res, default_reachability_threshold(res, quantile), warnings);
  }
  if (subsample < params.min_pts)
    throw std::invalid_argument("optics: subsample smaller than min_pts");

  std::vector<std::size_t> idx(X.n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  rng.shuffle(idx);
  std::vector<std::size_t> sample(idx.begin(), idx.begin() + subsample);
  std::sort(sample.begin(), sample.end());

  RowMatrix S;
  S.n = subsample;
  S.d = X.d;
  S.data.resize(S.n * S.d);
  for (std::size_t i = 0; i < subsample; ++i)
    std::copy(X.row(sample[i]), X.row(sample[i]) + X.d, S.row(i));

  OpticsResult res = optics_run(S, params);
  BinaryAssignment on_sample =
      optics_binarize(res, default_reachability_threshold(res, quantile), warnings);

  // held-out rows join the side whose sampled mean is nearer
  std::vector<double> mean0(X.d, 0.0), mean1(X.d, 0.0);
  std::size_t n0 = 0, n1 = 0;
  for (std::size_t i = 0; i < subsample; ++i) {
    const double* x = S.row(i);
    if (on_sample.labels[i]) {
      ++n1;
      for (std::size_t j = 0; j < X.d; ++j) mean1[j] += x[j];
    } else {
      ++n0;
      for (std::size_t j = 0; j < X.d; ++j) mean0[j] += x[j];
    }
  }
  for (std::size_t j = 0; j < X.d; ++j) {
    if (n0) mean0[j] /= static_cast<double>(n0);
    if (n1) mean1[j] /= static_cast<double>(n1);
  }

  BinaryAssignment full;
  full.source = "optics";
  full.labels.assign(X.n, 0);
  for (std::size_t i = 0; i < subsample; ++i) full.labels[sample[i]] = on_sample.labels[i];

  std::vector<bool> in_sample(X.n, false);
  for (std::size_t s : sample) in_sample[s] = true;
  for (std::size_t i = 0; i < X.n; ++i) {
    if (in_sample[i]) continue;
    if (n0 == 0) {
      full.labels[i] = 1;
    } else if (n1 == 0) {
      full.labels[i] = 0;
    } else {
      double d0 = sq_dist(X.row(i), mean0.data(), X.d);
      double d1 = sq_dist(X.row(i), mean1.data(), X.d);
      full.labels[i] = d1 < d0 ? 1 : 0;
    }
  }
  return full;
}

BinaryAssignment align_polarity(const BinaryAssignment& assignment,
                                const BinaryAssignment& reference) {
  if (assignment.size() != reference.size())
    throw std::invalid_argument("align_polarity: " + std::to_string(assignment.size()) +
                                " vs " + std::to_string(reference.size()) + " rows");
  std::size_t agree = 0;
  for (std::size_t i = 0; i < assignment.size(); ++i)
    if (assignment.labels[i] == reference.labels[i]) ++agree;

  BinaryAssignment out = assignment;
  out.aligned = true;
  if (assignment.size() - agree > agree)
    for (auto& v : out.labels) v = 1 - v;
  return out;
}

}  // namespace flowlabel
