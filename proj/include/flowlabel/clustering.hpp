#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "flowlabel/dataset.hpp"

namespace flowlabel {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Per-row 0/1 assignment from one clusterer.
struct BinaryAssignment {
  std::vector<std::uint8_t> labels;
  std::string source;
  bool aligned = false;  // polarity resolved against the reference

  std::size_t size() const { return labels.size(); }
};

struct MbkParams {
  std::size_t batch_size = 1024;
  std::size_t max_iters = 300;
  std::size_t n_init = 10;  // kmeans++ restarts, best kept by inertia
  std::uint64_t seed = 0;
};

struct KMeansModel {
  std::size_t dim = 0;
  std::vector<double> centroids;  // 2 x dim, flat
  std::vector<std::uint64_t> update_counts;
  MbkParams params;
};

// Two-cluster mini-batch k-means: kmeans++ init, per-centre learning rate
// 1/count, batch = whole dataset when batch_size >= n. Empty clusters are
// re-seeded to the farthest point.
KMeansModel mbk_fit(const RowMatrix& X, const MbkParams& params = {});

// Nearest centroid per row; ties go to cluster 0. Unaligned.
BinaryAssignment mbk_predict(const KMeansModel& model, const RowMatrix& X);

// Sum of squared distances to the nearest centroid.
double kmeans_inertia(const KMeansModel& model, const RowMatrix& X);

struct FcmParams {
  double fuzzifier = 2.0;  // m > 1
  double tol = 1e-5;       // max membership change
  std::size_t max_iters = 300;
  std::uint64_t seed = 0;
};

struct FcmModel {
  std::size_t dim = 0;
  std::vector<double> centroids;   // 2 x dim, flat
  std::vector<double> membership;  // n x 2 from the fit
  FcmParams params;
  // Which cluster index means "malicious": the centroid farther from the
  // global data mean, unless overridden after the fit.
  int malicious_cluster = 1;
  std::vector<double> objective_trace;  // one entry per iteration
  std::size_t iterations = 0;
};

FcmModel fcm_fit(const RowMatrix& X, const FcmParams& params = {});

struct FcmPrediction {
  BinaryAssignment assignment;          // aligned by construction
  std::vector<double> malicious_score;  // membership of the malicious cluster
};

// Memberships recomputed from the centroids; label 1 iff the malicious
// membership exceeds 0.5 strictly (exact ties fall to 0).
FcmPrediction fcm_predict(const FcmModel& model, const RowMatrix& X);

struct OpticsParams {
  std::size_t min_pts = 5;  // neighbourhood size, the point itself included
  double epsilon = kInf;
};

struct OpticsResult {
  std::vector<std::size_t> ordering;  // permutation of row indices
  std::vector<double> reachability;   // per row; inf for cluster starts
  std::vector<double> core_distance;  // per row; inf when undefined
  std::vector<int> cluster_id;        // per row after extraction; noise = -1
  OpticsParams params;
};

// Exact O(n^2) OPTICS ordering with core/reachability distances.
OpticsResult optics_run(const RowMatrix& X, const OpticsParams& params = {});

// Nearest-rank 90th percentile of the finite reachabilities (quantile
// configurable); inf when none are finite.
double default_reachability_threshold(const OpticsResult& result, double quantile = 0.9);

// Clusters extracted by reachability cutoff; the largest cluster becomes one
// side, everything else (noise included) the other. Fills result.cluster_id.
// Unaligned: polarity is resolved later against the reference assignment.
BinaryAssignment optics_binarize(OpticsResult& result, double threshold,
                                 std::vector<std::string>* warnings = nullptr);

// Exact OPTICS on a seeded row sample, held-out rows joined to the nearer
// side mean. subsample == 0 or >= n runs the full computation.
BinaryAssignment optics_binary(const RowMatrix& X, const OpticsParams& params,
                               double quantile, std::size_t subsample, std::uint64_t seed,
                               std::vector<std::string>* warnings = nullptr);

// The assignment or its complement, whichever agrees with the reference on
// more rows; exact ties keep the original.
BinaryAssignment align_polarity(const BinaryAssignment& assignment,
                                const BinaryAssignment& reference);

}  // namespace flowlabel
