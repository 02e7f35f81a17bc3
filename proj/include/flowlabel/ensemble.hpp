#pragma once

#include <string>
#include <vector>

#include "flowlabel/clustering.hpp"
#include "flowlabel/dataset.hpp"

namespace flowlabel {

struct VoteWeights {
  double w_kmeans = 0.25;
  double w_optics = 0.25;
  double w_fcm = 0.5;

  // Throws unless all weights are nonnegative and sum to 1 (+-1e-12).
  void validate() const;
};

// V = p1*w1 + p2*w2 + p3*w3 with binary votes.
double weighted_vote(int p_kmeans, int p_optics, int p_fcm, const VoteWeights& w);

// 1 iff v > 0.5 strictly.
int threshold_label(double v);

struct LabeledDataset {
  RowMatrix features;
  std::vector<std::string> feature_names;
  std::vector<std::uint8_t> labels;       // voted label per row
  std::vector<double> vote_scores;        // raw V per row
  std::vector<std::uint8_t> votes_kmeans; // per-algorithm votes kept for audit
  std::vector<std::uint8_t> votes_optics;
  std::vector<std::uint8_t> votes_fcm;
};

// Row-wise weighted vote over three polarity-aligned assignments.
LabeledDataset label_dataset(const RowMatrix& X, const std::vector<std::string>& names,
                             const BinaryAssignment& kmeans_votes,
                             const BinaryAssignment& optics_votes,
                             const BinaryAssignment& fcm_votes, const VoteWeights& w);

}  // namespace flowlabel
