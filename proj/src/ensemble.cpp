#include "flowlabel/ensemble.hpp"

#include <cmath>
#include <stdexcept>

namespace flowlabel {

void VoteWeights::validate() const {
  if (w_kmeans < 0.0 || w_optics < 0.0 || w_fcm < 0.0)
    throw std::invalid_argument("vote weights must be nonnegative");
  double sum = w_kmeans + w_optics + w_fcm;
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("vote weights sum to " + std::to_string(sum) +
                                ", expected 1");
}

double weighted_vote(int p_kmeans, int p_optics, int p_fcm, const VoteWeights& w) {
  for (int p : {p_kmeans, p_optics, p_fcm})
    if (p != 0 && p != 1) throw std::invalid_argument("votes must be 0 or 1");
  return p_kmeans * w.w_kmeans + p_optics * w.w_optics + p_fcm * w.w_fcm;
}

int threshold_label(double v) { return v > 0.5 ? 1 : 0; }

LabeledDataset label_dataset(const RowMatrix& X, const std::vector<std::string>& names,
                             const BinaryAssignment& kmeans_votes,
                             const BinaryAssignment& optics_votes,
                             const BinaryAssignment& fcm_votes, const VoteWeights& w) {
  w.validate();
  if (kmeans_votes.size() != X.n || optics_votes.size() != X.n || fcm_votes.size() != X.n)
    throw std::invalid_argument("label_dataset: assignment length != row count");
  if (!names.empty() && names.size() != X.d)
    throw std::invalid_argument("label_dataset: name count != column count");

  LabeledDataset out;
  out.features = X;
  out.feature_names = names;
  out.labels.resize(X.n);
  out.vote_scores.resize(X.n);
  out.votes_kmeans = kmeans_votes.labels;
  out.votes_optics = optics_votes.labels;
  out.votes_fcm = fcm_votes.labels;

  for (std::size_t i = 0; i < X.n; ++i) {
    double v = weighted_vote(kmeans_votes.labels[i], optics_votes.labels[i],
                             fcm_votes.labels[i], w);
    out.vote_scores[i] = v;
    out.labels[i] = static_cast<std::uint8_t>(threshold_label(v));
  }
  return out;
}

}  // namespace flowlabel
