#include <doctest.h>

#include <algorithm>
#include <vector>

#include "flowlabel/ensemble.hpp"
#include "flowlabel/rng.hpp"

using namespace flowlabel;

namespace {

BinaryAssignment assign(std::vector<std::uint8_t> labels, bool aligned = true) {
  BinaryAssignment a;
  a.labels = std::move(labels);
  a.aligned = aligned;
  return a;
}

RowMatrix rows_of(std::size_t n) {
  RowMatrix m;
  m.n = n;
  m.d = 1;
  m.data.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) m.data[i] = static_cast<double>(i);
  return m;
}

}  // namespace

TEST_CASE("vote weights validate the simplex constraint") {
  VoteWeights w;
  CHECK_NOTHROW(w.validate());  // defaults 0.25/0.25/0.5
  w.w_kmeans = 0.5;
  CHECK_THROWS(w.validate());  // sums to 1.25
  w = VoteWeights{-0.25, 0.75, 0.5};
  CHECK_THROWS(w.validate());
  w = VoteWeights{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  CHECK_NOTHROW(w.validate());
}

TEST_CASE("weighted vote arithmetic under default weights") {
  VoteWeights w;
  CHECK(weighted_vote(1, 1, 1, w) == doctest::Approx(1.0));
  CHECK(weighted_vote(1, 0, 1, w) == doctest::Approx(0.75));
  CHECK(weighted_vote(1, 1, 0, w) == doctest::Approx(0.5));
  CHECK(weighted_vote(0, 0, 0, w) == doctest::Approx(0.0));
  CHECK_THROWS(weighted_vote(2, 0, 0, w));
  CHECK_THROWS(weighted_vote(0, -1, 0, w));
}

TEST_CASE("threshold is strictly greater than one half") {
  CHECK(threshold_label(0.75) == 1);
  CHECK(threshold_label(0.5) == 0);
  CHECK(threshold_label(0.25) == 0);
  CHECK(threshold_label(0.5 + 1e-12) == 1);
}

TEST_CASE("default weights reduce to fcm AND (kmeans OR optics)") {
  VoteWeights w;
  for (int p1 : {0, 1})
    for (int p2 : {0, 1})
      for (int p3 : {0, 1}) {
        const int expect = (p3 == 1 && (p1 == 1 || p2 == 1)) ? 1 : 0;
        CHECK(threshold_label(weighted_vote(p1, p2, p3, w)) == expect);
      }
}

TEST_CASE("raising any single vote never lowers the score") {
  VoteWeights w;
  for (int p1 : {0, 1})
    for (int p2 : {0, 1})
      for (int p3 : {0, 1}) {
        const double v = weighted_vote(p1, p2, p3, w);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        if (p1 == 0) CHECK(weighted_vote(1, p2, p3, w) >= v);
        if (p2 == 0) CHECK(weighted_vote(p1, 1, p3, w) >= v);
        if (p3 == 0) CHECK(weighted_vote(p1, p2, 1, w) >= v);
      }
}

TEST_CASE("label_dataset covers the full truth table row-wise") {
  // One row per vote combination, in binary order.
  std::vector<std::uint8_t> k, o, f;
  for (int bits = 0; bits < 8; ++bits) {
    k.push_back((bits >> 2) & 1);
    o.push_back((bits >> 1) & 1);
    f.push_back(bits & 1);
  }
  RowMatrix X = rows_of(8);
  LabeledDataset ld = label_dataset(X, {"x"}, assign(k), assign(o), assign(f), VoteWeights{});
  for (std::size_t i = 0; i < 8; ++i) {
    const int expect = (f[i] == 1 && (k[i] == 1 || o[i] == 1)) ? 1 : 0;
    CHECK(ld.labels[i] == expect);
    CHECK(ld.vote_scores[i] >= 0.0);
    CHECK(ld.vote_scores[i] <= 1.0);
    CHECK((ld.labels[i] == 1) == (ld.vote_scores[i] > 0.5));
  }
  CHECK(ld.votes_kmeans == k);
  CHECK(ld.votes_optics == o);
  CHECK(ld.votes_fcm == f);
  CHECK(ld.features.n == 8);
  CHECK(ld.feature_names == std::vector<std::string>{"x"});
}

TEST_CASE("fcm alone cannot carry a vote; equal thirds can") {
  RowMatrix X = rows_of(1);
  LabeledDataset only_fcm =
      label_dataset(X, {"x"}, assign({0}), assign({0}), assign({1}), VoteWeights{});
  CHECK(only_fcm.labels[0] == 0);  // V = 0.5 exactly

  VoteWeights thirds{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  LabeledDataset two_of_three =
      label_dataset(X, {"x"}, assign({1}), assign({1}), assign({0}), thirds);
  CHECK(two_of_three.labels[0] == 1);  // V = 2/3
}

TEST_CASE("label_dataset validates lengths and vote values") {
  RowMatrix X = rows_of(3);
  CHECK_THROWS(label_dataset(X, {"x"}, assign({1, 0}), assign({0, 0, 1}), assign({1, 1, 1}),
                             VoteWeights{}));
  BinaryAssignment bad = assign({1, 0, 2});
  CHECK_THROWS(label_dataset(X, {"x"}, bad, assign({0, 0, 1}), assign({1, 1, 1}),
                             VoteWeights{}));
  VoteWeights invalid{0.5, 0.5, 0.5};
  CHECK_THROWS(label_dataset(X, {"x"}, assign({1, 0, 1}), assign({0, 0, 1}), assign({1, 1, 1}),
                             invalid));
}

TEST_CASE("permuting rows permutes labels identically") {
  Rng rng(6);
  const std::size_t n = 50;
  RowMatrix X = rows_of(n);
  std::vector<std::uint8_t> k(n), o(n), f(n);
  for (std::size_t i = 0; i < n; ++i) {
    k[i] = rng.uniform() < 0.5;
    o[i] = rng.uniform() < 0.5;
    f[i] = rng.uniform() < 0.5;
  }
  LabeledDataset base = label_dataset(X, {"x"}, assign(k), assign(o), assign(f), VoteWeights{});

  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  rng.shuffle(perm);

  RowMatrix Xp = rows_of(n);
  std::vector<std::uint8_t> kp(n), op(n), fp(n);
  for (std::size_t i = 0; i < n; ++i) {
    Xp.data[i] = X.data[perm[i]];
    kp[i] = k[perm[i]];
    op[i] = o[perm[i]];
    fp[i] = f[perm[i]];
  }
  LabeledDataset permuted =
      label_dataset(Xp, {"x"}, assign(kp), assign(op), assign(fp), VoteWeights{});
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(permuted.labels[i] == base.labels[perm[i]]);
    CHECK(permuted.vote_scores[i] == base.vote_scores[perm[i]]);
  }
}
