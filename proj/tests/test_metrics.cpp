#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "animc/errors.hpp"
#include "animc/metrics.hpp"
#include "helpers.hpp"

using namespace animc;

namespace {

Labels random_labels(std::mt19937_64& rng, std::size_t n, int k) {
  std::uniform_int_distribution<int> d(0, k - 1);
  Labels l(n);
  for (auto& x : l) x = d(rng);
  return l;
}

double brute_force_acc(const Labels& pred, const Labels& truth, int k) {
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  double best = 0.0;
  do {
    double hit = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) hit += perm[pred[i]] == truth[i];
    best = std::max(best, hit / pred.size());
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

TEST(Accuracy, Examples) {
  EXPECT_DOUBLE_EQ(accuracy({0, 0, 1, 1}, {1, 1, 0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(accuracy({2, 0, 1}, {2, 0, 1}), 1.0);
  EXPECT_THROW(accuracy({0}, {0, 1}), DimensionError);
  EXPECT_THROW(accuracy({}, {}), ValidationError);
}

TEST(Accuracy, MatchesBruteForce) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 100; ++t) {
    const int k = 2 + t % 5;
    const auto truth = random_labels(rng, 30, k);
    const auto pred = random_labels(rng, 30, k);
    // Labels absent from one side still take part in the brute force.
    EXPECT_NEAR(accuracy(pred, truth), brute_force_acc(pred, truth, k), 1e-15);
  }
}

TEST(Accuracy, RandomIsHalf) {
  std::mt19937_64 rng(2);
  const auto truth = random_labels(rng, 20000, 2);
  const auto pred = random_labels(rng, 20000, 2);
  EXPECT_NEAR(accuracy(pred, truth), 0.5, 0.02);
}

TEST(Accuracy, DifferentClusterCounts) {
  EXPECT_DOUBLE_EQ(accuracy({0, 1, 2, 3}, {0, 0, 1, 1}), 0.5);
  EXPECT_DOUBLE_EQ(accuracy({0, 0, 0, 0}, {0, 0, 1, 1}), 0.5);
}

TEST(Nmi, Examples) {
  EXPECT_NEAR(nmi({0, 0, 1, 1}, {1, 1, 0, 0}), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(nmi({0, 0, 0, 0}, {0, 1, 0, 1}), 0.0);
  EXPECT_DOUBLE_EQ(nmi({3, 3}, {1, 1}), 1.0);
}

TEST(Nmi, IndependentIsNearZero) {
  std::mt19937_64 rng(3);
  const auto a = random_labels(rng, 20000, 4);
  const auto b = random_labels(rng, 20000, 4);
  EXPECT_LT(nmi(a, b), 0.01);
}

TEST(Nmi, GeometricMeanNormalization) {
  // pred {0,0,1,1}, truth {0,0,0,1}: MI = H(truth) - H(truth|pred).
  const Labels pred{0, 0, 1, 1}, truth{0, 0, 0, 1};
  const double hp = std::log(2.0);
  const double ht = -(0.75 * std::log(0.75) + 0.25 * std::log(0.25));
  const double mi = ht - 0.5 * hp;
  EXPECT_NEAR(nmi(pred, truth), mi / std::sqrt(hp * ht), 1e-14);
}

TEST(Purity, Examples) {
  EXPECT_DOUBLE_EQ(purity({0, 1, 2}, {2, 1, 0}), 1.0);
  EXPECT_DOUBLE_EQ(purity({0, 0, 0, 0, 0, 0}, {0, 0, 1, 1, 2, 2}), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(purity({0, 0, 1, 1}, {0, 1, 1, 1}), 0.75);
}

TEST(Metrics, PermutationInvariant) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const auto truth = random_labels(rng, 50, 4);
    const auto pred = random_labels(rng, 50, 4);
    Labels renamed = pred;
    for (auto& l : renamed) l = (l + 1) % 4 + 10;
    const auto a = evaluate(pred, truth);
    const auto b = evaluate(renamed, truth);
    EXPECT_DOUBLE_EQ(a.acc, b.acc);
    EXPECT_NEAR(a.nmi, b.nmi, 1e-15);
    EXPECT_DOUBLE_EQ(a.purity, b.purity);
  }
}

TEST(Assignment, SquareOptimum) {
  Matrix W(3, 3);
  W << 1, 5, 0, 4, 2, 0, 0, 0, 3;
  const auto a = max_weight_assignment(W);
  EXPECT_EQ(a, (std::vector<int>{1, 0, 2}));
  EXPECT_THROW(max_weight_assignment(Matrix::Zero(2, 3)), DimensionError);
}

TEST(KMeans, SplitsFarClouds) {
  std::mt19937_64 rng(5);
  Matrix P = 0.1 * fixtures::gaussian(40, 2, rng);
  P.bottomRows(20).array() += 10.0;
  const auto res = kmeans(P, 2, 3, 1);
  Labels truth(40, 0);
  std::fill(truth.begin() + 20, truth.end(), 1);
  EXPECT_DOUBLE_EQ(accuracy(res.labels, truth), 1.0);
}

TEST(KMeans, EdgeCounts) {
  std::mt19937_64 rng(6);
  const Matrix P = fixtures::gaussian(7, 3, rng);
  const auto one = kmeans(P, 1, 2, 0);
  EXPECT_TRUE(std::all_of(one.labels.begin(), one.labels.end(), [](int l) { return l == 0; }));
  EXPECT_NEAR(kmeans(P, 7, 2, 0).wcss, 0.0, 1e-20);
  EXPECT_THROW(kmeans(P, 8, 1, 0), DomainError);
  EXPECT_THROW(kmeans(P, 0, 1, 0), DomainError);
}

TEST(KMeans, DuplicatePointsAndDeterminism) {
  Matrix P = Matrix::Zero(6, 2);
  P.bottomRows(3).setOnes();
  const auto res = kmeans(P, 3, 2, 4);
  EXPECT_NEAR(res.wcss, 0.0, 1e-20);
  std::mt19937_64 rng(7);
  const Matrix Q = fixtures::gaussian(30, 2, rng);
  EXPECT_EQ(kmeans(Q, 3, 4, 9).labels, kmeans(Q, 3, 4, 9).labels);
}
