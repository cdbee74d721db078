#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "covfield/cluster.hpp"
#include "covfield/field.hpp"
#include "covfield/rng.hpp"
#include "oracles.hpp"

using namespace covfield;

namespace {

Eigen::MatrixXd euclidean(const Eigen::MatrixXd& P) {
  Eigen::MatrixXd D(P.cols(), P.cols());
  for (Eigen::Index i = 0; i < P.cols(); ++i)
    for (Eigen::Index j = 0; j < P.cols(); ++j) D(i, j) = (P.col(i) - P.col(j)).norm();
  return D;
}

Eigen::MatrixXd random_points(Rng& rng, int d, int n) {
  Eigen::MatrixXd P(d, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (int i = 0; i < d; ++i) P(i, j) = rng.uniform(-1, 1);
  return P;
}

Eigen::MatrixXd line_points(const std::vector<double>& xs) {
  Eigen::MatrixXd P(1, static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) P(0, static_cast<Eigen::Index>(i)) = xs[i];
  return P;
}

}  // namespace

TEST(Metric, TensorizedDefinition) {
  Rng rng(1);
  const Eigen::MatrixXd P = random_points(rng, 2, 30);
  TensorizedMetricParams params;
  params.sigma = 0.4;
  params.gamma = 0.3;
  const auto D = tensorized_distances(P, params);
  const auto m = make_empirical(P);
  for (int i = 0; i < 30; i += 7)
    for (int j = 0; j < 30; j += 5) {
      const auto ti = ctf_at(m, RadialKernel::gaussian(), P.col(i), 0.4);
      const auto tj = ctf_at(m, RadialKernel::gaussian(), P.col(j), 0.4);
      const double ref = std::sqrt((ti - tj).squaredNorm() + 0.09 * (P.col(i) - P.col(j)).squaredNorm());
      EXPECT_NEAR(D(i, j), ref, 1e-13);
    }
  EXPECT_EQ(D, D.transpose());
  EXPECT_EQ(D.diagonal().cwiseAbs().maxCoeff(), 0.0);
}

TEST(Metric, GammaZeroIsPseudoMetric) {
  // The cross is symmetric under x → −x, so its two points on the x axis
  // carry identical tensors.
  Eigen::MatrixXd P(2, 4);
  P << -1, 1, 0, 0, 0, 0, -1, 1;
  TensorizedMetricParams params;
  params.sigma = 0.8;
  const auto D = tensorized_distances(P, params);
  EXPECT_NEAR(D(0, 1), 0.0, 1e-15);
  params.gamma = 0.5;
  EXPECT_NEAR(tensorized_distances(P, params)(0, 1), 1.0, 1e-12);
}

TEST(Metric, ReferenceMeasureAndIndexing) {
  Rng rng(2);
  const Eigen::MatrixXd P = random_points(rng, 2, 50);
  TensorizedMetricParams params;
  params.kernel = RadialKernel::truncation();
  params.sigma = 0.3;
  params.reference = make_empirical(random_points(rng, 2, 400));
  const auto tensors = point_tensors(P, params);
  for (int i = 0; i < 50; ++i)
    EXPECT_LE((tensors[static_cast<std::size_t>(i)] - ctf_at(*params.reference, params.kernel, P.col(i), 0.3))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-12);
  params.gamma = -1;
  EXPECT_THROW(point_tensors(P, params), std::invalid_argument);
}

TEST(Linkage, ScipyMergeConvention) {
  const auto dg = single_linkage(euclidean(line_points({0, 1, 3, 7})));
  ASSERT_EQ(dg.merges.size(), 3u);
  EXPECT_EQ(dg.merges[0].a, 0);
  EXPECT_EQ(dg.merges[0].b, 1);
  EXPECT_EQ(dg.merges[0].size, 2);
  EXPECT_EQ(dg.merges[1].a, 2);
  EXPECT_EQ(dg.merges[1].b, 4);
  EXPECT_DOUBLE_EQ(dg.merges[1].height, 2);
  EXPECT_EQ(dg.merges[2].a, 3);
  EXPECT_EQ(dg.merges[2].b, 5);
  EXPECT_EQ(dg.merges[2].size, 4);
  EXPECT_DOUBLE_EQ(dg.merges[2].height, 4);
}

TEST(Linkage, CopheneticEqualsMinimaxPaths) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 7;
    const Eigen::MatrixXd D = euclidean(random_points(rng, 2, n));
    const auto U = cophenetic_matrix(single_linkage(D));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) ASSERT_EQ(U(i, j), oracle::minimax_paths(D, i, j));
  }
}

TEST(Linkage, CopheneticIsUltrametric) {
  Rng rng(4);
  const Eigen::MatrixXd D = euclidean(random_points(rng, 3, 60));
  const auto U = cophenetic_matrix(single_linkage(D));
  for (int i = 0; i < 60; ++i)
    for (int j = 0; j < 60; ++j)
      for (int k = 0; k < 60; k += 3) ASSERT_LE(U(i, j), std::max(U(i, k), U(k, j)));
  EXPECT_LE((U - D).maxCoeff(), 0.0);
}

TEST(Linkage, RejectsNaN) {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(3, 3);
  D(0, 1) = D(1, 0) = std::nan("");
  EXPECT_THROW(single_linkage(D), std::invalid_argument);
  EXPECT_THROW(single_linkage(Eigen::MatrixXd::Zero(2, 3)), std::invalid_argument);
}

TEST(Linkage, CopheneticStatsMatchMatrix) {
  Rng rng(5);
  const Eigen::MatrixXd D = euclidean(random_points(rng, 2, 40));
  const auto dg = single_linkage(D);
  const auto U = cophenetic_matrix(dg);
  double s1 = 0, s2 = 0;
  int pairs = 0;
  for (int i = 0; i < 40; ++i)
    for (int j = i + 1; j < 40; ++j) {
      s1 += U(i, j);
      s2 += U(i, j) * U(i, j);
      ++pairs;
    }
  const auto st = cophenetic_stats(dg);
  EXPECT_NEAR(st.mean, s1 / pairs, 1e-12);
  EXPECT_NEAR(st.sd, std::sqrt(s2 / pairs - std::pow(s1 / pairs, 2)), 1e-10);
  EXPECT_DOUBLE_EQ(mean_cophenetic(dg), st.mean);
}

TEST(Cut, AtKAndHeight) {
  const auto dg = single_linkage(euclidean(line_points({0, 1, 3, 7, 7.5})));
  const auto a = cut_at_k(dg, 2);
  EXPECT_EQ(a.k, 2);
  EXPECT_EQ(a.labels, (std::vector<int>{0, 0, 0, 1, 1}));
  EXPECT_FALSE(a.tie_expanded);
  EXPECT_DOUBLE_EQ(a.cutoff_height, 2.0);
  const auto b = cut_at_height(dg, 1.0);
  EXPECT_EQ(b.k, 3);
  EXPECT_EQ(b.labels, (std::vector<int>{0, 0, 1, 2, 2}));
  EXPECT_EQ(cut_at_k(dg, 5).k, 5);
  EXPECT_THROW(cut_at_k(dg, 0), std::invalid_argument);
}

TEST(Cut, TiesExpandTheCut) {
  // Equal gaps: asking for 2 clusters removes every tied edge.
  const auto dg = single_linkage(euclidean(line_points({0, 1, 2, 3})));
  const auto a = cut_at_k(dg, 2);
  EXPECT_EQ(a.k, 4);
  EXPECT_TRUE(a.tie_expanded);
}

TEST(Topk, ReassignsToNearestKeptPoint) {
  const Eigen::MatrixXd P = line_points({0, 0.1, 0.2, 5, 5.1, 9, 2.4});
  const Eigen::MatrixXd D = euclidean(P);
  ClusterAssignment a;
  a.labels = {0, 0, 0, 1, 1, 2, 3};
  a.k = 4;
  const auto out = topk_reassign(a, D, 2);
  EXPECT_EQ(out.k, 2);
  EXPECT_EQ(out.labels, (std::vector<int>{0, 0, 0, 1, 1, 1, 0}));
  EXPECT_THROW(topk_reassign(a, D, 5), std::invalid_argument);
}

TEST(Score, MatchesBruteForce) {
  Rng rng(6);
  for (int trial = 0; trial < 300; ++trial) {
    const int kp = 1 + static_cast<int>(rng.below(5)), kt = 1 + static_cast<int>(rng.below(5));
    std::vector<int> pred(40), truth(40);
    for (int i = 0; i < 40; ++i) {
      truth[static_cast<std::size_t>(i)] = static_cast<int>(rng.below(static_cast<std::uint64_t>(kt)));
      pred[static_cast<std::size_t>(i)] = rng.uniform() < 0.6 ? truth[static_cast<std::size_t>(i)] % kp
                                                              : static_cast<int>(rng.below(static_cast<std::uint64_t>(kp)));
    }
    // Relabel to dense ids so the brute force sees every label value.
    std::set<int> ps(pred.begin(), pred.end()), ts(truth.begin(), truth.end());
    std::vector<int> pd, td;
    for (int p : pred) pd.push_back(static_cast<int>(std::distance(ps.begin(), ps.find(p))));
    for (int t : truth) td.push_back(static_cast<int>(std::distance(ts.begin(), ts.find(t))));
    EXPECT_NEAR(score(pred, truth), oracle::label_error_brute(pd, td, static_cast<int>(ps.size()), static_cast<int>(ts.size())),
                1e-12);
  }
  EXPECT_EQ(score({0, 0, 1, 1}, {5, 5, 7, 7}), 0.0);
  EXPECT_NEAR(score({0, 0, 0, 0}, {0, 0, 1, 1}), 0.5, 1e-15);
}

TEST(Assignment, MaxWeightAgainstEnumeration) {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int r = 1 + static_cast<int>(rng.below(6)), c = 1 + static_cast<int>(rng.below(6));
    Eigen::MatrixXd W(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) W(i, j) = std::floor(rng.uniform(0, 10));
    const auto match = max_weight_assignment(W);
    double got = 0;
    std::set<int> used;
    for (int i = 0; i < r; ++i)
      if (match[static_cast<std::size_t>(i)] >= 0) {
        got += W(i, match[static_cast<std::size_t>(i)]);
        EXPECT_TRUE(used.insert(match[static_cast<std::size_t>(i)]).second);
      }
    const int m = std::max(r, c);
    double best = 0;
    oracle::for_each_permutation(m, [&](const std::vector<int>& p) {
      double s = 0;
      for (int i = 0; i < r; ++i)
        if (p[static_cast<std::size_t>(i)] < c) s += W(i, p[static_cast<std::size_t>(i)]);
      best = std::max(best, s);
    });
    EXPECT_DOUBLE_EQ(got, best);
  }
}

TEST(Distortion, UltrametricNeverIncreasesDistortion) {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 10, m = 2 + trial % 7;
    const Eigen::MatrixXd dX = euclidean(random_points(rng, 2, n));
    const Eigen::MatrixXd dY = euclidean(random_points(rng, 2, m));
    Correspondence r;
    r.n_source = n;
    r.n_target = m;
    for (int i = 0; i < std::max(n, m); ++i) r.pairs.emplace_back(i % n, i % m);
    for (int extra = 0; extra < 3; ++extra)
      r.pairs.emplace_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(n))),
                           static_cast<int>(rng.below(static_cast<std::uint64_t>(m))));
    const auto check = dendrogram_distortion_check(dX, dY, r);
    EXPECT_TRUE(check.passed) << check.dis_ultra << " > " << check.dis_base;
  }
}
