// Copyright 2026 The EigenSim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "eigensim/baselines.h"

#include <filesystem>

#include <gtest/gtest.h>

#include "eigensim/errors.h"
#include "eigensim/random.h"
#include "test_util.h"

namespace eigensim {
namespace {

using testing::from_dense;
using testing::to_dense;

TEST(ItemKnn, IdenticalColumnsHaveUnitSimilarity) {
  Eigen::MatrixXd a(3, 3);
  a << 1, 1, 0,
       2, 2, 0,
       0, 0, 3;
  const auto m = fit_item_knn(from_dense(a), {10, 0.0});
  EXPECT_DOUBLE_EQ(m.similarity.value(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(m.similarity.value(1, 0), 1.0);
  // Orthogonal columns: nothing stored.
  EXPECT_FALSE(m.similarity.contains(0, 2));
  EXPECT_FALSE(m.similarity.contains(2, 1));
}

// Columns c0=(1,1,0,0), c1=(1,0,1,0), c2=(1,1,1,0), c3=(0,0,1,1):
// cos(0,1)=1/2, cos(0,2)=2/sqrt6, cos(0,3)=0, cos(1,2)=2/sqrt6,
// cos(1,3)=1/2, cos(2,3)=1/sqrt6. With k=2 per target column:
//   col 0 keeps rows {2,1}; col 1 keeps {2, 0 (tie with 3 to the lower index)};
//   col 2 keeps {0,1}; col 3 keeps {1,2}.
TEST(ItemKnn, HandComputedToy) {
  Eigen::MatrixXd a(4, 4);
  a << 1, 1, 1, 0,
       1, 0, 1, 0,
       0, 1, 1, 1,
       0, 0, 0, 1;
  const auto m = fit_item_knn(from_dense(a), {2, 0.0});
  const double h = 0.5, t = 2.0 / std::sqrt(6.0);
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(4, 4);
  expected(2, 0) = t; expected(1, 0) = h;
  expected(2, 1) = t; expected(0, 1) = h;
  expected(0, 2) = t; expected(1, 2) = t;
  expected(1, 3) = h; expected(2, 3) = 1.0 / std::sqrt(6.0);
  EXPECT_LE((to_dense(m.similarity) - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ItemKnn, ShrinkageDampens) {
  Eigen::MatrixXd a(2, 2);
  a << 1, 1,
       1, 1;
  const auto m = fit_item_knn(from_dense(a), {5, 2.0});
  EXPECT_DOUBLE_EQ(m.similarity.value(0, 1), 2.0 / (2.0 + 2.0));
}

TEST(ItemKnn, StructuralInvariants) {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const RatingMatrix r = from_dense(testing::random_sparse(rng, 20, 15, 0.3));
    const auto full = fit_item_knn(r, {100, 0.0});
    const Eigen::MatrixXd s = to_dense(full.similarity);
    EXPECT_LE((s - s.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_TRUE(s.diagonal().isZero(0.0));
    EXPECT_GE(s.minCoeff(), 0.0);
    EXPECT_LE(s.maxCoeff(), 1.0 + 1e-15);

    const auto pruned = fit_item_knn(r, {3, 0.0});
    for (Index j = 0; j < 15; ++j) EXPECT_LE(pruned.similarity.col(j).nnz(), 3u);
    EXPECT_TRUE(to_dense(pruned.similarity).diagonal().isZero(0.0));
  }
}

TEST(ItemKnn, EmptyColumnGetsNothing) {
  Eigen::MatrixXd a(2, 3);
  a << 1, 0, 2,
       3, 0, 1;
  const auto m = fit_item_knn(from_dense(a), {5, 0.0});
  EXPECT_EQ(m.similarity.row(1).nnz(), 0u);
  EXPECT_EQ(m.similarity.col(1).nnz(), 0u);
}

TEST(Slim, HugeL1ZeroesEverything) {
  Rng rng(1);
  const RatingMatrix r = from_dense(testing::random_sparse(rng, 15, 8, 0.5));
  SlimConfig cfg;
  cfg.l1 = 1e9;
  EXPECT_EQ(fit_slim(r, cfg).similarity.nnz(), 0u);
}

// Item 3 is an exact copy of item 1. With l1 = 0 each column is a ridge
// regression on the other columns, which the dense normal equations solve.
TEST(Slim, DuplicatedItemMatchesRidgeOracle) {
  Rng rng(2);
  Eigen::MatrixXd a = testing::random_sparse(rng, 30, 4, 0.6);
  a.col(3) = a.col(1);
  const RatingMatrix r = from_dense(a);
  SlimConfig cfg;
  cfg.l1 = 0.0;
  cfg.l2 = 1e-3;
  cfg.nonnegative = false;
  cfg.max_iterations = 100000;
  cfg.tol = 1e-14;
  const SparseVector col = fit_slim_column(r, 3, cfg);

  const std::vector<Eigen::Index> others = {0, 1, 2};
  Eigen::MatrixXd x(30, 3);
  for (std::size_t k = 0; k < 3; ++k) x.col(static_cast<Eigen::Index>(k)) = a.col(others[k]);
  const Eigen::VectorXd ridge = (x.transpose() * x + cfg.l2 * Eigen::MatrixXd::Identity(3, 3)).ldlt().solve(x.transpose() * a.col(3));
  Eigen::VectorXd got = Eigen::VectorXd::Zero(4);
  for (std::size_t k = 0; k < col.indices.size(); ++k) got(static_cast<Eigen::Index>(col.indices[k])) = col.values[k];
  EXPECT_EQ(got(3), 0.0);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(got(others[k]), ridge(static_cast<Eigen::Index>(k)), 1e-8);
  EXPECT_NEAR(got(1), 1.0, 1e-3);
  EXPECT_NEAR(got(0), 0.0, 1e-3);
  EXPECT_NEAR(got(2), 0.0, 1e-3);
}

// Independent cyclic coordinate descent on the dense problem, run far past
// convergence.
Eigen::VectorXd naive_cd(const Eigen::MatrixXd& a, Eigen::Index target, const SlimConfig& cfg) {
  const Eigen::Index n = a.cols();
  Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
  for (int sweep = 0; sweep < 20000; ++sweep) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == target) continue;
      s(j) = 0.0;
      const double rho = a.col(j).dot(a.col(target) - a * s);
      const double denom = a.col(j).squaredNorm() + cfg.l2;
      double v = 0.0;
      if (rho > cfg.l1) v = (rho - cfg.l1) / denom;
      else if (rho < -cfg.l1) v = (rho + cfg.l1) / denom;
      if (cfg.nonnegative) v = std::max(v, 0.0);
      s(j) = denom > 0.0 ? v : 0.0;
    }
  }
  return s;
}

TEST(Slim, ObjectiveMatchesLongRunOracle) {
  Rng rng(3);
  for (int trial = 0; trial < 6; ++trial) {
    const Eigen::MatrixXd a = testing::random_sparse(rng, 12, 5, 0.5);
    const RatingMatrix r = from_dense(a);
    SlimConfig cfg;
    cfg.l1 = 0.1;
    cfg.l2 = 0.5;
    cfg.tol = 1e-10;
    cfg.max_iterations = 10000;
    cfg.nonnegative = trial % 2 == 0;
    for (Index t = 0; t < 5; ++t) {
      const Eigen::VectorXd oracle = naive_cd(a, static_cast<Eigen::Index>(t), cfg);
      const SparseVector col = fit_slim_column(r, t, cfg);
      const Eigen::VectorXd got = testing::dense_row(col.view());
      EXPECT_NEAR(slim_objective(r, t, got, cfg), slim_objective(r, t, oracle, cfg), 1e-6);
      // The oracle's objective, recomputed by hand.
      const Eigen::VectorXd res = a.col(static_cast<Eigen::Index>(t)) - a * oracle;
      const double by_hand = 0.5 * res.squaredNorm() + 0.5 * cfg.l2 * oracle.squaredNorm() + cfg.l1 * oracle.lpNorm<1>();
      EXPECT_NEAR(slim_objective(r, t, oracle, cfg), by_hand, 1e-12);
    }
  }
}

TEST(Slim, ObjectiveNonIncreasingPerSweep) {
  Rng rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const RatingMatrix r = from_dense(testing::random_sparse(rng, 40, 12, 0.3));
    SlimConfig cfg;
    cfg.l1 = 0.05;
    cfg.l2 = 0.1;
    cfg.tol = 1e-10;
    cfg.nonnegative = trial % 2 == 1;
    for (Index t = 0; t < 12; ++t) {
      std::vector<double> trace;
      fit_slim_column(r, t, cfg, &trace);
      ASSERT_FALSE(trace.empty());
      for (std::size_t k = 1; k < trace.size(); ++k) EXPECT_LE(trace[k], trace[k - 1] + 1e-12);
    }
  }
}

TEST(Slim, DiagonalZeroAndNonnegative) {
  Rng rng(5);
  const RatingMatrix r = from_dense(testing::random_sparse(rng, 40, 12, 0.3));
  const auto m = fit_slim(r, SlimConfig{});
  const Eigen::MatrixXd s = to_dense(m.similarity);
  EXPECT_TRUE(s.diagonal().isZero(0.0));
  EXPECT_GE(s.minCoeff(), 0.0);
  EXPECT_GT(m.similarity.nnz(), 0u);
}

TEST(ScoreItembased, EmptyProfileAndSingleLink) {
  auto items = testing::numbered_ids(4, "i");
  ItemSimilarityModel m{"toy", {}, RatingMatrix(items, items, {{1, 3, 1.0}})};
  SparseVector empty;
  empty.dim = 4;
  EXPECT_TRUE(score_user_itembased(m, empty.view()).isZero(0.0));
  SparseVector e1{{1}, {1.0}, 4};
  Eigen::VectorXd expected = Eigen::VectorXd::Zero(4);
  expected(3) = 1.0;
  EXPECT_EQ(score_user_itembased(m, e1.view()), expected);
  SparseVector wrong{{}, {}, 5};
  EXPECT_THROW(score_user_itembased(m, wrong.view()), DimensionError);
}

TEST(ScoreItembased, MatchesDenseProductAndIsLinear) {
  Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd s = testing::random_sparse(rng, 10, 10, 0.3);
    ItemSimilarityModel m{"rand", {}, testing::from_dense(s)};
    const Eigen::VectorXd x = testing::random_sparse(rng, 1, 10, 0.4).row(0).transpose();
    const Eigen::VectorXd y = testing::random_sparse(rng, 1, 10, 0.4).row(0).transpose();
    const Eigen::VectorXd got = score_user_itembased(m, testing::sparse_row(x).view());
    const Eigen::VectorXd expected = (x.transpose() * s).transpose();
    EXPECT_LE((got - expected).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, expected.cwiseAbs().maxCoeff()));
    const Eigen::VectorXd sum = score_user_itembased(m, testing::sparse_row(2.0 * x + y).view());
    const Eigen::VectorXd parts = 2.0 * got + score_user_itembased(m, testing::sparse_row(y).view());
    EXPECT_LE((sum - parts).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, parts.cwiseAbs().maxCoeff()));
  }
}

TEST(SimilarityCsv, RoundTrip) {
  Rng rng(7);
  const RatingMatrix r = from_dense(testing::random_sparse(rng, 20, 9, 0.4));
  const auto m = fit_item_knn(r, {3, 0.5});
  const auto path = (std::filesystem::temp_directory_path() / "eigensim_similarity_test.csv").string();
  save_similarity_csv(m, path);
  const auto back = load_similarity_csv(path, r.item_map(), "itemknn");
  EXPECT_EQ(back.similarity.entries(), m.similarity.entries());
  std::filesystem::remove(path);
}

TEST(Configs, Validation) {
  EXPECT_THROW((KnnConfig{0, 0.0}).validate(), ValidationError);
  SlimConfig s;
  s.tol = 0.0;
  EXPECT_THROW(s.validate(), ValidationError);
}

}  // namespace
}  // namespace eigensim
