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

#include "eigensim/evaluation.h"

#include <algorithm>
#include <numeric>

#include <gtest/gtest.h>

#include "eigensim/errors.h"
#include "eigensim/random.h"
#include "test_util.h"

namespace eigensim {
namespace {

SparseVector items(std::vector<Index> idx, std::size_t dim) {
  return SparseVector{idx, std::vector<double>(idx.size(), 1.0), dim};
}

// Brute force: build the full ranking by explicit pairwise comparisons
// (score descending, index ascending, excluded items last), then walk it.
double brute_force_ap(const std::vector<double>& scores, const std::vector<bool>& excluded,
                      const std::vector<bool>& relevant, std::size_t k) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> order;
  std::vector<bool> used(n, false);
  for (std::size_t pos = 0; pos < n; ++pos) {
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      if (best == n) {
        best = i;
        continue;
      }
      const bool ei = excluded[i], eb = excluded[best];
      bool better;
      if (ei != eb) better = !ei;
      else if (ei) better = false;
      else better = scores[i] > scores[best];
      if (better) best = i;
    }
    used[best] = true;
    order.push_back(best);
  }
  std::size_t n_rel = 0;
  for (bool r : relevant) n_rel += r;
  if (n_rel == 0) return 0.0;
  double hits = 0.0, sum = 0.0;
  for (std::size_t p = 0; p < std::min(k, n); ++p) {
    if (excluded[order[p]]) break;
    if (relevant[order[p]]) {
      hits += 1.0;
      sum += hits / static_cast<double>(p + 1);
    }
  }
  return sum / static_cast<double>(std::min(k, n_rel));
}

TEST(AveragePrecision, PerfectAndEmptyRankings) {
  Eigen::VectorXd s(5);
  s << 5, 4, 3, 2, 1;
  const auto none = items({}, 5);
  EXPECT_EQ(average_precision_at_k(s, none.view(), items({0, 1, 2}, 5).view(), 3), 1.0);
  EXPECT_EQ(average_precision_at_k(s, none.view(), items({3, 4}, 5).view(), 3), 0.0);
  // Relevant at positions 1 and 3: (1/1 + 2/3) / 2.
  EXPECT_DOUBLE_EQ(average_precision_at_k(s, none.view(), items({0, 2}, 5).view(), 5), (1.0 + 2.0 / 3.0) / 2.0);
}

TEST(AveragePrecision, TrainItemsAreMasked) {
  Eigen::VectorXd s(4);
  s << 9, 8, 1, 0;
  EXPECT_EQ(average_precision_at_k(s, items({0, 1}, 4).view(), items({2}, 4).view(), 1), 1.0);
}

TEST(AveragePrecision, TiesGoToLowerIndex) {
  const Eigen::VectorXd s = Eigen::VectorXd::Zero(4);
  EXPECT_EQ(rank_top_k(s, items({1}, 4).view(), 3), (std::vector<Index>{0, 2, 3}));
  EXPECT_EQ(average_precision_at_k(s, items({}, 4).view(), items({0}, 4).view(), 1), 1.0);
  EXPECT_EQ(average_precision_at_k(s, items({}, 4).view(), items({3}, 4).view(), 1), 0.0);
}

TEST(AveragePrecision, MatchesBruteForce) {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(6);
    Eigen::VectorXd s(static_cast<Eigen::Index>(n));
    std::vector<double> sv(n);
    std::vector<bool> ex(n), rel(n);
    SparseVector exclude{{}, {}, n}, relevant{{}, {}, n};
    for (std::size_t i = 0; i < n; ++i) {
      // Few distinct values so ties are common.
      sv[i] = static_cast<double>(rng.uniform_index(3));
      s(static_cast<Eigen::Index>(i)) = sv[i];
      const auto role = rng.uniform_index(3);
      if (role == 0) {
        ex[i] = true;
        exclude.indices.push_back(i);
        exclude.values.push_back(1.0);
      } else if (role == 1) {
        rel[i] = true;
        relevant.indices.push_back(i);
        relevant.values.push_back(1.0);
      }
    }
    if (relevant.indices.empty()) continue;
    const std::size_t k = 1 + rng.uniform_index(6);
    EXPECT_EQ(average_precision_at_k(s, exclude.view(), relevant.view(), k), brute_force_ap(sv, ex, rel, k))
        << "trial " << trial;
  }
}

struct TinySplit {
  RatingMatrix train, test;
};

TinySplit tiny_split(Rng& rng, Eigen::Index users, Eigen::Index n) {
  Eigen::MatrixXd tr = Eigen::MatrixXd::Zero(users, n), te = Eigen::MatrixXd::Zero(users, n);
  for (Eigen::Index u = 0; u < users; ++u) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto r = rng.uniform_index(4);
      if (r == 0) tr(u, i) = 1.0;
      if (r == 1) te(u, i) = 1.0;
    }
  }
  return {testing::from_dense(tr), testing::from_dense(te)};
}

TEST(MapAtK, AveragesEvaluatedUsersOnly) {
  Eigen::MatrixXd tr(3, 4), te(3, 4);
  tr << 1, 0, 0, 0,
        0, 0, 0, 0,
        0, 1, 0, 0;
  te << 0, 1, 0, 0,
        0, 0, 0, 0,
        0, 0, 0, 1;
  const RatingMatrix train = testing::from_dense(tr), test = testing::from_dense(te);
  // Item scores fixed: 3 > 2 > 1 > 0 for items 0..3.
  const ScoreFn score = [](Index) { return Eigen::Vector4d(3, 2, 1, 0).eval(); };
  const MapResult r = map_at_k(score, train, test, 2);
  EXPECT_EQ(r.n_evaluated, 2u);
  EXPECT_TRUE(r.users[0].evaluated);
  EXPECT_FALSE(r.users[1].evaluated);
  EXPECT_EQ(r.users[0].average_precision, 1.0);  // ranking 1,2,...
  EXPECT_EQ(r.users[2].average_precision, 0.0);  // ranking 0,2,3
  EXPECT_EQ(r.users[0].profile_length, 1u);
  EXPECT_DOUBLE_EQ(r.map, 0.5);
  EXPECT_THROW(map_at_k(score, train, test, 0), ValidationError);
}

TEST(MapAtK, InvariantUnderAffineScoreChanges) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const TinySplit s = tiny_split(rng, 8, 12);
    Eigen::MatrixXd table(8, 12);
    for (Eigen::Index u = 0; u < 8; ++u)
      for (Eigen::Index i = 0; i < 12; ++i) table(u, i) = std::round(rng.normal() * 4.0) / 4.0;
    const double shift = rng.uniform(-5, 5), scale = std::ldexp(1.0, static_cast<int>(rng.uniform_index(6)) - 3);
    const auto base = map_at_k([&](Index u) { return table.row(static_cast<Eigen::Index>(u)).transpose().eval(); }, s.train, s.test, 3);
    const auto moved = map_at_k(
        [&](Index u) { return ((table.row(static_cast<Eigen::Index>(u)).array() + shift) * scale).matrix().transpose().eval(); },
        s.train, s.test, 3);
    for (std::size_t u = 0; u < base.users.size(); ++u) {
      EXPECT_EQ(base.users[u].average_precision, moved.users[u].average_precision);
      EXPECT_GE(base.users[u].average_precision, 0.0);
      EXPECT_LE(base.users[u].average_precision, 1.0);
    }
    EXPECT_GE(base.map, 0.0);
    EXPECT_LE(base.map, 1.0);
  }
}

TEST(MapAtK, DroppingAUserKeepsOthers) {
  Rng rng(6);
  const TinySplit s = tiny_split(rng, 6, 10);
  const ScoreFn score = [](Index u) {
    Eigen::VectorXd v(10);
    for (Eigen::Index i = 0; i < 10; ++i) v(i) = std::sin(static_cast<double>(u * 10 + static_cast<Index>(i)));
    return v;
  };
  const MapResult full = map_at_k(score, s.train, s.test, 4);
  auto entries = s.test.entries();
  std::erase_if(entries, [](const RatingMatrix::Entry& e) { return e.user == 2; });
  const RatingMatrix reduced(s.test.user_map(), s.test.item_map(), entries);
  const MapResult part = map_at_k(score, s.train, reduced, 4);
  EXPECT_FALSE(part.users[2].evaluated);
  for (Index u : {0u, 1u, 3u, 4u, 5u}) EXPECT_EQ(full.users[u].average_precision, part.users[u].average_precision);
}

std::vector<PerUserResult> results_with_lambda(const std::vector<double>& lambda) {
  std::vector<PerUserResult> out;
  for (std::size_t u = 0; u < lambda.size(); ++u) {
    PerUserResult r;
    r.user = u;
    r.lambda = lambda[u];
    r.average_precision = 0.1 * static_cast<double>(u % 7);
    r.profile_length = 3 + (u * 7) % 11;
    r.evaluated = true;
    out.push_back(r);
  }
  return out;
}

TEST(GroupByLambda, TenUsersTwoGroups) {
  const auto g = group_by_lambda(results_with_lambda({7, 2, 9, 1, 10, 4, 3, 8, 6, 5}), 2);
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g[0].median_lambda, 3.0);
  EXPECT_EQ(g[1].median_lambda, 8.0);
  EXPECT_EQ(g[0].n_users, 5u);
}

TEST(GroupByLambda, SeventyThousandUsersTenGroups) {
  std::vector<double> lambda(70000);
  Rng rng(1);
  for (double& l : lambda) l = rng.normal();
  const auto g = group_by_lambda(results_with_lambda(lambda), 10);
  ASSERT_EQ(g.size(), 10u);
  for (const auto& row : g) EXPECT_EQ(row.n_users, 7000u);
}

TEST(GroupByLambda, PartitionOfSortedUsers) {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 5 + rng.uniform_index(60);
    std::vector<double> lambda(n);
    for (double& l : lambda) l = static_cast<double>(rng.uniform_index(8));  // ties
    auto results = results_with_lambda(lambda);
    results[0].evaluated = false;
    const std::size_t groups = 2 + rng.uniform_index(std::min<std::size_t>(n - 3, 10));
    const auto g = group_by_lambda(results, groups);
    ASSERT_EQ(g.size(), groups);

    std::vector<std::size_t> order;
    for (std::size_t u = 1; u < n; ++u) order.push_back(u);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return lambda[a] < lambda[b]; });
    std::size_t offset = 0, min_size = n, max_size = 0;
    for (std::size_t k = 0; k < groups; ++k) {
      const std::size_t size = g[k].n_users;
      min_size = std::min(min_size, size);
      max_size = std::max(max_size, size);
      double ap = 0.0;
      std::vector<double> ls;
      for (std::size_t p = offset; p < offset + size; ++p) {
        ap += results[order[p]].average_precision;
        ls.push_back(lambda[order[p]]);
      }
      EXPECT_DOUBLE_EQ(g[k].group_map, ap / static_cast<double>(size));
      const double med = size % 2 ? ls[size / 2] : 0.5 * (ls[size / 2 - 1] + ls[size / 2]);
      EXPECT_EQ(g[k].median_lambda, med);
      if (k > 0) EXPECT_GE(g[k].median_lambda, g[k - 1].median_lambda);
      offset += size;
    }
    EXPECT_EQ(offset, n - 1);
    EXPECT_LE(max_size - min_size, 1u);
  }
}

TEST(GroupByLambda, Errors) {
  const auto r = results_with_lambda({1, 2, 3});
  EXPECT_THROW(group_by_lambda(r, 4), ValidationError);
  EXPECT_THROW(group_by_lambda(r, 1), ValidationError);
  EXPECT_NO_THROW(group_by_profile_length(r, 3));
}

TEST(Pearson, AffineAndNegated) {
  const std::vector<double> x = {1, 4, 2, 8, 5};
  std::vector<double> y, z;
  for (double v : x) {
    y.push_back(2 * v + 3);
    z.push_back(-v);
  }
  EXPECT_NEAR(pearson(x, y), 1.0, 1e-15);
  EXPECT_NEAR(pearson(x, z), -1.0, 1e-15);
}

TEST(Pearson, ConstantInputIsUndefined) {
  const std::vector<double> x = {1, 2, 3}, c = {4, 4, 4};
  try {
    pearson(x, c);
    FAIL() << "expected an error";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("undefined correlation"), std::string::npos);
  }
}

double two_pass_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
    syy += (y[k] - my) * (y[k] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

TEST(Pearson, MatchesTwoPassOracle) {
  Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(200);
    std::vector<double> x(n), y(n);
    const double rho = rng.uniform(-1, 1);
    for (std::size_t k = 0; k < n; ++k) {
      x[k] = 10.0 + rng.normal();
      y[k] = rho * x[k] + rng.normal();
    }
    const double r = pearson(x, y);
    EXPECT_NEAR(r, two_pass_pearson(x, y), 1e-12);
    EXPECT_LE(std::abs(r), 1.0);
  }
}

TEST(Spearman, RankBased) {
  const std::vector<double> x = {1, 2, 3, 4, 5}, y = {1, 8, 27, 64, 125}, t = {1, 1, 2, 2, 3};
  EXPECT_NEAR(spearman(x, y), 1.0, 1e-15);
  // Average ranks of t: 1.5 1.5 3.5 3.5 5.
  const std::vector<double> tr = {1.5, 1.5, 3.5, 3.5, 5}, xr = {1, 2, 3, 4, 5};
  EXPECT_NEAR(spearman(x, t), pearson(xr, tr), 1e-15);
}

TEST(ConfidenceReport, AffineGroupsGiveUnitCorrelation) {
  std::vector<PerUserResult> results;
  for (std::size_t u = 0; u < 20; ++u) {
    PerUserResult r;
    r.user = u;
    r.lambda = static_cast<double>(u);
    r.average_precision = 0.01 + 0.04 * static_cast<double>(u);
    r.profile_length = 100 - u;
    r.evaluated = true;
    results.push_back(r);
  }
  const auto lg = group_by_lambda(results, 4);
  const auto pg = group_by_profile_length(results, 4);
  const ConfidenceReport rep = confidence_report(results, lg, pg);
  EXPECT_NEAR(rep.per_group.map_lambda, 1.0, 1e-12);
  EXPECT_NEAR(rep.per_group.map_profile, -1.0, 1e-12);
  EXPECT_NEAR(rep.per_group.lambda_profile, -1.0, 1e-12);
  EXPECT_NEAR(rep.per_user.map_lambda, 1.0, 1e-12);
  EXPECT_EQ(rep.per_group.level, CorrelationLevel::kPerGroup);
  EXPECT_EQ(rep.per_user.level, CorrelationLevel::kPerUser);
}

TEST(ConfidenceReport, MatchesOracleOnSyntheticResults) {
  Rng rng(10);
  std::vector<PerUserResult> results;
  std::vector<double> ap, lam, len;
  for (std::size_t u = 0; u < 300; ++u) {
    PerUserResult r;
    r.user = u;
    r.lambda = rng.uniform(0.1, 1.75);
    r.average_precision = std::clamp(0.4 * r.lambda + 0.2 * rng.normal(), 0.0, 1.0);
    r.profile_length = 5 + rng.uniform_index(200);
    r.evaluated = u % 10 != 3;
    if (r.evaluated) {
      ap.push_back(r.average_precision);
      lam.push_back(r.lambda);
      len.push_back(static_cast<double>(r.profile_length));
    }
    results.push_back(r);
  }
  const auto lg = group_by_lambda(results, 10);
  const auto pg = group_by_profile_length(results, 10);
  const ConfidenceReport rep = confidence_report(results, lg, pg);
  std::vector<double> gm, gl, pm, pl, glen;
  for (const auto& g : lg) {
    gm.push_back(g.group_map);
    gl.push_back(g.median_lambda);
    glen.push_back(g.median_profile_length);
  }
  for (const auto& g : pg) {
    pm.push_back(g.group_map);
    pl.push_back(g.median_profile_length);
  }
  EXPECT_NEAR(rep.per_group.map_lambda, two_pass_pearson(gm, gl), 1e-12);
  EXPECT_NEAR(rep.per_group.map_profile, two_pass_pearson(pm, pl), 1e-12);
  EXPECT_NEAR(rep.per_group.lambda_profile, two_pass_pearson(gl, glen), 1e-12);
  EXPECT_NEAR(rep.per_user.map_lambda, two_pass_pearson(ap, lam), 1e-12);
  EXPECT_NEAR(rep.per_user.map_profile, two_pass_pearson(ap, len), 1e-12);
  EXPECT_NEAR(rep.per_user.lambda_profile, two_pass_pearson(lam, len), 1e-12);
}

}  // namespace
}  // namespace eigensim
