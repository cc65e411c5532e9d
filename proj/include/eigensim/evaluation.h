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

#ifndef EIGENSIM_EVALUATION_H_
#define EIGENSIM_EVALUATION_H_

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "eigensim/rating_matrix.h"

namespace eigensim {

// Returns unmasked scores over all items for a user. Must be safe to call
// concurrently when the caller parallelizes (compiled models are).
using ScoreFn = std::function<Eigen::VectorXd(Index user)>;

struct PerUserResult {
  Index user = 0;
  double average_precision = 0.0;
  double lambda = std::numeric_limits<double>::quiet_NaN();
  std::size_t profile_length = 0;  // training ratings
  bool evaluated = false;          // false iff the user has no test items
};

struct MapResult {
  std::vector<PerUserResult> users;  // one per user, in index order
  double map = 0.0;
  std::size_t n_evaluated = 0;
};

// Truncated average precision of one ranking. Items in `exclude` are ranked
// last; ties go to the lower item index; the relevant set is `relevant`.
//   AP@k = 1/min(k, |relevant|) * sum_{p<=k} rel(p) * precision@p
double average_precision_at_k(const Eigen::VectorXd& scores, SparseVectorView exclude,
                              SparseVectorView relevant, std::size_t k);

// Top-k item indices under the same ordering rule.
std::vector<Index> rank_top_k(const Eigen::VectorXd& scores, SparseVectorView exclude, std::size_t k);

// Users without test entries are reported with evaluated = false and do not
// enter the mean.
MapResult map_at_k(const ScoreFn& score, const RatingMatrix& train, const RatingMatrix& test,
                   std::size_t k);

void attach_lambda(std::vector<PerUserResult>& results, const Eigen::VectorXd& lambda);

struct GroupRow {
  std::size_t group_index = 0;
  double median_lambda = 0.0;
  double median_profile_length = 0.0;
  double group_map = 0.0;
  std::size_t n_users = 0;
};

// Evaluated users sorted by lambda (ties by user index), cut into n_groups
// contiguous blocks whose sizes differ by at most one (larger blocks first).
std::vector<GroupRow> group_by_lambda(const std::vector<PerUserResult>& results, std::size_t n_groups);
// Same with profile length as the sort key.
std::vector<GroupRow> group_by_profile_length(const std::vector<PerUserResult>& results,
                                              std::size_t n_groups);

// Sample Pearson correlation. Throws NumericalError("undefined correlation")
// when either input is constant.
double pearson(std::span<const double> x, std::span<const double> y);
// Pearson on average ranks.
double spearman(std::span<const double> x, std::span<const double> y);

enum class CorrelationLevel { kPerGroup, kPerUser };

struct CorrelationReport {
  double map_lambda = 0.0;
  double map_profile = 0.0;
  double lambda_profile = 0.0;
  CorrelationLevel level = CorrelationLevel::kPerGroup;
};

struct ConfidenceReport {
  // map_lambda over the lambda groups, map_profile over the profile-length
  // groups, lambda_profile over the lambda groups' medians.
  CorrelationReport per_group;
  // Over all evaluated users.
  CorrelationReport per_user;
};

ConfidenceReport confidence_report(const std::vector<PerUserResult>& results,
                                   const std::vector<GroupRow>& lambda_groups,
                                   const std::vector<GroupRow>& profile_groups);

// group,median_lambda,map_at_k,n_users
void write_lambda_groups_csv(const std::vector<GroupRow>& groups, const std::string& path);
// group,median_profile_length,map_at_k,n_users
void write_profile_groups_csv(const std::vector<GroupRow>& groups, const std::string& path);
// user,lambda,profile_length for every user
void write_scatter_csv(const Eigen::VectorXd& lambda, const std::vector<std::size_t>& profile_lengths,
                       const std::string& path);
// name,value
void write_correlations_csv(const ConfidenceReport& report, const std::string& path);

}  // namespace eigensim

#endif  // EIGENSIM_EVALUATION_H_
