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

#ifndef EIGENSIM_BASELINES_H_
#define EIGENSIM_BASELINES_H_

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "eigensim/rating_matrix.h"

namespace eigensim {

// Sparse item x item similarity S with an empty diagonal; scores are r_u S.
// Row i of S holds the weights item i passes on to its neighbours.
struct ItemSimilarityModel {
  std::string name;
  std::vector<std::pair<std::string, std::string>> params;
  RatingMatrix similarity;  // rows and columns both indexed by item
};

struct KnnConfig {
  std::size_t k_neighbors = 100;
  double shrinkage = 0.0;

  void validate() const;
};

// Cosine on raw rating columns,
//   S[i][j] = c_i . c_j / (|c_i| |c_j| + shrinkage),
// keeping for every target column j its k_neighbors largest entries (ties to
// the lower index). Zero similarities are not stored.
ItemSimilarityModel fit_item_knn(const RatingMatrix& train, const KnnConfig& cfg);

struct SlimConfig {
  double l1 = 1e-4;
  double l2 = 1e-4;
  std::size_t max_iterations = 100;  // coordinate-descent sweeps per column
  double tol = 1e-4;                 // stop when no coefficient moves more
  bool nonnegative = true;

  void validate() const;
};

// Elastic-net column of SLIM:
//   min_s 1/2 |c_t - R s|^2 + l2/2 |s|^2 + l1 |s|_1   s.t. s_t = 0 (, s >= 0)
// solved by cyclic coordinate descent. When `objective_trace` is given, the
// objective after every sweep is appended to it.
SparseVector fit_slim_column(const RatingMatrix& train, Index target, const SlimConfig& cfg,
                             std::vector<double>* objective_trace = nullptr);

// The objective above for a dense coefficient vector.
double slim_objective(const RatingMatrix& train, Index target, const Eigen::VectorXd& coefficients,
                      const SlimConfig& cfg);

ItemSimilarityModel fit_slim(const RatingMatrix& train, const SlimConfig& cfg);

// r_u S as a dense vector; no masking.
Eigen::VectorXd score_user_itembased(const ItemSimilarityModel& model, SparseVectorView profile);

// "row,col,value" with internal item indices.
void save_similarity_csv(const ItemSimilarityModel& model, const std::string& path);
ItemSimilarityModel load_similarity_csv(const std::string& path, std::shared_ptr<const IdMap> items,
                                        std::string name);

}  // namespace eigensim

#endif  // EIGENSIM_BASELINES_H_
