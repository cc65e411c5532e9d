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

#ifndef EIGENSIM_BPR_H_
#define EIGENSIM_BPR_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "eigensim/eigensim_model.h"
#include "eigensim/random.h"
#include "eigensim/rating_matrix.h"

namespace eigensim {

struct BprHyperparams {
  double learning_rate = 0.05;
  std::size_t epochs = 50;
  std::size_t samples_per_epoch = 0;  // 0 means one pass worth: train nnz
  double l2_reg = 0.0;                // weight of (lambda_v - 1)^2
  std::uint64_t seed = 7;
  std::size_t early_stop_patience = 0;  // 0 disables early stopping
  std::size_t eval_k = 5;               // cutoff of the validation MAP

  void validate() const;
};

struct Triplet {
  Index user = 0;
  Index positive = 0;  // rated by user
  Index negative = 0;  // not rated by user

  bool operator==(const Triplet&) const = default;
};

// u uniform over users with at least one rated and one unrated item, i
// uniform over u's items, j uniform over all items by rejection.
class TripletSampler {
 public:
  explicit TripletSampler(const RatingMatrix& train);

  Triplet sample(Rng& rng) const;
  const std::vector<Index>& eligible_users() const { return eligible_; }

 private:
  const RatingMatrix* train_;
  std::vector<Index> eligible_;
};

// One-shot convenience; builds a sampler per call.
Triplet sample_triplet(const RatingMatrix& train, Rng& rng);

// Gradient of the per-triplet objective
//
//   L(lambda) = -ln sigmoid(x_uij) + l2 * sum_{v in support} (lambda_v - 1)^2,
//   x_uij = sum_v P_uv lambda_v (R_vi - R_vj),  P_uv = q_u . U_v,
//
// restricted to support = raters(i) U raters(j):
//
//   dL/dlambda_v = -sigmoid(-x_uij) P_uv (R_vi - R_vj) + 2 l2 (lambda_v - 1).
struct SparseGradient {
  std::vector<Index> users;  // sorted support
  std::vector<double> values;
  double margin = 0.0;  // x_uij
  double loss = 0.0;    // L at the current lambda
};

SparseGradient bpr_gradient(const SvdFactors& factors, const RatingMatrix& train,
                            const Eigen::VectorXd& lambda, const Triplet& t, double l2_reg);
SparseGradient bpr_gradient(const EigenSimModel& model, const Triplet& t, double l2_reg);

// L(lambda) alone, evaluated directly from scores; used to check gradients.
double bpr_triplet_loss(const EigenSimModel& model, const Triplet& t, double l2_reg);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double mean_loss = 0.0;
  std::optional<double> valid_map;
  double lambda_min = 0.0;
  double lambda_median = 0.0;
  double lambda_max = 0.0;
};

struct TrainingLog {
  std::vector<EpochRecord> epochs;
  std::optional<std::size_t> best_epoch;  // set when a validation split was used

  // epoch,mean_loss,valid_map,lambda_min,lambda_median,lambda_max
  std::string to_csv() const;
};

struct TrainResult {
  EigenSimModel model;
  TrainingLog log;
};

// Plain SGD, lambda <- lambda - lr * grad, single-threaded and fully
// determined by hp.seed. With a validation split, MAP@eval_k is measured
// after every epoch and the best-scoring lambda is the one returned.
TrainResult train(const EigenSimModel& model, const RatingMatrix* valid, const BprHyperparams& hp);

}  // namespace eigensim

#endif  // EIGENSIM_BPR_H_
