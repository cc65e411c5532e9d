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

#ifndef EIGENSIM_EIGENSIM_MODEL_H_
#define EIGENSIM_EIGENSIM_MODEL_H_

#include <memory>
#include <optional>

#include <Eigen/Dense>

#include "eigensim/rating_matrix.h"
#include "eigensim/svd.h"

namespace eigensim {

// Item-item model S = R^+ diag(lambda) R, kept in factored form. With the
// truncated pseudoinverse R^+ = V diag(1/sigma) U^T a user's scores are
//
//   r_u S = q_u U^T diag(lambda) R,   q_u = r_u V diag(1/sigma),
//
// i.e. a lambda-weighted combination of the training rows. S itself is never
// formed. Copies share the (immutable) factors and training matrix.
class EigenSimModel {
 public:
  // Lambda starts at one for every user.
  EigenSimModel(std::shared_ptr<const SvdFactors> factors, std::shared_ptr<const RatingMatrix> train);

  const SvdFactors& factors() const { return *factors_; }
  const RatingMatrix& train() const { return *train_; }
  std::shared_ptr<const SvdFactors> shared_factors() const { return factors_; }
  std::shared_ptr<const RatingMatrix> shared_train() const { return train_; }

  std::size_t n_users() const { return train_->n_users(); }
  std::size_t n_items() const { return train_->n_items(); }

  const Eigen::VectorXd& lambda() const { return lambda_; }
  // Replaces lambda; any compiled scoring matrix is dropped.
  void set_lambda(Eigen::VectorXd lambda);

  // Scores of the user's training profile over all items. Unmasked.
  Eigen::VectorXd score_user(Index user) const;
  // Same for an arbitrary profile over the training items.
  Eigen::VectorXd score_profile(SparseVectorView profile) const;

  // P_u = U q_u, the weights r_u R^+ places on each training row.
  Eigen::VectorXd pinv_row(Index user) const;

  // Freezes B = diag(1/sigma) U^T diag(lambda) R (k x n_items); scoring then
  // costs O(k n_items) as (r_u V) B.
  EigenSimModel compile() const;
  bool is_compiled() const { return compiled_.has_value(); }
  const Eigen::MatrixXd& compiled_matrix() const;

 private:
  std::shared_ptr<const SvdFactors> factors_;
  std::shared_ptr<const RatingMatrix> train_;
  Eigen::VectorXd lambda_;
  std::optional<Eigen::MatrixXd> compiled_;
};

// Checks that the factors were computed on a matrix of train's shape.
EigenSimModel init_model(std::shared_ptr<const SvdFactors> factors,
                         std::shared_ptr<const RatingMatrix> train);

}  // namespace eigensim

#endif  // EIGENSIM_EIGENSIM_MODEL_H_
