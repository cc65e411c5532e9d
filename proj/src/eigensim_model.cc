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

#include "eigensim/eigensim_model.h"

#include <cmath>

#include "eigensim/errors.h"

namespace eigensim {

EigenSimModel::EigenSimModel(std::shared_ptr<const SvdFactors> factors,
                             std::shared_ptr<const RatingMatrix> train)
    : factors_(std::move(factors)), train_(std::move(train)) {
  if (!factors_ || !train_) throw ValidationError("EigenSimModel needs factors and a training matrix");
  if (factors_->n_users() != train_->n_users() || factors_->n_items() != train_->n_items()) {
    throw DimensionError("factors are " + std::to_string(factors_->n_users()) + "x" +
                         std::to_string(factors_->n_items()) + ", training matrix is " +
                         std::to_string(train_->n_users()) + "x" + std::to_string(train_->n_items()));
  }
  lambda_ = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(train_->n_users()));
}

void EigenSimModel::set_lambda(Eigen::VectorXd lambda) {
  if (static_cast<std::size_t>(lambda.size()) != n_users()) {
    throw DimensionError("lambda has " + std::to_string(lambda.size()) + " entries, model has " +
                         std::to_string(n_users()) + " users");
  }
  if (!lambda.allFinite()) throw NumericalError("lambda must be finite");
  lambda_ = std::move(lambda);
  compiled_.reset();
}

Eigen::VectorXd EigenSimModel::pinv_row(Index user) const {
  return factors_->u * pinv_left_apply(*factors_, train_->row(user));
}

Eigen::VectorXd EigenSimModel::score_profile(SparseVectorView profile) const {
  if (profile.dim != n_items()) {
    throw DimensionError("profile has length " + std::to_string(profile.dim) + ", model has " +
                         std::to_string(n_items()) + " items");
  }
  Eigen::VectorXd scores = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_items()));
  if (profile.empty()) return scores;

  if (compiled_) {
    Eigen::VectorXd rv = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(factors_->rank()));
    for (std::size_t k = 0; k < profile.nnz(); ++k) {
      rv += profile.values[k] * factors_->v.row(static_cast<Eigen::Index>(profile.indices[k])).transpose();
    }
    scores.noalias() = compiled_->transpose() * rv;
    return scores;
  }

  const Eigen::VectorXd weights =
      (factors_->u * pinv_left_apply(*factors_, profile)).cwiseProduct(lambda_);
  for (Index v = 0; v < n_users(); ++v) {
    const double w = weights(static_cast<Eigen::Index>(v));
    if (w == 0.0) continue;
    const SparseVectorView row = train_->row(v);
    for (std::size_t k = 0; k < row.nnz(); ++k) {
      scores(static_cast<Eigen::Index>(row.indices[k])) += w * row.values[k];
    }
  }
  return scores;
}

Eigen::VectorXd EigenSimModel::score_user(Index user) const {
  if (user >= n_users()) {
    throw DimensionError("user index " + std::to_string(user) + " out of range");
  }
  return score_profile(train_->row(user));
}

EigenSimModel EigenSimModel::compile() const {
  // B^T = R^T (diag(lambda) U diag(1/sigma)), computed with one sparse product.
  const Eigen::MatrixXd weighted =
      lambda_.asDiagonal() * factors_->u * factors_->sigma.cwiseInverse().asDiagonal();
  EigenSimModel out = *this;
  out.compiled_ = multiply_transpose(*train_, weighted).transpose();
  return out;
}

const Eigen::MatrixXd& EigenSimModel::compiled_matrix() const {
  if (!compiled_) throw ValidationError("model is not compiled");
  return *compiled_;
}

EigenSimModel init_model(std::shared_ptr<const SvdFactors> factors,
                         std::shared_ptr<const RatingMatrix> train) {
  return EigenSimModel(std::move(factors), std::move(train));
}

}  // namespace eigensim
