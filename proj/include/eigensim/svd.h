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

#ifndef EIGENSIM_SVD_H_
#define EIGENSIM_SVD_H_

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "eigensim/rating_matrix.h"

namespace eigensim {

struct SvdConfig {
  std::size_t target_rank = 128;
  // Singular values <= sigma_cutoff * sigma[0] are discarded.
  double sigma_cutoff = 1e-10;
  std::size_t max_iterations = 1000;
  // Stop when every kept triplet satisfies |A^T u_i - sigma_i v_i| <= tol * sigma[0].
  double convergence_tol = 1e-9;
  std::uint64_t seed = 1;
  // Extra subspace columns beyond target_rank; 0 picks max(target_rank, 10).
  std::size_t oversampling = 0;

  void validate() const;
};

// Rank-k truncated SVD  A ~= U diag(sigma) V^T.
struct SvdFactors {
  Eigen::MatrixXd u;      // n_users x k, orthonormal columns
  Eigen::VectorXd sigma;  // k, positive, non-increasing
  Eigen::MatrixXd v;      // n_items x k, orthonormal columns
  std::size_t iterations = 0;
  double residual = 0.0;

  std::size_t rank() const { return static_cast<std::size_t>(sigma.size()); }
  std::size_t n_users() const { return static_cast<std::size_t>(u.rows()); }
  std::size_t n_items() const { return static_cast<std::size_t>(v.rows()); }
};

// Block subspace iteration with a Rayleigh-Ritz step each sweep. The matrix
// is touched only through sparse products A*X and A^T*Y.
SvdFactors truncated_svd(const RatingMatrix& matrix, const SvdConfig& config);

// q = row * V * diag(1/sigma): the coordinates of row * A^+ in the basis U,
// i.e. row * A^+ == q * U^T.
Eigen::VectorXd pinv_left_apply(const SvdFactors& factors, SparseVectorView row);

// Relative Frobenius residuals of the four Penrose conditions for the pair
// (A_k, A_k^+), with A_k = U diag(sigma) V^T and A_k^+ = V diag(1/sigma) U^T.
struct PenroseResiduals {
  double a_pinv_a = 0.0;        // |A P A - A| / |A|
  double pinv_a_pinv = 0.0;     // |P A P - P| / |P|
  double a_pinv_symmetry = 0.0; // |(A P)^T - A P| / |A P|
  double pinv_a_symmetry = 0.0; // |(P A)^T - P A| / |P A|

  double max() const;
};

PenroseResiduals penrose_residuals(const SvdFactors& factors, const RatingMatrix& matrix);

// U diag(sigma) V^T as a dense matrix; meant for small instances.
Eigen::MatrixXd reconstruct(const SvdFactors& factors);

// Dense products with the sparse matrix.
Eigen::MatrixXd multiply(const RatingMatrix& a, const Eigen::MatrixXd& x);
Eigen::MatrixXd multiply_transpose(const RatingMatrix& a, const Eigen::MatrixXd& y);

// Stable hex digest of the matrix contents and the SVD configuration.
std::string svd_cache_key(const RatingMatrix& matrix, const SvdConfig& config);

// Writes U.csv, sigma.csv and V.csv ("index,component,value") into `dir`.
void save_factors(const SvdFactors& factors, const std::string& dir);
SvdFactors load_factors(const std::string& dir);

}  // namespace eigensim

#endif  // EIGENSIM_SVD_H_
