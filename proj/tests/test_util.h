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

#ifndef EIGENSIM_TESTS_TEST_UTIL_H_
#define EIGENSIM_TESTS_TEST_UTIL_H_

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "eigensim/random.h"
#include "eigensim/rating_matrix.h"

namespace eigensim::testing {

inline std::shared_ptr<const IdMap> numbered_ids(std::size_t n, const std::string& prefix) {
  std::vector<std::string> ids;
  for (std::size_t k = 0; k < n; ++k) ids.push_back(prefix + std::to_string(k));
  return std::make_shared<const IdMap>(std::move(ids));
}

// Non-zero cells of a dense matrix become stored entries.
inline RatingMatrix from_dense(const Eigen::MatrixXd& a) {
  std::vector<RatingMatrix::Entry> entries;
  for (Eigen::Index u = 0; u < a.rows(); ++u) {
    for (Eigen::Index i = 0; i < a.cols(); ++i) {
      if (a(u, i) != 0.0) entries.push_back({static_cast<Index>(u), static_cast<Index>(i), a(u, i)});
    }
  }
  return RatingMatrix(numbered_ids(static_cast<std::size_t>(a.rows()), "u"),
                      numbered_ids(static_cast<std::size_t>(a.cols()), "i"), std::move(entries));
}

inline Eigen::MatrixXd to_dense(const RatingMatrix& m) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m.n_users()),
                                            static_cast<Eigen::Index>(m.n_items()));
  for (const auto& e : m.entries()) a(static_cast<Eigen::Index>(e.user), static_cast<Eigen::Index>(e.item)) = e.value;
  return a;
}

inline Eigen::MatrixXd random_dense(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd a(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) a(r, c) = rng.normal();
  }
  return a;
}

// Each cell kept with probability `density`, values uniform in [1, 5].
inline Eigen::MatrixXd random_sparse(Rng& rng, Eigen::Index rows, Eigen::Index cols, double density) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (rng.uniform01() < density) a(r, c) = rng.uniform(1.0, 5.0);
    }
  }
  return a;
}

// Moore-Penrose pseudoinverse via complete orthogonal decomposition.
inline Eigen::MatrixXd dense_pinv(const Eigen::MatrixXd& a) {
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
  return cod.pseudoInverse();
}

inline SparseVector sparse_row(const Eigen::VectorXd& dense) {
  SparseVector v;
  v.dim = static_cast<std::size_t>(dense.size());
  for (Eigen::Index k = 0; k < dense.size(); ++k) {
    if (dense(k) != 0.0) {
      v.indices.push_back(static_cast<Index>(k));
      v.values.push_back(dense(k));
    }
  }
  return v;
}

inline Eigen::VectorXd dense_row(SparseVectorView v) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(v.dim));
  for (std::size_t k = 0; k < v.nnz(); ++k) out(static_cast<Eigen::Index>(v.indices[k])) = v.values[k];
  return out;
}

inline double max_relative_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double scale = std::max(b.cwiseAbs().maxCoeff(), 1e-300);
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

}  // namespace eigensim::testing

#endif  // EIGENSIM_TESTS_TEST_UTIL_H_
