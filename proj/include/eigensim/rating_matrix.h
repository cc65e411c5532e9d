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

#ifndef EIGENSIM_RATING_MATRIX_H_
#define EIGENSIM_RATING_MATRIX_H_

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace eigensim {

using Index = std::size_t;

// Bijection between external ids (opaque strings) and dense internal indices
// assigned in first-appearance order.
class IdMap {
 public:
  IdMap() = default;
  explicit IdMap(std::vector<std::string> ids);

  // Returns the existing index or appends a new one.
  Index intern(std::string_view id);
  std::optional<Index> find(std::string_view id) const;
  const std::string& external(Index index) const { return ids_.at(index); }
  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, Index> lookup_;
};

// Non-owning view of one sparse row (or column): sorted indices into a space
// of size `dim`, with matching values.
struct SparseVectorView {
  std::span<const Index> indices;
  std::span<const double> values;
  std::size_t dim = 0;

  std::size_t nnz() const { return indices.size(); }
  bool empty() const { return indices.empty(); }
};

// Owning counterpart, handy for ad-hoc profiles in tests and tools.
struct SparseVector {
  std::vector<Index> indices;
  std::vector<double> values;
  std::size_t dim = 0;

  SparseVectorView view() const { return {indices, values, dim}; }
};

// Sparse user x item matrix with row (CSR) and column (CSC) access. Immutable
// once built, so it may be shared across threads for reading.
class RatingMatrix {
 public:
  struct Entry {
    Index user;
    Index item;
    double value;
    bool operator==(const Entry&) const = default;
  };

  RatingMatrix() = default;

  // `entries` must have distinct (user, item) pairs, in-range indices and
  // non-zero finite values; violations throw ValidationError.
  RatingMatrix(std::shared_ptr<const IdMap> users, std::shared_ptr<const IdMap> items,
               std::vector<Entry> entries);

  std::size_t n_users() const { return n_users_; }
  std::size_t n_items() const { return n_items_; }
  std::size_t nnz() const { return row_values_.size(); }

  SparseVectorView row(Index user) const;
  SparseVectorView col(Index item) const;

  // Stored value, or 0 when absent.
  double value(Index user, Index item) const;
  bool contains(Index user, Index item) const;

  // Row-major (user, then item) order.
  std::vector<Entry> entries() const;

  const IdMap& users() const { return *users_; }
  const IdMap& items() const { return *items_; }
  const std::shared_ptr<const IdMap>& user_map() const { return users_; }
  const std::shared_ptr<const IdMap>& item_map() const { return items_; }

  bool same_shape(const RatingMatrix& other) const {
    return n_users_ == other.n_users_ && n_items_ == other.n_items_;
  }

 private:
  std::shared_ptr<const IdMap> users_;
  std::shared_ptr<const IdMap> items_;
  std::size_t n_users_ = 0;
  std::size_t n_items_ = 0;

  std::vector<std::size_t> row_ptr_;
  std::vector<Index> row_items_;
  std::vector<double> row_values_;

  std::vector<std::size_t> col_ptr_;
  std::vector<Index> col_users_;
  std::vector<double> col_values_;
};

// Number of stored ratings per user.
std::vector<std::size_t> profile_lengths(const RatingMatrix& matrix);

}  // namespace eigensim

#endif  // EIGENSIM_RATING_MATRIX_H_
