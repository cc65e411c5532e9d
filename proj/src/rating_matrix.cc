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

#include "eigensim/rating_matrix.h"

#include <algorithm>
#include <cmath>

#include "eigensim/errors.h"

namespace eigensim {

IdMap::IdMap(std::vector<std::string> ids) {
  for (auto& id : ids) {
    if (find(id)) throw ValidationError("duplicate id '" + id + "' in id map");
    intern(id);
  }
}

Index IdMap::intern(std::string_view id) {
  std::string key(id);
  auto [it, inserted] = lookup_.try_emplace(key, ids_.size());
  if (inserted) ids_.push_back(std::move(key));
  return it->second;
}

std::optional<Index> IdMap::find(std::string_view id) const {
  auto it = lookup_.find(std::string(id));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

RatingMatrix::RatingMatrix(std::shared_ptr<const IdMap> users,
                           std::shared_ptr<const IdMap> items, std::vector<Entry> entries)
    : users_(std::move(users)),
      items_(std::move(items)),
      n_users_(users_->size()),
      n_items_(items_->size()) {
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.user != b.user ? a.user < b.user : a.item < b.item;
  });
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const Entry& e = entries[k];
    if (e.user >= n_users_ || e.item >= n_items_) {
      throw ValidationError("entry (" + std::to_string(e.user) + ", " +
                            std::to_string(e.item) + ") out of range");
    }
    if (!std::isfinite(e.value) || e.value == 0.0) {
      throw ValidationError("entry value must be finite and non-zero");
    }
    if (k > 0 && entries[k - 1].user == e.user && entries[k - 1].item == e.item) {
      throw ValidationError("duplicate entry (" + std::to_string(e.user) + ", " +
                            std::to_string(e.item) + ")");
    }
  }

  row_ptr_.assign(n_users_ + 1, 0);
  col_ptr_.assign(n_items_ + 1, 0);
  for (const Entry& e : entries) {
    ++row_ptr_[e.user + 1];
    ++col_ptr_[e.item + 1];
  }
  for (std::size_t u = 0; u < n_users_; ++u) row_ptr_[u + 1] += row_ptr_[u];
  for (std::size_t i = 0; i < n_items_; ++i) col_ptr_[i + 1] += col_ptr_[i];

  row_items_.reserve(entries.size());
  row_values_.reserve(entries.size());
  for (const Entry& e : entries) {
    row_items_.push_back(e.item);
    row_values_.push_back(e.value);
  }

  // Entries are user-sorted, so filling columns in this order keeps every
  // column sorted by user.
  col_users_.resize(entries.size());
  col_values_.resize(entries.size());
  std::vector<std::size_t> cursor(col_ptr_.begin(), col_ptr_.end() - 1);
  for (const Entry& e : entries) {
    const std::size_t pos = cursor[e.item]++;
    col_users_[pos] = e.user;
    col_values_[pos] = e.value;
  }
}

SparseVectorView RatingMatrix::row(Index user) const {
  if (user >= n_users_) throw DimensionError("user index " + std::to_string(user) + " out of range");
  const std::size_t b = row_ptr_[user], e = row_ptr_[user + 1];
  return {std::span<const Index>(row_items_).subspan(b, e - b),
          std::span<const double>(row_values_).subspan(b, e - b), n_items_};
}

SparseVectorView RatingMatrix::col(Index item) const {
  if (item >= n_items_) throw DimensionError("item index " + std::to_string(item) + " out of range");
  const std::size_t b = col_ptr_[item], e = col_ptr_[item + 1];
  return {std::span<const Index>(col_users_).subspan(b, e - b),
          std::span<const double>(col_values_).subspan(b, e - b), n_users_};
}

double RatingMatrix::value(Index user, Index item) const {
  const SparseVectorView r = row(user);
  auto it = std::lower_bound(r.indices.begin(), r.indices.end(), item);
  if (it == r.indices.end() || *it != item) return 0.0;
  return r.values[static_cast<std::size_t>(it - r.indices.begin())];
}

bool RatingMatrix::contains(Index user, Index item) const {
  const SparseVectorView r = row(user);
  return std::binary_search(r.indices.begin(), r.indices.end(), item);
}

std::vector<RatingMatrix::Entry> RatingMatrix::entries() const {
  std::vector<Entry> out;
  out.reserve(nnz());
  for (Index u = 0; u < n_users_; ++u) {
    for (std::size_t k = row_ptr_[u]; k < row_ptr_[u + 1]; ++k) {
      out.push_back({u, row_items_[k], row_values_[k]});
    }
  }
  return out;
}

std::vector<std::size_t> profile_lengths(const RatingMatrix& matrix) {
  std::vector<std::size_t> out(matrix.n_users());
  for (Index u = 0; u < matrix.n_users(); ++u) out[u] = matrix.row(u).nnz();
  return out;
}

}  // namespace eigensim
