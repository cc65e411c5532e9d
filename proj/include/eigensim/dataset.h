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

#ifndef EIGENSIM_DATASET_H_
#define EIGENSIM_DATASET_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eigensim/rating_matrix.h"

namespace eigensim {

struct Interaction {
  std::string user;
  std::string item;
  double rating = 0.0;
  std::optional<std::int64_t> timestamp;

  bool operator==(const Interaction&) const = default;
};

enum class InteractionFormat {
  kMovielensDat,  // user::item::rating::timestamp, no header
  kCsv,           // header user,item,rating[,timestamp]
};

InteractionFormat parse_interaction_format(const std::string& name);

// One Interaction per non-blank line, in file order.
std::vector<Interaction> load_interactions(const std::string& path, InteractionFormat format);

// Internal indices follow first appearance; for repeated (user, item) pairs
// the last occurrence wins. A winning rating of exactly 0 leaves no stored
// entry, though the ids stay registered.
RatingMatrix build_rating_matrix(const std::vector<Interaction>& interactions);

// Same, against fixed id maps; an unknown id throws ValidationError.
RatingMatrix build_rating_matrix(const std::vector<Interaction>& interactions,
                                 std::shared_ptr<const IdMap> users,
                                 std::shared_ptr<const IdMap> items);

struct SplitSpec {
  double train_fraction = 0.6;
  double valid_fraction = 0.2;
  double test_fraction = 0.2;
  std::uint64_t seed = 42;

  void validate() const;
};

struct Split {
  RatingMatrix train;
  RatingMatrix valid;
  RatingMatrix test;
};

// Global uniform partition of the stored entries. Validation and test get
// floor(fraction * nnz) entries each, train gets the rest.
Split split_holdout(const RatingMatrix& matrix, const SplitSpec& spec);

// csv export with header "user,item,rating" and external ids.
void write_interactions_csv(const RatingMatrix& matrix, const std::string& path);

// "index,id" listing of an id map.
void write_id_map(const IdMap& map, const std::string& path);
IdMap read_id_map(const std::string& path);

}  // namespace eigensim

#endif  // EIGENSIM_DATASET_H_
