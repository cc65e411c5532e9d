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

#include "eigensim/dataset.h"

#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "eigensim/csv.h"
#include "eigensim/errors.h"
#include "eigensim/random.h"

namespace eigensim {
namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines = split_fields(text, "\n");
  for (auto& line : lines) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  }
  return lines;
}

Interaction parse_record(const std::vector<std::string_view>& fields, bool has_timestamp,
                         const std::string& path, std::size_t line_no) {
  try {
    Interaction rec;
    rec.user = std::string(trim(fields[0]));
    rec.item = std::string(trim(fields[1]));
    if (rec.user.empty() || rec.item.empty()) throw ValidationError("empty id");
    rec.rating = parse_double(fields[2]);
    if (!std::isfinite(rec.rating)) throw ValidationError("rating is not finite");
    if (has_timestamp) {
      rec.timestamp = static_cast<std::int64_t>(parse_unsigned(fields[3]));
    }
    return rec;
  } catch (const ValidationError& e) {
    throw ParseError(path, line_no, e.what());
  }
}

}  // namespace

InteractionFormat parse_interaction_format(const std::string& name) {
  if (name == "movielens-dat") return InteractionFormat::kMovielensDat;
  if (name == "csv") return InteractionFormat::kCsv;
  throw ValidationError("unknown format '" + name + "' (expected movielens-dat or csv)");
}

std::vector<Interaction> load_interactions(const std::string& path, InteractionFormat format) {
  const std::string text = read_file(path);
  const std::vector<std::string_view> lines = split_lines(text);

  std::vector<Interaction> out;
  std::size_t first_data_line = 0;
  bool has_timestamp = true;
  std::string_view sep = "::";

  if (format == InteractionFormat::kCsv) {
    sep = ",";
    if (lines.empty() || trim(lines[0]).empty()) {
      throw ValidationError("no interactions in '" + path + "'");
    }
    std::vector<std::string> header;
    for (auto f : split_fields(lines[0], ",")) header.emplace_back(trim(f));
    if (header == std::vector<std::string>{"user", "item", "rating"}) {
      has_timestamp = false;
    } else if (header != std::vector<std::string>{"user", "item", "rating", "timestamp"}) {
      throw ParseError(path, 1, "expected header 'user,item,rating[,timestamp]'");
    }
    first_data_line = 1;
  }

  const std::size_t n_fields = has_timestamp ? 4 : 3;
  for (std::size_t k = first_data_line; k < lines.size(); ++k) {
    if (trim(lines[k]).empty()) continue;
    const auto fields = split_fields(lines[k], sep);
    if (fields.size() != n_fields) {
      throw ParseError(path, k + 1,
                       "expected " + std::to_string(n_fields) + " fields, got " +
                           std::to_string(fields.size()));
    }
    out.push_back(parse_record(fields, has_timestamp, path, k + 1));
  }
  if (out.empty()) throw ValidationError("no interactions in '" + path + "'");
  return out;
}

namespace {

RatingMatrix assemble(const std::vector<Interaction>& interactions,
                      std::shared_ptr<const IdMap> users, std::shared_ptr<const IdMap> items) {
  // Last occurrence wins: later writes overwrite the slot of the pair.
  std::unordered_map<std::uint64_t, std::size_t> slot;
  std::vector<RatingMatrix::Entry> entries;
  entries.reserve(interactions.size());
  for (const Interaction& rec : interactions) {
    const auto u = users->find(rec.user);
    const auto i = items->find(rec.item);
    if (!u) throw ValidationError("unknown user id '" + rec.user + "'");
    if (!i) throw ValidationError("unknown item id '" + rec.item + "'");
    const std::uint64_t key = (static_cast<std::uint64_t>(*u) << 32) | *i;
    auto [it, inserted] = slot.try_emplace(key, entries.size());
    if (inserted) {
      entries.push_back({*u, *i, rec.rating});
    } else {
      entries[it->second].value = rec.rating;
    }
  }
  std::erase_if(entries, [](const RatingMatrix::Entry& e) { return e.value == 0.0; });
  return RatingMatrix(std::move(users), std::move(items), std::move(entries));
}

}  // namespace

RatingMatrix build_rating_matrix(const std::vector<Interaction>& interactions) {
  if (interactions.empty()) throw ValidationError("no interactions");
  auto users = std::make_shared<IdMap>();
  auto items = std::make_shared<IdMap>();
  for (const Interaction& rec : interactions) {
    users->intern(rec.user);
    items->intern(rec.item);
  }
  return assemble(interactions, std::move(users), std::move(items));
}

RatingMatrix build_rating_matrix(const std::vector<Interaction>& interactions,
                                 std::shared_ptr<const IdMap> users,
                                 std::shared_ptr<const IdMap> items) {
  return assemble(interactions, std::move(users), std::move(items));
}

void SplitSpec::validate() const {
  for (double f : {train_fraction, valid_fraction, test_fraction}) {
    if (!(f > 0.0 && f < 1.0)) {
      throw ValidationError("split fraction " + format_double(f) + " is outside (0, 1)");
    }
  }
  const double sum = train_fraction + valid_fraction + test_fraction;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ValidationError("split fractions sum to " + format_double(sum) + ", expected 1");
  }
}

Split split_holdout(const RatingMatrix& matrix, const SplitSpec& spec) {
  spec.validate();
  if (matrix.nnz() == 0) throw ValidationError("cannot split an empty matrix");

  const std::vector<RatingMatrix::Entry> all = matrix.entries();
  const std::size_t nnz = all.size();
  // The small epsilon keeps e.g. 0.2 * 10 from flooring to 1 on rounding noise.
  auto share = [nnz](double f) {
    return static_cast<std::size_t>(std::floor(f * static_cast<double>(nnz) + 1e-9));
  };
  const std::size_t n_valid = share(spec.valid_fraction);
  const std::size_t n_test = share(spec.test_fraction);

  std::vector<std::size_t> order(nnz);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(spec.seed);
  for (std::size_t k = nnz; k > 1; --k) {
    std::swap(order[k - 1], order[rng.uniform_index(k)]);
  }

  std::vector<RatingMatrix::Entry> train, valid, test;
  valid.reserve(n_valid);
  test.reserve(n_test);
  train.reserve(nnz - n_valid - n_test);
  for (std::size_t k = 0; k < nnz; ++k) {
    const auto& e = all[order[k]];
    if (k < n_valid) {
      valid.push_back(e);
    } else if (k < n_valid + n_test) {
      test.push_back(e);
    } else {
      train.push_back(e);
    }
  }
  return Split{RatingMatrix(matrix.user_map(), matrix.item_map(), std::move(train)),
               RatingMatrix(matrix.user_map(), matrix.item_map(), std::move(valid)),
               RatingMatrix(matrix.user_map(), matrix.item_map(), std::move(test))};
}

void write_interactions_csv(const RatingMatrix& matrix, const std::string& path) {
  std::ostringstream out;
  out << "user,item,rating\n";
  for (const auto& e : matrix.entries()) {
    out << matrix.users().external(e.user) << ',' << matrix.items().external(e.item) << ','
        << format_double(e.value) << '\n';
  }
  write_file(path, out.str());
}

void write_id_map(const IdMap& map, const std::string& path) {
  std::ostringstream out;
  out << "index,id\n";
  for (std::size_t k = 0; k < map.size(); ++k) out << k << ',' << map.external(k) << '\n';
  write_file(path, out.str());
}

IdMap read_id_map(const std::string& path) {
  const std::string text = read_file(path);
  const auto lines = split_lines(text);
  if (lines.empty() || trim(lines[0]) != "index,id") {
    throw ParseError(path, 1, "expected header 'index,id'");
  }
  std::vector<std::string> ids;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    if (trim(lines[k]).empty()) continue;
    const auto fields = split_fields(lines[k], ",");
    if (fields.size() != 2) throw ParseError(path, k + 1, "expected 2 fields");
    std::size_t index = 0;
    try {
      index = parse_unsigned(fields[0]);
    } catch (const ValidationError& e) {
      throw ParseError(path, k + 1, e.what());
    }
    if (index != ids.size()) throw ParseError(path, k + 1, "indices must be dense and ordered");
    ids.emplace_back(trim(fields[1]));
  }
  return IdMap(std::move(ids));
}

}  // namespace eigensim
