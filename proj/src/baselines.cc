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

#include "eigensim/baselines.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "eigensim/csv.h"
#include "eigensim/errors.h"

namespace eigensim {

void KnnConfig::validate() const {
  if (k_neighbors < 1) throw ValidationError("k_neighbors must be >= 1");
  if (!(shrinkage >= 0.0)) throw ValidationError("shrinkage must be >= 0");
}

void SlimConfig::validate() const {
  if (!(l1 >= 0.0)) throw ValidationError("l1 must be >= 0");
  if (!(l2 >= 0.0)) throw ValidationError("l2 must be >= 0");
  if (max_iterations < 1) throw ValidationError("max_iterations must be >= 1");
  if (!(tol > 0.0)) throw ValidationError("tol must be > 0");
}

ItemSimilarityModel fit_item_knn(const RatingMatrix& train, const KnnConfig& cfg) {
  cfg.validate();
  if (train.nnz() == 0) throw ValidationError("training matrix is empty");
  const std::size_t n = train.n_items();

  std::vector<double> norm(n, 0.0);
  for (Index i = 0; i < n; ++i) {
    for (double x : train.col(i).values) norm[i] += x * x;
    norm[i] = std::sqrt(norm[i]);
  }

  std::vector<RatingMatrix::Entry> entries;
  std::vector<double> dot(n, 0.0);
  std::vector<char> seen(n, 0);
  std::vector<Index> touched;
  std::vector<std::pair<double, Index>> candidates;
  for (Index j = 0; j < n; ++j) {
    // c_i . c_j for every item i co-rated with j.
    const SparseVectorView cj = train.col(j);
    touched.clear();
    for (std::size_t a = 0; a < cj.nnz(); ++a) {
      const SparseVectorView ru = train.row(cj.indices[a]);
      for (std::size_t b = 0; b < ru.nnz(); ++b) {
        const Index i = ru.indices[b];
        if (!seen[i]) {
          seen[i] = 1;
          touched.push_back(i);
        }
        dot[i] += cj.values[a] * ru.values[b];
      }
    }

    candidates.clear();
    for (Index i : touched) {
      const double den = norm[i] * norm[j] + cfg.shrinkage;
      const double sim = den > 0.0 ? dot[i] / den : 0.0;
      if (i != j && sim != 0.0 && std::isfinite(sim)) candidates.emplace_back(sim, i);
      dot[i] = 0.0;
      seen[i] = 0;
    }
    const std::size_t keep = std::min(cfg.k_neighbors, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                      candidates.end(), [](const auto& a, const auto& b) {
                        return a.first != b.first ? a.first > b.first : a.second < b.second;
                      });
    for (std::size_t k = 0; k < keep; ++k) entries.push_back({candidates[k].second, j, candidates[k].first});
  }

  ItemSimilarityModel model;
  model.name = "itemknn";
  model.params = {{"k_neighbors", std::to_string(cfg.k_neighbors)},
                  {"shrinkage", format_double(cfg.shrinkage)}};
  model.similarity = RatingMatrix(train.item_map(), train.item_map(), std::move(entries));
  return model;
}

namespace {

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

double penalty(const Eigen::VectorXd& s, const SlimConfig& cfg) {
  return 0.5 * cfg.l2 * s.squaredNorm() + cfg.l1 * s.lpNorm<1>();
}

Eigen::VectorXd dense_column(const RatingMatrix& train, Index item) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(train.n_users()));
  const SparseVectorView col = train.col(item);
  for (std::size_t k = 0; k < col.nnz(); ++k) c(static_cast<Eigen::Index>(col.indices[k])) = col.values[k];
  return c;
}

}  // namespace

double slim_objective(const RatingMatrix& train, Index target, const Eigen::VectorXd& coefficients,
                      const SlimConfig& cfg) {
  if (static_cast<std::size_t>(coefficients.size()) != train.n_items()) {
    throw DimensionError("slim_objective: coefficient vector has the wrong length");
  }
  Eigen::VectorXd residual = dense_column(train, target);
  for (Index u = 0; u < train.n_users(); ++u) {
    const SparseVectorView r = train.row(u);
    double fit = 0.0;
    for (std::size_t k = 0; k < r.nnz(); ++k) fit += r.values[k] * coefficients(static_cast<Eigen::Index>(r.indices[k]));
    residual(static_cast<Eigen::Index>(u)) -= fit;
  }
  return 0.5 * residual.squaredNorm() + penalty(coefficients, cfg);
}

SparseVector fit_slim_column(const RatingMatrix& train, Index target, const SlimConfig& cfg,
                             std::vector<double>* objective_trace) {
  cfg.validate();
  if (target >= train.n_items()) throw DimensionError("target item out of range");
  const std::size_t n = train.n_items();

  // residual = c_t - R s, kept up to date after every coordinate move.
  Eigen::VectorXd residual = dense_column(train, target);
  Eigen::VectorXd s = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  std::vector<double> col_sq(n, 0.0);
  for (Index j = 0; j < n; ++j) {
    for (double x : train.col(j).values) col_sq[j] += x * x;
  }

  for (std::size_t sweep = 0; sweep < cfg.max_iterations; ++sweep) {
    double max_delta = 0.0;
    for (Index j = 0; j < n; ++j) {
      if (j == target || col_sq[j] == 0.0) continue;
      const SparseVectorView cj = train.col(j);
      const double old = s(static_cast<Eigen::Index>(j));
      double rho = col_sq[j] * old;
      for (std::size_t k = 0; k < cj.nnz(); ++k) rho += cj.values[k] * residual(static_cast<Eigen::Index>(cj.indices[k]));
      double updated = soft_threshold(rho, cfg.l1) / (col_sq[j] + cfg.l2);
      if (cfg.nonnegative) updated = std::max(updated, 0.0);
      const double delta = updated - old;
      if (delta == 0.0) continue;
      for (std::size_t k = 0; k < cj.nnz(); ++k) {
        residual(static_cast<Eigen::Index>(cj.indices[k])) -= cj.values[k] * delta;
      }
      s(static_cast<Eigen::Index>(j)) = updated;
      max_delta = std::max(max_delta, std::abs(delta));
    }
    if (objective_trace) objective_trace->push_back(0.5 * residual.squaredNorm() + penalty(s, cfg));
    if (max_delta < cfg.tol) break;
  }

  SparseVector out;
  out.dim = n;
  for (Index j = 0; j < n; ++j) {
    const double v = s(static_cast<Eigen::Index>(j));
    if (v != 0.0) {
      out.indices.push_back(j);
      out.values.push_back(v);
    }
  }
  return out;
}

ItemSimilarityModel fit_slim(const RatingMatrix& train, const SlimConfig& cfg) {
  cfg.validate();
  if (train.nnz() == 0) throw ValidationError("training matrix is empty");
  std::vector<RatingMatrix::Entry> entries;
  for (Index t = 0; t < train.n_items(); ++t) {
    if (train.col(t).empty()) continue;
    const SparseVector col = fit_slim_column(train, t, cfg);
    for (std::size_t k = 0; k < col.indices.size(); ++k) entries.push_back({col.indices[k], t, col.values[k]});
  }
  ItemSimilarityModel model;
  model.name = "slim";
  model.params = {{"l1", format_double(cfg.l1)},
                  {"l2", format_double(cfg.l2)},
                  {"max_iterations", std::to_string(cfg.max_iterations)},
                  {"tol", format_double(cfg.tol)},
                  {"nonnegative", cfg.nonnegative ? "true" : "false"}};
  model.similarity = RatingMatrix(train.item_map(), train.item_map(), std::move(entries));
  return model;
}

Eigen::VectorXd score_user_itembased(const ItemSimilarityModel& model, SparseVectorView profile) {
  const RatingMatrix& sim = model.similarity;
  if (profile.dim != sim.n_items()) {
    throw DimensionError("profile has length " + std::to_string(profile.dim) + ", model has " +
                         std::to_string(sim.n_items()) + " items");
  }
  Eigen::VectorXd scores = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sim.n_items()));
  for (std::size_t a = 0; a < profile.nnz(); ++a) {
    const SparseVectorView neighbours = sim.row(profile.indices[a]);
    for (std::size_t b = 0; b < neighbours.nnz(); ++b) {
      scores(static_cast<Eigen::Index>(neighbours.indices[b])) += profile.values[a] * neighbours.values[b];
    }
  }
  return scores;
}

void save_similarity_csv(const ItemSimilarityModel& model, const std::string& path) {
  std::ostringstream out;
  out << "row,col,value\n";
  for (const auto& e : model.similarity.entries()) {
    out << e.user << ',' << e.item << ',' << format_double(e.value) << '\n';
  }
  write_file(path, out.str());
}

ItemSimilarityModel load_similarity_csv(const std::string& path, std::shared_ptr<const IdMap> items,
                                        std::string name) {
  const std::string text = read_file(path);
  const auto lines = split_fields(text, "\n");
  if (lines.empty() || trim(lines[0]) != "row,col,value") {
    throw ParseError(path, 1, "expected header 'row,col,value'");
  }
  std::vector<RatingMatrix::Entry> entries;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    if (trim(lines[k]).empty()) continue;
    const auto f = split_fields(lines[k], ",");
    if (f.size() != 3) throw ParseError(path, k + 1, "expected 3 fields");
    try {
      entries.push_back({parse_unsigned(f[0]), parse_unsigned(f[1]), parse_double(f[2])});
    } catch (const ValidationError& e) {
      throw ParseError(path, k + 1, e.what());
    }
  }
  ItemSimilarityModel model;
  model.name = std::move(name);
  model.similarity = RatingMatrix(items, items, std::move(entries));
  return model;
}

}  // namespace eigensim
