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

#include "eigensim/evaluation.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "eigensim/csv.h"
#include "eigensim/errors.h"

namespace eigensim {

std::vector<Index> rank_top_k(const Eigen::VectorXd& scores, SparseVectorView exclude, std::size_t k) {
  const auto n = static_cast<std::size_t>(scores.size());
  std::vector<double> keyed(scores.data(), scores.data() + n);
  for (Index i : exclude.indices) {
    if (i < n) keyed[i] = -std::numeric_limits<double>::infinity();
  }
  for (double& s : keyed) {
    if (std::isnan(s)) s = -std::numeric_limits<double>::infinity();
  }
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  const std::size_t top = std::min(k, n);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top), order.end(),
                    [&keyed](Index a, Index b) { return keyed[a] != keyed[b] ? keyed[a] > keyed[b] : a < b; });
  order.resize(top);
  return order;
}

double average_precision_at_k(const Eigen::VectorXd& scores, SparseVectorView exclude,
                              SparseVectorView relevant, std::size_t k) {
  if (k == 0) throw ValidationError("k must be >= 1");
  if (relevant.empty()) return 0.0;
  const std::vector<Index> top = rank_top_k(scores, exclude, k);
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t p = 0; p < top.size(); ++p) {
    if (std::binary_search(relevant.indices.begin(), relevant.indices.end(), top[p])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(p + 1);
    }
  }
  return sum / static_cast<double>(std::min(k, relevant.nnz()));
}

MapResult map_at_k(const ScoreFn& score, const RatingMatrix& train, const RatingMatrix& test,
                   std::size_t k) {
  if (k == 0) throw ValidationError("k must be >= 1");
  if (!train.same_shape(test)) throw DimensionError("train and test matrices differ in shape");

  MapResult out;
  out.users.resize(train.n_users());
  double sum = 0.0;
  for (Index u = 0; u < train.n_users(); ++u) {
    PerUserResult& r = out.users[u];
    r.user = u;
    r.profile_length = train.row(u).nnz();
    const SparseVectorView relevant = test.row(u);
    if (relevant.empty()) continue;
    const Eigen::VectorXd s = score(u);
    if (static_cast<std::size_t>(s.size()) != train.n_items()) {
      throw DimensionError("score function returned " + std::to_string(s.size()) + " scores for " +
                           std::to_string(train.n_items()) + " items");
    }
    r.average_precision = average_precision_at_k(s, train.row(u), relevant, k);
    r.evaluated = true;
    sum += r.average_precision;
    ++out.n_evaluated;
  }
  out.map = out.n_evaluated > 0 ? sum / static_cast<double>(out.n_evaluated) : 0.0;
  return out;
}

void attach_lambda(std::vector<PerUserResult>& results, const Eigen::VectorXd& lambda) {
  for (PerUserResult& r : results) {
    if (r.user >= static_cast<std::size_t>(lambda.size())) {
      throw DimensionError("lambda vector shorter than the user range");
    }
    r.lambda = lambda(static_cast<Eigen::Index>(r.user));
  }
}

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

template <typename Key>
std::vector<GroupRow> group_by(const std::vector<PerUserResult>& results, std::size_t n_groups, Key key) {
  if (n_groups < 2) throw ValidationError("n_groups must be >= 2");
  std::vector<const PerUserResult*> users;
  for (const auto& r : results) {
    if (r.evaluated) users.push_back(&r);
  }
  if (users.size() < n_groups) {
    throw ValidationError("only " + std::to_string(users.size()) + " evaluated users for " +
                          std::to_string(n_groups) + " groups");
  }
  std::sort(users.begin(), users.end(), [&key](const PerUserResult* a, const PerUserResult* b) {
    const double ka = key(*a), kb = key(*b);
    return ka != kb ? ka < kb : a->user < b->user;
  });

  std::vector<GroupRow> groups;
  const std::size_t base = users.size() / n_groups;
  const std::size_t larger = users.size() % n_groups;
  std::size_t begin = 0;
  for (std::size_t g = 0; g < n_groups; ++g) {
    const std::size_t size = base + (g < larger ? 1 : 0);
    std::vector<double> lambdas, lengths;
    double ap = 0.0;
    for (std::size_t k = begin; k < begin + size; ++k) {
      lambdas.push_back(users[k]->lambda);
      lengths.push_back(static_cast<double>(users[k]->profile_length));
      ap += users[k]->average_precision;
    }
    groups.push_back({g, median(lambdas), median(lengths), ap / static_cast<double>(size), size});
    begin += size;
  }
  return groups;
}

}  // namespace

std::vector<GroupRow> group_by_lambda(const std::vector<PerUserResult>& results, std::size_t n_groups) {
  for (const auto& r : results) {
    if (r.evaluated && std::isnan(r.lambda)) throw ValidationError("results carry no lambda values");
  }
  return group_by(results, n_groups, [](const PerUserResult& r) { return r.lambda; });
}

std::vector<GroupRow> group_by_profile_length(const std::vector<PerUserResult>& results,
                                              std::size_t n_groups) {
  return group_by(results, n_groups,
                  [](const PerUserResult& r) { return static_cast<double>(r.profile_length); });
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("pearson: inputs differ in length");
  if (x.size() < 2) throw ValidationError("pearson: need at least two observations");
  // Single pass with running co-moments.
  double mx = 0.0, my = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double n = static_cast<double>(k + 1);
    const double dx = x[k] - mx;
    const double dy = y[k] - my;
    mx += dx / n;
    my += dy / n;
    sxx += dx * (x[k] - mx);
    syy += dy * (y[k] - my);
    sxy += dx * (y[k] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) throw NumericalError("undefined correlation: constant input");
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

namespace {

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&x](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t b = 0; b < order.size();) {
    std::size_t e = b;
    while (e + 1 < order.size() && x[order[e + 1]] == x[order[b]]) ++e;
    const double r = 0.5 * static_cast<double>(b + e);
    for (std::size_t k = b; k <= e; ++k) ranks[order[k]] = r;
    b = e + 1;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("spearman: inputs differ in length");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

ConfidenceReport confidence_report(const std::vector<PerUserResult>& results,
                                   const std::vector<GroupRow>& lambda_groups,
                                   const std::vector<GroupRow>& profile_groups) {
  auto column = [](const std::vector<GroupRow>& g, auto field) {
    std::vector<double> out;
    for (const auto& row : g) out.push_back(field(row));
    return out;
  };
  ConfidenceReport rep;
  rep.per_group.level = CorrelationLevel::kPerGroup;
  rep.per_group.map_lambda = pearson(column(lambda_groups, [](const GroupRow& r) { return r.group_map; }),
                                     column(lambda_groups, [](const GroupRow& r) { return r.median_lambda; }));
  rep.per_group.map_profile =
      pearson(column(profile_groups, [](const GroupRow& r) { return r.group_map; }),
              column(profile_groups, [](const GroupRow& r) { return r.median_profile_length; }));
  rep.per_group.lambda_profile =
      pearson(column(lambda_groups, [](const GroupRow& r) { return r.median_lambda; }),
              column(lambda_groups, [](const GroupRow& r) { return r.median_profile_length; }));

  std::vector<double> ap, lam, len;
  for (const auto& r : results) {
    if (!r.evaluated) continue;
    ap.push_back(r.average_precision);
    lam.push_back(r.lambda);
    len.push_back(static_cast<double>(r.profile_length));
  }
  rep.per_user.level = CorrelationLevel::kPerUser;
  rep.per_user.map_lambda = pearson(ap, lam);
  rep.per_user.map_profile = pearson(ap, len);
  rep.per_user.lambda_profile = pearson(lam, len);
  return rep;
}

void write_lambda_groups_csv(const std::vector<GroupRow>& groups, const std::string& path) {
  std::ostringstream out;
  out << "group,median_lambda,map_at_k,n_users\n";
  for (const auto& g : groups) {
    out << g.group_index << ',' << format_double(g.median_lambda) << ',' << format_double(g.group_map)
        << ',' << g.n_users << '\n';
  }
  write_file(path, out.str());
}

void write_profile_groups_csv(const std::vector<GroupRow>& groups, const std::string& path) {
  std::ostringstream out;
  out << "group,median_profile_length,map_at_k,n_users\n";
  for (const auto& g : groups) {
    out << g.group_index << ',' << format_double(g.median_profile_length) << ','
        << format_double(g.group_map) << ',' << g.n_users << '\n';
  }
  write_file(path, out.str());
}

void write_scatter_csv(const Eigen::VectorXd& lambda, const std::vector<std::size_t>& profile_lengths,
                       const std::string& path) {
  if (static_cast<std::size_t>(lambda.size()) != profile_lengths.size()) {
    throw DimensionError("scatter: lambda and profile lengths differ in size");
  }
  std::ostringstream out;
  out << "user,lambda,profile_length\n";
  for (std::size_t u = 0; u < profile_lengths.size(); ++u) {
    out << u << ',' << format_double(lambda(static_cast<Eigen::Index>(u))) << ',' << profile_lengths[u]
        << '\n';
  }
  write_file(path, out.str());
}

void write_correlations_csv(const ConfidenceReport& report, const std::string& path) {
  std::ostringstream out;
  out << "name,value\n";
  out << "group.map_lambda," << format_double(report.per_group.map_lambda) << '\n';
  out << "group.map_profile_length," << format_double(report.per_group.map_profile) << '\n';
  out << "group.lambda_profile_length," << format_double(report.per_group.lambda_profile) << '\n';
  out << "user.map_lambda," << format_double(report.per_user.map_lambda) << '\n';
  out << "user.map_profile_length," << format_double(report.per_user.map_profile) << '\n';
  out << "user.lambda_profile_length," << format_double(report.per_user.lambda_profile) << '\n';
  write_file(path, out.str());
}

}  // namespace eigensim
