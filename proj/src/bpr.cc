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

#include "eigensim/bpr.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "eigensim/csv.h"
#include "eigensim/errors.h"
#include "eigensim/evaluation.h"

namespace eigensim {
namespace {

// -ln sigmoid(x) without overflow.
double neg_log_sigmoid(double x) {
  return x >= 0.0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

// sigmoid(-x)
double sigmoid_neg(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

// Union of two sorted index lists.
std::vector<Index> merge_support(SparseVectorView a, SparseVectorView b) {
  std::vector<Index> out;
  out.reserve(a.nnz() + b.nnz());
  std::set_union(a.indices.begin(), a.indices.end(), b.indices.begin(), b.indices.end(),
                 std::back_inserter(out));
  return out;
}

double median_of(const Eigen::VectorXd& v) {
  std::vector<double> c(v.data(), v.data() + v.size());
  std::sort(c.begin(), c.end());
  const std::size_t n = c.size();
  return n % 2 == 1 ? c[n / 2] : 0.5 * (c[n / 2 - 1] + c[n / 2]);
}

}  // namespace

void BprHyperparams::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ValidationError("learning_rate must be a finite non-negative number");
  }
  if (epochs < 1) throw ValidationError("epochs must be >= 1");
  if (!(l2_reg >= 0.0)) throw ValidationError("l2_reg must be >= 0");
  if (eval_k < 1) throw ValidationError("eval_k must be >= 1");
}

TripletSampler::TripletSampler(const RatingMatrix& train) : train_(&train) {
  for (Index u = 0; u < train.n_users(); ++u) {
    const std::size_t len = train.row(u).nnz();
    if (len > 0 && len < train.n_items()) eligible_.push_back(u);
  }
  if (eligible_.empty()) {
    throw ValidationError("no user has both a rated and an unrated item; cannot sample triplets");
  }
}

Triplet TripletSampler::sample(Rng& rng) const {
  Triplet t;
  t.user = eligible_[rng.uniform_index(eligible_.size())];
  const SparseVectorView row = train_->row(t.user);
  t.positive = row.indices[rng.uniform_index(row.nnz())];
  do {
    t.negative = rng.uniform_index(train_->n_items());
  } while (std::binary_search(row.indices.begin(), row.indices.end(), t.negative));
  return t;
}

Triplet sample_triplet(const RatingMatrix& train, Rng& rng) {
  return TripletSampler(train).sample(rng);
}

SparseGradient bpr_gradient(const SvdFactors& factors, const RatingMatrix& train,
                            const Eigen::VectorXd& lambda, const Triplet& t, double l2_reg) {
  const Eigen::VectorXd q = pinv_left_apply(factors, train.row(t.user));
  const SparseVectorView ci = train.col(t.positive);
  const SparseVectorView cj = train.col(t.negative);

  SparseGradient g;
  g.users = merge_support(ci, cj);
  g.values.resize(g.users.size());

  // dx/dlambda_v = P_uv (R_vi - R_vj); walk both sorted columns in step.
  std::size_t a = 0, b = 0;
  double x = 0.0;
  for (std::size_t k = 0; k < g.users.size(); ++k) {
    const Index v = g.users[k];
    double diff = 0.0;
    if (a < ci.nnz() && ci.indices[a] == v) diff += ci.values[a++];
    if (b < cj.nnz() && cj.indices[b] == v) diff -= cj.values[b++];
    const double d = factors.u.row(static_cast<Eigen::Index>(v)).dot(q) * diff;
    g.values[k] = d;
    x += d * lambda(static_cast<Eigen::Index>(v));
  }

  const double scale = sigmoid_neg(x);
  double reg = 0.0;
  for (std::size_t k = 0; k < g.users.size(); ++k) {
    const double dev = lambda(static_cast<Eigen::Index>(g.users[k])) - 1.0;
    reg += dev * dev;
    g.values[k] = -scale * g.values[k] + 2.0 * l2_reg * dev;
  }
  g.margin = x;
  g.loss = neg_log_sigmoid(x) + l2_reg * reg;
  return g;
}

SparseGradient bpr_gradient(const EigenSimModel& model, const Triplet& t, double l2_reg) {
  return bpr_gradient(model.factors(), model.train(), model.lambda(), t, l2_reg);
}

double bpr_triplet_loss(const EigenSimModel& model, const Triplet& t, double l2_reg) {
  const Eigen::VectorXd scores = model.score_user(t.user);
  const double x = scores(static_cast<Eigen::Index>(t.positive)) - scores(static_cast<Eigen::Index>(t.negative));
  const auto support = merge_support(model.train().col(t.positive), model.train().col(t.negative));
  double reg = 0.0;
  for (Index v : support) {
    const double dev = model.lambda()(static_cast<Eigen::Index>(v)) - 1.0;
    reg += dev * dev;
  }
  return neg_log_sigmoid(x) + l2_reg * reg;
}

std::string TrainingLog::to_csv() const {
  std::ostringstream out;
  out << "epoch,mean_loss,valid_map,lambda_min,lambda_median,lambda_max\n";
  for (const auto& e : epochs) {
    out << e.epoch << ',' << format_double(e.mean_loss) << ','
        << (e.valid_map ? format_double(*e.valid_map) : std::string()) << ','
        << format_double(e.lambda_min) << ',' << format_double(e.lambda_median) << ','
        << format_double(e.lambda_max) << '\n';
  }
  return out.str();
}

TrainResult train(const EigenSimModel& model, const RatingMatrix* valid, const BprHyperparams& hp) {
  hp.validate();
  const RatingMatrix& train_matrix = model.train();
  if (valid && !valid->same_shape(train_matrix)) {
    throw DimensionError("validation matrix shape differs from the training matrix");
  }
  const TripletSampler sampler(train_matrix);
  const std::size_t samples = hp.samples_per_epoch > 0 ? hp.samples_per_epoch : train_matrix.nnz();

  Rng rng(hp.seed);
  Eigen::VectorXd lambda = model.lambda();
  EigenSimModel current = model;
  TrainingLog log;
  double best_map = -1.0;
  Eigen::VectorXd best_lambda = lambda;
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= hp.epochs; ++epoch) {
    double loss_sum = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
      const Triplet t = sampler.sample(rng);
      const SparseGradient g = bpr_gradient(model.factors(), train_matrix, lambda, t, hp.l2_reg);
      if (!std::isfinite(g.loss)) {
        throw NumericalError("training diverged in epoch " + std::to_string(epoch) +
                             " (non-finite loss); lower the learning rate");
      }
      loss_sum += g.loss;
      for (std::size_t k = 0; k < g.users.size(); ++k) {
        lambda(static_cast<Eigen::Index>(g.users[k])) -= hp.learning_rate * g.values[k];
      }
    }
    const double mean_loss = loss_sum / static_cast<double>(samples);
    if (!std::isfinite(mean_loss) || !lambda.allFinite()) {
      throw NumericalError("training diverged in epoch " + std::to_string(epoch) +
                           " (non-finite loss); lower the learning rate");
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.mean_loss = mean_loss;
    rec.lambda_min = lambda.minCoeff();
    rec.lambda_median = median_of(lambda);
    rec.lambda_max = lambda.maxCoeff();

    bool stop = false;
    if (valid) {
      current.set_lambda(lambda);
      const EigenSimModel compiled = current.compile();
      const double m = map_at_k([&compiled](Index u) { return compiled.score_user(u); }, train_matrix,
                                *valid, hp.eval_k)
                           .map;
      rec.valid_map = m;
      if (m > best_map) {
        best_map = m;
        best_lambda = lambda;
        log.best_epoch = epoch;
        since_best = 0;
      } else if (hp.early_stop_patience > 0 && ++since_best >= hp.early_stop_patience) {
        stop = true;
      }
    }
    log.epochs.push_back(rec);
    if (stop) break;
  }

  EigenSimModel out = model;
  out.set_lambda(valid ? best_lambda : lambda);
  return {std::move(out), std::move(log)};
}

}  // namespace eigensim
