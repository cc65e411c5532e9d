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

#ifndef EIGENSIM_EXPERIMENT_H_
#define EIGENSIM_EXPERIMENT_H_

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "eigensim/baselines.h"
#include "eigensim/bpr.h"
#include "eigensim/dataset.h"
#include "eigensim/eigensim_model.h"
#include "eigensim/evaluation.h"
#include "eigensim/svd.h"

// Staged pipeline behind the command line tool: prepare -> train -> evaluate.
// Every stage reads and writes plain csv artifacts plus a manifest.txt of
// "key = value" lines that records the full configuration.
namespace eigensim {

using Manifest = std::vector<std::pair<std::string, std::string>>;

void write_manifest(const Manifest& manifest, const std::string& path);
std::map<std::string, std::string> read_manifest(const std::string& path);

struct PrepareConfig {
  std::string input;
  InteractionFormat format = InteractionFormat::kMovielensDat;
  SplitSpec split;
  std::string out_dir;
};

// Writes train.csv, valid.csv, test.csv, user_ids.csv, item_ids.csv and
// manifest.txt into out_dir.
Split prepare_dataset(const PrepareConfig& cfg);
Split load_prepared(const std::string& dir);

// Returns the factors stored under cache_root/<svd_cache_key>, computing and
// storing them first when absent. An empty cache_root disables caching.
SvdFactors cached_svd(const RatingMatrix& train, const SvdConfig& cfg, const std::string& cache_root,
                      std::string* cache_dir = nullptr);

void save_lambda_csv(const Eigen::VectorXd& lambda, const std::string& path);
Eigen::VectorXd load_lambda_csv(const std::string& path);

struct EigenSimTrainConfig {
  SvdConfig svd;
  BprHyperparams bpr;
  bool use_validation = true;
  std::string svd_cache_root;
  std::string out_dir;  // empty: nothing is written
};

struct EigenSimRun {
  EigenSimModel model;
  TrainingLog log;
  std::string svd_cache_dir;
};

// SVD of split.train, lambda learned with BPR. Writes lambda.csv,
// training_log.csv and manifest.txt when out_dir is set.
EigenSimRun run_train_eigensim(const Split& split, const EigenSimTrainConfig& cfg);

// Loads a model written by run_train_eigensim.
EigenSimModel load_eigensim(const std::string& model_dir, const Split& split);

// Fits the baseline and writes similarity.csv and manifest.txt when out_dir
// is non-empty.
ItemSimilarityModel run_train_itemknn(const Split& split, const KnnConfig& cfg, const std::string& out_dir);
ItemSimilarityModel run_train_slim(const Split& split, const SlimConfig& cfg, const std::string& out_dir);

struct EvaluateConfig {
  std::size_t k = 5;
  std::size_t n_groups = 10;
  std::string out_dir;  // empty: nothing is written
};

struct ModelEvaluation {
  std::string name;
  MapResult result;
  std::vector<GroupRow> lambda_groups;
  std::vector<GroupRow> profile_groups;
  ConfidenceReport report;
};

struct NamedScorer {
  std::string name;
  ScoreFn score;
};

// Scores every model on split.test, grouping users by `lambda`. Writes
// figure2_scatter.csv and summary.csv at the top of out_dir and
// figure1_groups.csv, profile_groups.csv and correlations.csv under
// out_dir/<model name>/.
std::vector<ModelEvaluation> run_evaluate(const Split& split, const Eigen::VectorXd& lambda,
                                          const std::vector<NamedScorer>& models,
                                          const EvaluateConfig& cfg);

}  // namespace eigensim

#endif  // EIGENSIM_EXPERIMENT_H_
