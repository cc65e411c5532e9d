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

// eigensim: command line front end of the staged pipeline.
//
//   eigensim prepare  --input ratings.dat --format movielens-dat --out run/
//   eigensim train eigensim --data run/
//   eigensim train slim --data run/
//   eigensim evaluate --data run/ --models eigensim,slim
//   eigensim report --eval run/eval

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eigensim/csv.h"
#include "eigensim/errors.h"
#include "eigensim/experiment.h"

namespace fs = std::filesystem;
using namespace eigensim;

namespace {

// Merges "--config FILE" (key = value lines) into the argument list. Flags
// given on the command line win; "true"/"false" values toggle bare flags.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (args[k] == "--config" && k + 1 < args.size()) {
      path = args[k + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(k), args.begin() + static_cast<std::ptrdiff_t>(k + 2));
      break;
    }
    if (args[k].rfind("--config=", 0) == 0) {
      path = args[k].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(k));
      break;
    }
  }
  if (path.empty()) return args;

  auto given = [&args](const std::string& flag) {
    return std::any_of(args.begin(), args.end(), [&flag](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
  };
  for (const auto& [key, value] : read_manifest(path)) {
    const std::string flag = "--" + key;
    if (given(flag)) continue;
    if (value == "true") {
      args.push_back(flag);
    } else if (value != "false") {
      args.push_back(flag);
      args.push_back(value);
    }
  }
  return args;
}

SplitSpec parse_split(const std::string& text, std::uint64_t seed) {
  const auto parts = split_fields(text, ",");
  if (parts.size() != 3) throw ValidationError("--split expects three comma-separated fractions");
  SplitSpec spec{parse_double(parts[0]), parse_double(parts[1]), parse_double(parts[2]), seed};
  spec.validate();
  return spec;
}

std::string default_path(const std::string& value, const std::string& base, const std::string& leaf) {
  return value.empty() ? (fs::path(base) / leaf).string() : value;
}

void print_summary(const std::vector<ModelEvaluation>& evals, std::size_t k) {
  std::printf("%-10s %10s %10s %14s %14s\n", "model", ("MAP@" + std::to_string(k)).c_str(), "users",
              "r(MAP,lambda)", "r(MAP,length)");
  for (const auto& ev : evals) {
    std::printf("%-10s %10.5f %10zu %14.4f %14.4f\n", ev.name.c_str(), ev.result.map, ev.result.n_evaluated,
                ev.report.per_group.map_lambda, ev.report.per_group.map_profile);
  }
  for (const auto& ev : evals) {
    std::printf("\n%s: MAP@%zu by lambda group\n%6s %14s %12s %8s\n", ev.name.c_str(), k, "group",
                "median_lambda", "map", "users");
    for (const auto& g : ev.lambda_groups) {
      std::printf("%6zu %14.4f %12.5f %8zu\n", g.group_index, g.median_lambda, g.group_map, g.n_users);
    }
  }
}

void print_csv_table(const std::string& path) {
  const std::string text = read_file(path);
  for (auto line : split_fields(text, "\n")) {
    if (line.empty()) continue;
    for (auto field : split_fields(line, ",")) std::printf("%-28.*s", static_cast<int>(field.size()), field.data());
    std::printf("\n");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EigenSim: eigenvalue confidence for item-based recommenders"};
  app.require_subcommand(1);

  // prepare
  PrepareConfig prep;
  std::string format_name = "movielens-dat";
  std::string split_text = "0.6,0.2,0.2";
  std::uint64_t split_seed = 42;
  auto* prepare = app.add_subcommand("prepare", "Load ratings and write train/valid/test splits");
  prepare->add_option("--input", prep.input, "Ratings file")->required();
  prepare->add_option("--format", format_name, "movielens-dat or csv")->capture_default_str();
  prepare->add_option("--split", split_text, "train,valid,test fractions")->capture_default_str();
  prepare->add_option("--seed", split_seed, "Split seed")->capture_default_str();
  prepare->add_option("--out", prep.out_dir, "Output directory")->required();

  // train
  auto* train_cmd = app.add_subcommand("train", "Fit a model on a prepared split");
  train_cmd->require_subcommand(1);

  EigenSimTrainConfig es;
  std::string data_dir, out_dir, svd_cache;
  bool no_validation = false;
  auto* train_es = train_cmd->add_subcommand("eigensim", "SVD + BPR-learned eigenvalues");
  train_es->add_option("--data", data_dir, "Prepared split directory")->required();
  train_es->add_option("--out", out_dir, "Model directory (default <data>/models/eigensim)");
  train_es->add_option("--svd-cache", svd_cache, "SVD cache root (default <data>/svd_cache)");
  train_es->add_option("--rank", es.svd.target_rank, "Truncation rank")->capture_default_str();
  train_es->add_option("--sigma-cutoff", es.svd.sigma_cutoff, "Relative singular value cutoff")->capture_default_str();
  train_es->add_option("--svd-max-iter", es.svd.max_iterations, "Subspace iterations")->capture_default_str();
  train_es->add_option("--svd-tol", es.svd.convergence_tol, "SVD residual tolerance")->capture_default_str();
  train_es->add_option("--svd-seed", es.svd.seed, "SVD start-block seed")->capture_default_str();
  train_es->add_option("--oversampling", es.svd.oversampling, "Extra subspace columns (0 = auto)")->capture_default_str();
  train_es->add_option("--lr", es.bpr.learning_rate, "SGD learning rate")->capture_default_str();
  train_es->add_option("--epochs", es.bpr.epochs, "Epochs")->capture_default_str();
  train_es->add_option("--samples-per-epoch", es.bpr.samples_per_epoch, "Triplets per epoch (0 = train nnz)")->capture_default_str();
  train_es->add_option("--l2", es.bpr.l2_reg, "Penalty on (lambda - 1)^2")->capture_default_str();
  train_es->add_option("--seed", es.bpr.seed, "SGD seed")->capture_default_str();
  train_es->add_option("--patience", es.bpr.early_stop_patience, "Early-stop patience (0 = off)")->capture_default_str();
  train_es->add_option("--eval-k", es.bpr.eval_k, "Validation MAP cutoff")->capture_default_str();
  train_es->add_flag("--no-validation", no_validation, "Skip per-epoch validation");

  KnnConfig knn;
  auto* train_knn = train_cmd->add_subcommand("itemknn", "Cosine item kNN");
  train_knn->add_option("--data", data_dir, "Prepared split directory")->required();
  train_knn->add_option("--out", out_dir, "Model directory (default <data>/models/itemknn)");
  train_knn->add_option("--k", knn.k_neighbors, "Neighbours kept per item")->capture_default_str();
  train_knn->add_option("--shrinkage", knn.shrinkage, "Cosine shrinkage")->capture_default_str();

  SlimConfig slim;
  bool allow_negative = false;
  auto* train_slim = train_cmd->add_subcommand("slim", "SLIM elastic-net item model");
  train_slim->add_option("--data", data_dir, "Prepared split directory")->required();
  train_slim->add_option("--out", out_dir, "Model directory (default <data>/models/slim)");
  train_slim->add_option("--l1", slim.l1, "L1 weight")->capture_default_str();
  train_slim->add_option("--l2", slim.l2, "L2 weight")->capture_default_str();
  train_slim->add_option("--max-iter", slim.max_iterations, "Sweeps per column")->capture_default_str();
  train_slim->add_option("--tol", slim.tol, "Coefficient change tolerance")->capture_default_str();
  train_slim->add_flag("--allow-negative", allow_negative, "Drop the non-negativity constraint");

  // evaluate
  EvaluateConfig ev;
  std::string models_text = "eigensim", models_dir, lambda_path;
  auto* evaluate = app.add_subcommand("evaluate", "MAP@k, lambda groups and correlations on the test split");
  evaluate->add_option("--data", data_dir, "Prepared split directory")->required();
  evaluate->add_option("--models", models_text, "Comma-separated: eigensim, itemknn, slim")->capture_default_str();
  evaluate->add_option("--models-dir", models_dir, "Model root (default <data>/models)");
  evaluate->add_option("--lambda", lambda_path, "lambda.csv used for grouping (default <models-dir>/eigensim/lambda.csv)");
  evaluate->add_option("--k", ev.k, "MAP cutoff")->capture_default_str();
  evaluate->add_option("--groups", ev.n_groups, "Number of lambda groups")->capture_default_str();
  evaluate->add_option("--out", ev.out_dir, "Output directory (default <data>/eval)");

  // report
  std::string eval_dir;
  auto* report = app.add_subcommand("report", "Print the tables of an evaluation directory");
  report->add_option("--eval", eval_dir, "Evaluation output directory")->required();

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = expand_config(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return 2;
  } catch (const eigensim::Error& e) {
    std::cerr << "error: " << e.category() << ": " << e.what() << "\n";
    return 1;
  }

  try {
    if (*prepare) {
      prep.format = parse_interaction_format(format_name);
      prep.split = parse_split(split_text, split_seed);
      const Split s = prepare_dataset(prep);
      std::printf("users %zu  items %zu  train %zu  valid %zu  test %zu\n", s.train.n_users(), s.train.n_items(),
                  s.train.nnz(), s.valid.nnz(), s.test.nnz());
    } else if (*train_es) {
      es.use_validation = !no_validation;
      es.out_dir = default_path(out_dir, data_dir, "models/eigensim");
      es.svd_cache_root = default_path(svd_cache, data_dir, "svd_cache");
      const Split s = load_prepared(data_dir);
      const EigenSimRun run = run_train_eigensim(s, es);
      std::printf("rank %zu  epochs %zu\n", run.model.factors().rank(), run.log.epochs.size());
      if (run.log.best_epoch) {
        std::printf("best epoch %zu  valid MAP@%zu %s\n", *run.log.best_epoch, es.bpr.eval_k,
                    format_double(*run.log.epochs[*run.log.best_epoch - 1].valid_map).c_str());
      }
      std::printf("wrote %s\n", (fs::path(es.out_dir) / "lambda.csv").string().c_str());
    } else if (*train_knn) {
      const Split s = load_prepared(data_dir);
      const std::string dir = default_path(out_dir, data_dir, "models/itemknn");
      const auto model = run_train_itemknn(s, knn, dir);
      std::printf("itemknn: %zu similarities, wrote %s\n", model.similarity.nnz(),
                  (fs::path(dir) / "similarity.csv").string().c_str());
    } else if (*train_slim) {
      slim.nonnegative = !allow_negative;
      const Split s = load_prepared(data_dir);
      const std::string dir = default_path(out_dir, data_dir, "models/slim");
      const auto model = run_train_slim(s, slim, dir);
      std::printf("slim: %zu coefficients, wrote %s\n", model.similarity.nnz(),
                  (fs::path(dir) / "similarity.csv").string().c_str());
    } else if (*evaluate) {
      const Split s = load_prepared(data_dir);
      models_dir = default_path(models_dir, data_dir, "models");
      lambda_path = default_path(lambda_path, models_dir, "eigensim/lambda.csv");
      ev.out_dir = default_path(ev.out_dir, data_dir, "eval");
      const Eigen::VectorXd lambda = load_lambda_csv(lambda_path);

      // Loaded models must outlive the scorers that reference them.
      std::vector<EigenSimModel> eigen_models;
      std::vector<ItemSimilarityModel> item_models;
      std::vector<NamedScorer> scorers;
      const auto names = split_fields(models_text, ",");
      eigen_models.reserve(names.size());
      item_models.reserve(names.size());
      for (auto name_view : names) {
        const std::string name(trim(name_view));
        const std::string dir = (fs::path(models_dir) / name).string();
        if (name == "eigensim") {
          eigen_models.push_back(load_eigensim(dir, s).compile());
          const EigenSimModel* m = &eigen_models.back();
          scorers.push_back({name, [m](Index u) { return m->score_user(u); }});
        } else if (name == "itemknn" || name == "slim") {
          item_models.push_back(load_similarity_csv((fs::path(dir) / "similarity.csv").string(),
                                                    s.train.item_map(), name));
          const ItemSimilarityModel* m = &item_models.back();
          const RatingMatrix* train = &s.train;
          scorers.push_back({name, [m, train](Index u) { return score_user_itembased(*m, train->row(u)); }});
        } else {
          throw ValidationError("unknown model '" + name + "'");
        }
      }
      const auto evals = run_evaluate(s, lambda, scorers, ev);
      print_summary(evals, ev.k);
      std::printf("\nwrote %s\n", ev.out_dir.c_str());
    } else if (*report) {
      std::printf("== summary\n");
      print_csv_table((fs::path(eval_dir) / "summary.csv").string());
      std::vector<fs::path> model_dirs;
      for (const auto& entry : fs::directory_iterator(eval_dir)) {
        if (entry.is_directory() && fs::exists(entry.path() / "figure1_groups.csv")) model_dirs.push_back(entry.path());
      }
      std::sort(model_dirs.begin(), model_dirs.end());
      for (const auto& dir : model_dirs) {
        std::printf("\n== %s lambda groups\n", dir.filename().string().c_str());
        print_csv_table((dir / "figure1_groups.csv").string());
        std::printf("\n== %s correlations\n", dir.filename().string().c_str());
        print_csv_table((dir / "correlations.csv").string());
      }
    }
  } catch (const eigensim::Error& e) {
    std::cerr << "error: " << e.category() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
