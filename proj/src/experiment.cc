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

#include "eigensim/experiment.h"

#include <filesystem>
#include <sstream>

#include "eigensim/csv.h"
#include "eigensim/errors.h"

namespace fs = std::filesystem;

namespace eigensim {
namespace {

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory '" + dir + "'");
}

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

RatingMatrix load_split_file(const std::string& path, const std::shared_ptr<const IdMap>& users,
                             const std::shared_ptr<const IdMap>& items) {
  std::vector<Interaction> rows;
  // An empty split is legal for tiny datasets, so the header-only case is
  // handled here rather than through load_interactions.
  const std::string text = read_file(path);
  if (text.find('\n') + 1 < text.size()) rows = load_interactions(path, InteractionFormat::kCsv);
  return build_rating_matrix(rows, users, items);
}

}  // namespace

void write_manifest(const Manifest& manifest, const std::string& path) {
  std::ostringstream out;
  for (const auto& [key, value] : manifest) out << key << " = " << value << '\n';
  write_file(path, out.str());
}

std::map<std::string, std::string> read_manifest(const std::string& path) {
  const std::string text = read_file(path);
  std::map<std::string, std::string> out;
  std::size_t line_no = 0;
  for (auto line : split_fields(text, "\n")) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(path, line_no, "expected 'key = value'");
    out[std::string(trim(line.substr(0, eq)))] = std::string(trim(line.substr(eq + 1)));
  }
  return out;
}

Split prepare_dataset(const PrepareConfig& cfg) {
  cfg.split.validate();
  const RatingMatrix all = build_rating_matrix(load_interactions(cfg.input, cfg.format));
  Split split = split_holdout(all, cfg.split);

  ensure_dir(cfg.out_dir);
  write_interactions_csv(split.train, join(cfg.out_dir, "train.csv"));
  write_interactions_csv(split.valid, join(cfg.out_dir, "valid.csv"));
  write_interactions_csv(split.test, join(cfg.out_dir, "test.csv"));
  write_id_map(all.users(), join(cfg.out_dir, "user_ids.csv"));
  write_id_map(all.items(), join(cfg.out_dir, "item_ids.csv"));
  write_manifest({{"stage", "prepare"},
                  {"input", cfg.input},
                  {"format", cfg.format == InteractionFormat::kCsv ? "csv" : "movielens-dat"},
                  {"split", format_double(cfg.split.train_fraction) + "," +
                                format_double(cfg.split.valid_fraction) + "," +
                                format_double(cfg.split.test_fraction)},
                  {"seed", std::to_string(cfg.split.seed)},
                  {"n_users", std::to_string(all.n_users())},
                  {"n_items", std::to_string(all.n_items())},
                  {"nnz", std::to_string(all.nnz())},
                  {"train_nnz", std::to_string(split.train.nnz())},
                  {"valid_nnz", std::to_string(split.valid.nnz())},
                  {"test_nnz", std::to_string(split.test.nnz())}},
                 join(cfg.out_dir, "manifest.txt"));
  return split;
}

Split load_prepared(const std::string& dir) {
  auto users = std::make_shared<const IdMap>(read_id_map(join(dir, "user_ids.csv")));
  auto items = std::make_shared<const IdMap>(read_id_map(join(dir, "item_ids.csv")));
  return Split{load_split_file(join(dir, "train.csv"), users, items),
               load_split_file(join(dir, "valid.csv"), users, items),
               load_split_file(join(dir, "test.csv"), users, items)};
}

SvdFactors cached_svd(const RatingMatrix& train, const SvdConfig& cfg, const std::string& cache_root,
                      std::string* cache_dir) {
  if (cache_root.empty()) return truncated_svd(train, cfg);
  const std::string dir = join(cache_root, svd_cache_key(train, cfg));
  if (cache_dir) *cache_dir = dir;
  if (fs::exists(join(dir, "sigma.csv"))) {
    SvdFactors f = load_factors(dir);
    if (f.n_users() != train.n_users() || f.n_items() != train.n_items()) {
      throw DimensionError("cached factors in '" + dir + "' do not match the training matrix");
    }
    return f;
  }
  SvdFactors f = truncated_svd(train, cfg);
  ensure_dir(dir);
  save_factors(f, dir);
  return f;
}

void save_lambda_csv(const Eigen::VectorXd& lambda, const std::string& path) {
  std::ostringstream out;
  out << "user_internal_index,lambda\n";
  for (Eigen::Index u = 0; u < lambda.size(); ++u) out << u << ',' << format_double(lambda(u)) << '\n';
  write_file(path, out.str());
}

Eigen::VectorXd load_lambda_csv(const std::string& path) {
  const std::string text = read_file(path);
  const auto lines = split_fields(text, "\n");
  if (lines.empty() || trim(lines[0]) != "user_internal_index,lambda") {
    throw ParseError(path, 1, "expected header 'user_internal_index,lambda'");
  }
  std::vector<double> values;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    if (trim(lines[k]).empty()) continue;
    const auto f = split_fields(lines[k], ",");
    if (f.size() != 2) throw ParseError(path, k + 1, "expected 2 fields");
    try {
      if (parse_unsigned(f[0]) != values.size()) throw ValidationError("indices must be dense and ordered");
      values.push_back(parse_double(f[1]));
    } catch (const ValidationError& e) {
      throw ParseError(path, k + 1, e.what());
    }
  }
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

EigenSimRun run_train_eigensim(const Split& split, const EigenSimTrainConfig& cfg) {
  auto train_ptr = std::make_shared<const RatingMatrix>(split.train);
  std::string cache_dir;
  auto factors = std::make_shared<const SvdFactors>(cached_svd(split.train, cfg.svd, cfg.svd_cache_root, &cache_dir));
  const EigenSimModel initial = init_model(factors, train_ptr);
  TrainResult trained = train(initial, cfg.use_validation ? &split.valid : nullptr, cfg.bpr);

  if (!cfg.out_dir.empty()) {
    ensure_dir(cfg.out_dir);
    save_lambda_csv(trained.model.lambda(), join(cfg.out_dir, "lambda.csv"));
    write_file(join(cfg.out_dir, "training_log.csv"), trained.log.to_csv());
    write_manifest({{"stage", "train"},
                    {"model", "eigensim"},
                    {"svd_cache", cache_dir},
                    {"rank", std::to_string(cfg.svd.target_rank)},
                    {"effective_rank", std::to_string(factors->rank())},
                    {"sigma_cutoff", format_double(cfg.svd.sigma_cutoff)},
                    {"svd_max_iter", std::to_string(cfg.svd.max_iterations)},
                    {"svd_tol", format_double(cfg.svd.convergence_tol)},
                    {"svd_seed", std::to_string(cfg.svd.seed)},
                    {"oversampling", std::to_string(cfg.svd.oversampling)},
                    {"lr", format_double(cfg.bpr.learning_rate)},
                    {"epochs", std::to_string(cfg.bpr.epochs)},
                    {"samples_per_epoch", std::to_string(cfg.bpr.samples_per_epoch)},
                    {"l2", format_double(cfg.bpr.l2_reg)},
                    {"seed", std::to_string(cfg.bpr.seed)},
                    {"patience", std::to_string(cfg.bpr.early_stop_patience)},
                    {"eval_k", std::to_string(cfg.bpr.eval_k)},
                    {"use_validation", cfg.use_validation ? "true" : "false"},
                    {"best_epoch", trained.log.best_epoch ? std::to_string(*trained.log.best_epoch) : ""}},
                   join(cfg.out_dir, "manifest.txt"));
  }
  return {std::move(trained.model), std::move(trained.log), cache_dir};
}

EigenSimModel load_eigensim(const std::string& model_dir, const Split& split) {
  const auto manifest = read_manifest(join(model_dir, "manifest.txt"));
  auto it = manifest.find("svd_cache");
  if (it == manifest.end() || it->second.empty()) {
    throw ValidationError("'" + model_dir + "' has no svd_cache entry in its manifest");
  }
  auto factors = std::make_shared<const SvdFactors>(load_factors(it->second));
  EigenSimModel model = init_model(factors, std::make_shared<const RatingMatrix>(split.train));
  model.set_lambda(load_lambda_csv(join(model_dir, "lambda.csv")));
  return model;
}

namespace {

void write_baseline(const ItemSimilarityModel& model, const std::string& out_dir) {
  if (out_dir.empty()) return;
  ensure_dir(out_dir);
  save_similarity_csv(model, join(out_dir, "similarity.csv"));
  Manifest manifest = {{"stage", "train"}, {"model", model.name}};
  manifest.insert(manifest.end(), model.params.begin(), model.params.end());
  write_manifest(manifest, join(out_dir, "manifest.txt"));
}

}  // namespace

ItemSimilarityModel run_train_itemknn(const Split& split, const KnnConfig& cfg, const std::string& out_dir) {
  ItemSimilarityModel model = fit_item_knn(split.train, cfg);
  write_baseline(model, out_dir);
  return model;
}

ItemSimilarityModel run_train_slim(const Split& split, const SlimConfig& cfg, const std::string& out_dir) {
  ItemSimilarityModel model = fit_slim(split.train, cfg);
  write_baseline(model, out_dir);
  return model;
}

std::vector<ModelEvaluation> run_evaluate(const Split& split, const Eigen::VectorXd& lambda,
                                          const std::vector<NamedScorer>& models,
                                          const EvaluateConfig& cfg) {
  if (static_cast<std::size_t>(lambda.size()) != split.train.n_users()) {
    throw DimensionError("lambda has " + std::to_string(lambda.size()) + " entries, dataset has " +
                         std::to_string(split.train.n_users()) + " users");
  }
  std::vector<ModelEvaluation> out;
  for (const NamedScorer& m : models) {
    ModelEvaluation ev;
    ev.name = m.name;
    ev.result = map_at_k(m.score, split.train, split.test, cfg.k);
    attach_lambda(ev.result.users, lambda);
    ev.lambda_groups = group_by_lambda(ev.result.users, cfg.n_groups);
    ev.profile_groups = group_by_profile_length(ev.result.users, cfg.n_groups);
    ev.report = confidence_report(ev.result.users, ev.lambda_groups, ev.profile_groups);
    out.push_back(std::move(ev));
  }

  if (!cfg.out_dir.empty()) {
    ensure_dir(cfg.out_dir);
    write_scatter_csv(lambda, profile_lengths(split.train), join(cfg.out_dir, "figure2_scatter.csv"));
    std::ostringstream summary;
    summary << "model,map_at_k,n_evaluated,group.map_lambda,group.map_profile_length,"
               "user.lambda_profile_length\n";
    for (const auto& ev : out) {
      const std::string dir = join(cfg.out_dir, ev.name);
      ensure_dir(dir);
      write_lambda_groups_csv(ev.lambda_groups, join(dir, "figure1_groups.csv"));
      write_profile_groups_csv(ev.profile_groups, join(dir, "profile_groups.csv"));
      write_correlations_csv(ev.report, join(dir, "correlations.csv"));
      summary << ev.name << ',' << format_double(ev.result.map) << ',' << ev.result.n_evaluated << ','
              << format_double(ev.report.per_group.map_lambda) << ','
              << format_double(ev.report.per_group.map_profile) << ','
              << format_double(ev.report.per_user.lambda_profile) << '\n';
    }
    write_file(join(cfg.out_dir, "summary.csv"), summary.str());
    write_manifest({{"stage", "evaluate"},
                    {"k", std::to_string(cfg.k)},
                    {"groups", std::to_string(cfg.n_groups)}},
                   join(cfg.out_dir, "manifest.txt"));
  }
  return out;
}

}  // namespace eigensim
