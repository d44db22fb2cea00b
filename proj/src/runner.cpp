#include "authpipe/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "authpipe/errors.hpp"
#include "authpipe/rng.hpp"
#include "authpipe/serialize.hpp"

#ifndef AUTHPIPE_VERSION
#define AUTHPIPE_VERSION "0.0.0"
#endif

namespace authpipe {

std::string_view to_string(ContrastName name) {
  switch (name) {
    case ContrastName::no_synthetic:
      return "no_synthetic";
    case ContrastName::raw_gans:
      return "raw_gans";
    case ContrastName::tuned_gans:
      return "tuned_gans";
    case ContrastName::diffusion:
      return "diffusion";
    case ContrastName::diffusion_plus_gans:
      return "diffusion_plus_gans";
  }
  return "?";
}

ContrastName contrast_from_string(std::string_view name) {
  for (ContrastName c : kAllContrasts) {
    if (to_string(c) == name) return c;
  }
  throw ValidationError("unknown contrast '" + std::string(name) +
                        "' (known: no_synthetic, raw_gans, tuned_gans, "
                        "diffusion, diffusion_plus_gans)");
}

std::vector<ImageSetLabel> contrast_labels(const ContrastConfig& c) {
  std::vector<ImageSetLabel> labels = {ImageSetLabel::proxies};
  if (c.include_imitations) labels.push_back(ImageSetLabel::imitations);
  switch (c.name) {
    case ContrastName::no_synthetic:
      break;
    case ContrastName::raw_gans:
      labels.push_back(ImageSetLabel::raw_gans);
      break;
    case ContrastName::tuned_gans:
      labels.push_back(ImageSetLabel::tuned_gans);
      break;
    case ContrastName::diffusion:
      labels.push_back(ImageSetLabel::diffusion);
      break;
    case ContrastName::diffusion_plus_gans:
      labels.push_back(ImageSetLabel::diffusion);
      labels.push_back(ImageSetLabel::tuned_gans);
      break;
  }
  return labels;
}

MatrixMode matrix_mode_from_string(std::string_view name) {
  if (name == "with" || name == "with_forgeries") {
    return MatrixMode::with_forgeries;
  }
  if (name == "without" || name == "without_forgeries") {
    return MatrixMode::without_forgeries;
  }
  if (name == "both") return MatrixMode::both;
  throw ValidationError("unknown matrix mode '" + std::string(name) +
                        "' (known: with, without, both)");
}

std::vector<ExperimentConfig> enumerate_matrix(
    const std::string& artist_tag, const std::vector<std::string>& backbones,
    MatrixMode mode, const TrainConfig& base_train,
    const std::filesystem::path& manifest_file,
    const std::filesystem::path& split_file,
    const std::filesystem::path& cache_dir) {
  std::vector<bool> modes;
  if (mode == MatrixMode::with_forgeries || mode == MatrixMode::both) {
    modes.push_back(true);
  }
  if (mode == MatrixMode::without_forgeries || mode == MatrixMode::both) {
    modes.push_back(false);
  }

  std::vector<ExperimentConfig> configs;
  for (bool include_imitations : modes) {
    for (ContrastName contrast : kAllContrasts) {
      for (const std::string& backbone : backbones) {
        ExperimentConfig cfg;
        cfg.artist_tag = artist_tag;
        cfg.contrast = {contrast, include_imitations};
        cfg.backbone = backbone_spec(backbone);
        cfg.train_cfg = base_train;
        cfg.manifest_file = manifest_file;
        cfg.split_file = split_file;
        cfg.cache_dir = cache_dir;
        configs.push_back(std::move(cfg));
      }
    }
  }
  return configs;
}

std::string config_fingerprint(const ExperimentConfig& cfg) {
  // Scientific identity only; data locations don't change the cell.
  nlohmann::json j;
  j["artist"] = cfg.artist_tag;
  j["contrast"] = {{"name", std::string(to_string(cfg.contrast.name))},
                   {"include_imitations", cfg.contrast.include_imitations}};
  j["backbone"] = {{"identifier", cfg.backbone.identifier},
                   {"input_side", cfg.backbone.input_side},
                   {"pretrained_source", cfg.backbone.pretrained_source}};
  j["train"] = {{"learning_rate", cfg.train_cfg.learning_rate},
                {"batch_size", cfg.train_cfg.batch_size},
                {"max_epochs", cfg.train_cfg.max_epochs},
                {"early_stop_patience", cfg.train_cfg.early_stop_patience},
                {"seed", cfg.train_cfg.seed}};
  const std::uint64_t h = fnv1a64(j.dump());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

// --- ResultsStore ------------------------------------------------------------

namespace {

nlohmann::json cell_to_json(const CellResult& row) {
  nlohmann::json j;
  j["fingerprint"] = row.fingerprint;
  j["split_index"] = row.split_index;
  j["status"] = row.status;
  if (!row.error.empty()) j["error"] = row.error;
  j["config"] = experiment_config_to_json(row.config);
  j["train_meta"] = {{"seed", row.train_meta.seed},
                     {"best_epoch", row.train_meta.best_epoch},
                     {"epochs_run", row.train_meta.epochs_run},
                     {"final_train_loss", row.train_meta.final_train_loss},
                     {"optimizer", row.train_meta.optimizer},
                     {"code_version", row.train_meta.code_version}};
  j["eval"] = eval_report_to_json(row.eval);
  return j;
}

CellResult cell_from_json(const nlohmann::json& j) {
  CellResult row;
  row.fingerprint = j.at("fingerprint").get<std::string>();
  row.split_index = j.at("split_index").get<int>();
  row.status = j.at("status").get<std::string>();
  row.error = j.value("error", std::string());
  row.config = experiment_config_from_json(j.at("config"));
  const auto& m = j.at("train_meta");
  row.train_meta.seed = m.at("seed").get<std::uint64_t>();
  row.train_meta.best_epoch = m.at("best_epoch").get<int>();
  row.train_meta.epochs_run = m.at("epochs_run").get<int>();
  row.train_meta.final_train_loss = m.at("final_train_loss").get<double>();
  row.train_meta.optimizer = m.at("optimizer").get<std::string>();
  row.train_meta.code_version = m.at("code_version").get<std::string>();
  row.eval = eval_report_from_json(j.at("eval"));
  return row;
}

}  // namespace

ResultsStore::ResultsStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
  std::ifstream in(file());
  if (!in) return;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const nlohmann::json j = nlohmann::json::parse(line);
      keys_.emplace(j.at("fingerprint").get<std::string>(),
                    j.at("split_index").get<int>());
    } catch (const nlohmann::json::exception& e) {
      throw PipelineError("corrupt results store at " + file().string() +
                          " line " + std::to_string(line_no) + ": " +
                          e.what());
    }
  }
}

std::filesystem::path ResultsStore::file() const {
  return dir_ / "results.jsonl";
}

bool ResultsStore::contains(const std::string& fingerprint,
                            int split_index) const {
  std::lock_guard lock(mutex_);
  return keys_.count({fingerprint, split_index}) > 0;
}

void ResultsStore::append(const CellResult& row) {
  std::lock_guard lock(mutex_);
  if (keys_.count({row.fingerprint, row.split_index}) > 0) {
    throw PipelineError("cell (" + row.fingerprint + ", split " +
                        std::to_string(row.split_index) +
                        ") already recorded; rerun with --force to replace");
  }
  std::ofstream out(file(), std::ios::app);
  out << cell_to_json(row).dump() << "\n";
  if (!out) throw PipelineError("cannot append to " + file().string());
  keys_.emplace(row.fingerprint, row.split_index);
}

void ResultsStore::replace(const CellResult& row) {
  std::lock_guard lock(mutex_);
  std::vector<nlohmann::json> rows;
  {
    std::ifstream in(file());
    std::string line;
    while (in && std::getline(in, line)) {
      if (line.empty()) continue;
      nlohmann::json j = nlohmann::json::parse(line);
      if (j.at("fingerprint").get<std::string>() == row.fingerprint &&
          j.at("split_index").get<int>() == row.split_index) {
        continue;  // dropped; the new row is appended below
      }
      rows.push_back(std::move(j));
    }
  }
  rows.push_back(cell_to_json(row));
  const std::filesystem::path tmp = file().string() + ".tmp";
  {
    std::ofstream out(tmp);
    for (const auto& j : rows) out << j.dump() << "\n";
    if (!out) throw PipelineError("cannot rewrite " + file().string());
  }
  std::filesystem::rename(tmp, file());
  keys_.emplace(row.fingerprint, row.split_index);
}

std::vector<CellResult> ResultsStore::rows() const {
  std::lock_guard lock(mutex_);
  std::vector<CellResult> out;
  std::ifstream in(file());
  std::string line;
  while (in && std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(cell_from_json(nlohmann::json::parse(line)));
  }
  return out;
}

// --- Cell execution ----------------------------------------------------------

namespace {

std::vector<EvalGroup> eval_groups_for(const RunOptions& opts) {
  std::vector<EvalGroup> groups(kPaperEvalGroups.begin(),
                                kPaperEvalGroups.end());
  groups.push_back(EvalGroup::proxies);  // stored though the tables skip it
  if (opts.eval_raw_gans) groups.push_back(EvalGroup::raw_gans);
  return groups;
}

struct FeatureTable {
  // image_id -> one feature vector per patch
  std::map<std::string, std::vector<std::vector<double>>> by_image;
};

FeatureTable load_feature_table(const DatasetManifest& manifest,
                                const std::filesystem::path& cache_dir,
                                const Backbone& backbone,
                                const std::vector<ImageSetLabel>& labels) {
  FeatureTable table;
  std::vector<double> buf(static_cast<std::size_t>(backbone.feature_dim()));
  for (const ImageRecord& rec : manifest.records) {
    if (std::find(labels.begin(), labels.end(), rec.set_label) ==
        labels.end()) {
      continue;
    }
    const auto patches =
        load_cached_patches(cache_dir, manifest.artist_tag, rec.image_id);
    auto& vecs = table.by_image[rec.image_id];
    vecs.reserve(patches.size());
    for (const PatchRecord& p : patches) {
      backbone.features(p, buf);
      vecs.push_back(buf);
    }
  }
  return table;
}

}  // namespace

TrainedModel train_cell(const ExperimentConfig& cfg, int split_index,
                        const DatasetManifest& manifest,
                        const SplitPlan& plan, TrainMeta* meta) {
  const std::string fingerprint = config_fingerprint(cfg);
  const std::vector<ImageSetLabel> contrast = contrast_labels(cfg.contrast);
  std::vector<ImageSetLabel> training_labels = contrast;
  training_labels.push_back(ImageSetLabel::authentic);

  const std::unique_ptr<Backbone> backbone = build_backbone(cfg.backbone);
  const FeatureTable table = load_feature_table(
      manifest, cfg.cache_dir, *backbone, training_labels);

  std::vector<LabeledFeatures> train_set;
  std::vector<LabeledFeatures> val_set;
  std::set<std::string> fit_images;
  for (const ImageRecord& rec : manifest.records) {
    auto feat_it = table.by_image.find(rec.image_id);
    if (feat_it == table.by_image.end()) continue;
    auto assign_it = plan.assignment.find(rec.image_id);
    if (assign_it == plan.assignment.end()) {
      throw ValidationError("image '" + rec.image_id +
                            "' missing from split plan " +
                            std::to_string(split_index));
    }
    if (assign_it->second == Subset::test) continue;
    std::vector<LabeledFeatures>& dst =
        assign_it->second == Subset::train ? train_set : val_set;
    for (const auto& f : feat_it->second) {
      dst.push_back({f, training_class(rec.set_label)});
    }
    fit_images.insert(rec.image_id);
  }

  TrainConfig train_cfg = cfg.train_cfg;
  train_cfg.seed =
      derive_seed(derive_seed(cfg.train_cfg.seed, fnv1a64(fingerprint)),
                  static_cast<std::uint64_t>(split_index));
  if (meta) {
    meta->seed = train_cfg.seed;
    meta->code_version = AUTHPIPE_VERSION;
  }

  // No image that influences the fit may be scored later.
  for (const auto& [image_id, subset] : plan.assignment) {
    if (subset == Subset::test && fit_images.count(image_id) > 0) {
      throw PipelineError("test purity violation for image '" + image_id +
                          "'");
    }
  }

  TrainedModel model = train(build_model(cfg.backbone), std::move(train_set),
                             std::move(val_set), train_cfg);
  if (meta) {
    meta->best_epoch = model.best_epoch;
    meta->epochs_run = static_cast<int>(model.training_log.size());
    meta->final_train_loss =
        model.training_log.empty() ? 0.0
                                   : model.training_log.back().train_loss;
  }
  return model;
}

CellResult run_cell(const ExperimentConfig& cfg, int split_index,
                    const DatasetManifest& manifest, const SplitPlan& plan,
                    const RunOptions& opts) {
  CellResult result;
  result.fingerprint = config_fingerprint(cfg);
  result.config = cfg;
  result.split_index = split_index;

  TrainedModel model;
  try {
    model = train_cell(cfg, split_index, manifest, plan, &result.train_meta);
  } catch (const TrainingDiverged& e) {
    result.status = "failed";
    result.error = e.what();
    return result;
  }

  const std::unique_ptr<Backbone> backbone = build_backbone(cfg.backbone);
  const PatchProvider provider = [&](const std::string& image_id) {
    return load_cached_patches(cfg.cache_dir, manifest.artist_tag, image_id);
  };
  result.eval = evaluate(model, *backbone, plan, manifest, provider,
                         eval_groups_for(opts), opts.aggregation);
  result.status = "ok";
  return result;
}

void run_matrix(const std::vector<ExperimentConfig>& configs,
                const DatasetManifest& manifest,
                const std::vector<SplitPlan>& splits, ResultsStore& store,
                const RunOptions& opts) {
  struct Cell {
    const ExperimentConfig* cfg;
    const SplitPlan* plan;
    std::string fingerprint;
  };
  std::vector<Cell> cells;
  for (const ExperimentConfig& cfg : configs) {
    const std::string fp = config_fingerprint(cfg);
    for (const SplitPlan& plan : splits) {
      if (store.contains(fp, plan.split_index)) {
        if (!opts.force) continue;
      }
      cells.push_back({&cfg, &plan, fp});
    }
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      try {
        const Cell& cell = cells[i];
        CellResult row =
            run_cell(*cell.cfg, cell.plan->split_index, manifest, *cell.plan,
                     opts);
        if (store.contains(cell.fingerprint, cell.plan->split_index)) {
          store.replace(row);
        } else {
          store.append(row);
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = cells.size();
        return;
      }
    }
  };

  const int n_workers = std::max(1, opts.worker_count);
  if (n_workers == 1 || cells.size() < 2) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_workers; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
}

// --- Summaries ----------------------------------------------------------------

namespace {

int backbone_rank(const std::string& identifier) {
  if (identifier == "swin_base") return 0;
  if (identifier == "efficientnet_b0") return 1;
  if (identifier == "toy_linear") return 2;
  return 3;
}

int contrast_rank(ContrastName name) {
  for (std::size_t i = 0; i < kAllContrasts.size(); ++i) {
    if (kAllContrasts[i] == name) return static_cast<int>(i);
  }
  return static_cast<int>(kAllContrasts.size());
}

int group_rank(EvalGroup g) { return static_cast<int>(g); }

}  // namespace

std::vector<SummaryRow> summarize_matrix(const std::vector<CellResult>& rows,
                                         const SummarizeOptions& opts) {
  struct Bucket {
    const CellResult* sample = nullptr;
    std::map<EvalGroup, std::map<int, double>> accuracies;  // by split
    std::set<int> ok_splits;
  };
  std::map<std::string, Bucket> buckets;
  for (const CellResult& row : rows) {
    if (row.status != "ok") continue;
    Bucket& b = buckets[row.fingerprint];
    if (!b.sample) b.sample = &row;
    b.ok_splits.insert(row.split_index);
    for (const auto& [group, res] : row.eval.per_group) {
      b.accuracies[group][row.split_index] = res.accuracy;
    }
  }

  std::vector<SummaryRow> out;
  for (const auto& [fingerprint, bucket] : buckets) {
    for (const auto& [group, by_split] : bucket.accuracies) {
      std::vector<double> values;
      values.reserve(by_split.size());
      for (const auto& [split, acc] : by_split) values.push_back(acc);

      SummaryRow row;
      row.fingerprint = fingerprint;
      row.artist_tag = bucket.sample->config.artist_tag;
      row.contrast = bucket.sample->config.contrast;
      row.backbone = bucket.sample->config.backbone.identifier;
      row.group = group;
      row.n_splits = static_cast<int>(bucket.ok_splits.size());
      row.incomplete = row.n_splits < 10;
      if (opts.uncertainty == "empirical") {
        row.summary = summarize_empirical(values);
      } else {
        row.summary = summarize(values, opts.n_bootstrap, opts.seed);
      }
      out.push_back(std::move(row));
    }
  }

  std::sort(out.begin(), out.end(),
            [](const SummaryRow& a, const SummaryRow& b) {
              return std::tuple(a.artist_tag, !a.contrast.include_imitations,
                                contrast_rank(a.contrast.name),
                                backbone_rank(a.backbone), a.backbone,
                                group_rank(a.group)) <
                     std::tuple(b.artist_tag, !b.contrast.include_imitations,
                                contrast_rank(b.contrast.name),
                                backbone_rank(b.backbone), b.backbone,
                                group_rank(b.group));
            });
  return out;
}

void save_summaries(const std::filesystem::path& file,
                    const std::vector<SummaryRow>& rows,
                    const SummarizeOptions& opts) {
  nlohmann::json j;
  j["uncertainty"] = opts.uncertainty;
  j["n_bootstrap"] = opts.uncertainty == "empirical" ? 0 : opts.n_bootstrap;
  j["seed"] = opts.seed;
  j["rows"] = nlohmann::json::array();
  for (const SummaryRow& row : rows) {
    j["rows"].push_back(
        {{"fingerprint", row.fingerprint},
         {"artist_tag", row.artist_tag},
         {"contrast", std::string(to_string(row.contrast.name))},
         {"include_imitations", row.contrast.include_imitations},
         {"backbone", row.backbone},
         {"group", std::string(to_string(row.group))},
         {"n_splits", row.n_splits},
         {"incomplete", row.incomplete},
         {"values", row.summary.values},
         {"median", row.summary.median},
         {"half_width", row.summary.half_width},
         {"formatted", format_parenthesis(row.summary.median,
                                          row.summary.half_width)}});
  }
  std::ofstream out(file);
  out << j.dump(2) << "\n";
  if (!out) throw PipelineError("cannot write summaries to " + file.string());
}

}  // namespace authpipe
