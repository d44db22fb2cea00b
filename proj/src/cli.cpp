#include "authpipe/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "authpipe/errors.hpp"
#include "authpipe/evaluator.hpp"
#include "authpipe/manifest.hpp"
#include "authpipe/patcher.hpp"
#include "authpipe/report.hpp"
#include "authpipe/robust_stats.hpp"
#include "authpipe/runner.hpp"
#include "authpipe/serialize.hpp"
#include "authpipe/splitter.hpp"
#include "authpipe/synthetic.hpp"

#ifndef AUTHPIPE_VERSION
#define AUTHPIPE_VERSION "0.0.0"
#endif

namespace authpipe {

namespace fs = std::filesystem;

GlobalConfig load_global_config(const fs::path& config_file) {
  GlobalConfig g;
  if (!config_file.empty() && fs::exists(config_file)) {
    std::ifstream in(config_file);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("config file is not valid JSON (" +
                            config_file.string() + "): " + e.what());
    }
    g.cache_dir = j.value("cache_dir", g.cache_dir.string());
    g.results_dir = j.value("results_dir", g.results_dir.string());
    g.master_seed = j.value("master_seed", g.master_seed);
    g.worker_count = j.value("worker_count", g.worker_count);
  }
  if (const char* env = std::getenv("AUTHPIPE_CACHE")) {
    if (*env != '\0') g.cache_dir = env;
  }
  return g;
}

namespace {

void write_effective_config(const fs::path& dir, const std::string& command,
                            nlohmann::json extra) {
  fs::create_directories(dir);
  extra["command"] = command;
  extra["version"] = AUTHPIPE_VERSION;
  std::ofstream out(dir / "effective_config.json");
  out << extra.dump(2) << "\n";
  if (!out) {
    throw PipelineError("cannot write effective_config.json under " +
                        dir.string());
  }
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct RunFlags {
  std::string artist;
  fs::path manifest_file;
  fs::path split_file;
  fs::path cache_dir;
  fs::path out_dir;
  std::string matrix = "both";
  std::string backbones = "swin_base,efficientnet_b0";
  double lr = 1e-5;
  int batch_size = 32;
  int max_epochs = 50;
  int patience = 5;
  std::uint64_t seed = 0;
  int workers = 1;
  bool force = false;
  bool eval_raw_gans = false;
  std::string aggregation = "mean";
};

Aggregation aggregation_from_string(const std::string& name) {
  if (name == "mean") return Aggregation::mean_probability;
  if (name == "majority") return Aggregation::majority_vote;
  throw ValidationError("unknown aggregation '" + name +
                        "' (known: mean, majority)");
}

int cmd_ingest(const fs::path& manifest_file, bool check_table1,
               int workers) {
  const DatasetManifest m = ingest_manifest(manifest_file, workers);
  std::cerr << "ingested " << m.records.size() << " images for '"
            << m.artist_tag << "'\n";
  if (check_table1) {
    const auto rows = summarize_manifest(m);
    std::size_t total_images = 0, total_patches = 0;
    std::cout << "set,images,patches\n";
    for (const SetSummaryRow& row : rows) {
      std::cout << to_string(row.set_label) << "," << row.image_count << ","
                << row.expected_patch_count << "\n";
      total_images += row.image_count;
      total_patches += row.expected_patch_count;
    }
    std::cout << "total," << total_images << "," << total_patches << "\n";
  }
  return 0;
}

int cmd_patch(const fs::path& manifest_file, int target_side,
              const fs::path& out_dir, int workers) {
  const DatasetManifest m = ingest_manifest(manifest_file, workers);
  const std::size_t n = write_patch_cache(m, target_side, out_dir, workers);
  write_effective_config(out_dir, "patch",
                         {{"manifest", manifest_file.string()},
                          {"target_side", target_side},
                          {"worker_count", workers}});
  std::cerr << "wrote " << n << " patches to " << out_dir.string() << "\n";
  return 0;
}

int cmd_split(const fs::path& manifest_file, int n_splits,
              std::uint64_t seed, const fs::path& out_file, int workers) {
  const DatasetManifest m = ingest_manifest(manifest_file, workers);
  const auto splits = make_splits(m, n_splits, seed);
  save_splits(out_file, splits);
  for (const SplitPlan& plan : splits) {
    for (const std::string& w : plan.warnings) {
      std::cerr << "split " << plan.split_index << ": warning: " << w << "\n";
    }
  }
  std::cerr << "wrote " << splits.size() << " splits to "
            << out_file.string() << "\n";
  return 0;
}

int cmd_train(const fs::path& config_file, int split_index) {
  std::ifstream in(config_file);
  if (!in) {
    throw ValidationError("experiment config not found: " +
                          config_file.string());
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("experiment config is not valid JSON: " +
                          std::string(e.what()));
  }
  ExperimentConfig cfg = experiment_config_from_json(j);
  const fs::path out_base = j.value("out", std::string("runs"));

  const DatasetManifest manifest = ingest_manifest(cfg.manifest_file);
  const auto splits = load_splits(cfg.split_file);
  const SplitPlan* plan = nullptr;
  for (const SplitPlan& p : splits) {
    if (p.split_index == split_index) plan = &p;
  }
  if (!plan) {
    throw ValidationError("split " + std::to_string(split_index) +
                          " not present in " + cfg.split_file.string());
  }

  TrainMeta meta;
  const TrainedModel model =
      train_cell(cfg, split_index, manifest, *plan, &meta);

  const fs::path run_dir = out_base / config_fingerprint(cfg) /
                           ("split_" + std::to_string(split_index));
  fs::create_directories(run_dir);
  save_model(run_dir / "model_best.json", model);
  save_train_log(run_dir / "train_log.json", model);
  write_effective_config(run_dir, "train",
                         {{"config", experiment_config_to_json(cfg)},
                          {"split_index", split_index},
                          {"fingerprint", config_fingerprint(cfg)},
                          {"train_seed", meta.seed}});
  std::cerr << "trained " << config_fingerprint(cfg) << " split "
            << split_index << ": best epoch " << model.best_epoch << ", "
            << meta.epochs_run << " epochs\n";
  return 0;
}

int cmd_eval(const fs::path& model_file, const fs::path& manifest_file,
             const fs::path& split_file, int split_index,
             const fs::path& cache_dir, const fs::path& out_file,
             const std::string& groups_csv, const std::string& aggregation) {
  const TrainedModel model = load_model(model_file);
  const DatasetManifest manifest = ingest_manifest(manifest_file);
  const auto splits = load_splits(split_file);
  const SplitPlan* plan = nullptr;
  for (const SplitPlan& p : splits) {
    if (p.split_index == split_index) plan = &p;
  }
  if (!plan) {
    throw ValidationError("split " + std::to_string(split_index) +
                          " not present in " + split_file.string());
  }
  std::vector<EvalGroup> groups;
  for (const std::string& g : split_csv(groups_csv)) {
    groups.push_back(eval_group_from_string(g));
  }
  const auto backbone = build_backbone(model.backbone);
  const PatchProvider provider = [&](const std::string& image_id) {
    return load_cached_patches(cache_dir, manifest.artist_tag, image_id);
  };
  const EvalReport report =
      evaluate(model, *backbone, *plan, manifest, provider, groups,
               aggregation_from_string(aggregation));

  nlohmann::json out_json = eval_report_to_json(report);
  out_json["split_index"] = split_index;
  out_json["model"] = model_file.string();
  std::ofstream out(out_file);
  out << out_json.dump(2) << "\n";
  if (!out) throw PipelineError("cannot write " + out_file.string());
  std::cerr << "evaluated " << report.predictions.size() << " images -> "
            << out_file.string() << "\n";
  return 0;
}

int cmd_run(const RunFlags& flags) {
  const DatasetManifest manifest =
      ingest_manifest(flags.manifest_file, flags.workers);
  if (manifest.artist_tag != flags.artist) {
    throw ValidationError("manifest artist_tag '" + manifest.artist_tag +
                          "' does not match --artist '" + flags.artist +
                          "'");
  }
  const auto splits = load_splits(flags.split_file);

  TrainConfig base_train;
  base_train.learning_rate = flags.lr;
  base_train.batch_size = flags.batch_size;
  base_train.max_epochs = flags.max_epochs;
  base_train.early_stop_patience = flags.patience;
  base_train.seed = flags.seed;

  const auto configs = enumerate_matrix(
      flags.artist, split_csv(flags.backbones),
      matrix_mode_from_string(flags.matrix), base_train, flags.manifest_file,
      flags.split_file, flags.cache_dir);

  ResultsStore store(flags.out_dir);
  RunOptions opts;
  opts.force = flags.force;
  opts.eval_raw_gans = flags.eval_raw_gans;
  opts.aggregation = aggregation_from_string(flags.aggregation);
  opts.worker_count = flags.workers;

  write_effective_config(
      flags.out_dir, "run",
      {{"artist", flags.artist},
       {"manifest", flags.manifest_file.string()},
       {"splits", flags.split_file.string()},
       {"cache_dir", flags.cache_dir.string()},
       {"matrix", flags.matrix},
       {"backbones", flags.backbones},
       {"train",
        {{"learning_rate", base_train.learning_rate},
         {"batch_size", base_train.batch_size},
         {"max_epochs", base_train.max_epochs},
         {"early_stop_patience", base_train.early_stop_patience},
         {"seed", base_train.seed}}},
       {"worker_count", flags.workers},
       {"aggregation", flags.aggregation},
       {"eval_raw_gans", flags.eval_raw_gans}});

  run_matrix(configs, manifest, splits, store, opts);

  std::size_t ok = 0, failed = 0;
  for (const CellResult& row : store.rows()) {
    (row.status == "ok" ? ok : failed) += 1;
  }
  std::cerr << "results store: " << ok << " ok, " << failed
            << " failed cells in " << store.file().string() << "\n";
  return 0;
}

int cmd_summarize(const fs::path& in_dir, const std::string& uncertainty,
                  int n_bootstrap, std::uint64_t seed,
                  const fs::path& out_file) {
  if (uncertainty != "bootstrap" && uncertainty != "empirical") {
    throw ValidationError("--uncertainty must be bootstrap or empirical");
  }
  ResultsStore store(in_dir);
  const auto rows = store.rows();
  if (rows.empty()) {
    throw ValidationError("no results found in " + in_dir.string());
  }
  SummarizeOptions opts;
  opts.uncertainty = uncertainty;
  opts.n_bootstrap = n_bootstrap;
  opts.seed = seed;
  const auto summaries = summarize_matrix(rows, opts);
  save_summaries(out_file, summaries, opts);
  for (const SummaryRow& row : summaries) {
    if (row.incomplete) {
      std::cerr << "note: " << row.fingerprint << "/"
                << to_string(row.group) << " has only " << row.n_splits
                << "/10 splits\n";
    }
  }
  std::cerr << "wrote " << summaries.size() << " summary rows to "
            << out_file.string() << "\n";
  return 0;
}

int cmd_report(const fs::path& in_dir, const std::string& artist,
               const std::string& kind, const std::string& formats,
               const std::string& uncertainty, int n_bootstrap,
               std::uint64_t seed, const fs::path& out_dir) {
  ResultsStore store(in_dir);
  const auto rows = store.rows();
  if (rows.empty()) {
    throw ValidationError("no results found in " + in_dir.string());
  }
  SummarizeOptions opts;
  opts.uncertainty = uncertainty;
  opts.n_bootstrap = n_bootstrap;
  opts.seed = seed;
  const auto summaries = summarize_matrix(rows, opts);

  std::vector<TableKind> kinds;
  if (kind == "all") {
    kinds = {TableKind::forgery_detection_with,
             TableKind::forgery_detection_without,
             TableKind::synthetic_detection};
  } else if (kind == "forgery_with") {
    kinds = {TableKind::forgery_detection_with};
  } else if (kind == "forgery_without") {
    kinds = {TableKind::forgery_detection_without};
  } else if (kind == "synthetic") {
    kinds = {TableKind::synthetic_detection};
  } else {
    throw ValidationError("unknown --kind '" + kind +
                          "' (known: all, forgery_with, forgery_without, "
                          "synthetic)");
  }

  write_effective_config(out_dir, "report",
                         {{"in", in_dir.string()},
                          {"artist", artist},
                          {"kind", kind},
                          {"formats", formats},
                          {"uncertainty", uncertainty},
                          {"n_bootstrap", n_bootstrap},
                          {"seed", seed}});

  std::size_t n_written = 0;
  for (TableKind k : kinds) {
    ReportSpec spec;
    spec.artist_tag = artist;
    spec.kind = k;
    spec.formats = split_csv(formats);
    try {
      const auto written = write_report(summaries, spec, out_dir);
      n_written += written.size();
      for (const fs::path& p : written) {
        std::cerr << "wrote " << p.string() << "\n";
      }
    } catch (const ValidationError& e) {
      if (kind == "all") {
        std::cerr << "skipping " << to_string(k) << ": " << e.what() << "\n";
      } else {
        throw;
      }
    }
  }
  if (n_written == 0) {
    throw ValidationError("no report files produced; check --artist/--kind");
  }
  return 0;
}

int cmd_prompts(const std::string& artist, const std::string& style,
                const fs::path& contents_file, int count,
                const fs::path& out_file) {
  std::ifstream in(contents_file);
  if (!in) {
    throw ValidationError("contents file not found: " +
                          contents_file.string());
  }
  std::vector<PromptSpec> specs;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
      line.pop_back();
    }
    if (line.empty()) continue;
    specs.push_back({style, line, artist});
  }
  const auto jobs = emit_diffusion_jobs(specs, count);
  save_jobs(out_file, jobs);
  std::cerr << "wrote " << jobs.size() << " generation jobs to "
            << out_file.string() << "\n";
  return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"art authentication pipeline"};
  app.name("authpipe");
  app.require_subcommand(1);
  app.set_version_flag("--version", AUTHPIPE_VERSION);

  fs::path global_config_file = "authpipe.json";
  app.add_option("--config", global_config_file,
                 "global config file (cache_dir, results_dir, master_seed, "
                 "worker_count)");

  int exit_code = 0;
  auto run_guarded = [&exit_code](auto&& fn) {
    return [&exit_code, fn = std::forward<decltype(fn)>(fn)]() {
      exit_code = fn();
    };
  };

  // ingest
  auto* ingest = app.add_subcommand("ingest", "validate a dataset manifest");
  auto ingest_manifest_path = std::make_shared<fs::path>();
  auto ingest_check = std::make_shared<bool>(false);
  auto ingest_workers = std::make_shared<int>(0);
  ingest->add_option("--manifest", *ingest_manifest_path, "manifest JSON")
      ->required();
  ingest->add_flag("--check-table1", *ingest_check,
                   "print per-set image and patch counts");
  ingest->add_option("--workers", *ingest_workers, "verification threads");
  ingest->callback(run_guarded([=]() {
    const GlobalConfig g = load_global_config(global_config_file);
    const int workers = *ingest_workers > 0 ? *ingest_workers : g.worker_count;
    return cmd_ingest(*ingest_manifest_path, *ingest_check, workers);
  }));

  // patch
  auto* patch = app.add_subcommand("patch", "extract patches into a cache");
  auto patch_manifest = std::make_shared<fs::path>();
  auto patch_side = std::make_shared<int>(0);
  auto patch_out = std::make_shared<fs::path>();
  auto patch_workers = std::make_shared<int>(0);
  patch->add_option("--manifest", *patch_manifest, "manifest JSON")
      ->required();
  patch->add_option("--target-side", *patch_side, "patch side (224 or 256)")
      ->required()
      ->check(CLI::IsMember({224, 256}));
  patch->add_option("--out", *patch_out, "cache directory");
  patch->add_option("--workers", *patch_workers, "extraction threads");
  patch->callback(run_guarded([=]() {
    const GlobalConfig g = load_global_config(global_config_file);
    const fs::path out = patch_out->empty() ? g.cache_dir : *patch_out;
    const int workers = *patch_workers > 0 ? *patch_workers : g.worker_count;
    return cmd_patch(*patch_manifest, *patch_side, out, workers);
  }));

  // split
  auto* split = app.add_subcommand("split", "make bootstrapped splits");
  auto split_manifest = std::make_shared<fs::path>();
  auto split_n = std::make_shared<int>(10);
  auto split_seed = std::make_shared<std::uint64_t>(0);
  auto split_seed_set = std::make_shared<bool>(false);
  auto split_out = std::make_shared<fs::path>("splits.json");
  split->add_option("--manifest", *split_manifest, "manifest JSON")
      ->required();
  split->add_option("--n", *split_n, "number of splits");
  split
      ->add_option_function<std::uint64_t>(
          "--seed",
          [=](const std::uint64_t& v) {
            *split_seed = v;
            *split_seed_set = true;
          },
          "master seed")
      ->type_name("UINT");
  split->add_option("--out", *split_out, "output splits.json");
  split->callback(run_guarded([=]() {
    const GlobalConfig g = load_global_config(global_config_file);
    const std::uint64_t seed = *split_seed_set ? *split_seed : g.master_seed;
    return cmd_split(*split_manifest, *split_n, seed, *split_out,
                     g.worker_count);
  }));

  // train
  auto* train = app.add_subcommand("train", "train one experiment cell");
  auto train_config = std::make_shared<fs::path>();
  auto train_split = std::make_shared<int>(0);
  train->add_option("--config", *train_config, "experiment config JSON")
      ->required();
  train->add_option("--split", *train_split, "split index")->required();
  train->callback(
      run_guarded([=]() { return cmd_train(*train_config, *train_split); }));

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate a trained model");
  auto eval_model = std::make_shared<fs::path>();
  auto eval_manifest = std::make_shared<fs::path>();
  auto eval_splits = std::make_shared<fs::path>();
  auto eval_split = std::make_shared<int>(0);
  auto eval_cache = std::make_shared<fs::path>();
  auto eval_out = std::make_shared<fs::path>("eval.json");
  auto eval_groups = std::make_shared<std::string>(
      "originals,forgeries,diffusion,tuned_gans,proxies");
  auto eval_agg = std::make_shared<std::string>("mean");
  eval->add_option("--model", *eval_model, "model_best.json")->required();
  eval->add_option("--manifest", *eval_manifest, "manifest JSON")->required();
  eval->add_option("--splits", *eval_splits, "splits.json")->required();
  eval->add_option("--split", *eval_split, "split index")->required();
  eval->add_option("--cache", *eval_cache, "patch cache directory");
  eval->add_option("--out", *eval_out, "output eval.json");
  eval->add_option("--groups", *eval_groups, "comma-separated groups");
  eval->add_option("--aggregation", *eval_agg, "mean or majority");
  eval->callback(run_guarded([=]() {
    const GlobalConfig g = load_global_config(global_config_file);
    const fs::path cache = eval_cache->empty() ? g.cache_dir : *eval_cache;
    return cmd_eval(*eval_model, *eval_manifest, *eval_splits, *eval_split,
                    cache, *eval_out, *eval_groups, *eval_agg);
  }));

  // run
  auto* run = app.add_subcommand("run", "run the experiment matrix");
  auto flags = std::make_shared<RunFlags>();
  auto run_seed_set = std::make_shared<bool>(false);
  auto run_workers = std::make_shared<int>(0);
  run->add_option("--artist", flags->artist, "artist tag")->required();
  run->add_option("--manifest", flags->manifest_file, "manifest JSON")
      ->required();
  run->add_option("--splits", flags->split_file, "splits.json")->required();
  run->add_option("--cache", flags->cache_dir, "patch cache directory");
  run->add_option("--out", flags->out_dir, "results directory");
  run->add_option("--matrix", flags->matrix, "with, without or both");
  run->add_option("--backbones", flags->backbones,
                  "comma-separated backbone identifiers");
  run->add_option("--lr", flags->lr, "learning rate");
  run->add_option("--batch-size", flags->batch_size, "batch size");
  run->add_option("--max-epochs", flags->max_epochs, "epoch budget");
  run->add_option("--patience", flags->patience, "early stop patience");
  run->add_option_function<std::uint64_t>(
         "--seed",
         [=](const std::uint64_t& v) {
           flags->seed = v;
           *run_seed_set = true;
         },
         "base training seed")
      ->type_name("UINT");
  run->add_option("--workers", *run_workers, "parallel cells");
  run->add_flag("--force", flags->force, "replace existing cells");
  run->add_flag("--eval-raw-gans", flags->eval_raw_gans,
                "also score the raw GAN test group");
  run->add_option("--aggregation", flags->aggregation, "mean or majority");
  run->callback(run_guarded([=]() {
    const GlobalConfig g = load_global_config(global_config_file);
    if (flags->cache_dir.empty()) flags->cache_dir = g.cache_dir;
    if (flags->out_dir.empty()) flags->out_dir = g.results_dir;
    if (!*run_seed_set) flags->seed = g.master_seed;
    flags->workers = *run_workers > 0 ? *run_workers : g.worker_count;
    return cmd_run(*flags);
  }));

  // summarize
  auto* summarize = app.add_subcommand("summarize",
                                       "robust statistics over the results");
  auto sum_in = std::make_shared<fs::path>();
  auto sum_uncertainty = std::make_shared<std::string>("bootstrap");
  auto sum_nboot = std::make_shared<int>(10000);
  auto sum_seed = std::make_shared<std::uint64_t>(0);
  auto sum_out = std::make_shared<fs::path>();
  summarize->add_option("--in", *sum_in, "results directory")->required();
  summarize->add_option("--uncertainty", *sum_uncertainty,
                        "bootstrap or empirical");
  summarize->add_option("--n-bootstrap", *sum_nboot, "bootstrap resamples");
  summarize->add_option("--seed", *sum_seed, "bootstrap seed");
  summarize->add_option("--out", *sum_out,
                        "output file (default <in>/summary.json)");
  summarize->callback(run_guarded([=]() {
    const fs::path out =
        sum_out->empty() ? *sum_in / "summary.json" : *sum_out;
    return cmd_summarize(*sum_in, *sum_uncertainty, *sum_nboot, *sum_seed,
                         out);
  }));

  // report
  auto* report = app.add_subcommand("report", "render tables and charts");
  auto rep_in = std::make_shared<fs::path>();
  auto rep_artist = std::make_shared<std::string>();
  auto rep_kind = std::make_shared<std::string>("all");
  auto rep_formats = std::make_shared<std::string>("csv,markdown,svg");
  auto rep_uncertainty = std::make_shared<std::string>("bootstrap");
  auto rep_nboot = std::make_shared<int>(10000);
  auto rep_seed = std::make_shared<std::uint64_t>(0);
  auto rep_out = std::make_shared<fs::path>("reports");
  report->add_option("--in", *rep_in, "results directory")->required();
  report->add_option("--artist", *rep_artist, "artist tag")->required();
  report->add_option("--kind", *rep_kind,
                     "all, forgery_with, forgery_without or synthetic");
  report->add_option("--formats", *rep_formats, "csv,markdown,svg subset");
  report->add_option("--uncertainty", *rep_uncertainty,
                     "bootstrap or empirical");
  report->add_option("--n-bootstrap", *rep_nboot, "bootstrap resamples");
  report->add_option("--seed", *rep_seed, "bootstrap seed");
  report->add_option("--out", *rep_out, "output directory");
  report->callback(run_guarded([=]() {
    return cmd_report(*rep_in, *rep_artist, *rep_kind, *rep_formats,
                      *rep_uncertainty, *rep_nboot, *rep_seed, *rep_out);
  }));

  // prompts
  auto* prompts = app.add_subcommand("prompts",
                                     "emit diffusion generation jobs");
  auto pr_artist = std::make_shared<std::string>();
  auto pr_style = std::make_shared<std::string>();
  auto pr_contents = std::make_shared<fs::path>();
  auto pr_count = std::make_shared<int>(1);
  auto pr_out = std::make_shared<fs::path>("jobs.json");
  prompts->add_option("--artist", *pr_artist, "artist name")->required();
  prompts->add_option("--style", *pr_style, "style phrase")->required();
  prompts->add_option("--contents", *pr_contents,
                      "file with one content phrase per line")
      ->required();
  prompts->add_option("--count", *pr_count, "images per content phrase");
  prompts->add_option("--out", *pr_out, "output jobs.json");
  prompts->callback(run_guarded([=]() {
    return cmd_prompts(*pr_artist, *pr_style, *pr_contents, *pr_count,
                       *pr_out);
  }));

  // stylegan-cmd
  auto* stylegan = app.add_subcommand(
      "stylegan-cmd", "print the GAN training command for a resolution");
  auto sg_resolution = std::make_shared<int>(0);
  stylegan->add_option("--resolution", *sg_resolution, "256 or 512")
      ->required();
  stylegan->callback(run_guarded([=]() {
    std::cout << stylegan_train_command(*sg_resolution) << "\n";
    return 0;
  }));

  std::vector<const char*> argv;
  argv.push_back("authpipe");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForVersion& e) {
    std::cout << AUTHPIPE_VERSION << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const PipelineError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return exit_code;
}

}  // namespace authpipe
