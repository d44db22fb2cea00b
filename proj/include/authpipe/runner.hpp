#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "authpipe/classifier.hpp"
#include "authpipe/evaluator.hpp"
#include "authpipe/manifest.hpp"
#include "authpipe/robust_stats.hpp"
#include "authpipe/splitter.hpp"

namespace authpipe {

enum class ContrastName {
  no_synthetic,
  raw_gans,
  tuned_gans,
  diffusion,
  diffusion_plus_gans,
};

inline constexpr std::array<ContrastName, 5> kAllContrasts = {
    ContrastName::no_synthetic, ContrastName::raw_gans,
    ContrastName::tuned_gans, ContrastName::diffusion,
    ContrastName::diffusion_plus_gans};

std::string_view to_string(ContrastName name);
ContrastName contrast_from_string(std::string_view name);

struct ContrastConfig {
  ContrastName name = ContrastName::no_synthetic;
  bool include_imitations = true;

  bool operator==(const ContrastConfig&) const = default;
};

// Labels forming the training contrast set (class 0): proxies, plus
// imitations when included, plus the synthetic sets the name selects.
std::vector<ImageSetLabel> contrast_labels(const ContrastConfig& c);

struct ExperimentConfig {
  std::string artist_tag;
  ContrastConfig contrast;
  BackboneSpec backbone;
  TrainConfig train_cfg;
  std::filesystem::path manifest_file;
  std::filesystem::path split_file;
  std::filesystem::path cache_dir;

  bool operator==(const ExperimentConfig&) const = default;
};

enum class MatrixMode { with_forgeries, without_forgeries, both };
MatrixMode matrix_mode_from_string(std::string_view name);

// The experiment matrix: contrasts x forgery modes x backbones.
std::vector<ExperimentConfig> enumerate_matrix(
    const std::string& artist_tag, const std::vector<std::string>& backbones,
    MatrixMode mode, const TrainConfig& base_train = {},
    const std::filesystem::path& manifest_file = {},
    const std::filesystem::path& split_file = {},
    const std::filesystem::path& cache_dir = {});

// FNV-1a over the canonicalized scientific identity (artist, contrast,
// backbone, training hyperparameters); 16 hex characters.
std::string config_fingerprint(const ExperimentConfig& cfg);

struct TrainMeta {
  std::uint64_t seed = 0;
  int best_epoch = -1;
  int epochs_run = 0;
  double final_train_loss = 0.0;
  std::string optimizer = "sgd";
  std::string code_version;
};

struct CellResult {
  std::string fingerprint;
  ExperimentConfig config;
  int split_index = 0;
  std::string status;  // "ok" or "failed"
  std::string error;   // set when failed
  EvalReport eval;
  TrainMeta train_meta;
};

// Append-only JSON-lines store at <dir>/results.jsonl. (fingerprint,
// split_index) is unique; replacing an existing cell requires force.
class ResultsStore {
 public:
  explicit ResultsStore(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path file() const;

  bool contains(const std::string& fingerprint, int split_index) const;
  void append(const CellResult& row);           // throws if present
  void replace(const CellResult& row);          // force path
  std::vector<CellResult> rows() const;

 private:
  std::filesystem::path dir_;
  std::set<std::pair<std::string, int>> keys_;
  mutable std::mutex mutex_;
};

struct RunOptions {
  bool force = false;
  bool eval_raw_gans = false;
  Aggregation aggregation = Aggregation::mean_probability;
  int worker_count = 1;
};

// Assembles the configured training/validation sets from the patch cache
// and fits the head; shared between run_cell and `authpipe train`.
TrainedModel train_cell(const ExperimentConfig& cfg, int split_index,
                        const DatasetManifest& manifest,
                        const SplitPlan& plan, TrainMeta* meta = nullptr);

// Trains the configured cell on the split's train partition, evaluates the
// test partition and persists the row. Training divergence is recorded as a
// failed cell.
CellResult run_cell(const ExperimentConfig& cfg, int split_index,
                    const DatasetManifest& manifest, const SplitPlan& plan,
                    const RunOptions& opts);

// Runs every (config, split) cell not yet in the store.
void run_matrix(const std::vector<ExperimentConfig>& configs,
                const DatasetManifest& manifest,
                const std::vector<SplitPlan>& splits, ResultsStore& store,
                const RunOptions& opts);

struct SummaryRow {
  std::string fingerprint;
  std::string artist_tag;
  ContrastConfig contrast;
  std::string backbone;
  EvalGroup group = EvalGroup::originals;
  MetricSummary summary;
  int n_splits = 0;
  bool incomplete = false;  // fewer than 10 completed splits

  bool operator==(const SummaryRow&) const = default;
};

struct SummarizeOptions {
  std::string uncertainty = "bootstrap";  // or "empirical"
  int n_bootstrap = 10000;
  std::uint64_t seed = 0;
};

// robust_stats over per-split accuracies for every (config, group) present.
std::vector<SummaryRow> summarize_matrix(const std::vector<CellResult>& rows,
                                         const SummarizeOptions& opts = {});

void save_summaries(const std::filesystem::path& file,
                    const std::vector<SummaryRow>& rows,
                    const SummarizeOptions& opts);

}  // namespace authpipe
