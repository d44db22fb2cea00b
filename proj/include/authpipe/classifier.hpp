#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "authpipe/patcher.hpp"

namespace authpipe {

struct BackboneSpec {
  std::string identifier;  // "swin_base", "efficientnet_b0", "toy_linear"
  int input_side = 0;      // 224 or 256
  std::string pretrained_source;  // "imagenet" or "none"

  bool operator==(const BackboneSpec&) const = default;
};

// Looks up the known identifiers; throws ValidationError otherwise.
BackboneSpec backbone_spec(const std::string& identifier);

// Feature extractor feeding the sigmoid head. In-tree backbones are fixed
// feature maps; pretrained adapters must implement this interface and
// register via build_backbone.
class Backbone {
 public:
  virtual ~Backbone() = default;
  virtual const BackboneSpec& spec() const = 0;
  virtual int feature_dim() const = 0;
  virtual void features(const PatchRecord& patch,
                        std::span<double> out) const = 0;
};

// Instantiates the extractor. "toy_linear" ships in-tree; the pretrained
// backbones throw PipelineError until an adapter supplies their weights.
std::unique_ptr<Backbone> build_backbone(const BackboneSpec& spec);

struct TrainConfig {
  double learning_rate = 1e-5;
  int batch_size = 32;
  int max_epochs = 50;
  int early_stop_patience = 5;
  std::uint64_t seed = 0;

  bool operator==(const TrainConfig&) const = default;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;

  bool operator==(const EpochStats&) const = default;
};

// Backbone spec plus the single-node sigmoid head and its training history.
struct TrainedModel {
  BackboneSpec backbone;
  std::vector<double> weights;  // feature_dim entries
  double bias = 0.0;
  std::vector<EpochStats> training_log;
  int best_epoch = -1;  // -1 until trained

  bool operator==(const TrainedModel&) const = default;
};

// Fresh model with the head zero-initialized (every prediction 0.5).
TrainedModel build_model(const BackboneSpec& spec);

struct LabeledFeatures {
  std::vector<double> features;
  int label = 0;  // 1 authentic, 0 contrast
};

double sigmoid(double z);

// Sigmoid output clamped into the open unit interval.
double predict_logit(const TrainedModel& m, std::span<const double> features);
double predict_probability(const TrainedModel& m,
                           std::span<const double> features);

// Mean binary cross-entropy of the head over a batch.
double head_loss(const TrainedModel& m,
                 std::span<const LabeledFeatures> batch);

// Analytic gradient of head_loss w.r.t. (weights..., bias); grad has
// feature_dim + 1 entries.
void head_gradient(const TrainedModel& m,
                   std::span<const LabeledFeatures> batch,
                   std::span<double> grad);

// Mini-batch SGD on binary cross-entropy with per-epoch reshuffles,
// validation-loss early stopping and best-epoch weight restore. With an
// empty validation set early stopping is disabled and the last epoch wins.
TrainedModel train(TrainedModel model,
                   std::vector<LabeledFeatures> train_set,
                   std::vector<LabeledFeatures> val_set,
                   const TrainConfig& cfg);

// Feature extraction + head, order preserving.
std::vector<double> predict_patches(const TrainedModel& m,
                                    const Backbone& backbone,
                                    const std::vector<PatchRecord>& patches);

void save_model(const std::filesystem::path& file, const TrainedModel& m);
TrainedModel load_model(const std::filesystem::path& file);

void save_train_log(const std::filesystem::path& file, const TrainedModel& m);

}  // namespace authpipe
