#include "authpipe/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "authpipe/errors.hpp"
#include "authpipe/rng.hpp"

namespace authpipe {

namespace {

// Probabilities stay strictly inside (0, 1).
constexpr double kProbEps = 1e-15;

constexpr BackboneSpec kKnownBackbones[] = {
    {"swin_base", 224, "imagenet"},
    {"efficientnet_b0", 256, "imagenet"},
    {"toy_linear", 256, "none"},
};

// Per-channel mean features; enough for the in-tree smoke backbone and the
// full test suite, no pretrained weights required.
class ToyLinearBackbone final : public Backbone {
 public:
  explicit ToyLinearBackbone(BackboneSpec spec) : spec_(std::move(spec)) {}

  const BackboneSpec& spec() const override { return spec_; }
  int feature_dim() const override { return 3; }

  void features(const PatchRecord& patch,
                std::span<double> out) const override {
    if (patch.side != spec_.input_side) {
      throw ValidationError("patch side " + std::to_string(patch.side) +
                            " does not match backbone input " +
                            std::to_string(spec_.input_side));
    }
    double sums[3] = {0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < patch.pixels.size(); i += 3) {
      sums[0] += patch.pixels[i];
      sums[1] += patch.pixels[i + 1];
      sums[2] += patch.pixels[i + 2];
    }
    const double n = static_cast<double>(patch.pixels.size() / 3);
    out[0] = sums[0] / n;
    out[1] = sums[1] / n;
    out[2] = sums[2] / n;
  }

 private:
  BackboneSpec spec_;
};

}  // namespace

BackboneSpec backbone_spec(const std::string& identifier) {
  for (const BackboneSpec& spec : kKnownBackbones) {
    if (spec.identifier == identifier) return spec;
  }
  throw ValidationError("unknown backbone '" + identifier +
                        "' (known: swin_base, efficientnet_b0, toy_linear)");
}

std::unique_ptr<Backbone> build_backbone(const BackboneSpec& spec) {
  if (spec.identifier == "toy_linear") {
    return std::make_unique<ToyLinearBackbone>(spec);
  }
  backbone_spec(spec.identifier);  // reject unknown identifiers first
  throw PipelineError(
      "weights unavailable for backbone '" + spec.identifier +
      "' (pretrained_source '" + spec.pretrained_source +
      "'): this build ships no pretrained weights; provide an adapter "
      "implementing authpipe::Backbone");
}

TrainedModel build_model(const BackboneSpec& spec) {
  TrainedModel m;
  m.backbone = spec;
  m.weights.assign(
      static_cast<std::size_t>(build_backbone(spec)->feature_dim()), 0.0);
  m.bias = 0.0;
  return m;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double predict_logit(const TrainedModel& m, std::span<const double> features) {
  if (features.size() != m.weights.size()) {
    throw ValidationError("feature width " + std::to_string(features.size()) +
                          " does not match model width " +
                          std::to_string(m.weights.size()));
  }
  double z = m.bias;
  for (std::size_t i = 0; i < features.size(); ++i) {
    z += m.weights[i] * features[i];
  }
  return z;
}

double predict_probability(const TrainedModel& m,
                           std::span<const double> features) {
  const double p = sigmoid(predict_logit(m, features));
  return std::clamp(p, kProbEps, 1.0 - kProbEps);
}

double head_loss(const TrainedModel& m,
                 std::span<const LabeledFeatures> batch) {
  if (batch.empty()) throw ValidationError("loss over an empty batch");
  double total = 0.0;
  for (const LabeledFeatures& ex : batch) {
    const double p = predict_probability(m, ex.features);
    total += ex.label == 1 ? -std::log(p) : -std::log(1.0 - p);
  }
  return total / static_cast<double>(batch.size());
}

void head_gradient(const TrainedModel& m,
                   std::span<const LabeledFeatures> batch,
                   std::span<double> grad) {
  if (batch.empty()) throw ValidationError("gradient over an empty batch");
  if (grad.size() != m.weights.size() + 1) {
    throw ValidationError("gradient buffer size mismatch");
  }
  std::fill(grad.begin(), grad.end(), 0.0);
  for (const LabeledFeatures& ex : batch) {
    const double p = predict_probability(m, ex.features);
    const double delta = p - static_cast<double>(ex.label);
    for (std::size_t i = 0; i < m.weights.size(); ++i) {
      grad[i] += delta * ex.features[i];
    }
    grad[m.weights.size()] += delta;
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (double& g : grad) g *= inv;
}

namespace {

double accuracy_at_half(const TrainedModel& m,
                        const std::vector<LabeledFeatures>& set) {
  if (set.empty()) return 0.0;
  std::size_t correct = 0;
  for (const LabeledFeatures& ex : set) {
    const int pred = predict_probability(m, ex.features) >= 0.5 ? 1 : 0;
    if (pred == ex.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(set.size());
}

}  // namespace

TrainedModel train(TrainedModel model, std::vector<LabeledFeatures> train_set,
                   std::vector<LabeledFeatures> val_set,
                   const TrainConfig& cfg) {
  if (cfg.max_epochs == 0) return model;
  if (train_set.empty()) {
    throw ValidationError("training stream is empty");
  }
  for (const LabeledFeatures& ex : train_set) {
    if (ex.features.size() != model.weights.size()) {
      throw ValidationError("training feature width mismatch");
    }
  }
  if (cfg.batch_size < 1) throw ValidationError("batch size must be >= 1");

  const bool early_stopping = !val_set.empty();
  std::vector<double> best_weights = model.weights;
  double best_bias = model.bias;
  double best_val_loss = std::numeric_limits<double>::infinity();
  int epochs_without_improvement = 0;

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<LabeledFeatures> batch;
  std::vector<double> grad(model.weights.size() + 1);

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    SplitMix64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(epoch)));
    fisher_yates(order, rng);

    double epoch_loss = 0.0;
    std::size_t n_batches = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(
          order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      batch.clear();
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back(train_set[order[i]]);
      }
      const double loss = head_loss(model, batch);
      if (!std::isfinite(loss)) {
        throw TrainingDiverged("non-finite training loss at epoch " +
                            std::to_string(epoch) + ", batch " +
                            std::to_string(n_batches));
      }
      head_gradient(model, batch, grad);
      for (std::size_t i = 0; i < model.weights.size(); ++i) {
        model.weights[i] -= cfg.learning_rate * grad[i];
      }
      model.bias -= cfg.learning_rate * grad[model.weights.size()];
      epoch_loss += loss;
      ++n_batches;
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = epoch_loss / static_cast<double>(n_batches);
    if (early_stopping) {
      stats.val_loss = head_loss(model, val_set);
      stats.val_accuracy = accuracy_at_half(model, val_set);
      if (!std::isfinite(stats.val_loss)) {
        throw TrainingDiverged("non-finite validation loss at epoch " +
                            std::to_string(epoch));
      }
      if (stats.val_loss < best_val_loss) {
        best_val_loss = stats.val_loss;
        best_weights = model.weights;
        best_bias = model.bias;
        model.best_epoch = epoch;
        epochs_without_improvement = 0;
      } else {
        ++epochs_without_improvement;
      }
    } else {
      stats.val_loss = std::numeric_limits<double>::quiet_NaN();
      stats.val_accuracy = std::numeric_limits<double>::quiet_NaN();
      model.best_epoch = epoch;
    }
    model.training_log.push_back(stats);

    if (early_stopping &&
        epochs_without_improvement >= cfg.early_stop_patience &&
        cfg.early_stop_patience > 0) {
      break;
    }
  }

  if (early_stopping) {
    model.weights = std::move(best_weights);
    model.bias = best_bias;
  }
  return model;
}

std::vector<double> predict_patches(const TrainedModel& m,
                                    const Backbone& backbone,
                                    const std::vector<PatchRecord>& patches) {
  std::vector<double> probs;
  probs.reserve(patches.size());
  std::vector<double> features(
      static_cast<std::size_t>(backbone.feature_dim()));
  for (const PatchRecord& patch : patches) {
    backbone.features(patch, features);
    probs.push_back(predict_probability(m, features));
  }
  return probs;
}

void save_model(const std::filesystem::path& file, const TrainedModel& m) {
  nlohmann::json j;
  j["backbone"] = {{"identifier", m.backbone.identifier},
                   {"input_side", m.backbone.input_side},
                   {"pretrained_source", m.backbone.pretrained_source}};
  j["weights"] = m.weights;
  j["bias"] = m.bias;
  j["best_epoch"] = m.best_epoch;
  std::ofstream out(file);
  out << j.dump(2) << "\n";
  if (!out) throw PipelineError("cannot write model to " + file.string());
}

TrainedModel load_model(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ValidationError("model file not found: " + file.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("model file is not valid JSON: " +
                          std::string(e.what()));
  }
  TrainedModel m;
  m.backbone.identifier = j.at("backbone").at("identifier").get<std::string>();
  m.backbone.input_side = j.at("backbone").at("input_side").get<int>();
  m.backbone.pretrained_source =
      j.at("backbone").at("pretrained_source").get<std::string>();
  m.weights = j.at("weights").get<std::vector<double>>();
  m.bias = j.at("bias").get<double>();
  m.best_epoch = j.at("best_epoch").get<int>();
  return m;
}

void save_train_log(const std::filesystem::path& file,
                    const TrainedModel& m) {
  nlohmann::json arr = nlohmann::json::array();
  for (const EpochStats& s : m.training_log) {
    nlohmann::json j;
    j["epoch"] = s.epoch;
    j["train_loss"] = s.train_loss;
    if (std::isfinite(s.val_loss)) {
      j["val_loss"] = s.val_loss;
      j["val_accuracy"] = s.val_accuracy;
    }
    arr.push_back(std::move(j));
  }
  nlohmann::json j;
  j["best_epoch"] = m.best_epoch;
  j["epochs"] = std::move(arr);
  std::ofstream out(file);
  out << j.dump(2) << "\n";
  if (!out) throw PipelineError("cannot write train log to " + file.string());
}

}  // namespace authpipe
