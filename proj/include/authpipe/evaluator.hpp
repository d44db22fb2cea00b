#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "authpipe/classifier.hpp"
#include "authpipe/manifest.hpp"
#include "authpipe/splitter.hpp"

namespace authpipe {

// Evaluation groups map 1:1 onto image sets; "originals" is the authentic
// set and "forgeries" the imitations.
enum class EvalGroup {
  originals,
  forgeries,
  diffusion,
  tuned_gans,
  raw_gans,
  proxies,
};

std::string_view to_string(EvalGroup g);
EvalGroup eval_group_from_string(std::string_view name);
ImageSetLabel group_set_label(EvalGroup g);
EvalGroup group_for_label(ImageSetLabel label);

inline constexpr std::array<EvalGroup, 4> kPaperEvalGroups = {
    EvalGroup::originals, EvalGroup::forgeries, EvalGroup::diffusion,
    EvalGroup::tuned_gans};

struct ImagePrediction {
  std::string image_id;
  ImageSetLabel set_label = ImageSetLabel::authentic;
  double mean_probability = 0.0;
  int predicted_class = 0;
  int true_class = 0;

  bool operator==(const ImagePrediction&) const = default;
};

struct Confusion {
  std::size_t true0_pred0 = 0;
  std::size_t true0_pred1 = 0;
  std::size_t true1_pred0 = 0;
  std::size_t true1_pred1 = 0;

  std::size_t total() const {
    return true0_pred0 + true0_pred1 + true1_pred0 + true1_pred1;
  }
  bool operator==(const Confusion&) const = default;
};

struct GroupResult {
  double accuracy = 0.0;
  std::size_t n_images = 0;
  std::size_t n_correct = 0;

  bool operator==(const GroupResult&) const = default;
};

struct EvalReport {
  std::vector<ImagePrediction> predictions;
  std::map<EvalGroup, GroupResult> per_group;  // requested-but-empty groups absent
  Confusion confusion;

  bool operator==(const EvalReport&) const = default;
};

enum class Aggregation { mean_probability, majority_vote };

// Mean patch probability with the >= 0.5 tie-to-authentic rule.
std::pair<double, int> aggregate_image(const std::vector<double>& patch_probs,
                                       Aggregation agg =
                                           Aggregation::mean_probability);

// Supplies the patches of one image, typically from the cache.
using PatchProvider =
    std::function<std::vector<PatchRecord>(const std::string& image_id)>;

// Scores the test partition of `plan` on the requested groups.
EvalReport evaluate(const TrainedModel& model, const Backbone& backbone,
                    const SplitPlan& plan, const DatasetManifest& manifest,
                    const PatchProvider& patches,
                    const std::vector<EvalGroup>& groups,
                    Aggregation agg = Aggregation::mean_probability);

}  // namespace authpipe
