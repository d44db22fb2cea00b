#include "authpipe/evaluator.hpp"

#include <algorithm>

#include "authpipe/errors.hpp"

namespace authpipe {

std::string_view to_string(EvalGroup g) {
  switch (g) {
    case EvalGroup::originals:
      return "originals";
    case EvalGroup::forgeries:
      return "forgeries";
    case EvalGroup::diffusion:
      return "diffusion";
    case EvalGroup::tuned_gans:
      return "tuned_gans";
    case EvalGroup::raw_gans:
      return "raw_gans";
    case EvalGroup::proxies:
      return "proxies";
  }
  return "?";
}

EvalGroup eval_group_from_string(std::string_view name) {
  for (EvalGroup g : {EvalGroup::originals, EvalGroup::forgeries,
                      EvalGroup::diffusion, EvalGroup::tuned_gans,
                      EvalGroup::raw_gans, EvalGroup::proxies}) {
    if (to_string(g) == name) return g;
  }
  throw ValidationError("unknown evaluation group '" + std::string(name) +
                        "'");
}

ImageSetLabel group_set_label(EvalGroup g) {
  switch (g) {
    case EvalGroup::originals:
      return ImageSetLabel::authentic;
    case EvalGroup::forgeries:
      return ImageSetLabel::imitations;
    case EvalGroup::diffusion:
      return ImageSetLabel::diffusion;
    case EvalGroup::tuned_gans:
      return ImageSetLabel::tuned_gans;
    case EvalGroup::raw_gans:
      return ImageSetLabel::raw_gans;
    case EvalGroup::proxies:
      return ImageSetLabel::proxies;
  }
  return ImageSetLabel::authentic;
}

EvalGroup group_for_label(ImageSetLabel label) {
  switch (label) {
    case ImageSetLabel::authentic:
      return EvalGroup::originals;
    case ImageSetLabel::imitations:
      return EvalGroup::forgeries;
    case ImageSetLabel::diffusion:
      return EvalGroup::diffusion;
    case ImageSetLabel::tuned_gans:
      return EvalGroup::tuned_gans;
    case ImageSetLabel::raw_gans:
      return EvalGroup::raw_gans;
    case ImageSetLabel::proxies:
      return EvalGroup::proxies;
  }
  return EvalGroup::originals;
}

std::pair<double, int> aggregate_image(const std::vector<double>& patch_probs,
                                       Aggregation agg) {
  if (patch_probs.empty()) {
    throw ValidationError("cannot aggregate an image with no patches");
  }
  for (double p : patch_probs) {
    if (p < 0.0 || p > 1.0) {
      throw ValidationError("patch probability outside [0,1]");
    }
  }
  double sum = 0.0;
  std::size_t votes = 0;
  for (double p : patch_probs) {
    sum += p;
    if (p >= 0.5) ++votes;
  }
  const double mean = sum / static_cast<double>(patch_probs.size());
  int predicted;
  if (agg == Aggregation::mean_probability) {
    predicted = mean >= 0.5 ? 1 : 0;
  } else {
    // Majority vote; ties resolve to authentic like the mean rule.
    predicted = 2 * votes >= patch_probs.size() ? 1 : 0;
  }
  return {mean, predicted};
}

EvalReport evaluate(const TrainedModel& model, const Backbone& backbone,
                    const SplitPlan& plan, const DatasetManifest& manifest,
                    const PatchProvider& patches,
                    const std::vector<EvalGroup>& groups, Aggregation agg) {
  std::map<ImageSetLabel, EvalGroup> wanted;
  for (EvalGroup g : groups) wanted[group_set_label(g)] = g;

  EvalReport report;
  std::map<EvalGroup, GroupResult> tally;

  for (const ImageRecord& rec : manifest.records) {
    auto group_it = wanted.find(rec.set_label);
    if (group_it == wanted.end()) continue;
    auto assign_it = plan.assignment.find(rec.image_id);
    if (assign_it == plan.assignment.end() ||
        assign_it->second != Subset::test) {
      continue;
    }

    const std::vector<PatchRecord> recs = patches(rec.image_id);
    if (recs.empty()) {
      throw PipelineError("no patches available for test image '" +
                          rec.image_id + "'");
    }
    const std::vector<double> probs = predict_patches(model, backbone, recs);
    const auto [mean, predicted] = aggregate_image(probs, agg);

    ImagePrediction pred;
    pred.image_id = rec.image_id;
    pred.set_label = rec.set_label;
    pred.mean_probability = mean;
    pred.predicted_class = predicted;
    pred.true_class = training_class(rec.set_label);
    report.predictions.push_back(pred);

    GroupResult& gr = tally[group_it->second];
    gr.n_images += 1;
    if (pred.predicted_class == pred.true_class) gr.n_correct += 1;

    if (pred.true_class == 0) {
      (pred.predicted_class == 0 ? report.confusion.true0_pred0
                                 : report.confusion.true0_pred1) += 1;
    } else {
      (pred.predicted_class == 0 ? report.confusion.true1_pred0
                                 : report.confusion.true1_pred1) += 1;
    }
  }

  // Groups with no test images in this split stay absent from the report.
  for (auto& [group, result] : tally) {
    result.accuracy = static_cast<double>(result.n_correct) /
                      static_cast<double>(result.n_images);
    report.per_group[group] = result;
  }
  return report;
}

}  // namespace authpipe
