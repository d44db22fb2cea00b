#include "authpipe/splitter.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "authpipe/errors.hpp"

namespace authpipe {

std::string_view to_string(Subset s) {
  switch (s) {
    case Subset::train:
      return "train";
    case Subset::validation:
      return "validation";
    case Subset::test:
      return "test";
  }
  return "?";
}

Subset subset_from_string(std::string_view name) {
  if (name == "train") return Subset::train;
  if (name == "validation") return Subset::validation;
  if (name == "test") return Subset::test;
  throw ValidationError("unknown subset '" + std::string(name) + "'");
}

std::array<std::size_t, 3> allocate_72_11_17(std::size_t n) {
  const double quotas[3] = {0.72 * static_cast<double>(n),
                            0.11 * static_cast<double>(n),
                            0.17 * static_cast<double>(n)};
  std::array<std::size_t, 3> counts{};
  double remainders[3];
  std::size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    counts[i] = static_cast<std::size_t>(quotas[i]);
    remainders[i] = quotas[i] - static_cast<double>(counts[i]);
    assigned += counts[i];
  }
  // Hand out the leftover units by largest remainder; ties go to the
  // earlier subset (train, then validation).
  while (assigned < n) {
    int best = 0;
    for (int i = 1; i < 3; ++i) {
      if (remainders[i] > remainders[best]) best = i;
    }
    counts[best] += 1;
    remainders[best] -= 1.0;
    assigned += 1;
  }
  return counts;
}

std::vector<SplitPlan> make_splits(const DatasetManifest& m, int n_splits,
                                   std::uint64_t master_seed) {
  if (m.records.empty()) {
    throw ValidationError("cannot split an empty manifest");
  }
  if (n_splits < 1) {
    throw ValidationError("n_splits must be at least 1");
  }

  // Manifest order is the canonical pre-shuffle order per label.
  std::map<ImageSetLabel, std::vector<std::string>> by_label;
  for (const ImageRecord& rec : m.records) {
    by_label[rec.set_label].push_back(rec.image_id);
  }

  std::vector<SplitPlan> plans;
  plans.reserve(static_cast<std::size_t>(n_splits));
  for (int k = 0; k < n_splits; ++k) {
    SplitPlan plan;
    plan.split_index = k;
    plan.seed = derive_seed(master_seed, static_cast<std::uint64_t>(k));

    std::size_t label_index = 0;
    for (ImageSetLabel label : kAllSetLabels) {
      auto it = by_label.find(label);
      ++label_index;
      if (it == by_label.end()) continue;

      std::vector<std::string> ids = it->second;
      SplitMix64 rng(derive_seed(plan.seed, label_index));
      fisher_yates(ids, rng);

      const auto counts = allocate_72_11_17(ids.size());
      std::size_t pos = 0;
      for (std::size_t i = 0; i < counts[0]; ++i) {
        plan.assignment[ids[pos++]] = Subset::train;
      }
      for (std::size_t i = 0; i < counts[1]; ++i) {
        plan.assignment[ids[pos++]] = Subset::validation;
      }
      for (std::size_t i = 0; i < counts[2]; ++i) {
        plan.assignment[ids[pos++]] = Subset::test;
      }
      if (counts[1] == 0 || counts[2] == 0) {
        plan.warnings.push_back(
            std::string(to_string(label)) + ": only " +
            std::to_string(ids.size()) +
            " image(s); validation/test left empty for this label");
      }
    }
    plans.push_back(std::move(plan));
  }
  return plans;
}

PatchPartition subset_patches(const SplitPlan& plan,
                              const std::vector<PatchRecord>& patches) {
  PatchPartition parts;
  for (const PatchRecord& patch : patches) {
    auto it = plan.assignment.find(patch.parent_image_id);
    if (it == plan.assignment.end()) {
      throw ValidationError("orphan patch '" + patch.patch_id +
                            "': parent image '" + patch.parent_image_id +
                            "' is not in the split plan");
    }
    switch (it->second) {
      case Subset::train:
        parts.train.push_back(&patch);
        break;
      case Subset::validation:
        parts.validation.push_back(&patch);
        break;
      case Subset::test:
        parts.test.push_back(&patch);
        break;
    }
  }
  return parts;
}

void save_splits(const std::filesystem::path& file,
                 const std::vector<SplitPlan>& splits) {
  nlohmann::json arr = nlohmann::json::array();
  for (const SplitPlan& plan : splits) {
    nlohmann::json j;
    j["split_index"] = plan.split_index;
    j["seed"] = plan.seed;
    j["rng"] = plan.rng;
    nlohmann::json assignment = nlohmann::json::object();
    for (const auto& [id, subset] : plan.assignment) {
      assignment[id] = std::string(to_string(subset));
    }
    j["assignment"] = std::move(assignment);
    j["warnings"] = plan.warnings;
    arr.push_back(std::move(j));
  }
  std::ofstream out(file);
  out << arr.dump(2) << "\n";
  if (!out) throw PipelineError("cannot write splits to " + file.string());
}

std::vector<SplitPlan> load_splits(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ValidationError("splits file not found: " + file.string());
  nlohmann::json arr;
  try {
    in >> arr;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("splits file is not valid JSON: " +
                          std::string(e.what()));
  }
  if (!arr.is_array()) {
    throw ValidationError("splits file must hold a JSON array");
  }
  std::vector<SplitPlan> plans;
  for (const auto& j : arr) {
    SplitPlan plan;
    plan.split_index = j.at("split_index").get<int>();
    plan.seed = j.at("seed").get<std::uint64_t>();
    plan.rng = j.value("rng", std::string(kRngName));
    for (const auto& [id, subset] : j.at("assignment").items()) {
      plan.assignment[id] = subset_from_string(subset.get<std::string>());
    }
    if (j.contains("warnings")) {
      plan.warnings = j.at("warnings").get<std::vector<std::string>>();
    }
    plans.push_back(std::move(plan));
  }
  return plans;
}

}  // namespace authpipe
