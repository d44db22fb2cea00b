#include "authpipe/manifest.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include <json.hpp>

#include "authpipe/errors.hpp"
#include "authpipe/image.hpp"
#include "authpipe/patcher.hpp"

namespace authpipe {

std::string_view to_string(ImageSetLabel label) {
  switch (label) {
    case ImageSetLabel::authentic:
      return "authentic";
    case ImageSetLabel::imitations:
      return "imitations";
    case ImageSetLabel::proxies:
      return "proxies";
    case ImageSetLabel::tuned_gans:
      return "tuned_gans";
    case ImageSetLabel::raw_gans:
      return "raw_gans";
    case ImageSetLabel::diffusion:
      return "diffusion";
  }
  return "?";
}

ImageSetLabel set_label_from_string(std::string_view name) {
  for (ImageSetLabel label : kAllSetLabels) {
    if (to_string(label) == name) return label;
  }
  throw ValidationError("unknown image set '" + std::string(name) +
                        "' (expected one of authentic, imitations, proxies, "
                        "tuned_gans, raw_gans, diffusion)");
}

std::map<ImageSetLabel, std::size_t> tally_counts(
    const std::vector<ImageRecord>& records) {
  std::map<ImageSetLabel, std::size_t> counts;
  for (ImageSetLabel label : kAllSetLabels) counts[label] = 0;
  for (const ImageRecord& rec : records) counts[rec.set_label] += 1;
  return counts;
}

DatasetManifest ingest_manifest(const std::filesystem::path& manifest_file,
                                int worker_count) {
  std::ifstream in(manifest_file);
  if (!in) {
    throw ValidationError("manifest file not found: " +
                          manifest_file.string());
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("manifest is not valid JSON (" +
                          manifest_file.string() + "): " + e.what());
  }

  DatasetManifest m;
  try {
    m.artist_tag = j.at("artist_tag").get<std::string>();
    const auto& images = j.at("images");
    if (!images.is_array()) {
      throw ValidationError("manifest 'images' must be an array");
    }
    std::set<std::string> seen;
    const std::filesystem::path base = manifest_file.parent_path();
    for (const auto& entry : images) {
      ImageRecord rec;
      rec.image_id = entry.at("id").get<std::string>();
      rec.set_label = set_label_from_string(entry.at("set").get<std::string>());
      std::filesystem::path p = entry.at("path").get<std::string>();
      rec.path = p.is_absolute() ? p : base / p;
      rec.width = entry.value("width", 0);
      rec.height = entry.value("height", 0);
      rec.artist_tag = m.artist_tag;
      if (!seen.insert(rec.image_id).second) {
        throw ValidationError("duplicate image_id '" + rec.image_id +
                              "' in manifest");
      }
      m.records.push_back(std::move(rec));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("manifest schema error (" + manifest_file.string() +
                          "): " + e.what());
  }

  // Decode every image once: catches unreadable files now instead of hours
  // into a training run. Declared dimensions must match decoded ones.
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto verify = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= m.records.size()) return;
      try {
        ImageRecord& rec = m.records[i];
        Image8 img;
        try {
          img = load_image_rgb(rec.path);
        } catch (const PipelineError& e) {
          throw ValidationError("image '" + rec.image_id +
                                "': " + e.what());
        }
        if ((rec.width != 0 && rec.width != img.width) ||
            (rec.height != 0 && rec.height != img.height)) {
          throw ValidationError(
              "declared dimensions " + std::to_string(rec.width) + "x" +
              std::to_string(rec.height) + " do not match actual " +
              std::to_string(img.width) + "x" + std::to_string(img.height) +
              " for image '" + rec.image_id + "'");
        }
        rec.width = img.width;
        rec.height = img.height;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = m.records.size();
        return;
      }
    }
  };

  const int n_workers = std::max(1, worker_count);
  if (n_workers == 1 || m.records.size() < 2) {
    verify();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_workers; ++t) pool.emplace_back(verify);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  m.counts = tally_counts(m.records);
  return m;
}

std::vector<SetSummaryRow> summarize_manifest(const DatasetManifest& m) {
  std::map<ImageSetLabel, SetSummaryRow> rows;
  for (ImageSetLabel label : kAllSetLabels) {
    rows[label] = {label, 0, 0};
  }
  for (const ImageRecord& rec : m.records) {
    SetSummaryRow& row = rows[rec.set_label];
    row.image_count += 1;
    row.expected_patch_count +=
        static_cast<std::size_t>(patch_count_for(rec.width, rec.height));
  }
  std::vector<SetSummaryRow> out;
  out.reserve(rows.size());
  for (ImageSetLabel label : kAllSetLabels) out.push_back(rows[label]);
  return out;
}

}  // namespace authpipe
