#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace authpipe {

// The six image sets. `authentic` is training class 1, everything else
// is contrast material (class 0).
enum class ImageSetLabel {
  authentic,
  imitations,
  proxies,
  tuned_gans,
  raw_gans,
  diffusion,
};

inline constexpr std::array<ImageSetLabel, 6> kAllSetLabels = {
    ImageSetLabel::authentic, ImageSetLabel::imitations,
    ImageSetLabel::proxies,   ImageSetLabel::tuned_gans,
    ImageSetLabel::raw_gans,  ImageSetLabel::diffusion,
};

std::string_view to_string(ImageSetLabel label);
ImageSetLabel set_label_from_string(std::string_view name);

inline int training_class(ImageSetLabel label) {
  return label == ImageSetLabel::authentic ? 1 : 0;
}

struct ImageRecord {
  std::string image_id;
  ImageSetLabel set_label = ImageSetLabel::authentic;
  std::filesystem::path path;
  int width = 0;
  int height = 0;
  std::string artist_tag;

  bool operator==(const ImageRecord&) const = default;
};

struct DatasetManifest {
  std::string artist_tag;
  std::vector<ImageRecord> records;
  std::map<ImageSetLabel, std::size_t> counts;  // tally of records per label

  bool operator==(const DatasetManifest&) const = default;
};

// Recomputes the per-label tally from `records`.
std::map<ImageSetLabel, std::size_t> tally_counts(
    const std::vector<ImageRecord>& records);

// Parses the manifest JSON, then opens every referenced image once to
// verify it decodes and to read its true dimensions. Declared dimensions,
// when present, must match the decoded ones. Relative image paths resolve
// against the manifest's directory.
DatasetManifest ingest_manifest(const std::filesystem::path& manifest_file,
                                int worker_count = 1);

struct SetSummaryRow {
  ImageSetLabel set_label;
  std::size_t image_count = 0;
  std::size_t expected_patch_count = 0;
};

// One row per label, in the canonical label order, including empty sets.
std::vector<SetSummaryRow> summarize_manifest(const DatasetManifest& m);

}  // namespace authpipe
