#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "authpipe/image.hpp"
#include "authpipe/manifest.hpp"

namespace authpipe {

// One crop region. Levels 1..p are the 2^level x 2^level grid tiles;
// level 0 is the square center crop.
struct TileSpec {
  int level = 0;
  int row = 0;
  int col = 0;
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  bool operator==(const TileSpec&) const = default;
};

struct PatchPlan {
  int p_max = 0;
  std::vector<TileSpec> tiles;  // levels ascending, row-major; center crop last
  int total = 0;

  bool operator==(const PatchPlan&) const = default;
};

// 21, 5 or 1 depending on the smaller image side.
int patch_count_for(int width, int height);

PatchPlan plan_patches(int width, int height);

struct PatchRecord {
  std::string patch_id;
  std::string parent_image_id;
  int level = 0;
  int row = 0;
  int col = 0;
  int side = 0;               // 0 for metadata-only records
  std::vector<float> pixels;  // side*side*3 RGB in [0,1]; empty if metadata-only

  bool operator==(const PatchRecord&) const = default;
};

std::string patch_id_for(const std::string& parent_image_id, int level,
                         int row, int col);

// Cubic-convolution (a = -0.5) resampling of the crop at (x0, y0, w, h)
// to side x side, clamped sampling at crop edges, output in [0,1].
std::vector<float> resample_crop(const Image8& src, int x0, int y0, int w,
                                 int h, int side);

std::vector<PatchRecord> extract_patches(const Image8& img,
                                         const std::string& image_id,
                                         int target_side);

// Loads rec.path and extracts.
std::vector<PatchRecord> extract_patches(const ImageRecord& rec,
                                         int target_side);

// --- Patch cache -----------------------------------------------------------
//
// Layout: <cache>/<artist_tag>/<image_id>/<level>_<row>_<col>.png
// plus a patches.json index per image.

struct CachedPatch {
  std::string patch_id;
  int level = 0;
  int row = 0;
  int col = 0;
  std::filesystem::path file;
};

struct ImagePatchIndex {
  std::string image_id;
  ImageSetLabel set_label = ImageSetLabel::authentic;
  int target_side = 0;
  std::vector<CachedPatch> patches;
};

// Extracts and writes patches for every manifest image. Returns the number
// of patches written.
std::size_t write_patch_cache(const DatasetManifest& m, int target_side,
                              const std::filesystem::path& cache_dir,
                              int worker_count = 1);

ImagePatchIndex load_patch_index(const std::filesystem::path& cache_dir,
                                 const std::string& artist_tag,
                                 const std::string& image_id);

// Reads one cached patch PNG back as a unit-interval PatchRecord.
PatchRecord load_cached_patch(const CachedPatch& entry,
                              const std::string& parent_image_id);

std::vector<PatchRecord> load_cached_patches(
    const std::filesystem::path& cache_dir, const std::string& artist_tag,
    const std::string& image_id);

}  // namespace authpipe
