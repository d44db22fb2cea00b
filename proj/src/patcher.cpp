#include "authpipe/patcher.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "authpipe/errors.hpp"

namespace authpipe {

namespace {

// Resolution exponent p from the smaller side: >1024 -> 2, [512,1024] -> 1,
// otherwise 0. 512 is inclusive so that 512x512 images yield five patches.
int p_max_for(int width, int height) {
  const int s = std::min(width, height);
  if (s > 1024) return 2;
  if (s >= 512) return 1;
  return 0;
}

void require_positive(int width, int height) {
  if (width < 1 || height < 1) {
    throw ValidationError("image dimensions must be positive, got " +
                          std::to_string(width) + "x" +
                          std::to_string(height));
  }
}

// Cubic convolution kernel, a = -0.5 (Catmull-Rom).
double cubic_kernel(double x) {
  constexpr double a = -0.5;
  x = std::fabs(x);
  if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
  return 0.0;
}

struct Taps {
  int idx[4];   // clamped source indices
  double w0;    // normalized weights for taps 0, 2, 3; tap 1 is implicit
  double w2;
  double w3;
};

// Per-output-position sampling plan for one axis of length src mapped to
// dst samples over [offset, offset + src).
std::vector<Taps> make_taps(int src, int dst, int offset) {
  std::vector<Taps> taps(dst);
  const double scale = static_cast<double>(src) / dst;
  for (int i = 0; i < dst; ++i) {
    const double sx = (i + 0.5) * scale - 0.5;
    const int base = static_cast<int>(std::floor(sx));
    const double t = sx - base;
    double k[4] = {cubic_kernel(1.0 + t), cubic_kernel(t),
                   cubic_kernel(1.0 - t), cubic_kernel(2.0 - t)};
    const double sum = k[0] + k[1] + k[2] + k[3];
    Taps& tp = taps[i];
    for (int j = 0; j < 4; ++j) {
      tp.idx[j] = offset + std::clamp(base - 1 + j, 0, src - 1);
    }
    tp.w0 = k[0] / sum;
    tp.w2 = k[2] / sum;
    tp.w3 = k[3] / sum;
  }
  return taps;
}

// result = p1 + w0*(p0-p1) + w2*(p2-p1) + w3*(p3-p1): exact for constant
// inputs and the identity mapping, equal to the normalized weighted sum
// otherwise.
inline double apply_taps(const Taps& t, const double* v) {
  const double p1 = v[t.idx[1]];
  return p1 + t.w0 * (v[t.idx[0]] - p1) + t.w2 * (v[t.idx[2]] - p1) +
         t.w3 * (v[t.idx[3]] - p1);
}

}  // namespace

int patch_count_for(int width, int height) {
  require_positive(width, height);
  switch (p_max_for(width, height)) {
    case 2:
      return 21;
    case 1:
      return 5;
    default:
      return 1;
  }
}

PatchPlan plan_patches(int width, int height) {
  require_positive(width, height);
  PatchPlan plan;
  plan.p_max = p_max_for(width, height);
  for (int level = 1; level <= plan.p_max; ++level) {
    const int n = 1 << level;
    const int tile_w = width / n;   // remainder discarded at the right
    const int tile_h = height / n;  // and bottom edges
    for (int row = 0; row < n; ++row) {
      for (int col = 0; col < n; ++col) {
        plan.tiles.push_back({level, row, col, col * tile_w, row * tile_h,
                              tile_w, tile_h});
      }
    }
  }
  const int side = std::min(width, height);
  plan.tiles.push_back(
      {0, 0, 0, (width - side) / 2, (height - side) / 2, side, side});
  plan.total = static_cast<int>(plan.tiles.size());
  return plan;
}

std::string patch_id_for(const std::string& parent_image_id, int level,
                         int row, int col) {
  return parent_image_id + "/" + std::to_string(level) + "_" +
         std::to_string(row) + "_" + std::to_string(col);
}

std::vector<float> resample_crop(const Image8& src, int x0, int y0, int w,
                                 int h, int side) {
  if (w < 1 || h < 1 || side < 1 || x0 < 0 || y0 < 0 || x0 + w > src.width ||
      y0 + h > src.height) {
    throw ValidationError("crop out of bounds");
  }

  const std::vector<Taps> col_taps = make_taps(w, side, x0);
  const std::vector<Taps> row_taps = make_taps(h, side, 0);

  // Horizontal pass over the crop rows, then vertical. Double precision
  // throughout; narrowing to float happens once at the end.
  std::vector<double> line(static_cast<std::size_t>(src.width));
  std::vector<double> mid(static_cast<std::size_t>(side) * h);
  std::vector<float> out(static_cast<std::size_t>(side) * side * 3);

  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < h; ++y) {
      const std::uint8_t* row =
          src.pixels.data() +
          (static_cast<std::size_t>(y0 + y) * src.width) * 3 + c;
      for (int x = 0; x < src.width; ++x) line[x] = row[x * 3];
      double* dst = mid.data() + static_cast<std::size_t>(y) * side;
      for (int i = 0; i < side; ++i) dst[i] = apply_taps(col_taps[i], line.data());
    }
    std::vector<double> column(static_cast<std::size_t>(h));
    for (int i = 0; i < side; ++i) {
      for (int y = 0; y < h; ++y) {
        column[y] = mid[static_cast<std::size_t>(y) * side + i];
      }
      for (int j = 0; j < side; ++j) {
        const double v = apply_taps(row_taps[j], column.data());
        out[(static_cast<std::size_t>(j) * side + i) * 3 + c] =
            static_cast<float>(std::clamp(v / 255.0, 0.0, 1.0));
      }
    }
  }
  return out;
}

std::vector<PatchRecord> extract_patches(const Image8& img,
                                         const std::string& image_id,
                                         int target_side) {
  if (target_side != 224 && target_side != 256) {
    throw ValidationError("target side must be 224 or 256");
  }
  const PatchPlan plan = plan_patches(img.width, img.height);
  std::vector<PatchRecord> patches;
  patches.reserve(plan.tiles.size());
  for (const TileSpec& tile : plan.tiles) {
    PatchRecord rec;
    rec.patch_id = patch_id_for(image_id, tile.level, tile.row, tile.col);
    rec.parent_image_id = image_id;
    rec.level = tile.level;
    rec.row = tile.row;
    rec.col = tile.col;
    rec.side = target_side;
    rec.pixels = resample_crop(img, tile.x, tile.y, tile.width, tile.height,
                               target_side);
    patches.push_back(std::move(rec));
  }
  return patches;
}

std::vector<PatchRecord> extract_patches(const ImageRecord& rec,
                                         int target_side) {
  return extract_patches(load_image_rgb(rec.path), rec.image_id, target_side);
}

namespace {

Image8 patch_to_image8(const PatchRecord& rec) {
  Image8 img;
  img.width = rec.side;
  img.height = rec.side;
  img.pixels.resize(rec.pixels.size());
  for (std::size_t i = 0; i < rec.pixels.size(); ++i) {
    img.pixels[i] = static_cast<std::uint8_t>(
        std::lround(static_cast<double>(rec.pixels[i]) * 255.0));
  }
  return img;
}

std::string tile_file_name(const CachedPatch& p) {
  return std::to_string(p.level) + "_" + std::to_string(p.row) + "_" +
         std::to_string(p.col) + ".png";
}

}  // namespace

std::size_t write_patch_cache(const DatasetManifest& m, int target_side,
                              const std::filesystem::path& cache_dir,
                              int worker_count) {
  namespace fs = std::filesystem;
  std::atomic<std::size_t> written{0};
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= m.records.size()) return;
      try {
        const ImageRecord& rec = m.records[i];
        const fs::path dir = cache_dir / m.artist_tag / rec.image_id;
        fs::create_directories(dir);
        const auto patches = extract_patches(rec, target_side);

        ImagePatchIndex index;
        index.image_id = rec.image_id;
        index.set_label = rec.set_label;
        index.target_side = target_side;
        for (const PatchRecord& p : patches) {
          CachedPatch entry{p.patch_id, p.level, p.row, p.col, {}};
          entry.file = dir / tile_file_name(entry);
          save_png_rgb(entry.file, patch_to_image8(p));
          index.patches.push_back(std::move(entry));
        }

        nlohmann::json j;
        j["image_id"] = index.image_id;
        j["set"] = std::string(to_string(index.set_label));
        j["target_side"] = index.target_side;
        j["patches"] = nlohmann::json::array();
        for (const CachedPatch& p : index.patches) {
          j["patches"].push_back({{"patch_id", p.patch_id},
                                  {"level", p.level},
                                  {"row", p.row},
                                  {"col", p.col},
                                  {"file", p.file.filename().string()}});
        }
        std::ofstream out(dir / "patches.json");
        out << j.dump(2) << "\n";
        if (!out) throw PipelineError("cannot write patch index in " +
                                      dir.string());
        written += patches.size();
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = m.records.size();
        return;
      }
    }
  };

  const int n_workers = std::max(1, worker_count);
  if (n_workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_workers; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return written;
}

ImagePatchIndex load_patch_index(const std::filesystem::path& cache_dir,
                                 const std::string& artist_tag,
                                 const std::string& image_id) {
  const std::filesystem::path dir = cache_dir / artist_tag / image_id;
  std::ifstream in(dir / "patches.json");
  if (!in) {
    throw PipelineError("missing patch cache for image '" + image_id +
                        "' under " + (cache_dir / artist_tag).string());
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw PipelineError("corrupt patch index for image '" + image_id +
                        "': " + e.what());
  }
  ImagePatchIndex index;
  index.image_id = j.at("image_id").get<std::string>();
  index.set_label = set_label_from_string(j.at("set").get<std::string>());
  index.target_side = j.at("target_side").get<int>();
  for (const auto& p : j.at("patches")) {
    CachedPatch entry;
    entry.patch_id = p.at("patch_id").get<std::string>();
    entry.level = p.at("level").get<int>();
    entry.row = p.at("row").get<int>();
    entry.col = p.at("col").get<int>();
    entry.file = dir / p.at("file").get<std::string>();
    index.patches.push_back(std::move(entry));
  }
  return index;
}

PatchRecord load_cached_patch(const CachedPatch& entry,
                              const std::string& parent_image_id) {
  const Image8 img = load_image_rgb(entry.file);
  PatchRecord rec;
  rec.patch_id = entry.patch_id;
  rec.parent_image_id = parent_image_id;
  rec.level = entry.level;
  rec.row = entry.row;
  rec.col = entry.col;
  rec.side = img.width;
  rec.pixels.resize(img.pixels.size());
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    rec.pixels[i] = static_cast<float>(img.pixels[i] / 255.0);
  }
  return rec;
}

std::vector<PatchRecord> load_cached_patches(
    const std::filesystem::path& cache_dir, const std::string& artist_tag,
    const std::string& image_id) {
  const ImagePatchIndex index =
      load_patch_index(cache_dir, artist_tag, image_id);
  std::vector<PatchRecord> patches;
  patches.reserve(index.patches.size());
  for (const CachedPatch& entry : index.patches) {
    patches.push_back(load_cached_patch(entry, image_id));
  }
  return patches;
}

}  // namespace authpipe
