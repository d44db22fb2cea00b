#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace authpipe {

struct PromptSpec {
  std::string style;    // e.g. "Post-impressionist painting"
  std::string content;  // e.g. "a young boy"
  std::string artist;   // e.g. "Vincent van Gogh"

  bool operator==(const PromptSpec&) const = default;
};

// "<style> of <content>, by <artist>". Throws on empty components.
std::string build_prompt(const PromptSpec& spec);

// One generation job for an external diffusion backend; defaults are the
// pinned sampler settings.
struct DiffusionJob {
  std::string prompt;
  int inference_steps = 60;
  double guidance_scale = 8.0;
  int width = 512;
  int height = 512;
  std::string model_tag = "stable-diffusion-2.1";
  int count = 1;
  std::string output;  // file name the backend should write

  bool operator==(const DiffusionJob&) const = default;
};

// One job per requested image; output names are ingestible as the
// "diffusion" set ("<prompt index>_<copy index>" suffixes).
std::vector<DiffusionJob> emit_diffusion_jobs(
    const std::vector<PromptSpec>& specs, int count_per_prompt);

void save_jobs(const std::filesystem::path& file,
               const std::vector<DiffusionJob>& jobs);
std::vector<DiffusionJob> load_jobs(const std::filesystem::path& file);

// Full StyleGAN3 training command for the two known resolutions (256, 512).
std::string stylegan_train_command(int resolution);

}  // namespace authpipe
