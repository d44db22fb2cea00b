#include "authpipe/synthetic.hpp"

#include <fstream>

#include <json.hpp>

#include "authpipe/errors.hpp"

namespace authpipe {

std::string build_prompt(const PromptSpec& spec) {
  if (spec.style.empty() || spec.content.empty() || spec.artist.empty()) {
    throw ValidationError(
        "prompt needs non-empty style, content and artist");
  }
  return spec.style + " of " + spec.content + ", by " + spec.artist;
}

namespace {

std::string zero_pad(int value, int width) {
  std::string s = std::to_string(value);
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

nlohmann::json job_to_json(const DiffusionJob& job) {
  return {{"prompt", job.prompt},
          {"inference_steps", job.inference_steps},
          {"guidance_scale", job.guidance_scale},
          {"width", job.width},
          {"height", job.height},
          {"model_tag", job.model_tag},
          {"count", job.count},
          {"output", job.output}};
}

DiffusionJob job_from_json(const nlohmann::json& j) {
  DiffusionJob job;
  job.prompt = j.at("prompt").get<std::string>();
  job.inference_steps = j.at("inference_steps").get<int>();
  job.guidance_scale = j.at("guidance_scale").get<double>();
  job.width = j.at("width").get<int>();
  job.height = j.at("height").get<int>();
  job.model_tag = j.at("model_tag").get<std::string>();
  job.count = j.at("count").get<int>();
  job.output = j.at("output").get<std::string>();
  return job;
}

}  // namespace

std::vector<DiffusionJob> emit_diffusion_jobs(
    const std::vector<PromptSpec>& specs, int count_per_prompt) {
  if (count_per_prompt < 1) {
    throw ValidationError("count_per_prompt must be at least 1");
  }
  std::vector<DiffusionJob> jobs;
  jobs.reserve(specs.size() * static_cast<std::size_t>(count_per_prompt));
  for (std::size_t s = 0; s < specs.size(); ++s) {
    const std::string prompt = build_prompt(specs[s]);
    for (int c = 0; c < count_per_prompt; ++c) {
      DiffusionJob job;
      job.prompt = prompt;
      job.output = "diffusion_" + zero_pad(static_cast<int>(s), 3) + "_" +
                   zero_pad(c, 3) + ".png";
      jobs.push_back(std::move(job));
    }
  }
  return jobs;
}

void save_jobs(const std::filesystem::path& file,
               const std::vector<DiffusionJob>& jobs) {
  nlohmann::json arr = nlohmann::json::array();
  for (const DiffusionJob& job : jobs) arr.push_back(job_to_json(job));
  std::ofstream out(file);
  out << arr.dump(2) << "\n";
  if (!out) throw PipelineError("cannot write jobs to " + file.string());
}

std::vector<DiffusionJob> load_jobs(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ValidationError("jobs file not found: " + file.string());
  nlohmann::json arr;
  try {
    in >> arr;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("jobs file is not valid JSON: " +
                          std::string(e.what()));
  }
  std::vector<DiffusionJob> jobs;
  for (const auto& j : arr) jobs.push_back(job_from_json(j));
  return jobs;
}

std::string stylegan_train_command(int resolution) {
  static const std::string prefix =
      "python train.py --cfg=stylegan2 --kimg=5000 --snap=50 --tick=1 "
      "--metrics=kid50k_full,fid50k_full";
  switch (resolution) {
    case 256:
      return prefix +
             " --batch=16 --gamma=1 --cbase=16384 --glr=0.001 --dlr=0.001 "
             "--mbstd-group=4";
    case 512:
      return prefix +
             " --batch=12 --gamma=5 --glr=0.001 --dlr=0.001 --mbstd-group=3";
    default:
      throw ValidationError(
          "no hyperparameter row for resolution " +
          std::to_string(resolution) + " (known: 256, 512)");
  }
}

}  // namespace authpipe
