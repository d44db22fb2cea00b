#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "authpipe/manifest.hpp"
#include "authpipe/patcher.hpp"
#include "authpipe/rng.hpp"

namespace authpipe {

enum class Subset { train, validation, test };

std::string_view to_string(Subset s);
Subset subset_from_string(std::string_view name);

struct SplitPlan {
  int split_index = 0;
  std::uint64_t seed = 0;
  std::string rng = kRngName;
  std::map<std::string, Subset> assignment;
  std::vector<std::string> warnings;

  bool operator==(const SplitPlan&) const = default;
};

// 72/11/17 of n by largest remainder; ties favor train, then validation.
// Returns {train, validation, test} counts summing to n.
std::array<std::size_t, 3> allocate_72_11_17(std::size_t n);

// n_splits independent image-level partitions, stratified per set label.
// Each plan's seed derives from (master_seed, split_index).
std::vector<SplitPlan> make_splits(const DatasetManifest& m, int n_splits,
                                   std::uint64_t master_seed);

struct PatchPartition {
  std::vector<const PatchRecord*> train;
  std::vector<const PatchRecord*> validation;
  std::vector<const PatchRecord*> test;
};

// Routes patches by their parent image's subset. Throws on orphans.
PatchPartition subset_patches(const SplitPlan& plan,
                              const std::vector<PatchRecord>& patches);

void save_splits(const std::filesystem::path& file,
                 const std::vector<SplitPlan>& splits);
std::vector<SplitPlan> load_splits(const std::filesystem::path& file);

}  // namespace authpipe
