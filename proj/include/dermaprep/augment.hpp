#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "dermaprep/image.hpp"
#include "dermaprep/manifest.hpp"

namespace dermaprep {

Image flip_h(const Image& img);  // mirror about the vertical axis
Image flip_v(const Image& img);  // mirror about the horizontal axis
BinaryMask flip_h(const BinaryMask& m);
BinaryMask flip_v(const BinaryMask& m);

struct CropWindow {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
};

// Window of size (ceil(frac*w), ceil(frac*h)) at an offset drawn from
// CounterRng(seed): x from draw 0, y from draw 1.
CropWindow crop_window(int width, int height, double frac, std::uint64_t seed);
// Crops the window and resizes back to the input size.
Image random_crop(const Image& img, double frac, std::uint64_t seed);
BinaryMask random_crop(const BinaryMask& m, double frac, std::uint64_t seed);

struct ClassPlan {
  std::string label;
  int base_count = 0;       // original + augmented rows
  int purified_added = 0;
  int generated_added = 0;
  int flip_h_target = 0;    // class size after the horizontal-flip stage
  int final_target = 0;     // flip_h_target * multiplier
  bool explicit_target = false;

  int pool() const { return base_count + purified_added + generated_added; }
  int flips() const { return flip_h_target - pool(); }
};

struct AugPlan {
  std::vector<ClassPlan> classes;
  int global_multiplier = 1;
  // Share of the final set descending from generated images, assuming flips
  // and expansions spread proportionally over each class pool.
  double generated_fraction = 0.0;
  // One message per class whose target cannot be met with one flip per
  // image (target below the pool or above twice the pool).
  std::vector<std::string> problems;

  bool feasible() const { return problems.empty(); }
  const ClassPlan* find(const std::string& label) const;
};

struct BalanceOptions {
  int multiplier = 6;
  // Explicit flip-stage class sizes; classes without one are derived.
  std::map<std::string, int> stage_targets;
};

// Per-class pools come from `m` (generated-provenance rows included) plus
// the `generated` counts. Classes with generated images are flipped up to
// the largest pool among classes without any (clamped to [pool, 2*pool]);
// other classes keep their pool. Explicit stage targets override.
AugPlan plan_balance(const DatasetManifest& m, const std::map<std::string, int>& generated,
                     const BalanceOptions& opts);

// Multiplies every target by `factor`, rounding halves up.
std::map<std::string, int> scale_targets(const std::map<std::string, int>& targets, double factor);

void print_plan(std::ostream& out, const AugPlan& plan);
void write_plan_csv(const AugPlan& plan, const std::filesystem::path& path);

struct ApplyOptions {
  double crop_fraction = 0.875;
  unsigned threads = 1;
};

// Materialises the plan under out_dir/images and returns the new manifest
// (base_dir = out_dir, paths absolute). Flip-stage images go to the
// lexicographically smallest image_ids of each class; every stage image is
// then expanded into multiplier variants: identity, flip_v, then seeded
// crops. Derived ids are "<id>+<tag>". Rows of classes outside the plan
// pass through.
DatasetManifest apply_plan(const DatasetManifest& m, const AugPlan& plan, std::uint64_t seed,
                           const std::filesystem::path& out_dir, const ApplyOptions& opts = {});

}  // namespace dermaprep
