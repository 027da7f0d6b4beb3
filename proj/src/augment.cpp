#include "dermaprep/augment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>

#include "dermaprep/csv.hpp"
#include "dermaprep/error.hpp"
#include "dermaprep/imaging.hpp"
#include "dermaprep/parallel.hpp"
#include "dermaprep/rng.hpp"

namespace dermaprep {

namespace fs = std::filesystem;

Image flip_h(const Image& img) {
  Image out(img.width(), img.height(), img.channels());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      for (int c = 0; c < img.channels(); ++c) out.at(img.width() - 1 - x, y, c) = img.at(x, y, c);
  return out;
}

Image flip_v(const Image& img) {
  Image out(img.width(), img.height(), img.channels());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      for (int c = 0; c < img.channels(); ++c) out.at(x, img.height() - 1 - y, c) = img.at(x, y, c);
  return out;
}

BinaryMask flip_h(const BinaryMask& m) {
  BinaryMask out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) out.set(m.width() - 1 - x, y, m.at(x, y));
  return out;
}

BinaryMask flip_v(const BinaryMask& m) {
  BinaryMask out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) out.set(x, m.height() - 1 - y, m.at(x, y));
  return out;
}

CropWindow crop_window(int width, int height, double frac, std::uint64_t seed) {
  if (!(frac > 0.0 && frac <= 1.0)) throw InvalidArgument("random_crop: fraction must be in (0,1]");
  if (frac * std::min(width, height) < 1.0) throw InvalidArgument("random_crop: degenerate crop size");
  CropWindow w;
  w.width = std::clamp(static_cast<int>(std::ceil(frac * width)), 1, width);
  w.height = std::clamp(static_cast<int>(std::ceil(frac * height)), 1, height);
  const CounterRng rng(seed);
  w.x = static_cast<int>(rng.below(0, static_cast<std::uint64_t>(width - w.width + 1)));
  w.y = static_cast<int>(rng.below(1, static_cast<std::uint64_t>(height - w.height + 1)));
  return w;
}

Image random_crop(const Image& img, double frac, std::uint64_t seed) {
  const CropWindow w = crop_window(img.width(), img.height(), frac, seed);
  Image cut(w.width, w.height, img.channels());
  for (int y = 0; y < w.height; ++y)
    for (int x = 0; x < w.width; ++x)
      for (int c = 0; c < img.channels(); ++c) cut.at(x, y, c) = img.at(w.x + x, w.y + y, c);
  return resize(cut, img.width(), img.height());
}

BinaryMask random_crop(const BinaryMask& m, double frac, std::uint64_t seed) {
  Image as_image(m.width(), m.height(), 1);
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) as_image.at(x, y, 0) = m.at(x, y) ? 1.0f : 0.0f;
  const Image cropped = random_crop(as_image, frac, seed);
  BinaryMask out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) out.set(x, y, cropped.at(x, y, 0) >= 0.5f);
  return out;
}

const ClassPlan* AugPlan::find(const std::string& label) const {
  for (const auto& c : classes)
    if (c.label == label) return &c;
  return nullptr;
}

AugPlan plan_balance(const DatasetManifest& m, const std::map<std::string, int>& generated,
                     const BalanceOptions& opts) {
  if (opts.multiplier < 1) throw ConfigError("augment.multiplier must be >= 1");
  const auto labels = m.classes();
  for (const auto& [label, n] : generated) {
    if (std::find(labels.begin(), labels.end(), label) == labels.end())
      throw ConfigError("generated images for class '" + label + "' which the manifest does not contain");
    if (n < 0) throw ConfigError("negative generated count for class '" + label + "'");
  }
  for (const auto& [label, n] : opts.stage_targets)
    if (std::find(labels.begin(), labels.end(), label) == labels.end())
      throw ConfigError("stage target for unknown class '" + label + "'");

  AugPlan plan;
  plan.global_multiplier = opts.multiplier;
  for (const auto& label : labels) {
    ClassPlan c;
    c.label = label;
    for (const auto& r : m.rows) {
      if (r.class_label != label) continue;
      switch (r.provenance) {
        case Provenance::original:
        case Provenance::augmented: ++c.base_count; break;
        case Provenance::purified: ++c.purified_added; break;
        case Provenance::generated: ++c.generated_added; break;
      }
    }
    if (auto it = generated.find(label); it != generated.end()) c.generated_added += it->second;
    plan.classes.push_back(c);
  }

  int reference = 0;
  bool have_reference = false;
  for (const auto& c : plan.classes) {
    if (c.generated_added == 0) {
      reference = std::max(reference, c.pool());
      have_reference = true;
    }
  }
  if (!have_reference)
    for (const auto& c : plan.classes) reference = std::max(reference, c.pool());

  double gen_final = 0.0, total_final = 0.0;
  for (auto& c : plan.classes) {
    if (auto it = opts.stage_targets.find(c.label); it != opts.stage_targets.end()) {
      c.flip_h_target = it->second;
      c.explicit_target = true;
    } else if (c.generated_added > 0) {
      c.flip_h_target = std::clamp(reference, c.pool(), 2 * c.pool());
    } else {
      c.flip_h_target = c.pool();
    }
    c.final_target = c.flip_h_target * opts.multiplier;
    if (c.flip_h_target < c.pool())
      plan.problems.push_back(c.label + ": stage target " + std::to_string(c.flip_h_target) +
                              " is below the available " + std::to_string(c.pool()) + " images");
    else if (c.flip_h_target > 2 * c.pool())
      plan.problems.push_back(c.label + ": stage target " + std::to_string(c.flip_h_target) +
                              " needs more than one horizontal flip per image (pool " +
                              std::to_string(c.pool()) + ", max " + std::to_string(2 * c.pool()) + ")");
    total_final += c.final_target;
    if (c.pool() > 0)
      gen_final += static_cast<double>(c.final_target) * c.generated_added / c.pool();
  }
  plan.generated_fraction = total_final > 0.0 ? gen_final / total_final : 0.0;
  return plan;
}

std::map<std::string, int> scale_targets(const std::map<std::string, int>& targets, double factor) {
  std::map<std::string, int> out;
  for (const auto& [k, v] : targets) out[k] = static_cast<int>(std::floor(v * factor + 0.5));
  return out;
}

void print_plan(std::ostream& out, const AugPlan& plan) {
  out << std::left << std::setw(24) << "class" << std::right << std::setw(8) << "base"
      << std::setw(10) << "purified" << std::setw(11) << "generated" << std::setw(8) << "pool"
      << std::setw(8) << "flips" << std::setw(8) << "stage" << std::setw(6) << "x"
      << std::setw(9) << "final" << "\n";
  int total = 0;
  for (const auto& c : plan.classes) {
    out << std::left << std::setw(24) << c.label << std::right << std::setw(8) << c.base_count
        << std::setw(10) << c.purified_added << std::setw(11) << c.generated_added << std::setw(8)
        << c.pool() << std::setw(8) << c.flips() << std::setw(8) << c.flip_h_target
        << std::setw(6) << plan.global_multiplier << std::setw(9) << c.final_target
        << (c.explicit_target ? "  (explicit stage target)" : "") << "\n";
    total += c.final_target;
  }
  out << "total final images: " << total << ", generated share "
      << std::fixed << std::setprecision(1) << plan.generated_fraction * 100.0 << "%\n"
      << std::defaultfloat;
  for (const auto& p : plan.problems) out << "infeasible: " << p << "\n";
}

void write_plan_csv(const AugPlan& plan, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "class_label,base_count,purified_added,generated_added,flip_h_target,global_multiplier,"
         "final_target\n";
  for (const auto& c : plan.classes)
    out << csv::join({c.label, std::to_string(c.base_count), std::to_string(c.purified_added),
                      std::to_string(c.generated_added), std::to_string(c.flip_h_target),
                      std::to_string(plan.global_multiplier), std::to_string(c.final_target)})
        << "\n";
}

namespace {

std::string file_stem_for(const std::string& id) {
  std::string s = id;
  for (char& c : s)
    if (c == '/' || c == '\\' || c == ':') c = '_';
  return s;
}

struct StageItem {
  const ManifestRow* source;
  bool flipped;  // horizontal-flip stage copy
  std::string id;
};

struct Produced {
  std::vector<ManifestRow> rows;
};

}  // namespace

DatasetManifest apply_plan(const DatasetManifest& m, const AugPlan& plan, std::uint64_t seed,
                           const fs::path& out_dir, const ApplyOptions& opts) {
  if (!plan.feasible()) {
    std::string msg = "augmentation plan is infeasible:";
    for (const auto& p : plan.problems) msg += "\n  " + p;
    throw Error(msg);
  }
  const auto counts = m.count_by_class();
  for (const auto& c : plan.classes) {
    const int have = counts.contains(c.label) ? counts.at(c.label) : 0;
    if (have != c.pool())
      throw InvalidArgument("manifest has " + std::to_string(have) + " images of class '" + c.label +
                            "' but the plan expects " + std::to_string(c.pool()));
  }

  const fs::path out_abs = fs::absolute(out_dir).lexically_normal();
  const fs::path image_dir = out_abs / "images";
  const fs::path mask_dir = out_abs / "masks";
  const int mult = plan.global_multiplier;

  std::vector<StageItem> items;
  for (const auto& r : m.rows)
    if (plan.find(r.class_label)) items.push_back({&r, false, r.image_id});
  for (const auto& c : plan.classes) {
    std::vector<const ManifestRow*> members;
    for (const auto& r : m.rows)
      if (r.class_label == c.label) members.push_back(&r);
    std::sort(members.begin(), members.end(),
              [](const ManifestRow* a, const ManifestRow* b) { return a->image_id < b->image_id; });
    for (int i = 0; i < c.flips(); ++i)
      items.push_back({members[static_cast<std::size_t>(i)], true, members[static_cast<std::size_t>(i)]->image_id + "+fliph"});
  }

  std::vector<Produced> produced(items.size());
  parallel_for(items.size(), opts.threads, [&](std::size_t i) {
    const StageItem& item = items[i];
    const ManifestRow& src = *item.source;
    auto& rows = produced[i].rows;
    if (!item.flipped && mult == 1) {
      rows.push_back(src);
      return;
    }
    Image img = load_image(m.resolve(src.path));
    std::optional<BinaryMask> mask;
    if (src.mask_path) mask = load_mask(m.resolve(*src.mask_path));
    if (item.flipped) {
      img = flip_h(img);
      if (mask) mask = flip_h(*mask);
    }

    auto emit = [&](const std::string& id, const Image& out_img, const std::optional<BinaryMask>& out_mask) {
      ManifestRow row;
      row.image_id = id;
      row.class_label = src.class_label;
      row.provenance = Provenance::augmented;
      row.path = image_dir / (file_stem_for(id) + ".png");
      save_png(out_img, row.path);
      if (out_mask) {
        row.mask_path = mask_dir / (file_stem_for(id) + ".png");
        save_mask(*out_mask, *row.mask_path);
      }
      rows.push_back(std::move(row));
    };

    if (item.flipped)
      emit(item.id, img, mask);
    else
      rows.push_back(src);
    for (int t = 1; t < mult; ++t) {
      if (t == 1) {
        emit(item.id + "+flipv", flip_v(img),
             mask ? std::optional<BinaryMask>(flip_v(*mask)) : std::nullopt);
        continue;
      }
      const std::uint64_t s = CounterRng::derive_seed(seed, item.id, static_cast<std::uint64_t>(t));
      emit(item.id + "+crop" + std::to_string(t - 1), random_crop(img, opts.crop_fraction, s),
           mask ? std::optional<BinaryMask>(random_crop(*mask, opts.crop_fraction, s)) : std::nullopt);
    }
  });

  DatasetManifest out;
  out.base_dir = out_abs;
  auto absolute_row = [&](ManifestRow r) {
    r.path = m.resolve(r.path);
    if (r.mask_path) r.mask_path = m.resolve(*r.mask_path);
    return r;
  };
  std::size_t next = 0;
  for (const auto& r : m.rows) {
    if (!plan.find(r.class_label)) {
      out.rows.push_back(absolute_row(r));
      continue;
    }
    for (auto& row : produced[next++].rows) out.rows.push_back(absolute_row(std::move(row)));
  }
  for (; next < produced.size(); ++next)
    for (auto& row : produced[next].rows) out.rows.push_back(absolute_row(std::move(row)));
  out.validate();
  return out;
}

}  // namespace dermaprep
