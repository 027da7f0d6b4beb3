#pragma once
// On-disk fixtures: small synthetic images and manifests in scratch dirs.

#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <string>
#include <vector>

#include "dermaprep/image.hpp"
#include "dermaprep/manifest.hpp"
#include "synthetic.hpp"

namespace fixtures {

namespace fs = std::filesystem;

// Fresh, empty directory under the system temp dir.
inline fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "dermaprep_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

struct ClassSpec {
  std::string label;
  int count = 0;
  dermaprep::Provenance provenance = dermaprep::Provenance::original;
};

// Writes `count` random images (and masks) per entry and returns the
// manifest path. Ids are "<label>_<provenance>_<i>".
// With `skin` set, images are synthetic hair samples and masks their
// lesions; otherwise both are random noise.
inline fs::path write_manifest(const fs::path& dir, const std::vector<ClassSpec>& spec, std::uint64_t seed,
                               int size = 16, bool masks = true, bool skin = false) {
  synth::Stream s(seed);
  dermaprep::DatasetManifest m;
  m.base_dir = dir;
  fs::create_directories(dir / "img");
  for (const auto& c : spec)
    for (int i = 0; i < c.count; ++i) {
      dermaprep::ManifestRow r;
      r.image_id = c.label + "_" + std::string(dermaprep::to_string(c.provenance)) + "_" + std::to_string(i);
      r.class_label = c.label;
      r.provenance = c.provenance;
      r.path = dir / "img" / (r.image_id + ".png");
      if (skin) {
        const synth::HairSample hs = synth::make_hair_sample(s.next(), size);
        dermaprep::save_png(hs.degraded, r.path);
        if (masks) {
          r.mask_path = dir / "img" / (r.image_id + ".mask.png");
          dermaprep::save_mask(hs.lesion, *r.mask_path);
        }
      } else {
        dermaprep::Image img(size, size, 3);
        for (float& v : img.data()) v = static_cast<float>(s.uniform());
        dermaprep::save_png(img, r.path);
        if (masks) {
          r.mask_path = dir / "img" / (r.image_id + ".mask.png");
          dermaprep::save_mask(synth::random_blobs(s, size, size), *r.mask_path);
        }
      }
      m.rows.push_back(std::move(r));
    }
  const fs::path path = dir / "manifest.csv";
  dermaprep::write_manifest(m, path);
  return path;
}

// Every regular file under `dir` with its bytes, keyed by relative path.
inline std::map<std::string, std::string> snapshot(const fs::path& dir, const std::string& skip_ext = ".log") {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() != skip_ext)
      out[fs::relative(e.path(), dir).generic_string()] = slurp(e.path());
  return out;
}

}  // namespace fixtures
