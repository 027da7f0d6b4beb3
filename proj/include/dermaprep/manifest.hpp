#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dermaprep {

enum class Provenance { original, purified, generated, augmented };
std::string_view to_string(Provenance p);
Provenance parse_provenance(std::string_view s);  // throws ConfigError

struct ManifestRow {
  std::string image_id;
  std::filesystem::path path;  // relative to the manifest directory, or absolute
  std::string class_label;
  Provenance provenance = Provenance::original;
  std::optional<std::filesystem::path> mask_path;
};

// CSV columns: image_id,path,class_label,provenance,mask_path
struct DatasetManifest {
  std::filesystem::path base_dir;
  std::vector<ManifestRow> rows;

  std::filesystem::path resolve(const std::filesystem::path& p) const;
  // Labels in order of first appearance.
  std::vector<std::string> classes() const;
  std::map<std::string, int> count_by_class() const;
  std::map<std::string, int> count_by_class(Provenance p) const;
  // Unique ids; labels drawn from `class_list` when non-empty.
  void validate(const std::vector<std::string>& class_list = {}) const;
};

inline constexpr std::string_view kManifestHeader = "image_id,path,class_label,provenance,mask_path";

DatasetManifest read_manifest(const std::filesystem::path& path);
// Paths are written relative to the directory of `path`.
void write_manifest(const DatasetManifest& m, const std::filesystem::path& path);

}  // namespace dermaprep
