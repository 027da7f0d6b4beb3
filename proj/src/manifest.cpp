#include "dermaprep/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "dermaprep/csv.hpp"
#include "dermaprep/error.hpp"

namespace dermaprep {

namespace fs = std::filesystem;

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::original: return "original";
    case Provenance::purified: return "purified";
    case Provenance::generated: return "generated";
    case Provenance::augmented: return "augmented";
  }
  return "original";
}

Provenance parse_provenance(std::string_view s) {
  if (s == "original") return Provenance::original;
  if (s == "purified") return Provenance::purified;
  if (s == "generated") return Provenance::generated;
  if (s == "augmented") return Provenance::augmented;
  throw ConfigError("unknown provenance '" + std::string(s) + "'");
}

fs::path DatasetManifest::resolve(const fs::path& p) const {
  if (p.is_absolute()) return p.lexically_normal();
  return (base_dir / p).lexically_normal();
}

std::vector<std::string> DatasetManifest::classes() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& r : rows)
    if (seen.insert(r.class_label).second) out.push_back(r.class_label);
  return out;
}

std::map<std::string, int> DatasetManifest::count_by_class() const {
  std::map<std::string, int> out;
  for (const auto& r : rows) ++out[r.class_label];
  return out;
}

std::map<std::string, int> DatasetManifest::count_by_class(Provenance p) const {
  std::map<std::string, int> out;
  for (const auto& r : rows)
    if (r.provenance == p) ++out[r.class_label];
  return out;
}

void DatasetManifest::validate(const std::vector<std::string>& class_list) const {
  std::set<std::string> ids;
  for (const auto& r : rows) {
    if (r.image_id.empty()) throw ConfigError("manifest row with empty image_id");
    if (!ids.insert(r.image_id).second) throw ConfigError("duplicate image_id '" + r.image_id + "'");
    if (!class_list.empty() &&
        std::find(class_list.begin(), class_list.end(), r.class_label) == class_list.end())
      throw ConfigError("image '" + r.image_id + "' has class '" + r.class_label +
                        "' outside the configured class list");
  }
}

DatasetManifest read_manifest(const fs::path& path) {
  const csv::Table t = csv::read(path);
  const std::vector<std::string> expected{"image_id", "path", "class_label", "provenance", "mask_path"};
  if (t.header != expected)
    throw ParseError(path.string(), 1, "manifest header must be " + std::string(kManifestHeader));
  DatasetManifest m;
  m.base_dir = fs::absolute(path).parent_path();
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& f = t.rows[i];
    ManifestRow r;
    r.image_id = f[0];
    r.path = f[1];
    r.class_label = f[2];
    try {
      r.provenance = f[3].empty() ? Provenance::original : parse_provenance(f[3]);
    } catch (const ConfigError& e) {
      throw ParseError(path.string(), t.row_lines[i], e.what());
    }
    if (!f[4].empty()) r.mask_path = fs::path(f[4]);
    if (r.image_id.empty() || r.path.empty() || r.class_label.empty())
      throw ParseError(path.string(), t.row_lines[i], "image_id, path and class_label are required");
    m.rows.push_back(std::move(r));
  }
  m.validate();
  return m;
}

void write_manifest(const DatasetManifest& m, const fs::path& path) {
  const fs::path dir = fs::absolute(path).parent_path();
  fs::create_directories(dir);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  auto rel = [&](const fs::path& p) {
    return m.resolve(p).lexically_relative(dir).generic_string();
  };
  out << kManifestHeader << "\n";
  for (const auto& r : m.rows) {
    out << csv::join({r.image_id, rel(r.path), r.class_label, std::string(to_string(r.provenance)),
                      r.mask_path ? rel(*r.mask_path) : std::string()})
        << "\n";
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace dermaprep
