#include "dermaprep/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "dermaprep/error.hpp"

namespace dermaprep {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

class Reader {
 public:
  explicit Reader(const KeyValues& kv) : kv_(kv) {}

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ParseError(kv_.source, kv_.entries.at(key).line, key + ": " + what);
  }

  long long integer(const std::string& key, const std::string& v) const {
    try {
      std::size_t used = 0;
      const long long n = std::stoll(v, &used);
      if (used == v.size()) return n;
    } catch (const std::exception&) {
    }
    fail(key, "expected an integer, got '" + v + "'");
  }

  double real(const std::string& key, const std::string& v) const {
    try {
      std::size_t used = 0;
      const double d = std::stod(v, &used);
      if (used == v.size()) return d;
    } catch (const std::exception&) {
    }
    fail(key, "expected a number, got '" + v + "'");
  }

 private:
  const KeyValues& kv_;
};

}  // namespace

KeyValues parse_key_values(const std::string& text, const std::string& source) {
  KeyValues kv;
  kv.source = source;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(source, lineno, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(source, lineno, "empty key");
    if (!kv.entries.try_emplace(key, KeyValues::Entry{value, lineno}).second)
      throw ParseError(source, lineno, "duplicate key '" + key + "'");
  }
  return kv;
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_key_values(ss.str(), path.string());
}

void PipelineConfig::validate() const {
  purify.validate();
  if (comparison_resolution < 1) throw ConfigError("comparison_resolution must be >= 1");
  if (dedup_threshold < 0.0) throw ConfigError("dedup.threshold must be >= 0");
  if (dedup_bins < 1) throw ConfigError("dedup.bins must be >= 1");
  if (multiplier < 1) throw ConfigError("augment.multiplier must be >= 1");
  if (!(crop_fraction > 0.0 && crop_fraction <= 1.0))
    throw ConfigError("augment.crop_fraction must be in (0,1]");
  if (!(stage_scale > 0.0)) throw ConfigError("augment.stage_scale must be > 0");
  if (class_list.empty()) throw ConfigError("classes must not be empty");
  std::set<std::string> uniq(class_list.begin(), class_list.end());
  if (uniq.size() != class_list.size()) throw ConfigError("classes must be unique");
}

PipelineConfig config_from(const KeyValues& kv) {
  PipelineConfig cfg;
  const Reader rd(kv);
  constexpr std::string_view stage_prefix = "augment.stage_target.";
  for (const auto& [key, entry] : kv.entries) {
    const std::string& v = entry.value;
    if (key == "seed") {
      const long long s = rd.integer(key, v);
      if (s < 0) rd.fail(key, "seed must be non-negative");
      cfg.seed = static_cast<std::uint64_t>(s);
    } else if (key == "classes") {
      cfg.class_list = split_list(v);
    } else if (key == "comparison_resolution") {
      cfg.comparison_resolution = static_cast<int>(rd.integer(key, v));
    } else if (key == "dedup.threshold") {
      cfg.dedup_threshold = rd.real(key, v);
    } else if (key == "dedup.bins") {
      cfg.dedup_bins = static_cast<int>(rd.integer(key, v));
    } else if (key == "augment.multiplier") {
      cfg.multiplier = static_cast<int>(rd.integer(key, v));
    } else if (key == "augment.crop_fraction") {
      cfg.crop_fraction = rd.real(key, v);
    } else if (key == "augment.stage_scale") {
      cfg.stage_scale = rd.real(key, v);
    } else if (key.starts_with(stage_prefix)) {
      cfg.stage_targets[key.substr(stage_prefix.size())] = static_cast<int>(rd.integer(key, v));
    } else if (key == "eval.mean_classes") {
      cfg.mean_auc_classes = split_list(v);
    } else if (key == "purify.luminance_threshold") {
      if (v == "otsu")
        cfg.purify.luminance_threshold.reset();
      else
        cfg.purify.luminance_threshold = rd.real(key, v);
    } else if (key == "purify.line_lengths") {
      cfg.purify.line_lengths.clear();
      for (const auto& s : split_list(v)) cfg.purify.line_lengths.push_back(static_cast<int>(rd.integer(key, s)));
    } else if (key == "purify.line_angles") {
      cfg.purify.line_angles.clear();
      for (const auto& s : split_list(v)) cfg.purify.line_angles.push_back(rd.real(key, s));
    } else if (key == "purify.closing_radius") {
      cfg.purify.closing_radius = static_cast<int>(rd.integer(key, v));
    } else if (key == "purify.inpaint_iterations") {
      cfg.purify.inpaint_iterations = static_cast<int>(rd.integer(key, v));
    } else if (key == "purify.min_component_area") {
      cfg.purify.min_component_area = static_cast<int>(rd.integer(key, v));
    } else {
      rd.fail(key, "unknown configuration key");
    }
  }
  try {
    cfg.validate();
  } catch (const ParseError&) {
    throw;
  } catch (const ConfigError& e) {
    throw ConfigError(kv.source + ": " + e.what());
  }
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) { return config_from(read_key_values(path)); }

}  // namespace dermaprep
