#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dermaprep/purify.hpp"

namespace dermaprep {

// Flat "key = value" text; '#' starts a comment. Keys carry a section
// prefix, e.g. "purify.closing_radius = 5".
struct KeyValues {
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::string source;
  std::map<std::string, Entry> entries;
};

KeyValues parse_key_values(const std::string& text, const std::string& source = "<config>");
KeyValues read_key_values(const std::filesystem::path& path);

struct PipelineConfig {
  PurifyConfig purify;
  int comparison_resolution = 256;
  double dedup_threshold = 0.005;
  int dedup_bins = 20;
  int multiplier = 6;
  double crop_fraction = 0.875;
  // Explicit flip-stage class sizes, optionally rescaled by stage_scale.
  std::map<std::string, int> stage_targets;
  double stage_scale = 1.0;
  std::optional<std::uint64_t> seed;  // no implicit default
  std::vector<std::string> class_list{"melanoma", "nevus", "seborrheic_keratosis"};
  std::vector<std::string> mean_auc_classes{"melanoma", "seborrheic_keratosis"};

  void validate() const;
};

// Unknown keys and malformed values raise ConfigError/ParseError.
PipelineConfig config_from(const KeyValues& kv);
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace dermaprep
