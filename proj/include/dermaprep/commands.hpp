#pragma once

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "dermaprep/config.hpp"

namespace dermaprep::cli {

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFinding = 1;  // mismatch, duplicate, infeasible plan, failed rows
inline constexpr int kExitIo = 2;
inline constexpr int kExitConfig = 3;

struct Context {
  std::optional<std::filesystem::path> config_path;
  std::optional<std::uint64_t> seed;  // overrides the config file
  std::filesystem::path out_dir = "out";
  int threads = 0;  // 0: DERMAPREP_THREADS or hardware concurrency
  bool quiet = false;
  std::ostream* out = &std::cout;
  std::ostream* err = &std::cerr;
};

PipelineConfig resolve_config(const Context& ctx);

int cmd_purify(const Context& ctx, const std::filesystem::path& manifest, bool emit_mask);
// With `truth_dir`, each filled mask is scored against the same file name
// there and the Jaccard summary is printed and written to jaccard.csv.
int cmd_mask_post(const Context& ctx, const std::filesystem::path& mask_dir,
                  const std::optional<std::filesystem::path>& truth_dir = std::nullopt);
int cmd_arch_verify(const Context& ctx, const std::filesystem::path& spec, bool bias = true);
int cmd_dedup(const Context& ctx, const std::filesystem::path& generated,
              const std::filesystem::path& training);
int cmd_plan(const Context& ctx, const std::filesystem::path& manifest,
             const std::optional<std::filesystem::path>& generated);
int cmd_augment(const Context& ctx, const std::filesystem::path& manifest,
                const std::optional<std::filesystem::path>& generated);
int cmd_eval(const Context& ctx, const std::filesystem::path& predictions,
             const std::vector<std::string>& class_list = {});
int cmd_stack(const Context& ctx, const std::vector<std::filesystem::path>& images);

}  // namespace dermaprep::cli
