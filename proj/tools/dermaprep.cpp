// dermaprep command-line front end.
#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dermaprep/commands.hpp"

namespace fs = std::filesystem;
using namespace dermaprep::cli;

int main(int argc, char** argv) {
  CLI::App app{"dermoscopy dataset preparation toolkit"};
  app.require_subcommand(1);

  std::string config, out = "out";
  std::optional<std::uint64_t> seed;
  int threads = 0;
  bool quiet = false;
  app.add_option("--config", config, "key = value configuration file");
  app.add_option("--seed", seed, "random seed (overrides the config)");
  app.add_option("--out", out, "output directory");
  app.add_option("--threads", threads, "worker threads (0: auto)")->check(CLI::NonNegativeNumber);
  app.add_flag("--quiet", quiet, "only log failures");

  std::string manifest, generated, training, predictions, mask_dir, spec;
  std::vector<std::string> images, classes;
  bool emit_mask = false, no_bias = false;

  auto* purify = app.add_subcommand("purify", "remove hairs and other occlusions");
  purify->add_option("manifest", manifest)->required();
  purify->add_flag("--emit-mask", emit_mask, "write the occlusion mask as <id>.occ.png");

  auto* mask_post = app.add_subcommand("mask-post", "fill holes in every PNG mask of a directory");
  mask_post->add_option("mask_dir", mask_dir)->required();
  std::optional<std::string> truth_dir;
  mask_post->add_option("--truth", truth_dir, "score filled masks against same-named masks here");

  auto* arch_cmd = app.add_subcommand("arch", "architecture tools");
  arch_cmd->require_subcommand(1);
  auto* verify = arch_cmd->add_subcommand("verify", "check declared layer shapes and weight sharing");
  verify->add_option("spec", spec)->required();
  verify->add_flag("--no-bias", no_bias, "count parameters without bias terms");

  auto* dedup = app.add_subcommand("dedup", "nearest training image by MSE for each generated image");
  dedup->add_option("generated", generated)->required();
  dedup->add_option("training", training)->required();

  auto* plan = app.add_subcommand("plan", "print the class balancing plan");
  plan->add_option("manifest", manifest)->required();
  plan->add_option("--generated", generated, "manifest of synthesised images");

  auto* augment = app.add_subcommand("augment", "materialise the balancing plan");
  augment->add_option("manifest", manifest)->required();
  augment->add_option("--generated", generated, "manifest of synthesised images");

  auto* eval = app.add_subcommand("eval", "ROC, AUC and confusion report from a predictions CSV");
  eval->add_option("predictions", predictions)->required();
  eval->add_option("--classes", classes, "expected class order")->delimiter(',');

  auto* stack = app.add_subcommand("stack", "export 7-channel 380x380 tensors");
  stack->add_option("images", images)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  Context ctx;
  if (!config.empty()) ctx.config_path = config;
  ctx.seed = seed;
  ctx.out_dir = out;
  ctx.threads = threads;
  ctx.quiet = quiet;

  auto opt_path = [](const std::string& s) { return s.empty() ? std::nullopt : std::optional<fs::path>(s); };

  if (*purify) return cmd_purify(ctx, manifest, emit_mask);
  if (*mask_post) return cmd_mask_post(ctx, mask_dir,
                                        truth_dir ? std::optional<std::filesystem::path>(*truth_dir) : std::nullopt);
  if (*verify) return cmd_arch_verify(ctx, spec, !no_bias);
  if (*dedup) return cmd_dedup(ctx, generated, training);
  if (*plan) return cmd_plan(ctx, manifest, opt_path(generated));
  if (*augment) return cmd_augment(ctx, manifest, opt_path(generated));
  if (*eval) return cmd_eval(ctx, predictions, classes);
  if (*stack) return cmd_stack(ctx, std::vector<fs::path>(images.begin(), images.end()));
  return kExitConfig;
}
