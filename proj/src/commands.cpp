#include "dermaprep/commands.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "dermaprep/archcheck.hpp"
#include "dermaprep/augment.hpp"
#include "dermaprep/csv.hpp"
#include "dermaprep/dedup.hpp"
#include "dermaprep/error.hpp"
#include "dermaprep/image.hpp"
#include "dermaprep/imaging.hpp"
#include "dermaprep/manifest.hpp"
#include "dermaprep/maskops.hpp"
#include "dermaprep/metrics.hpp"
#include "dermaprep/parallel.hpp"
#include "dermaprep/purify.hpp"

namespace dermaprep::cli {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

// One line per processed item: stage, id, duration, outcome.
class RunLog {
 public:
  RunLog(const Context& ctx, const std::string& stage) : ctx_(ctx), stage_(stage) {
    fs::create_directories(ctx.out_dir);
    file_.open(ctx.out_dir / (stage + ".log"), std::ios::trunc);
    if (!file_) throw IoError("cannot write log in " + ctx.out_dir.string());
  }

  void record(const std::string& id, double ms, const std::string& outcome,
              const std::string& message = {}) {
    std::ostringstream line;
    line << "stage=" << stage_ << " id=" << id << " duration_ms=" << std::fixed
         << std::setprecision(1) << ms << " outcome=" << outcome;
    if (!message.empty()) line << " message=\"" << message << "\"";
    file_ << line.str() << "\n";
    if (!ctx_.quiet || outcome != "ok") *ctx_.err << line.str() << "\n";
  }

 private:
  const Context& ctx_;
  std::string stage_;
  std::ofstream file_;
};

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

int guarded(const Context& ctx, const std::function<int()>& body) {
  try {
    return body();
  } catch (const Error& e) {
    *ctx.err << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const fs::filesystem_error& e) {
    *ctx.err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    *ctx.err << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

std::string file_stem_for(const std::string& id) {
  std::string s = id;
  for (char& c : s)
    if (c == '/' || c == '\\' || c == ':') c = '_';
  return s;
}

std::string class_counts_sentence(const std::vector<std::string>& order, const std::map<std::string, int>& counts) {
  std::vector<std::string> parts;
  for (const auto& c : order)
    if (auto it = counts.find(c); it != counts.end() && it->second > 0)
      parts.push_back(std::to_string(it->second) + " cases of " + c);
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) s += (i + 1 == parts.size()) ? (parts.size() > 2 ? ", and " : " and ") : ", ";
    s += parts[i];
  }
  return s.empty() ? "0 cases" : s;
}

// Training / generated images at the comparison resolution.
std::vector<NamedImage> load_for_comparison(const DatasetManifest& m, int resolution, unsigned threads) {
  std::vector<NamedImage> out(m.rows.size());
  parallel_for(m.rows.size(), threads, [&](std::size_t i) {
    const auto& r = m.rows[i];
    out[i] = {r.image_id, resize(load_image(m.resolve(r.path)), resolution, resolution)};
  });
  return out;
}

DatasetManifest merged(const DatasetManifest& base, const DatasetManifest& generated) {
  DatasetManifest m = base;
  for (auto r : generated.rows) {
    r.path = generated.resolve(r.path);
    if (r.mask_path) r.mask_path = generated.resolve(*r.mask_path);
    r.provenance = Provenance::generated;
    m.rows.push_back(std::move(r));
  }
  m.validate();
  return m;
}

}  // namespace

PipelineConfig resolve_config(const Context& ctx) {
  PipelineConfig cfg = ctx.config_path ? load_config(*ctx.config_path) : PipelineConfig{};
  if (ctx.seed) cfg.seed = ctx.seed;
  return cfg;
}

int cmd_purify(const Context& ctx, const fs::path& manifest_path, bool emit_mask) {
  return guarded(ctx, [&] {
    const PipelineConfig cfg = resolve_config(ctx);
    const DatasetManifest m = read_manifest(manifest_path);
    RunLog log(ctx, "purify");
    const fs::path out_abs = fs::absolute(ctx.out_dir);
    const fs::path image_dir = out_abs / "images";

    struct RowResult {
      std::optional<ManifestRow> row;
      std::string error;
      double ms = 0.0;
    };
    std::vector<RowResult> results(m.rows.size());
    parallel_for(m.rows.size(), thread_cap(ctx.threads), [&](std::size_t i) {
      const auto t0 = Clock::now();
      const auto& src = m.rows[i];
      try {
        const Image img = load_image(m.resolve(src.path));
        const BinaryMask lesion =
            src.mask_path ? load_mask(m.resolve(*src.mask_path)) : BinaryMask(img.width(), img.height());
        if (!lesion.same_size(img))
          throw InvalidArgument("lesion mask size differs from image size");
        const PurifyResult res = purify(img, lesion, cfg.purify.scaled_to(img.width()));
        ManifestRow row;
        row.image_id = src.image_id + "+purified";
        row.class_label = src.class_label;
        row.provenance = Provenance::purified;
        row.path = image_dir / (file_stem_for(row.image_id) + ".png");
        if (src.mask_path) row.mask_path = m.resolve(*src.mask_path);
        save_png(res.image, row.path);
        if (emit_mask) save_mask(res.occlusions, image_dir / (file_stem_for(row.image_id) + ".occ.png"));
        results[i].row = std::move(row);
      } catch (const std::exception& e) {
        results[i].error = e.what();
      }
      results[i].ms = ms_since(t0);
    });

    DatasetManifest out;
    out.base_dir = out_abs;
    std::map<std::string, int> done;
    bool failed = false;
    for (std::size_t i = 0; i < results.size(); ++i) {
      if (results[i].row) {
        log.record(m.rows[i].image_id, results[i].ms, "ok");
        ++done[m.rows[i].class_label];
        out.rows.push_back(std::move(*results[i].row));
      } else {
        log.record(m.rows[i].image_id, results[i].ms, "error", results[i].error);
        failed = true;
      }
    }
    write_manifest(out, out_abs / "manifest.csv");
    *ctx.out << "Purified " << class_counts_sentence(m.classes(), done) << ".\n";
    return failed ? kExitFinding : kExitOk;
  });
}

int cmd_mask_post(const Context& ctx, const fs::path& mask_dir, const std::optional<fs::path>& truth_dir) {
  return guarded(ctx, [&] {
    if (!fs::is_directory(mask_dir)) throw IoError("not a directory: " + mask_dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(mask_dir))
      if (e.is_regular_file() && e.path().extension() == ".png") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    RunLog log(ctx, "mask-post");
    if (truth_dir)
      for (const auto& f : files)
        if (!fs::exists(*truth_dir / f.filename()))
          throw IoError("no truth mask for " + f.filename().string() + " in " + truth_dir->string());
    std::vector<double> ms(files.size());
    std::vector<BinaryMask> filled(truth_dir ? files.size() : 0), truth(filled.size());
    parallel_for(files.size(), thread_cap(ctx.threads), [&](std::size_t i) {
      const auto t0 = Clock::now();
      BinaryMask m = fill_holes(load_mask(files[i]));
      save_mask(m, ctx.out_dir / files[i].filename());
      if (truth_dir) {
        truth[i] = load_mask(*truth_dir / files[i].filename());
        if (!truth[i].same_size(m)) throw IoError("truth mask size differs for " + files[i].filename().string());
        filled[i] = std::move(m);
      }
      ms[i] = ms_since(t0);
    });
    for (std::size_t i = 0; i < files.size(); ++i) log.record(files[i].filename().string(), ms[i], "ok");
    *ctx.out << "filled holes in " << files.size() << " mask(s)\n";
    if (truth_dir) {
      const JaccardSummary s = jaccard_summary(filled, truth);
      print_jaccard(*ctx.out, s);
      std::ofstream f(ctx.out_dir / "jaccard.csv", std::ios::binary | std::ios::trunc);
      if (!f) throw IoError("cannot write jaccard.csv in " + ctx.out_dir.string());
      f << std::setprecision(17) << "mask,jaccard\n";
      for (std::size_t i = 0; i < files.size(); ++i)
        f << csv::escape(files[i].filename().string()) << "," << jaccard(filled[i], truth[i]) << "\n";
      f << "mean_per_image," << s.mean_per_image << "\npooled," << s.pooled << "\n";
    }
    return kExitOk;
  });
}

int cmd_arch_verify(const Context& ctx, const fs::path& spec, bool bias) {
  return guarded(ctx, [&] {
    const arch::ArchFile file = arch::load_arch(spec.string());
    const arch::VerifyResult res = arch::verify(file, {.bias = bias});
    arch::print_report(*ctx.out, res);
    return res.ok() ? kExitOk : kExitFinding;
  });
}

int cmd_dedup(const Context& ctx, const fs::path& generated, const fs::path& training) {
  return guarded(ctx, [&] {
    const PipelineConfig cfg = resolve_config(ctx);
    const DatasetManifest gen = read_manifest(generated);
    const DatasetManifest train = read_manifest(training);
    if (train.rows.empty()) throw InvalidArgument("training manifest is empty");
    if (gen.rows.empty()) throw InvalidArgument("generated manifest is empty");
    const unsigned threads = thread_cap(ctx.threads);
    const auto corpus = load_for_comparison(train, cfg.comparison_resolution, threads);

    std::vector<MseRecord> records(gen.rows.size());
    std::vector<double> ms(gen.rows.size());
    parallel_for(gen.rows.size(), threads, [&](std::size_t i) {
      const auto t0 = Clock::now();
      const auto& r = gen.rows[i];
      const NamedImage g{r.image_id, resize(load_image(gen.resolve(r.path)), cfg.comparison_resolution,
                                            cfg.comparison_resolution)};
      records[i] = nearest(g, corpus);
      ms[i] = ms_since(t0);
    });
    RunLog log(ctx, "dedup");
    for (std::size_t i = 0; i < records.size(); ++i) log.record(records[i].generated_id, ms[i], "ok");

    const MseSummary s = summarize(records, cfg.dedup_bins, cfg.dedup_threshold);
    fs::create_directories(ctx.out_dir);
    {
      std::ofstream f(ctx.out_dir / "dedup_records.csv", std::ios::binary | std::ios::trunc);
      f << "generated_id,nearest_training_id,mse\n" << std::setprecision(17);
      for (const auto& r : records) f << r.generated_id << "," << r.nearest_training_id << "," << r.mse << "\n";
      if (!f) throw IoError("cannot write dedup_records.csv");
    }
    {
      std::ofstream f(ctx.out_dir / "dedup_histogram.csv", std::ios::binary | std::ios::trunc);
      f << "bin_lo,bin_hi,count\n" << std::setprecision(17);
      for (std::size_t b = 0; b < s.histogram.counts.size(); ++b)
        f << s.histogram.edges[b] << "," << s.histogram.edges[b + 1] << "," << s.histogram.counts[b] << "\n";
      if (!f) throw IoError("cannot write dedup_histogram.csv");
    }
    std::ostringstream summary;
    summary << "images " << records.size() << " vs training " << corpus.size() << "\n"
            << "mse " << format_mean_std(s) << "\n"
            << "flagged " << s.flagged.size() << " below " << cfg.dedup_threshold << "\n";
    for (const auto& id : s.flagged) summary << "  " << id << "\n";
    {
      std::ofstream f(ctx.out_dir / "dedup_summary.txt", std::ios::binary | std::ios::trunc);
      f << summary.str();
    }
    *ctx.out << summary.str();
    return s.flagged.empty() ? kExitOk : kExitFinding;
  });
}

namespace {

struct PlanInputs {
  DatasetManifest base;
  std::optional<DatasetManifest> generated;
  AugPlan plan;
};

PlanInputs make_plan(const PipelineConfig& cfg, const fs::path& manifest,
                     const std::optional<fs::path>& generated) {
  PlanInputs in;
  in.base = read_manifest(manifest);
  in.base.validate(cfg.class_list);
  std::map<std::string, int> gen_counts;
  if (generated) {
    in.generated = read_manifest(*generated);
    in.generated->validate(cfg.class_list);
    gen_counts = in.generated->count_by_class();
  }
  BalanceOptions opts;
  opts.multiplier = cfg.multiplier;
  opts.stage_targets = cfg.stage_scale == 1.0 ? cfg.stage_targets : scale_targets(cfg.stage_targets, cfg.stage_scale);
  in.plan = plan_balance(in.base, gen_counts, opts);
  return in;
}

}  // namespace

int cmd_plan(const Context& ctx, const fs::path& manifest, const std::optional<fs::path>& generated) {
  return guarded(ctx, [&] {
    const PipelineConfig cfg = resolve_config(ctx);
    const PlanInputs in = make_plan(cfg, manifest, generated);
    print_plan(*ctx.out, in.plan);
    write_plan_csv(in.plan, ctx.out_dir / "plan.csv");
    return in.plan.feasible() ? kExitOk : kExitFinding;
  });
}

int cmd_augment(const Context& ctx, const fs::path& manifest, const std::optional<fs::path>& generated) {
  return guarded(ctx, [&] {
    const PipelineConfig cfg = resolve_config(ctx);
    if (!cfg.seed) throw ConfigError("augment needs an explicit seed (--seed or 'seed =' in the config)");
    const PlanInputs in = make_plan(cfg, manifest, generated);
    print_plan(*ctx.out, in.plan);
    write_plan_csv(in.plan, ctx.out_dir / "plan.csv");
    if (!in.plan.feasible()) return kExitFinding;
    const DatasetManifest all = in.generated ? merged(in.base, *in.generated) : in.base;
    RunLog log(ctx, "augment");
    const auto t0 = Clock::now();
    const DatasetManifest out =
        apply_plan(all, in.plan, *cfg.seed, ctx.out_dir,
                   {.crop_fraction = cfg.crop_fraction, .threads = thread_cap(ctx.threads)});
    write_manifest(out, ctx.out_dir / "manifest.csv");
    log.record("manifest", ms_since(t0), "ok", std::to_string(out.rows.size()) + " rows");
    const auto counts = out.count_by_class();
    *ctx.out << "materialised " << out.rows.size() << " rows: "
             << class_counts_sentence(all.classes(), counts) << "\n";
    return kExitOk;
  });
}

int cmd_eval(const Context& ctx, const fs::path& predictions, const std::vector<std::string>& class_list) {
  return guarded(ctx, [&] {
    const PipelineConfig cfg = resolve_config(ctx);
    const metrics::PredictionSet preds = metrics::read_predictions(predictions);
    if (!class_list.empty() && class_list != preds.classes)
      throw ConfigError("class list does not match the predictions header");
    if (preds.items.empty()) throw ParseError(predictions.string(), 1, "no predictions");
    const metrics::EvalReport rep = metrics::evaluate(preds, cfg.mean_auc_classes);
    metrics::print_report(*ctx.out, rep);
    metrics::write_report_csv(rep, ctx.out_dir);
    return kExitOk;
  });
}

int cmd_stack(const Context& ctx, const std::vector<fs::path>& images) {
  return guarded(ctx, [&] {
    RunLog log(ctx, "stack");
    bool failed = false;
    for (const auto& p : images) {
      const auto t0 = Clock::now();
      try {
        save_d7st(stack_seven(load_image(p)), ctx.out_dir / (p.stem().string() + ".d7st"));
        log.record(p.filename().string(), ms_since(t0), "ok");
      } catch (const std::exception& e) {
        log.record(p.filename().string(), ms_since(t0), "error", e.what());
        failed = true;
      }
    }
    return failed ? kExitFinding : kExitOk;
  });
}

}  // namespace dermaprep::cli
