#include "dermaprep/dedup.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "dermaprep/error.hpp"

namespace dermaprep {

double mse(const Image& a, const Image& b) {
  if (a.channels() != b.channels())
    throw InvalidArgument("mse: channel mismatch (" + std::to_string(a.channels()) + " vs " +
                          std::to_string(b.channels()) + ")");
  if (a.width() != b.width() || a.height() != b.height())
    throw InvalidArgument("mse: images differ in size; resize to the comparison resolution first");
  const auto da = a.data();
  const auto db = b.data();
  if (da.empty()) throw InvalidArgument("mse: empty images");
  double sum = 0.0;
  for (std::size_t i = 0; i < da.size(); ++i) {
    const double d = static_cast<double>(da[i]) - static_cast<double>(db[i]);
    sum += d * d;
  }
  return sum / static_cast<double>(da.size());
}

MseRecord nearest(const NamedImage& generated, std::span<const NamedImage> corpus) {
  if (corpus.empty()) throw InvalidArgument("nearest: empty training corpus");
  MseRecord best{generated.id, corpus[0].id, mse(generated.image, corpus[0].image)};
  for (std::size_t i = 1; i < corpus.size(); ++i) {
    const double e = mse(generated.image, corpus[i].image);
    if (e < best.mse) {
      best.mse = e;
      best.nearest_training_id = corpus[i].id;
    }
  }
  return best;
}

MseSummary summarize(std::span<const MseRecord> records, int bins, double dup_threshold) {
  if (records.empty()) throw InvalidArgument("summarize: no records");
  if (bins < 1) throw InvalidArgument("summarize: bins must be >= 1");
  MseSummary s;

  // Welford.
  double mean = 0.0, m2 = 0.0;
  double hi = 0.0;
  std::size_t n = 0;
  for (const auto& r : records) {
    ++n;
    const double delta = r.mse - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (r.mse - mean);
    hi = std::max(hi, r.mse);
    if (r.mse < dup_threshold) s.flagged.push_back(r.generated_id);
  }
  s.mean = mean;
  s.stddev = std::sqrt(std::max(0.0, m2 / static_cast<double>(n)));

  auto& h = s.histogram;
  h.edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int i = 0; i <= bins; ++i) h.edges[static_cast<std::size_t>(i)] = hi * i / bins;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  for (const auto& r : records) {
    std::size_t b = 0;
    if (hi > 0.0)
      b = std::min(static_cast<std::size_t>(bins - 1),
                   static_cast<std::size_t>(std::floor(r.mse / hi * bins)));
    ++h.counts[b];
  }
  return s;
}

std::string format_mean_std(const MseSummary& s, int precision) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.*f ± %.*f", precision, s.mean, precision, s.stddev);
  return buf;
}

}  // namespace dermaprep
