#pragma once

#include <span>
#include <string>
#include <vector>

#include "dermaprep/image.hpp"

namespace dermaprep {

// Comparison resolution for generated-vs-training screening (GAN output
// size).
inline constexpr int kDedupResolution = 256;
inline constexpr double kDefaultDupThreshold = 0.005;
inline constexpr int kDefaultHistogramBins = 20;

// Mean over all pixels and channels of (a - b)^2, accumulated in double.
double mse(const Image& a, const Image& b);

struct MseRecord {
  std::string generated_id;
  std::string nearest_training_id;
  double mse = 0.0;
};

struct NamedImage {
  std::string id;
  Image image;
};

// Argmin-MSE training image; ties go to the lowest corpus index.
MseRecord nearest(const NamedImage& generated, std::span<const NamedImage> corpus);

struct Histogram {
  std::vector<double> edges;  // bins + 1 edges over [0, max]
  std::vector<std::size_t> counts;
};

struct MseSummary {
  double mean = 0.0;
  double stddev = 0.0;  // population
  Histogram histogram;
  std::vector<std::string> flagged;  // mse < threshold, in record order
};

MseSummary summarize(std::span<const MseRecord> records, int bins = kDefaultHistogramBins,
                     double dup_threshold = kDefaultDupThreshold);

// "0.088 ± 0.052"
std::string format_mean_std(const MseSummary& s, int precision = 3);

}  // namespace dermaprep
