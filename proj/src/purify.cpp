#include "dermaprep/purify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "dermaprep/error.hpp"
#include "dermaprep/imaging.hpp"

namespace dermaprep {

void PurifyConfig::validate() const {
  if (line_lengths.empty()) throw ConfigError("purify.line_lengths must not be empty");
  for (int len : line_lengths)
    if (len < 3) throw ConfigError("purify.line_lengths entries must be >= 3");
  if (line_angles.empty()) throw ConfigError("purify.line_angles must not be empty");
  if (inpaint_iterations < 1) throw ConfigError("purify.inpaint_iterations must be >= 1");
  if (closing_radius < 0) throw ConfigError("purify.closing_radius must be >= 0");
  if (min_component_area < 0) throw ConfigError("purify.min_component_area must be >= 0");
  if (luminance_threshold && (*luminance_threshold < 0.0 || *luminance_threshold > 1.0))
    throw ConfigError("purify.luminance_threshold must be in [0,1] or \"otsu\"");
}

PurifyConfig PurifyConfig::scaled_to(int image_width) const {
  const double f = static_cast<double>(image_width) / kReferenceWidth;
  PurifyConfig out = *this;
  for (int& len : out.line_lengths) {
    int l = std::max(3, static_cast<int>(std::lround(len * f)));
    if (l % 2 == 0) ++l;
    len = l;
  }
  out.closing_radius = std::max(closing_radius > 0 ? 1 : 0,
                                static_cast<int>(std::lround(closing_radius * f)));
  out.min_component_area = static_cast<int>(std::lround(min_component_area * f * f));
  return out;
}

namespace {

void require_gray(const Image& img) {
  if (img.channels() != 1) throw InvalidArgument("grayscale morphology expects 1 channel");
}

// out[p] = op(out[p], in[p + shift]) over every in-range p.
template <typename Op>
void accumulate_shift(const Image& in, Image& out, int sx, int sy, Op op) {
  const int w = in.width(), h = in.height();
  const int x0 = std::max(0, -sx), x1 = std::min(w, w - sx);
  const int y0 = std::max(0, -sy), y1 = std::min(h, h - sy);
  const auto src = in.data();
  auto dst = out.data();
  for (int y = y0; y < y1; ++y) {
    const std::size_t drow = static_cast<std::size_t>(y) * static_cast<std::size_t>(w);
    const std::size_t srow = static_cast<std::size_t>(y + sy) * static_cast<std::size_t>(w);
    for (int x = x0; x < x1; ++x)
      dst[drow + static_cast<std::size_t>(x)] =
          op(dst[drow + static_cast<std::size_t>(x)], src[srow + static_cast<std::size_t>(x + sx)]);
  }
}

}  // namespace

Image gray_dilate(const Image& img, const StructuringElement& se) {
  require_gray(img);
  Image out(img.width(), img.height(), 1, -std::numeric_limits<float>::infinity());
  for (const Offset& o : se.offsets())
    accumulate_shift(img, out, -o.dx, -o.dy, [](float a, float b) { return std::max(a, b); });
  return out;
}

Image gray_erode(const Image& img, const StructuringElement& se) {
  require_gray(img);
  Image out(img.width(), img.height(), 1, std::numeric_limits<float>::infinity());
  for (const Offset& o : se.offsets())
    accumulate_shift(img, out, o.dx, o.dy, [](float a, float b) { return std::min(a, b); });
  return out;
}

Image gray_close(const Image& img, const StructuringElement& se) {
  return gray_erode(gray_dilate(img, se), se);
}

Image line_response(const Image& rgb, const PurifyConfig& cfg) {
  cfg.validate();
  const Image lum = luminance_luv(rgb);
  const std::size_t n = lum.pixel_count();
  const std::size_t angles = cfg.line_angles.size();
  std::vector<float> per_angle(n * angles, 0.0f);
  for (std::size_t a = 0; a < angles; ++a) {
    for (int len : cfg.line_lengths) {
      const Image closed = gray_close(lum, StructuringElement::line(len, cfg.line_angles[a]));
      for (std::size_t i = 0; i < n; ++i) {
        const float r = closed.data()[i] - lum.data()[i];
        float& slot = per_angle[i * angles + a];
        slot = std::max(slot, r);
      }
    }
  }
  const std::size_t rank = angles / 4;
  Image out(lum.width(), lum.height(), 1);
  std::vector<float> buf(angles);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy_n(per_angle.begin() + static_cast<std::ptrdiff_t>(i * angles), angles, buf.begin());
    std::nth_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(rank), buf.end());
    out.data()[i] = std::max(0.0f, buf[rank]);
  }
  return out;
}

double otsu_threshold(const Image& response) {
  constexpr int bins = 256;
  const auto data = response.data();
  const float mx = data.empty() ? 0.0f : *std::max_element(data.begin(), data.end());
  if (!(mx > kOtsuResponseFloor)) return 0.0;
  const double lo = std::log(kOtsuResponseFloor), span = std::log(static_cast<double>(mx)) - lo;
  std::array<double, bins> hist{};
  for (float v : data) {
    const double t = (std::log(std::max(static_cast<double>(v), kOtsuResponseFloor)) - lo) / span;
    hist[static_cast<std::size_t>(std::clamp(static_cast<int>(t * bins), 0, bins - 1))] += 1.0;
  }
  const double total = static_cast<double>(data.size());
  double sum_all = 0.0;
  for (int b = 0; b < bins; ++b) sum_all += b * hist[static_cast<std::size_t>(b)];
  double w0 = 0.0, sum0 = 0.0, best = -1.0;
  int best_bin = 0;
  for (int b = 0; b < bins; ++b) {
    w0 += hist[static_cast<std::size_t>(b)];
    sum0 += b * hist[static_cast<std::size_t>(b)];
    const double w1 = total - w0;
    if (w0 == 0.0 || w1 == 0.0) continue;
    const double m0 = sum0 / w0, m1 = (sum_all - sum0) / w1;
    const double between = w0 * w1 * (m0 - m1) * (m0 - m1);
    if (between > best) {
      best = between;
      best_bin = b;
    }
  }
  return std::exp(lo + (best_bin + 1) * span / bins);
}

BinaryMask detect_occlusions(const Image& rgb, const PurifyConfig& cfg) {
  if (rgb.channels() != 3) throw InvalidArgument("detect_occlusions: expected 3 channels");
  const Image response = line_response(rgb, cfg);
  const double threshold = cfg.luminance_threshold
                               ? *cfg.luminance_threshold
                               : std::max(otsu_threshold(response), kMinOtsuResponse);
  BinaryMask raw(rgb.width(), rgb.height());
  for (std::size_t i = 0; i < raw.size(); ++i)
    raw.bits()[i] = response.data()[i] > threshold ? 1 : 0;
  const BinaryMask kept = remove_small_components(raw, cfg.min_component_area);
  if (cfg.closing_radius == 0) return kept;
  return close(kept, StructuringElement::disk(cfg.closing_radius));
}

BinaryMask protect_lesion(const BinaryMask& occ, const BinaryMask& lesion) {
  if (!occ.same_size(lesion))
    throw InvalidArgument("protect_lesion: occlusion and lesion masks differ in size");
  return mask_and(occ, mask_not(erode(lesion, StructuringElement::disk(2))));
}

Image inpaint(const Image& rgb, const BinaryMask& occ, const PurifyConfig& cfg) {
  if (!occ.same_size(rgb)) throw InvalidArgument("inpaint: mask and image differ in size");
  if (cfg.inpaint_iterations < 1) throw ConfigError("purify.inpaint_iterations must be >= 1");
  const std::size_t masked = occ.count();
  if (masked == 0) return rgb;
  if (masked == occ.size()) throw InvalidArgument("inpaint: mask covers the entire image");
  if (static_cast<double>(masked) >= 0.6 * static_cast<double>(occ.size()))
    throw InvalidArgument("inpaint: mask covers 60% or more of the image");

  const int w = rgb.width(), h = rgb.height(), ch = rgb.channels();
  Image out = rgb;
  BinaryMask known = mask_not(occ);
  std::vector<std::pair<int, int>> frontier;
  std::vector<float> fills;
  std::vector<float> samples;
  samples.reserve(25);

  for (int iter = 0; iter < cfg.inpaint_iterations; ++iter) {
    frontier.clear();
    fills.clear();
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (known.at(x, y)) continue;
        bool has_known = false;
        for (int dy = -2; dy <= 2 && !has_known; ++dy)
          for (int dx = -2; dx <= 2 && !has_known; ++dx) has_known = known.get_padded(x + dx, y + dy);
        if (!has_known) continue;
        frontier.emplace_back(x, y);
        for (int c = 0; c < ch; ++c) {
          samples.clear();
          for (int dy = -2; dy <= 2; ++dy)
            for (int dx = -2; dx <= 2; ++dx)
              if (known.get_padded(x + dx, y + dy)) samples.push_back(out.at(x + dx, y + dy, c));
          const auto mid = samples.begin() + static_cast<std::ptrdiff_t>((samples.size() - 1) / 2);
          std::nth_element(samples.begin(), mid, samples.end());
          fills.push_back(*mid);
        }
      }
    }
    if (frontier.empty()) break;
    for (std::size_t k = 0; k < frontier.size(); ++k) {
      const auto [x, y] = frontier[k];
      for (int c = 0; c < ch; ++c)
        out.at(x, y, c) = fills[k * static_cast<std::size_t>(ch) + static_cast<std::size_t>(c)];
      known.set(x, y, true);
    }
  }

  // Iteration budget exhausted: remaining pixels take the per-channel median
  // of the unoccluded input.
  if (known.count() != known.size()) {
    for (int c = 0; c < ch; ++c) {
      samples.clear();
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          if (!occ.at(x, y)) samples.push_back(rgb.at(x, y, c));
      const auto mid = samples.begin() + static_cast<std::ptrdiff_t>((samples.size() - 1) / 2);
      std::nth_element(samples.begin(), mid, samples.end());
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          if (!known.at(x, y)) out.at(x, y, c) = *mid;
    }
  }
  return out;
}

PurifyResult purify(const Image& rgb, const BinaryMask& lesion, const PurifyConfig& cfg) {
  if (!lesion.same_size(rgb)) throw InvalidArgument("purify: lesion mask and image differ in size");
  BinaryMask occ = protect_lesion(detect_occlusions(rgb, cfg), lesion);
  Image repaired = inpaint(rgb, occ, cfg);
  return {std::move(repaired), std::move(occ)};
}

}  // namespace dermaprep
