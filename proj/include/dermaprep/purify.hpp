#pragma once

#include <optional>
#include <vector>

#include "dermaprep/image.hpp"
#include "dermaprep/maskops.hpp"

namespace dermaprep {

// Parameters of the occlusion (hair / ruler) removal pipeline. Lengths,
// radius and area are expressed at a 380 px reference width; use
// scaled_to() before running on images of another size.
struct PurifyConfig {
  static constexpr int kReferenceWidth = 380;

  // Fixed threshold on the bottom-hat response (L* units scaled to [0,1]);
  // nullopt selects Otsu.
  std::optional<double> luminance_threshold;
  std::vector<int> line_lengths{9, 15, 21, 41};
  std::vector<double> line_angles{0.0, 22.5, 45.0, 67.5, 90.0, 112.5, 135.0, 157.5};
  int closing_radius = 5;
  int inpaint_iterations = 50;
  int min_component_area = 30;

  // Throws ConfigError when an invariant does not hold.
  void validate() const;

  // Lengths and radius scale linearly with width, area quadratically.
  // Lengths stay odd and >= 3.
  PurifyConfig scaled_to(int image_width) const;
};

// Otsu responses below this are treated as background regardless of the
// histogram split (about 2 L* units).
inline constexpr double kMinOtsuResponse = 0.02;

// Flat grayscale morphology on a 1-channel image, used for the oriented
// bottom-hat. Out-of-range taps are skipped.
Image gray_dilate(const Image& img, const StructuringElement& se);
Image gray_erode(const Image& img, const StructuringElement& se);
Image gray_close(const Image& img, const StructuringElement& se);

// Per-pixel dark-line response on the L* channel: for every angle the
// bottom-hat (closing minus original) over all line lengths is maximised,
// then the responses across angles are ranked and the value at the 25th
// percentile is kept, so a pixel must stand out in at least three quarters
// of the directions. Thin structures respond in every direction except
// their own; the rim of a wide blob only in the few tangential ones.
Image line_response(const Image& rgb, const PurifyConfig& cfg);

// Responses are clamped to this before taking logs for Otsu.
inline constexpr double kOtsuResponseFloor = 1e-3;

// Otsu threshold on log(response) with 256 bins over [log floor, log max].
// The log scale keeps faint strokes on the foreground side when much
// darker strokes share the image. Returns 0 when max <= floor.
double otsu_threshold(const Image& response);

BinaryMask detect_occlusions(const Image& rgb, const PurifyConfig& cfg);

// occ & !erode(lesion, disk(2)).
BinaryMask protect_lesion(const BinaryMask& occ, const BinaryMask& lesion);

// Fills masked pixels with the per-channel median of already-known pixels in
// their 5x5 neighbourhood, one boundary layer per iteration. Unmasked pixels
// are copied bit-for-bit.
Image inpaint(const Image& rgb, const BinaryMask& occ, const PurifyConfig& cfg);

struct PurifyResult {
  Image image;
  BinaryMask occlusions;
};

PurifyResult purify(const Image& rgb, const BinaryMask& lesion, const PurifyConfig& cfg);

}  // namespace dermaprep
