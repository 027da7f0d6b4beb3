#pragma once

#include <ostream>
#include <span>
#include <vector>

#include "dermaprep/image.hpp"

namespace dermaprep {

struct Offset {
  int dx;
  int dy;
  bool operator==(const Offset&) const = default;
};

// Flat structuring element. The footprint always contains the origin.
class StructuringElement {
 public:
  enum class Shape { disk, square, line };

  // Euclidean disk: offsets with dx^2 + dy^2 <= r^2.
  static StructuringElement disk(int radius);
  // (2r+1) x (2r+1) square.
  static StructuringElement square(int radius);
  // Digital segment of `length` pixels centred on the origin; angle in
  // degrees, counter-clockwise from the +x axis (image y grows downward).
  static StructuringElement line(int length, double angle_deg);

  Shape shape() const noexcept { return shape_; }
  int size() const noexcept { return size_; }
  double angle() const noexcept { return angle_; }
  std::span<const Offset> offsets() const noexcept { return offsets_; }

 private:
  StructuringElement(Shape shape, int size, double angle, std::vector<Offset> offsets)
      : shape_(shape), size_(size), angle_(angle), offsets_(std::move(offsets)) {}

  Shape shape_;
  int size_;
  double angle_;
  std::vector<Offset> offsets_;
};

// Minkowski dilation; pixels outside the mask are false.
BinaryMask dilate(const BinaryMask& m, const StructuringElement& se);
// Minkowski erosion; pixels outside the mask are false, so foreground
// touching the border is eroded.
BinaryMask erode(const BinaryMask& m, const StructuringElement& se);
// erode(dilate(m)).
BinaryMask close(const BinaryMask& m, const StructuringElement& se);

// Sets every background region that is not 4-connected to the border.
BinaryMask fill_holes(const BinaryMask& m);

// |a & b| / |a | b|; 1.0 when both masks are empty.
double jaccard(const BinaryMask& a, const BinaryMask& b);

struct JaccardSummary {
  double mean_per_image = 0.0;  // average of per-pair indices
  double pooled = 0.0;          // pixel counts summed over all pairs first
  std::size_t pairs = 0;
};
JaccardSummary jaccard_summary(std::span<const BinaryMask> predicted,
                               std::span<const BinaryMask> truth);
// Both averages, labelled, three decimals.
void print_jaccard(std::ostream& out, const JaccardSummary& s);

// Connected components (8-connectivity) with fewer than `min_area` pixels
// are removed.
BinaryMask remove_small_components(const BinaryMask& m, int min_area);

// Closing disk radius used by purification: 5 px at 380 px width, scaled
// proportionally, at least 1.
int default_closing_radius(int image_width);

}  // namespace dermaprep
