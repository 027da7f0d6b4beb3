#include "dermaprep/maskops.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iomanip>
#include <sstream>
#include <string>

#include "dermaprep/error.hpp"

namespace dermaprep {

namespace {

std::vector<Offset> sorted_unique(std::vector<Offset> v) {
  auto key = [](const Offset& o) { return std::pair{o.dy, o.dx}; };
  std::sort(v.begin(), v.end(), [&](const Offset& a, const Offset& b) { return key(a) < key(b); });
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

StructuringElement StructuringElement::disk(int radius) {
  if (radius < 0) throw InvalidArgument("disk radius must be >= 0");
  std::vector<Offset> offs;
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx)
      if (dx * dx + dy * dy <= radius * radius) offs.push_back({dx, dy});
  return {Shape::disk, radius, 0.0, std::move(offs)};
}

StructuringElement StructuringElement::square(int radius) {
  if (radius < 0) throw InvalidArgument("square radius must be >= 0");
  std::vector<Offset> offs;
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx) offs.push_back({dx, dy});
  return {Shape::square, radius, 0.0, std::move(offs)};
}

StructuringElement StructuringElement::line(int length, double angle_deg) {
  if (length < 1) throw InvalidArgument("line length must be >= 1");
  const double rad = angle_deg * std::acos(-1.0) / 180.0;
  // Unit steps along the dominant axis, so the segment has exactly
  // `length` distinct pixels at every angle.
  const double major = std::max(std::abs(std::cos(rad)), std::abs(std::sin(rad)));
  const double cx = std::cos(rad) / major;
  const double cy = -std::sin(rad) / major;
  std::vector<Offset> offs{{0, 0}};
  const double half = (length - 1) / 2.0;
  for (int i = 0; i < length; ++i) {
    const double t = i - half;
    // std::lround rounds half away from zero, which keeps the footprint
    // symmetric under t -> -t.
    offs.push_back({static_cast<int>(std::lround(t * cx)), static_cast<int>(std::lround(t * cy))});
  }
  return {Shape::line, length, angle_deg, sorted_unique(std::move(offs))};
}

BinaryMask dilate(const BinaryMask& m, const StructuringElement& se) {
  BinaryMask out(m.width(), m.height());
  const int w = m.width(), h = m.height();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!m.at(x, y)) continue;
      for (const Offset& o : se.offsets()) {
        const int tx = x + o.dx, ty = y + o.dy;
        if (tx >= 0 && ty >= 0 && tx < w && ty < h) out.set(tx, ty, true);
      }
    }
  }
  return out;
}

BinaryMask erode(const BinaryMask& m, const StructuringElement& se) {
  BinaryMask out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      bool all = true;
      for (const Offset& o : se.offsets()) {
        if (!m.get_padded(x + o.dx, y + o.dy)) {
          all = false;
          break;
        }
      }
      out.set(x, y, all);
    }
  }
  return out;
}

BinaryMask close(const BinaryMask& m, const StructuringElement& se) {
  return erode(dilate(m, se), se);
}

BinaryMask fill_holes(const BinaryMask& m) {
  const int w = m.width(), h = m.height();
  BinaryMask outside(w, h);
  std::deque<std::pair<int, int>> queue;
  auto seed = [&](int x, int y) {
    if (!m.at(x, y) && !outside.at(x, y)) {
      outside.set(x, y, true);
      queue.emplace_back(x, y);
    }
  };
  for (int x = 0; x < w; ++x) {
    seed(x, 0);
    seed(x, h - 1);
  }
  for (int y = 0; y < h; ++y) {
    seed(0, y);
    seed(w - 1, y);
  }
  while (!queue.empty()) {
    const auto [x, y] = queue.front();
    queue.pop_front();
    if (x > 0) seed(x - 1, y);
    if (x + 1 < w) seed(x + 1, y);
    if (y > 0) seed(x, y - 1);
    if (y + 1 < h) seed(x, y + 1);
  }
  return mask_not(outside);
}

double jaccard(const BinaryMask& a, const BinaryMask& b) {
  if (!a.same_size(b))
    throw InvalidArgument("jaccard: mask dimensions differ (" + std::to_string(a.width()) + "x" +
                          std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                          std::to_string(b.height()) + ")");
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    inter += a.bits()[i] & b.bits()[i];
    uni += a.bits()[i] | b.bits()[i];
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

JaccardSummary jaccard_summary(std::span<const BinaryMask> predicted,
                               std::span<const BinaryMask> truth) {
  if (predicted.size() != truth.size())
    throw InvalidArgument("jaccard_summary: predicted and truth counts differ");
  JaccardSummary s;
  s.pairs = predicted.size();
  if (s.pairs == 0) return s;
  std::size_t inter = 0, uni = 0;
  double sum = 0.0;
  for (std::size_t k = 0; k < predicted.size(); ++k) {
    sum += jaccard(predicted[k], truth[k]);
    for (std::size_t i = 0; i < predicted[k].size(); ++i) {
      inter += predicted[k].bits()[i] & truth[k].bits()[i];
      uni += predicted[k].bits()[i] | truth[k].bits()[i];
    }
  }
  s.mean_per_image = sum / static_cast<double>(s.pairs);
  s.pooled = uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
  return s;
}

void print_jaccard(std::ostream& out, const JaccardSummary& s) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  os << "jaccard per-image mean " << s.mean_per_image << " (" << s.pairs << " pairs)\n";
  os << "jaccard pooled pixels  " << s.pooled << "\n";
  out << os.str();
}

BinaryMask remove_small_components(const BinaryMask& m, int min_area) {
  BinaryMask out = m;
  if (min_area <= 1) return out;
  const int w = m.width(), h = m.height();
  BinaryMask seen(w, h);
  std::vector<std::pair<int, int>> comp;
  for (int sy = 0; sy < h; ++sy) {
    for (int sx = 0; sx < w; ++sx) {
      if (!m.at(sx, sy) || seen.at(sx, sy)) continue;
      comp.clear();
      comp.emplace_back(sx, sy);
      seen.set(sx, sy, true);
      for (std::size_t i = 0; i < comp.size(); ++i) {
        const auto [x, y] = comp[i];
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = x + dx, ny = y + dy;
            if (m.get_padded(nx, ny) && !seen.at(nx, ny)) {
              seen.set(nx, ny, true);
              comp.emplace_back(nx, ny);
            }
          }
        }
      }
      if (comp.size() < static_cast<std::size_t>(min_area))
        for (const auto& [x, y] : comp) out.set(x, y, false);
    }
  }
  return out;
}

int default_closing_radius(int image_width) {
  return std::max(1, static_cast<int>(std::lround(5.0 * image_width / 380.0)));
}

}  // namespace dermaprep
