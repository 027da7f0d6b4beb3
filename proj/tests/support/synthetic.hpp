#pragma once
// Deterministic synthetic data shared by the unit and acceptance tests.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "dermaprep/image.hpp"
#include "dermaprep/rng.hpp"

namespace synth {

using dermaprep::BinaryMask;
using dermaprep::CounterRng;
using dermaprep::Image;

// Sequential wrapper over the counter generator.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : rng_(seed) {}
  std::uint64_t next() { return rng_.draw(counter_++); }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  bool chance(double p) { return uniform() < p; }

 private:
  CounterRng rng_;
  std::uint64_t counter_ = 0;
};

inline BinaryMask random_mask(Stream& s, int w, int h, double density) {
  BinaryMask m(w, h);
  for (auto& b : m.bits()) b = s.chance(density) ? 1 : 0;
  return m;
}

// Union of a few random discs and rectangles, optionally punched with holes.
inline BinaryMask random_blobs(Stream& s, int w, int h) {
  BinaryMask m(w, h);
  const int shapes = s.integer(1, 6);
  for (int k = 0; k < shapes; ++k) {
    const bool disc = s.chance(0.5);
    const int cx = s.integer(0, w - 1), cy = s.integer(0, h - 1);
    const int r = s.integer(2, std::max(3, w / 4));
    const int rw = s.integer(1, w / 3), rh = s.integer(1, h / 3);
    const bool value = k == 0 || s.chance(0.75);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const bool in = disc ? (x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r
                             : std::abs(x - cx) <= rw && std::abs(y - cy) <= rh;
        if (in) m.set(x, y, value);
      }
  }
  return m;
}

struct HairSample {
  Image clean;     // skin + lesion, no occlusions
  Image degraded;  // clean with hair strokes painted on
  BinaryMask hair;
  BinaryMask lesion;
};

namespace detail {

inline double segment_distance(double px, double py, double ax, double ay, double bx, double by) {
  const double vx = bx - ax, vy = by - ay;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0.0 ? ((px - ax) * vx + (py - ay) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double dx = px - (ax + t * vx), dy = py - (ay + t * vy);
  return std::sqrt(dx * dx + dy * dy);
}

// Pixels whose centre lies within width/2 of a cubic Bezier curve.
inline BinaryMask bezier_stroke(const std::array<double, 8>& p, double width, int w, int h) {
  constexpr int kSamples = 600;
  std::vector<std::pair<double, double>> pts(kSamples + 1);
  for (int i = 0; i <= kSamples; ++i) {
    const double t = static_cast<double>(i) / kSamples, u = 1.0 - t;
    const double b0 = u * u * u, b1 = 3 * u * u * t, b2 = 3 * u * t * t, b3 = t * t * t;
    pts[static_cast<std::size_t>(i)] = {b0 * p[0] + b1 * p[2] + b2 * p[4] + b3 * p[6],
                                        b0 * p[1] + b1 * p[3] + b2 * p[5] + b3 * p[7]};
  }
  const double r = width / 2.0;
  std::vector<double> dist(static_cast<std::size_t>(w) * static_cast<std::size_t>(h),
                           std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const auto [ax, ay] = pts[i];
    const auto [bx, by] = pts[i + 1];
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min(ax, bx) - r - 1)));
    const int x1 = std::min(w - 1, static_cast<int>(std::ceil(std::max(ax, bx) + r + 1)));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min(ay, by) - r - 1)));
    const int y1 = std::min(h - 1, static_cast<int>(std::ceil(std::max(ay, by) + r + 1)));
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) {
        auto& d = dist[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)];
        d = std::min(d, segment_distance(x + 0.5, y + 0.5, ax, ay, bx, by));
      }
  }
  BinaryMask m(w, h);
  for (std::size_t i = 0; i < dist.size(); ++i) m.bits()[i] = dist[i] <= r ? 1 : 0;
  return m;
}

}  // namespace detail

// Skin-toned gradient background, one soft-edged brown elliptical lesion,
// and 3-9 Bezier hair strokes 1-4 px wide in dark or blonde tones. Blonde
// tones are lighter than dark hair but still below the skin in luminance.
inline HairSample make_hair_sample(std::uint64_t seed, int size = 256) {
  Stream s(seed);
  const int w = size, h = size;
  const std::array<double, 3> skin{s.uniform(0.80, 0.92), s.uniform(0.60, 0.72), s.uniform(0.50, 0.62)};
  const double gx = s.uniform(-0.12, 0.12), gy = s.uniform(-0.12, 0.12);
  const double fx = s.uniform(1.0, 3.0), fy = s.uniform(1.0, 3.0), ph = s.uniform(0.0, 6.28);
  const std::array<double, 3> brown{s.uniform(0.42, 0.55), s.uniform(0.28, 0.38), s.uniform(0.20, 0.30)};
  const double cx = s.uniform(0.35, 0.65) * w, cy = s.uniform(0.35, 0.65) * h;
  const double ra = s.uniform(0.12, 0.25) * w, rb = s.uniform(0.12, 0.25) * h;
  const double rot = s.uniform(0.0, std::numbers::pi);

  HairSample out{Image(w, h, 3), Image(), BinaryMask(w, h), BinaryMask(w, h)};
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double u = (x + 0.5) / w - 0.5, v = (y + 0.5) / h - 0.5;
      const double shade = 1.0 + gx * u + gy * v +
                           0.02 * std::sin(2 * std::numbers::pi * (fx * u + fy * v) + ph);
      const double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
      const double ex = (dx * std::cos(rot) + dy * std::sin(rot)) / ra;
      const double ey = (-dx * std::sin(rot) + dy * std::cos(rot)) / rb;
      const double rho = std::sqrt(ex * ex + ey * ey);
      // Lesion weight ramps from 1 inside to 0 a few pixels past the rim.
      const double edge = 4.0 / std::min(ra, rb);
      const double t = std::clamp((1.0 + edge - rho) / edge, 0.0, 1.0);
      out.lesion.set(x, y, rho <= 1.0);
      for (int c = 0; c < 3; ++c) {
        const double texture = 1.0 + 0.05 * std::sin(9.0 * ex + 3.0 * c) * std::cos(7.0 * ey);
        const double val = (1.0 - t) * skin[static_cast<std::size_t>(c)] +
                           t * brown[static_cast<std::size_t>(c)] * texture;
        out.clean.at(x, y, c) = static_cast<float>(std::clamp(val * shade, 0.0, 1.0));
      }
    }

  out.degraded = out.clean;
  const int strokes = s.integer(3, 9);
  for (int k = 0; k < strokes; ++k) {
    std::array<double, 8> p{};
    for (double& v : p) v = s.uniform(-0.2, 1.2) * w;
    const double width = s.integer(1, 4);
    std::array<double, 3> tone;
    if (s.chance(0.6)) {
      const double d = s.uniform(0.08, 0.25);
      tone = {d, d * 0.82, d * 0.70};
    } else {
      const double b = s.uniform(0.52, 0.62);
      tone = {b, b * 0.80, b * 0.55};
    }
    const BinaryMask stroke = detail::bezier_stroke(p, width, w, h);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        if (stroke.at(x, y)) {
          out.hair.set(x, y, true);
          for (int c = 0; c < 3; ++c) out.degraded.at(x, y, c) = static_cast<float>(tone[static_cast<std::size_t>(c)]);
        }
  }
  return out;
}

}  // namespace synth
