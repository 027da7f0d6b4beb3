#pragma once
// Reference implementations used only by tests. Each one is written from
// the definition, independently of the library code it checks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "dermaprep/image.hpp"
#include "dermaprep/maskops.hpp"

namespace oracle {

using dermaprep::BinaryMask;
using dermaprep::Image;
using dermaprep::StructuringElement;

// Number of window placements of a dilated kernel over a zero-padded row:
// tap j of placement o sits at o*s - p + j*d and must lie in [-p, in+p-1].
inline int conv_positions(int in, int k, int s, int p, int d) {
  int count = 0;
  for (int o = 0;; ++o) {
    const int first = o * s - p;
    const int last = first + (k - 1) * d;
    if (last > in + p - 1) break;
    ++count;
  }
  return count;
}

// Scatter each input cell through every kernel tap, then crop p from both
// ends of the written span.
inline int transconv_extent(int in, int k, int s, int p, int d) {
  int hi = -1;
  for (int i = 0; i < in; ++i)
    for (int j = 0; j < k; ++j) hi = std::max(hi, i * s + j * d);
  return hi + 1 - 2 * p;
}

// Pairwise Mann-Whitney statistic: P(score_pos > score_neg) + 0.5 P(tie).
inline double mann_whitney_auc(const std::vector<double>& pos, const std::vector<double>& neg) {
  double wins = 0.0;
  for (double a : pos)
    for (double b : neg) wins += a > b ? 1.0 : (a == b ? 0.5 : 0.0);
  return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

// Operating points for every threshold "score >= t", t over +inf and each
// distinct score in descending order, counted directly.
inline std::vector<std::pair<double, double>> threshold_scan(const std::vector<double>& pos,
                                                             const std::vector<double>& neg) {
  std::vector<double> ts(pos);
  ts.insert(ts.end(), neg.begin(), neg.end());
  std::sort(ts.begin(), ts.end(), std::greater<>());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  ts.insert(ts.begin(), std::numeric_limits<double>::infinity());
  std::vector<std::pair<double, double>> pts;  // (fpr, tpr)
  for (double t : ts) {
    const auto tp = std::count_if(pos.begin(), pos.end(), [t](double v) { return v >= t; });
    const auto fp = std::count_if(neg.begin(), neg.end(), [t](double v) { return v >= t; });
    pts.emplace_back(static_cast<double>(fp) / static_cast<double>(neg.size()),
                     static_cast<double>(tp) / static_cast<double>(pos.size()));
  }
  return pts;
}

inline double specificity_scan(const std::vector<double>& pos, const std::vector<double>& neg,
                               double level) {
  const auto pts = threshold_scan(pos, neg);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].second < level) continue;
    if (i == 0 || pts[i].second == level) return 1.0 - pts[i].first;
    const auto [f0, t0] = pts[i - 1];
    const auto [f1, t1] = pts[i];
    const double fpr = f0 + (level - t0) / (t1 - t0) * (f1 - f0);
    return 1.0 - fpr;
  }
  return 0.0;
}

inline double trapezoid(const std::vector<std::pair<double, double>>& pts) {
  double a = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    a += (pts[i].first - pts[i - 1].first) * (pts[i].second + pts[i - 1].second) / 2.0;
  return a;
}

// Textbook two-pass population mean and standard deviation.
inline std::pair<double, double> two_pass_mean_std(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size()))};
}

inline double mse(const Image& a, const Image& b) {
  long double acc = 0.0L;
  const auto da = a.data(), db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) {
    const long double d = static_cast<long double>(da[i]) - static_cast<long double>(db[i]);
    acc += d * d;
  }
  return static_cast<double>(acc / static_cast<long double>(da.size()));
}

// p is set when some b in B has p - b inside m.
inline BinaryMask dilate(const BinaryMask& m, const StructuringElement& se) {
  BinaryMask out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) {
      bool v = false;
      for (const auto& o : se.offsets()) v = v || m.get_padded(x - o.dx, y - o.dy);
      out.set(x, y, v);
    }
  return out;
}

// p is set when p + b lies inside m for every b in B.
inline BinaryMask erode(const BinaryMask& m, const StructuringElement& se) {
  BinaryMask out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) {
      bool v = true;
      for (const auto& o : se.offsets()) v = v && m.get_padded(x + o.dx, y + o.dy);
      out.set(x, y, v);
    }
  return out;
}

// Grayscale max/min filters over the same footprints; out-of-range taps are
// skipped.
inline Image gray_dilate(const Image& img, const StructuringElement& se) {
  Image out(img.width(), img.height(), 1);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      float v = -std::numeric_limits<float>::infinity();
      for (const auto& o : se.offsets()) {
        const int sx = x - o.dx, sy = y - o.dy;
        if (sx >= 0 && sy >= 0 && sx < img.width() && sy < img.height()) v = std::max(v, img.at(sx, sy, 0));
      }
      out.at(x, y, 0) = v;
    }
  return out;
}

inline Image gray_erode(const Image& img, const StructuringElement& se) {
  Image out(img.width(), img.height(), 1);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      float v = std::numeric_limits<float>::infinity();
      for (const auto& o : se.offsets()) {
        const int sx = x + o.dx, sy = y + o.dy;
        if (sx >= 0 && sy >= 0 && sx < img.width() && sy < img.height()) v = std::min(v, img.at(sx, sy, 0));
      }
      out.at(x, y, 0) = v;
    }
  return out;
}

// Breadth-first flood of background from the border (4-connected); what is
// not reached becomes foreground.
inline BinaryMask fill_holes(const BinaryMask& m) {
  const int w = m.width(), h = m.height();
  std::vector<char> seen(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0);
  std::queue<std::pair<int, int>> q;
  auto push = [&](int x, int y) {
    if (x < 0 || y < 0 || x >= w || y >= h || m.at(x, y)) return;
    char& s = seen[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)];
    if (s) return;
    s = 1;
    q.emplace(x, y);
  };
  for (int x = 0; x < w; ++x) {
    push(x, 0);
    push(x, h - 1);
  }
  for (int y = 0; y < h; ++y) {
    push(0, y);
    push(w - 1, y);
  }
  while (!q.empty()) {
    const auto [x, y] = q.front();
    q.pop();
    push(x + 1, y);
    push(x - 1, y);
    push(x, y + 1);
    push(x, y - 1);
  }
  BinaryMask out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      out.set(x, y, m.at(x, y) || !seen[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)]);
  return out;
}

inline double jaccard(const BinaryMask& a, const BinaryMask& b) {
  long inter = 0, uni = 0;
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x) {
      inter += a.at(x, y) && b.at(x, y);
      uni += a.at(x, y) || b.at(x, y);
    }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

// Union-find labelling with 8-connectivity; components below min_area are
// dropped.
inline BinaryMask remove_small_components(const BinaryMask& m, int min_area) {
  const int w = m.width(), h = m.height();
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  auto idx = [w](int x, int y) { return static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x); };
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!m.at(x, y)) continue;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
          if (m.get_padded(x + dx, y + dy)) parent[find(idx(x, y))] = find(idx(x + dx, y + dy));
    }
  std::vector<int> size(n, 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (m.at(x, y)) ++size[find(idx(x, y))];
  BinaryMask out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      out.set(x, y, m.at(x, y) && size[find(idx(x, y))] >= min_area);
  return out;
}

}  // namespace oracle
