#include "dermaprep/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dermaprep/error.hpp"

namespace dermaprep {

namespace {

void require_rgb(const Image& img, const char* op) {
  if (img.channels() != 3)
    throw InvalidArgument(std::string(op) + ": expected 3 channels, got " +
                          std::to_string(img.channels()));
}

double srgb_to_linear(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

// Relative luminance Y of linear sRGB under D65, with Y(white) = 1.
double relative_luminance(double r, double g, double b) {
  return 0.2126 * srgb_to_linear(r) + 0.7152 * srgb_to_linear(g) + 0.0722 * srgb_to_linear(b);
}

double lightness(double y) {
  constexpr double epsilon = 216.0 / 24389.0;
  constexpr double kappa = 24389.0 / 27.0;
  return y > epsilon ? 116.0 * std::cbrt(y) - 16.0 : kappa * y;
}

struct Tap {
  int lo;
  int hi;
  double t;
};

std::vector<Tap> taps(int src, int dst) {
  std::vector<Tap> out(static_cast<std::size_t>(dst));
  const double scale = static_cast<double>(src) / dst;
  for (int i = 0; i < dst; ++i) {
    double s = (i + 0.5) * scale - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(src - 1));
    const int lo = static_cast<int>(std::floor(s));
    const int hi = std::min(lo + 1, src - 1);
    out[static_cast<std::size_t>(i)] = {lo, hi, s - lo};
  }
  return out;
}

}  // namespace

Image rgb_to_hsv(const Image& rgb) {
  require_rgb(rgb, "rgb_to_hsv");
  Image out(rgb.width(), rgb.height(), 3);
  for (int y = 0; y < rgb.height(); ++y) {
    for (int x = 0; x < rgb.width(); ++x) {
      const double r = rgb.at(x, y, 0), g = rgb.at(x, y, 1), b = rgb.at(x, y, 2);
      const double mx = std::max({r, g, b});
      const double mn = std::min({r, g, b});
      const double delta = mx - mn;
      double h = 0.0;
      if (delta > 0.0) {
        if (mx == r)
          h = std::fmod((g - b) / delta, 6.0);
        else if (mx == g)
          h = (b - r) / delta + 2.0;
        else
          h = (r - g) / delta + 4.0;
        h *= 60.0;
        if (h < 0.0) h += 360.0;
      }
      const double s = mx > 0.0 ? delta / mx : 0.0;
      out.at(x, y, 0) = static_cast<float>(h / 360.0);
      out.at(x, y, 1) = static_cast<float>(s);
      out.at(x, y, 2) = static_cast<float>(mx);
    }
  }
  return out;
}

Image luminance_luv(const Image& rgb) {
  require_rgb(rgb, "luminance_luv");
  Image out(rgb.width(), rgb.height(), 1);
  for (int y = 0; y < rgb.height(); ++y) {
    for (int x = 0; x < rgb.width(); ++x) {
      const double yl = relative_luminance(rgb.at(x, y, 0), rgb.at(x, y, 1), rgb.at(x, y, 2));
      out.at(x, y, 0) = static_cast<float>(std::clamp(lightness(yl) / 100.0, 0.0, 1.0));
    }
  }
  return out;
}

Image resize(const Image& img, int width, int height) {
  if (width < 1 || height < 1)
    throw InvalidArgument("resize: target dimensions must be >= 1, got " + std::to_string(width) +
                          "x" + std::to_string(height));
  if (img.empty()) throw InvalidArgument("resize: empty image");
  if (width == img.width() && height == img.height()) return img;

  const auto xs = taps(img.width(), width);
  const auto ys = taps(img.height(), height);
  Image out(width, height, img.channels());
  for (int y = 0; y < height; ++y) {
    const Tap& ty = ys[static_cast<std::size_t>(y)];
    for (int x = 0; x < width; ++x) {
      const Tap& tx = xs[static_cast<std::size_t>(x)];
      for (int c = 0; c < img.channels(); ++c) {
        const double top = std::lerp(static_cast<double>(img.at(tx.lo, ty.lo, c)),
                                     static_cast<double>(img.at(tx.hi, ty.lo, c)), tx.t);
        const double bottom = std::lerp(static_cast<double>(img.at(tx.lo, ty.hi, c)),
                                        static_cast<double>(img.at(tx.hi, ty.hi, c)), tx.t);
        out.at(x, y, c) = static_cast<float>(std::lerp(top, bottom, ty.t));
      }
    }
  }
  return out;
}

Image normalize_half(const Image& img) {
  Image out = img;
  for (float& v : out.data()) v = (v - 0.5f) / 0.5f;
  return out;
}

Image concat_channels(const Image& a, const Image& b) {
  if (a.width() != b.width() || a.height() != b.height())
    throw InvalidArgument("concat_channels: dimensions differ");
  const int ch = a.channels() + b.channels();
  Image out(a.width(), a.height(), ch);
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      for (int c = 0; c < a.channels(); ++c) out.at(x, y, c) = a.at(x, y, c);
      for (int c = 0; c < b.channels(); ++c) out.at(x, y, a.channels() + c) = b.at(x, y, c);
    }
  }
  return out;
}

Image stack_seven(const Image& rgb) {
  require_rgb(rgb, "stack_seven");
  const Image native = concat_channels(concat_channels(rgb, rgb_to_hsv(rgb)), luminance_luv(rgb));
  Image out = normalize_half(resize(native, kStackSize, kStackSize));
  for (float& v : out.data()) v = std::clamp(v, -1.0f, 1.0f);
  return out;
}

}  // namespace dermaprep
