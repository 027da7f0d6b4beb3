#include "dermaprep/image.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "dermaprep/error.hpp"

namespace dermaprep {

namespace fs = std::filesystem;

Image::Image(int width, int height, int channels, float fill) {
  if (width < 1 || height < 1 || channels < 1)
    throw InvalidArgument("image dimensions must be positive");
  width_ = width;
  height_ = height;
  channels_ = channels;
  data_.assign(pixel_count() * static_cast<std::size_t>(channels), fill);
}

Image::Image(int width, int height, int channels, std::vector<float> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  if (width < 1 || height < 1 || channels < 1)
    throw InvalidArgument("image dimensions must be positive");
  if (data_.size() != pixel_count() * static_cast<std::size_t>(channels))
    throw InvalidArgument("image data length does not match width*height*channels");
  for (float v : data_)
    if (!std::isfinite(v)) throw InvalidArgument("image data must be finite");
}

Image Image::channel(int c) const {
  if (c < 0 || c >= channels_) throw InvalidArgument("channel index out of range");
  Image out(width_, height_, 1);
  for (int y = 0; y < height_; ++y)
    for (int x = 0; x < width_; ++x) out.at(x, y, 0) = at(x, y, c);
  return out;
}

BinaryMask::BinaryMask(int width, int height, bool fill) {
  if (width < 1 || height < 1) throw InvalidArgument("mask dimensions must be positive");
  width_ = width;
  height_ = height;
  bits_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
               fill ? 1 : 0);
}

std::size_t BinaryMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

namespace {

void require_same(const BinaryMask& a, const BinaryMask& b) {
  if (!a.same_size(b)) throw InvalidArgument("mask dimensions differ");
}

enum class Format { png, jpeg, unknown };

Format sniff(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::array<unsigned char, 8> head{};
  in.read(reinterpret_cast<char*>(head.data()), head.size());
  const auto got = in.gcount();
  static constexpr std::array<unsigned char, 8> png_sig{0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
  if (got >= 8 && std::equal(png_sig.begin(), png_sig.end(), head.begin())) return Format::png;
  if (got >= 3 && head[0] == 0xFF && head[1] == 0xD8 && head[2] == 0xFF) return Format::jpeg;
  return Format::unknown;
}

cv::Mat read_8bit(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("no such file: " + path.string());
  if (sniff(path) == Format::unknown)
    throw IoError("unsupported image format (expected PNG or JPEG): " + path.string());
  cv::Mat m = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (m.empty()) throw IoError("corrupt or undecodable image: " + path.string());
  if (m.depth() != CV_8U)
    throw IoError("only 8-bit images are supported: " + path.string());
  return m;
}

void write_png(const cv::Mat& m, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), m);
  } catch (const cv::Exception& e) {
    throw IoError("cannot write " + path.string() + ": " + e.what());
  }
  if (!ok) throw IoError("cannot write " + path.string());
}

std::uint8_t to_byte(float v) {
  const float c = std::clamp(v, 0.0f, 1.0f);
  return static_cast<std::uint8_t>(std::lround(c * 255.0f));
}

template <typename T>
void put_le(std::ostream& out, T v) {
  static_assert(sizeof(T) == 4);
  std::uint32_t bits = std::bit_cast<std::uint32_t>(v);
  const std::array<char, 4> b{static_cast<char>(bits & 0xFF), static_cast<char>((bits >> 8) & 0xFF),
                              static_cast<char>((bits >> 16) & 0xFF),
                              static_cast<char>((bits >> 24) & 0xFF)};
  out.write(b.data(), 4);
}

std::uint32_t get_le32(std::istream& in) {
  std::array<unsigned char, 4> b{};
  in.read(reinterpret_cast<char*>(b.data()), 4);
  if (in.gcount() != 4) throw IoError("truncated D7ST stream");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b) {
  require_same(a, b);
  BinaryMask out(a.width(), a.height());
  for (std::size_t i = 0; i < out.size(); ++i) out.bits()[i] = a.bits()[i] & b.bits()[i];
  return out;
}

BinaryMask mask_or(const BinaryMask& a, const BinaryMask& b) {
  require_same(a, b);
  BinaryMask out(a.width(), a.height());
  for (std::size_t i = 0; i < out.size(); ++i) out.bits()[i] = a.bits()[i] | b.bits()[i];
  return out;
}

BinaryMask mask_not(const BinaryMask& a) {
  BinaryMask out(a.width(), a.height());
  for (std::size_t i = 0; i < out.size(); ++i) out.bits()[i] = a.bits()[i] ? 0 : 1;
  return out;
}

Image load_image(const fs::path& path) {
  cv::Mat m = read_8bit(path);
  Image img(m.cols, m.rows, 3);
  const int ch = m.channels();
  if (ch != 1 && ch != 3 && ch != 4)
    throw IoError("unsupported channel count " + std::to_string(ch) + ": " + path.string());
  for (int y = 0; y < m.rows; ++y) {
    const std::uint8_t* row = m.ptr<std::uint8_t>(y);
    for (int x = 0; x < m.cols; ++x) {
      const std::uint8_t* px = row + static_cast<std::ptrdiff_t>(x) * ch;
      if (ch == 1) {
        for (int c = 0; c < 3; ++c) img.at(x, y, c) = px[0] / 255.0f;
      } else {
        // OpenCV decodes to BGR(A).
        img.at(x, y, 0) = px[2] / 255.0f;
        img.at(x, y, 1) = px[1] / 255.0f;
        img.at(x, y, 2) = px[0] / 255.0f;
      }
    }
  }
  return img;
}

void save_png(const Image& img, const fs::path& path) {
  if (img.channels() != 1 && img.channels() != 3)
    throw InvalidArgument("PNG export supports 1 or 3 channels, got " +
                          std::to_string(img.channels()));
  cv::Mat m(img.height(), img.width(), img.channels() == 1 ? CV_8UC1 : CV_8UC3);
  for (int y = 0; y < img.height(); ++y) {
    std::uint8_t* row = m.ptr<std::uint8_t>(y);
    for (int x = 0; x < img.width(); ++x) {
      if (img.channels() == 1) {
        row[x] = to_byte(img.at(x, y, 0));
      } else {
        row[3 * x + 0] = to_byte(img.at(x, y, 2));
        row[3 * x + 1] = to_byte(img.at(x, y, 1));
        row[3 * x + 2] = to_byte(img.at(x, y, 0));
      }
    }
  }
  write_png(m, path);
}

BinaryMask load_mask(const fs::path& path) {
  cv::Mat m = read_8bit(path);
  if (m.channels() != 1) {
    cv::Mat gray;
    cv::extractChannel(m, gray, 0);
    m = gray;
  }
  BinaryMask mask(m.cols, m.rows);
  for (int y = 0; y < m.rows; ++y) {
    const std::uint8_t* row = m.ptr<std::uint8_t>(y);
    for (int x = 0; x < m.cols; ++x) mask.set(x, y, row[x] >= 128);
  }
  return mask;
}

void save_mask(const BinaryMask& mask, const fs::path& path) {
  cv::Mat m(mask.height(), mask.width(), CV_8UC1);
  for (int y = 0; y < mask.height(); ++y) {
    std::uint8_t* row = m.ptr<std::uint8_t>(y);
    for (int x = 0; x < mask.width(); ++x) row[x] = mask.at(x, y) ? 255 : 0;
  }
  write_png(m, path);
}

void save_d7st(const Image& stack, const fs::path& path) {
  if (stack.channels() != 7)
    throw InvalidArgument("D7ST export needs 7 channels, got " + std::to_string(stack.channels()));
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write("D7ST", 4);
  put_le(out, static_cast<std::uint32_t>(stack.width()));
  put_le(out, static_cast<std::uint32_t>(stack.height()));
  for (int c = 0; c < stack.channels(); ++c)
    for (int y = 0; y < stack.height(); ++y)
      for (int x = 0; x < stack.width(); ++x) put_le(out, stack.at(x, y, c));
  if (!out) throw IoError("write failed: " + path.string());
}

Image load_d7st(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[4] = {};
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, "D7ST", 4) != 0)
    throw IoError("not a D7ST file: " + path.string());
  const auto w = static_cast<int>(get_le32(in));
  const auto h = static_cast<int>(get_le32(in));
  Image stack(w, h, 7);
  for (int c = 0; c < 7; ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) stack.at(x, y, c) = std::bit_cast<float>(get_le32(in));
  return stack;
}

}  // namespace dermaprep
