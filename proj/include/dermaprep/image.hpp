#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace dermaprep {

// Multi-channel float raster, interleaved (row-major, channels fastest).
// Values are in [0,1] unless an operation states otherwise.
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels, float fill = 0.0f);
  Image(int width, int height, int channels, std::vector<float> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }
  bool empty() const noexcept { return data_.empty(); }

  float& at(int x, int y, int c) noexcept { return data_[index(x, y, c)]; }
  float at(int x, int y, int c) const noexcept { return data_[index(x, y, c)]; }

  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }

  // Single channel as a new 1-channel image.
  Image channel(int c) const;

  bool operator==(const Image&) const = default;

 private:
  std::size_t index(int x, int y, int c) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(channels_) +
           static_cast<std::size_t>(c);
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height, bool fill = false);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return bits_.size(); }

  bool at(int x, int y) const noexcept { return bits_[index(x, y)] != 0; }
  void set(int x, int y, bool v) noexcept { bits_[index(x, y)] = v ? 1 : 0; }
  // Out-of-bounds reads are false.
  bool get_padded(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_ && at(x, y);
  }

  std::span<std::uint8_t> bits() noexcept { return bits_; }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  std::size_t count() const noexcept;
  bool any() const noexcept { return count() != 0; }
  bool same_size(const BinaryMask& o) const noexcept {
    return width_ == o.width_ && height_ == o.height_;
  }
  bool same_size(const Image& img) const noexcept {
    return width_ == img.width() && height_ == img.height();
  }

  bool operator==(const BinaryMask&) const = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_or(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_not(const BinaryMask& a);

// 8-bit PNG/JPEG decode into a 3-channel RGB image, v/255. 16-bit inputs
// are rejected. Throws IoError naming the path.
Image load_image(const std::filesystem::path& path);

// 8-bit PNG encode of a 1- or 3-channel image; values are clamped to [0,1]
// and rounded to the nearest level.
void save_png(const Image& img, const std::filesystem::path& path);

// Masks are 8-bit single-channel PNG: >= 128 decodes as true, written as
// 0 / 255.
BinaryMask load_mask(const std::filesystem::path& path);
void save_mask(const BinaryMask& mask, const std::filesystem::path& path);

// Raw 7-channel stack: "D7ST", u32 width, u32 height, then float32 planes
// in channel-major order, all little-endian.
void save_d7st(const Image& stack, const std::filesystem::path& path);
Image load_d7st(const std::filesystem::path& path);

}  // namespace dermaprep
