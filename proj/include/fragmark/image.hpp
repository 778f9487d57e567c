#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace fragmark {

// 8-bit grayscale raster, row-major.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 0);
  GrayImage(int w, int h, std::vector<std::uint8_t> data);

  std::size_t size() const noexcept { return pixels.size(); }
  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }

  bool operator==(const GrayImage&) const = default;
};

// Ordered bit sequence, one byte per bit (0 or 1).
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t n) : bits_(n, 0) {}
  explicit BitString(std::vector<std::uint8_t> bits);

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }
  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  std::uint8_t& operator[](std::size_t i) { return bits_[i]; }

  void push_back(std::uint8_t bit) { bits_.push_back(bit & 1u); }
  void append(std::span<const std::uint8_t> bits);

  std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  std::span<std::uint8_t> bits() noexcept { return bits_; }
  std::span<const std::uint8_t> slice(std::size_t offset, std::size_t count) const;

  // Packs MSB-first into bytes; the final byte is zero-padded.
  std::vector<std::uint8_t> pack() const;

  bool operator==(const BitString&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

BitString operator^(const BitString& a, const BitString& b);

// Square-block tiling of an image; blocks are numbered row-major.
class BlockGrid {
 public:
  BlockGrid(int width, int height, int block_side);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int block_side() const noexcept { return b_; }
  int blocks_x() const noexcept { return width_ / b_; }
  int blocks_y() const noexcept { return height_ / b_; }
  std::size_t block_count() const noexcept {
    return static_cast<std::size_t>(blocks_x()) * static_cast<std::size_t>(blocks_y());
  }

  // Raster pixel indices of a block, row-major inside the block.
  std::vector<std::size_t> block_pixel_indices(std::size_t block_id) const;
  // Same, written into `out` (size b*b) without allocating.
  void block_pixel_indices(std::size_t block_id, std::span<std::size_t> out) const;

 private:
  int width_;
  int height_;
  int b_;
};

// Plane 7 is the MSB. The result is pixel-major: bit for (pixel p, k-th plane)
// lives at p * planes.size() + k.
BitString extract_plane_bits(const GrayImage& img, std::span<const int> planes);

GrayImage replace_plane_bits(const GrayImage& img, std::span<const int> planes,
                             const BitString& bits);

// Descending plane list {7, 6, ..., 8 - count}.
std::vector<int> msb_planes(int count);
// Descending plane list {count - 1, ..., 0}.
std::vector<int> lsb_planes(int count);

// Binary PGM (P5, maxval 255). Comments and arbitrary header whitespace are
// accepted on read; writes use the canonical `P5\n<w> <h>\n255\n` header.
GrayImage load_image(const std::filesystem::path& path);
GrayImage parse_pgm(std::span<const std::uint8_t> bytes);
void save_image(const std::filesystem::path& path, const GrayImage& img);
std::vector<std::uint8_t> encode_pgm(const GrayImage& img);

// Binary PBM (P4); bits are row-major with 1 = black.
std::vector<std::uint8_t> encode_pbm(int width, int height, std::span<const std::uint8_t> bits);
void save_pbm(const std::filesystem::path& path, int width, int height,
              std::span<const std::uint8_t> bits);

}  // namespace fragmark
