#include "fragmark/image.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

#include "fragmark/error.hpp"

namespace fragmark {

GrayImage::GrayImage(int w, int h, std::uint8_t fill)
    : width(w), height(h), pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {
  if (w <= 0 || h <= 0) throw Error(ErrorCode::DimensionMismatch, "image dimensions must be positive");
}

GrayImage::GrayImage(int w, int h, std::vector<std::uint8_t> data)
    : width(w), height(h), pixels(std::move(data)) {
  if (w <= 0 || h <= 0) throw Error(ErrorCode::DimensionMismatch, "image dimensions must be positive");
  if (pixels.size() != static_cast<std::size_t>(w) * static_cast<std::size_t>(h))
    throw Error(ErrorCode::LengthMismatch, "pixel count does not match width*height");
}

BitString::BitString(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto& bit : bits_) bit &= 1u;
}

void BitString::append(std::span<const std::uint8_t> bits) {
  for (auto bit : bits) bits_.push_back(bit & 1u);
}

std::span<const std::uint8_t> BitString::slice(std::size_t offset, std::size_t count) const {
  if (offset > bits_.size() || count > bits_.size() - offset)
    throw Error(ErrorCode::LengthMismatch, "bit slice out of range");
  return std::span<const std::uint8_t>(bits_).subspan(offset, count);
}

std::vector<std::uint8_t> BitString::pack() const {
  std::vector<std::uint8_t> out((bits_.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits_.size(); ++i)
    out[i / 8] |= static_cast<std::uint8_t>(bits_[i] << (7 - i % 8));
  return out;
}

BitString operator^(const BitString& a, const BitString& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::LengthMismatch, "xor of unequal bit strings");
  BitString out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] ^ b[i];
  return out;
}

BlockGrid::BlockGrid(int width, int height, int block_side)
    : width_(width), height_(height), b_(block_side) {
  if (b_ <= 0 || width_ <= 0 || height_ <= 0)
    throw Error(ErrorCode::DivisibilityError, "block side and image size must be positive");
  if (width_ % b_ != 0 || height_ % b_ != 0)
    throw Error(ErrorCode::DivisibilityError,
                "image " + std::to_string(width_) + "x" + std::to_string(height_) +
                    " is not a multiple of block side " + std::to_string(b_));
}

std::vector<std::size_t> BlockGrid::block_pixel_indices(std::size_t block_id) const {
  std::vector<std::size_t> out(static_cast<std::size_t>(b_) * b_);
  block_pixel_indices(block_id, out);
  return out;
}

void BlockGrid::block_pixel_indices(std::size_t block_id, std::span<std::size_t> out) const {
  if (block_id >= block_count())
    throw Error(ErrorCode::BlockOutOfRange, "block " + std::to_string(block_id) + " out of range");
  const auto bx = block_id % static_cast<std::size_t>(blocks_x());
  const auto by = block_id / static_cast<std::size_t>(blocks_x());
  const auto x0 = bx * b_;
  const auto y0 = by * b_;
  std::size_t k = 0;
  for (int dy = 0; dy < b_; ++dy)
    for (int dx = 0; dx < b_; ++dx) out[k++] = (y0 + dy) * width_ + x0 + dx;
}

namespace {

void check_planes(std::span<const int> planes) {
  if (planes.empty()) throw Error(ErrorCode::InvalidPlaneIndex, "plane list is empty");
  unsigned seen = 0;
  for (int plane : planes) {
    if (plane < 0 || plane > 7)
      throw Error(ErrorCode::InvalidPlaneIndex, "plane index " + std::to_string(plane) + " outside 0..7");
    if (seen & (1u << plane))
      throw Error(ErrorCode::InvalidPlaneIndex, "plane index " + std::to_string(plane) + " repeated");
    seen |= 1u << plane;
  }
}

}  // namespace

BitString extract_plane_bits(const GrayImage& img, std::span<const int> planes) {
  check_planes(planes);
  const std::size_t k = planes.size();
  BitString out(img.size() * k);
  auto bits = out.bits();
  for (std::size_t p = 0; p < img.size(); ++p)
    for (std::size_t j = 0; j < k; ++j) bits[p * k + j] = (img.pixels[p] >> planes[j]) & 1u;
  return out;
}

GrayImage replace_plane_bits(const GrayImage& img, std::span<const int> planes, const BitString& bits) {
  check_planes(planes);
  const std::size_t k = planes.size();
  if (bits.size() != img.size() * k)
    throw Error(ErrorCode::LengthMismatch, "expected " + std::to_string(img.size() * k) + " bits, got " +
                                               std::to_string(bits.size()));
  GrayImage out = img;
  for (std::size_t p = 0; p < img.size(); ++p) {
    auto px = out.pixels[p];
    for (std::size_t j = 0; j < k; ++j) {
      const auto mask = static_cast<std::uint8_t>(1u << planes[j]);
      px = static_cast<std::uint8_t>((px & ~mask) | (bits[p * k + j] ? mask : 0));
    }
    out.pixels[p] = px;
  }
  return out;
}

std::vector<int> msb_planes(int count) {
  std::vector<int> planes;
  for (int i = 0; i < count; ++i) planes.push_back(7 - i);
  return planes;
}

std::vector<int> lsb_planes(int count) {
  std::vector<int> planes;
  for (int i = count - 1; i >= 0; --i) planes.push_back(i);
  return planes;
}

// --- Netpbm --------------------------------------------------------------

namespace {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!std::filesystem::exists(path))
      throw Error(ErrorCode::FileNotFound, "no such file: " + path.string());
    throw Error(ErrorCode::Io, "cannot open " + path.string());
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "short write to " + path.string());
}

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  long next_number() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_]))
      throw Error(ErrorCode::MalformedPgm, "expected a number in PGM header");
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_++] - '0');
      if (value > 1'000'000'000L) throw Error(ErrorCode::MalformedPgm, "header value too large");
    }
    return value;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_]))
      throw Error(ErrorCode::MalformedPgm, "missing whitespace before raster");
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 2;
};

}  // namespace

GrayImage parse_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
    throw Error(ErrorCode::MalformedPgm, "not a binary PGM (expected P5 magic)");
  HeaderReader header(bytes);
  const long width = header.next_number();
  const long height = header.next_number();
  const long maxval = header.next_number();
  if (width <= 0 || height <= 0) throw Error(ErrorCode::MalformedPgm, "PGM dimensions must be positive");
  if (maxval != 255) throw Error(ErrorCode::MalformedPgm, "maxval " + std::to_string(maxval) + " != 255");
  const std::size_t offset = header.raster_offset();
  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (bytes.size() < offset || bytes.size() - offset < count)
    throw Error(ErrorCode::MalformedPgm, "truncated PGM raster");
  std::vector<std::uint8_t> pixels(bytes.begin() + static_cast<std::ptrdiff_t>(offset),
                                   bytes.begin() + static_cast<std::ptrdiff_t>(offset + count));
  return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(pixels));
}

GrayImage load_image(const std::filesystem::path& path) { return parse_pgm(read_file(path)); }

std::vector<std::uint8_t> encode_pgm(const GrayImage& img) {
  const std::string header =
      "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.pixels.begin(), img.pixels.end());
  return out;
}

void save_image(const std::filesystem::path& path, const GrayImage& img) { write_file(path, encode_pgm(img)); }

std::vector<std::uint8_t> encode_pbm(int width, int height, std::span<const std::uint8_t> bits) {
  if (bits.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw Error(ErrorCode::LengthMismatch, "PBM bit count does not match dimensions");
  const std::string header = "P4\n" + std::to_string(width) + " " + std::to_string(height) + "\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  const std::size_t row_bytes = (static_cast<std::size_t>(width) + 7) / 8;
  for (int y = 0; y < height; ++y) {
    std::vector<std::uint8_t> row(row_bytes, 0);
    for (int x = 0; x < width; ++x)
      if (bits[static_cast<std::size_t>(y) * width + x]) row[x / 8] |= static_cast<std::uint8_t>(0x80u >> (x % 8));
    out.insert(out.end(), row.begin(), row.end());
  }
  return out;
}

void save_pbm(const std::filesystem::path& path, int width, int height, std::span<const std::uint8_t> bits) {
  write_file(path, encode_pbm(width, height, bits));
}

}  // namespace fragmark
