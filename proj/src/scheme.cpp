#include "fragmark/scheme.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <numeric>
#include <string>

#include "fragmark/error.hpp"

namespace fragmark {

std::string_view mode_name(EmbeddingMode mode) noexcept {
  return mode == EmbeddingMode::Overlapping ? "overlapping" : "overlapping-free";
}

Scheme validate_params(const SchemeParams& p, int width, int height) {
  if (p.m < 1 || p.m > 8 || p.l < 1 || p.l > 8)
    throw Error(ErrorCode::ConstraintViolation, "m and l must lie in 1..8");
  if (p.b < 1 || p.u < 1 || p.v < 1 || p.La < 1)
    throw Error(ErrorCode::ConstraintViolation, "b, La, u and v must be positive");
  const BlockGrid grid(width, height, p.b);  // DivisibilityError on misfit

  Scheme s;
  s.params = p;
  s.width = width;
  s.height = height;
  s.pixel_count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  s.block_count = grid.block_count();
  s.watermark_bits = p.l * p.b * p.b;
  if (p.La > s.watermark_bits - 1 || p.La > 256)
    throw Error(ErrorCode::LaOutOfRange, "La=" + std::to_string(p.La) + " outside 1.." +
                                             std::to_string(std::min(s.watermark_bits - 1, 256)));
  s.reference_bits_per_block = s.watermark_bits - p.La;
  s.m_prime = std::min(p.m, 8 - p.l);
  s.auth_input_bits = s.m_prime * p.b * p.b;
  s.mode = p.m + p.l <= 8 ? EmbeddingMode::OverlappingFree : EmbeddingMode::Overlapping;

  const std::size_t msb_bits = static_cast<std::size_t>(p.m) * s.pixel_count;
  if (msb_bits % static_cast<std::size_t>(p.u) != 0)
    throw Error(ErrorCode::DivisibilityError, "u=" + std::to_string(p.u) + " does not divide m*N=" +
                                                  std::to_string(msb_bits));
  if (p.v > p.u) throw Error(ErrorCode::ConstraintViolation, "v must not exceed u");
  s.subsets = msb_bits / static_cast<std::size_t>(p.u);

  const std::size_t produced = static_cast<std::size_t>(p.v) * s.subsets;
  const std::size_t capacity = s.block_count * static_cast<std::size_t>(s.reference_bits_per_block);
  if (produced != capacity)
    throw Error(ErrorCode::ConstraintViolation,
                "v*m*N/u = " + std::to_string(produced) + " but l*N - La*N/b^2 = " + std::to_string(capacity));
  return s;
}

SchemeParams default_params(int m, int l, int b) {
  if (m == 6 && l == 2 && b == 2) return {6, 2, 2, 2, 32, 8};
  if (m == 6 && l == 3 && b == 2) return {6, 3, 2, 2, 48, 20};
  if (m == 6 && l == 2 && b == 1) return {6, 2, 1, 1, 6, 1};
  if (m == 6 && l == 3 && b == 1) return {6, 3, 1, 1, 3, 1};

  SchemeParams p{m, l, b, 2, 1, 1};
  const int cells = b * b;
  p.La = std::max(1, std::min(2, l * cells - 1));
  const int ref = l * cells - p.La;
  const int denom = m * cells;
  if (ref > 0 && denom > 0) {
    const int g = std::gcd(denom, ref);
    p.u = denom / g;
    p.v = ref / g;
  }
  return p;
}

namespace {

int parse_int(std::string_view key, std::string_view value) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw Error(ErrorCode::MalformedParams, "bad value for " + std::string(key) + ": '" + std::string(value) + "'");
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

SchemeParams parse_params(std::string_view text, const SchemeParams& base) {
  SchemeParams p = base;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find_first_of(",\n;", start);
    if (end == std::string_view::npos) end = text.size();
    const auto field = trim(text.substr(start, end - start));
    start = end + 1;
    if (field.empty() || field.front() == '#') continue;
    const auto eq = field.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::MalformedParams, "expected key=value, got '" + std::string(field) + "'");
    const auto key = trim(field.substr(0, eq));
    const int value = parse_int(key, trim(field.substr(eq + 1)));
    if (key == "m") p.m = value;
    else if (key == "l") p.l = value;
    else if (key == "b") p.b = value;
    else if (key == "La") p.La = value;
    else if (key == "u") p.u = value;
    else if (key == "v") p.v = value;
    else throw Error(ErrorCode::MalformedParams, "unknown parameter '" + std::string(key) + "'");
  }
  return p;
}

std::string format_params(const SchemeParams& p) {
  return "m=" + std::to_string(p.m) + ",l=" + std::to_string(p.l) + ",b=" + std::to_string(p.b) +
         ",La=" + std::to_string(p.La) + ",u=" + std::to_string(p.u) + ",v=" + std::to_string(p.v);
}

void read_block_planes(const GrayImage& img, const BlockGrid& grid, std::size_t block_id,
                       std::span<const int> planes, std::span<std::uint8_t> out) {
  const int b = grid.block_side();
  if (block_id >= grid.block_count()) throw Error(ErrorCode::BlockOutOfRange, "block out of range");
  const std::size_t k = planes.size();
  if (out.size() != static_cast<std::size_t>(b) * b * k) throw Error(ErrorCode::LengthMismatch, "block bit buffer size");
  const auto bx = static_cast<int>(block_id % static_cast<std::size_t>(grid.blocks_x()));
  const auto by = static_cast<int>(block_id / static_cast<std::size_t>(grid.blocks_x()));
  std::size_t o = 0;
  for (int dy = 0; dy < b; ++dy) {
    const std::uint8_t* row = img.pixels.data() + static_cast<std::size_t>(by * b + dy) * img.width + bx * b;
    for (int dx = 0; dx < b; ++dx)
      for (std::size_t j = 0; j < k; ++j) out[o++] = (row[dx] >> planes[j]) & 1u;
  }
}

void write_block_planes(GrayImage& img, const BlockGrid& grid, std::size_t block_id,
                        std::span<const int> planes, std::span<const std::uint8_t> bits) {
  const int b = grid.block_side();
  if (block_id >= grid.block_count()) throw Error(ErrorCode::BlockOutOfRange, "block out of range");
  const std::size_t k = planes.size();
  if (bits.size() != static_cast<std::size_t>(b) * b * k) throw Error(ErrorCode::LengthMismatch, "block bit buffer size");
  const auto bx = static_cast<int>(block_id % static_cast<std::size_t>(grid.blocks_x()));
  const auto by = static_cast<int>(block_id / static_cast<std::size_t>(grid.blocks_x()));
  std::size_t o = 0;
  for (int dy = 0; dy < b; ++dy) {
    std::uint8_t* row = img.pixels.data() + static_cast<std::size_t>(by * b + dy) * img.width + bx * b;
    for (int dx = 0; dx < b; ++dx) {
      auto px = row[dx];
      for (std::size_t j = 0; j < k; ++j) {
        const auto mask = static_cast<std::uint8_t>(1u << planes[j]);
        px = static_cast<std::uint8_t>((px & ~mask) | (bits[o++] ? mask : 0));
      }
      row[dx] = px;
    }
  }
}

}  // namespace fragmark
