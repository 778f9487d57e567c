#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>

#include "fragmark/image.hpp"
#include "fragmark/keystream.hpp"

namespace fragmark {

// Embedding mode and coding parameters.
struct SchemeParams {
  int m = 6;    // MSB layers feeding the reference code
  int l = 2;    // LSB layers carrying the watermark
  int b = 2;    // block side
  int La = 2;   // authentication bits per block
  int u = 32;   // subset size of the scrambled MSB stream
  int v = 8;    // reference bits per subset

  bool operator==(const SchemeParams&) const = default;
};

enum class EmbeddingMode { OverlappingFree, Overlapping };

std::string_view mode_name(EmbeddingMode mode) noexcept;

// Parameters checked against a concrete image size, with derived quantities.
struct Scheme {
  SchemeParams params;
  int width = 0;
  int height = 0;
  std::size_t pixel_count = 0;       // N
  std::size_t subsets = 0;           // S = m*N/u
  std::size_t block_count = 0;       // N/b^2
  int m_prime = 0;                   // min(m, 8 - l)
  int watermark_bits = 0;            // l*b^2
  int reference_bits_per_block = 0;  // l*b^2 - La
  int auth_input_bits = 0;           // m'*b^2
  EmbeddingMode mode = EmbeddingMode::OverlappingFree;

  BlockGrid grid() const { return BlockGrid(width, height, params.b); }
};

Scheme validate_params(const SchemeParams& p, int width, int height);

// Built-in parameter families for mode (m, l) and block side b. The two
// b = 2 modes (6,2) and (6,3) and their b = 1 counterparts are fixed
// presets; other modes use the smallest (u, v) with v/u = (l*b^2 - La)/(m*b^2).
SchemeParams default_params(int m, int l, int b);

// `m=..,l=..,b=..,La=..,u=..,v=..` (commas or newlines); missing keys keep the
// value from `base`.
SchemeParams parse_params(std::string_view text, const SchemeParams& base);
std::string format_params(const SchemeParams& p);

// Bits of `planes` for the pixels of one block, pixel-major, written to `out`
// (size b*b*planes.size()).
void read_block_planes(const GrayImage& img, const BlockGrid& grid, std::size_t block_id,
                       std::span<const int> planes, std::span<std::uint8_t> out);
void write_block_planes(GrayImage& img, const BlockGrid& grid, std::size_t block_id,
                        std::span<const int> planes, std::span<const std::uint8_t> bits);

}  // namespace fragmark
