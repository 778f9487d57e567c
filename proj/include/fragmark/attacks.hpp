#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "fragmark/image.hpp"
#include "fragmark/keystream.hpp"
#include "fragmark/scheme.hpp"

namespace fragmark {

// ---------------------------------------------------------------------------
// Collage attack

// Donor index for every block, row-major over the block grid.
struct RegionAssignment {
  int blocks_x = 0;
  int blocks_y = 0;
  std::vector<std::uint32_t> source;
};

// Four quadrants split at the block boundary nearest the image centre:
// 0 = top-left, 1 = top-right, 2 = bottom-left, 3 = bottom-right.
RegionAssignment quadrant_assignment(const BlockGrid& grid);

// Text form: one line per block row, whitespace-separated donor indices.
RegionAssignment parse_assignment(std::string_view text);

// Output block i is donor[assign.source[i]]'s block i, all eight planes.
GrayImage collage(std::span<const GrayImage> donors, const RegionAssignment& assign,
                  int block_side);

// Pixel-level quadrant paste that ignores block boundaries: pixel (x, y) comes
// from donor 0 if x < split_x and y < split_y, donor 1 if x >= split_x and
// y < split_y, donor 2 if x < split_x and y >= split_y, otherwise donor 3.
GrayImage pixel_quadrant_collage(std::span<const GrayImage> donors, int split_x, int split_y);

// ---------------------------------------------------------------------------
// Permutation-key recovery from authenticated images

// (l*b^2)!
boost::multiprecision::cpp_int count_candidates(int l, int b);
double log2_of(const boost::multiprecision::cpp_int& value);

// Candidate spaces above this size need CrackOptions::allow_long.
inline constexpr std::uint64_t kLongSearchThreshold = 10'000'000;
// Largest watermark length whose candidate space is enumerable at all.
inline constexpr int kMaxSearchPositions = 20;

struct CrackOptions {
  int threads = 0;                  // 0 = OpenMP default
  std::size_t screen_blocks = 128;  // blocks of image A used for screening (0 = all)
  std::size_t verify_blocks = 128;  // blocks of image B used for verification (0 = all)
  std::uint64_t chunk = 4096;       // candidates per work unit
  bool allow_long = false;
};

struct CrackResult {
  std::vector<Permutation> survivors;  // lexicographic order
  std::uint64_t tested_count = 0;
  std::uint64_t first_block_passes = 0;
  std::uint64_t screen_survivors = 0;  // after all screened blocks of A
  double elapsed_seconds = 0.0;
};

// Lexicographic rank -> permutation of {0..n-1}.
Permutation unrank_permutation(std::size_t n, std::uint64_t rank);

// What an attacker reads from one authenticated block without any key.
struct BlockObservation {
  std::vector<std::uint8_t> embedded;  // l*b^2 LSB bits as stored
  std::vector<std::uint8_t> msb;       // m'*b^2 authentication-input bits
};

std::vector<BlockObservation> observe_blocks(const GrayImage& img, const Scheme& scheme,
                                             std::size_t limit);

// True if un-permuting the block with pi yields consistent authentication bits.
bool candidate_passes(const BlockObservation& obs, const Scheme& scheme,
                      std::span<const std::uint32_t> pi);

CrackResult crack_permutation(const GrayImage& img_a, const GrayImage& img_b,
                              const SchemeParams& params, const CrackOptions& options = {});
// Single-threaded reference: one std::next_permutation sweep.
CrackResult crack_permutation_serial(const GrayImage& img_a, const GrayImage& img_b,
                                     const SchemeParams& params,
                                     const CrackOptions& options = {});

// Rewrites the listed blocks with the m MSB planes of `new_content`, keeps the
// stored reference bits, recomputes the keyless authentication bits and embeds
// them under pi.
GrayImage forge(const GrayImage& img_auth, const GrayImage& new_content,
                std::span<const std::size_t> blocks, const Scheme& scheme,
                const Permutation& pi);

}  // namespace fragmark
